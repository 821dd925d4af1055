#include "functensor/adam.hpp"

#include "functensor/errors.hpp"

#include <cmath>

namespace functensor {

void AdamConfig::validate() const {
    if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
        throw ConfigError("adam betas must lie in (0, 1)");
    }
    if (!(eps > 0.0)) throw ConfigError("adam eps must be > 0");
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
}

AdamState AdamState::for_blocks(std::span<const std::span<double>> params) {
    AdamState s;
    for (const auto& p : params) {
        s.first_moment.emplace_back(p.size(), 0.0);
        s.second_moment.emplace_back(p.size(), 0.0);
    }
    return s;
}

void adam_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads, AdamState& state,
               const AdamConfig& cfg) {
    if (params.size() != grads.size() || params.size() != state.first_moment.size() ||
        params.size() != state.second_moment.size()) {
        throw ShapeError("adam_step: parameter, gradient and state block counts differ");
    }
    for (std::size_t b = 0; b < params.size(); ++b) {
        if (params[b].size() != grads[b].size() || params[b].size() != state.first_moment[b].size() ||
            params[b].size() != state.second_moment[b].size()) {
            throw ShapeError("adam_step: block shape mismatch");
        }
    }

    ++state.step;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(cfg.beta1, t);
    const double correction2 = 1.0 - std::pow(cfg.beta2, t);

    for (std::size_t b = 0; b < params.size(); ++b) {
        auto theta = params[b];
        auto g = grads[b];
        auto& m = state.first_moment[b];
        auto& v = state.second_moment[b];
        for (std::size_t i = 0; i < theta.size(); ++i) {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            const double m_hat = m[i] / correction1;
            const double v_hat = v[i] / correction2;
            theta[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.eps);
        }
    }
}

}  // namespace functensor
