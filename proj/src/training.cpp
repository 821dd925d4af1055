#include "functensor/training.hpp"

#include <sstream>

namespace functensor {

void TrainConfig::validate() const {
    if (rank == 0) throw ConfigError("rank must be >= 1");
    if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
    if (max_epochs == 0) throw ConfigError("max_epochs must be >= 1");
    if (threads == 0) throw ConfigError("threads must be >= 1");
    if (ridge < 0.0) throw ConfigError("ridge must be >= 0");
    adam().validate();
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t channel, std::uint64_t purpose) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(channel), static_cast<std::uint32_t>(purpose)};
    return std::mt19937_64(seq);
}

std::string history_to_tsv(const TrainHistory& history) {
    std::ostringstream out;
    out.precision(17);
    out << "epoch\ttrain_cost\tval_nmse\tseconds\n";
    for (const auto& e : history.epochs) {
        out << e.epoch << '\t' << e.train_cost << '\t' << e.val_nmse << '\t' << e.seconds << '\n';
    }
    return out.str();
}

}  // namespace functensor
