#include "functensor/config.hpp"

#include "functensor/errors.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace functensor {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
    T out{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ConfigError("config key '" + std::string(key) + "': cannot parse '" +
                          std::string(value) + "'");
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("config key '" + std::string(key) + "': expected a boolean, got '" +
                      std::string(value) + "'");
}

std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

}  // namespace

std::string digest_hex(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    for (int i = 15; i >= 0; --i) {
        buf[i] = "0123456789abcdef"[h & 0xf];
        h >>= 4;
    }
    buf[16] = '\0';
    return buf;
}

TrainConfig parse_train_config(std::string_view text, TrainConfig cfg) {
    std::istringstream lines{std::string(text)};
    std::string raw;
    while (std::getline(lines, raw)) {
        std::string_view line = raw;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line without '=': " + std::string(line));
        }
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));

        if (key == "rank") cfg.rank = parse_number<std::size_t>(key, value);
        else if (key == "learning_rate") cfg.learning_rate = parse_number<double>(key, value);
        else if (key == "batch_size") cfg.batch_size = parse_number<std::size_t>(key, value);
        else if (key == "max_epochs") cfg.max_epochs = parse_number<std::size_t>(key, value);
        else if (key == "patience") cfg.patience = parse_number<std::size_t>(key, value);
        else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
        else if (key == "adam_beta1") cfg.adam_beta1 = parse_number<double>(key, value);
        else if (key == "adam_beta2") cfg.adam_beta2 = parse_number<double>(key, value);
        else if (key == "adam_eps") cfg.adam_eps = parse_number<double>(key, value);
        else if (key == "ridge") cfg.ridge = parse_number<double>(key, value);
        else if (key == "threads") cfg.threads = parse_number<std::size_t>(key, value);
        else if (key == "free_precision")
            cfg.precision = parse_bool(key, value) ? Precision::Free : Precision::Factored;
        else throw ConfigError("unknown config key '" + std::string(key) + "'");
    }
    cfg.validate();
    return cfg;
}

TrainConfig load_train_config(const std::filesystem::path& path, TrainConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_train_config(ss.str(), base);
}

std::string train_config_to_text(const TrainConfig& cfg) {
    std::ostringstream out;
    out << "rank=" << cfg.rank << '\n'
        << "learning_rate=" << format_double(cfg.learning_rate) << '\n'
        << "batch_size=" << cfg.batch_size << '\n'
        << "max_epochs=" << cfg.max_epochs << '\n'
        << "patience=" << cfg.patience << '\n'
        << "seed=" << cfg.seed << '\n'
        << "adam_beta1=" << format_double(cfg.adam_beta1) << '\n'
        << "adam_beta2=" << format_double(cfg.adam_beta2) << '\n'
        << "adam_eps=" << format_double(cfg.adam_eps) << '\n'
        << "ridge=" << format_double(cfg.ridge) << '\n'
        << "free_precision=" << (cfg.precision == Precision::Free ? "true" : "false") << '\n';
    return out.str();
}

}  // namespace functensor
