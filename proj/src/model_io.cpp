#include "functensor/model_io.hpp"

#include "functensor/errors.hpp"

#include <charconv>
#include <map>
#include <sstream>

namespace functensor {

namespace {

std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

class Writer {
public:
    void field(const std::string& key, const std::string& value) {
        out_ << key << ' ' << value << '\n';
    }
    template <class Int>
    void integer(const std::string& key, Int v) {
        out_ << key << ' ' << v << '\n';
    }
    void values(const std::string& key, std::span<const double> v) {
        out_ << key << ' ' << v.size();
        for (double x : v) out_ << ' ' << format_double(x);
        out_ << '\n';
    }
    void indices(const std::string& key, std::span<const std::size_t> v) {
        out_ << key << ' ' << v.size();
        for (std::size_t x : v) out_ << ' ' << x;
        out_ << '\n';
    }
    void matrix(const std::string& key, const Matrix& m) {
        out_ << key << ' ' << m.rows << ' ' << m.cols;
        for (double x : m.data) out_ << ' ' << format_double(x);
        out_ << '\n';
    }
    [[nodiscard]] std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

/// Key -> token list, one entry per line.
class Reader {
public:
    Reader(const std::string& text, std::string origin) : origin_(std::move(origin)) {
        std::istringstream lines(text);
        std::string line;
        bool first = true;
        while (std::getline(lines, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (line.front() == '#') {
                if (line.rfind("# manifest: ", 0) == 0) manifest_ = line.substr(12);
                continue;
            }
            std::istringstream tokens(line);
            std::string key;
            tokens >> key;
            std::vector<std::string> rest;
            for (std::string t; tokens >> t;) rest.push_back(t);
            if (first) {
                if (key != "functensor-model" || rest.size() != 1) {
                    fail("missing 'functensor-model <version>' header");
                }
                if (rest[0] != std::to_string(kModelFormatVersion)) {
                    fail("unsupported format version " + rest[0]);
                }
                first = false;
                continue;
            }
            if (!fields_.emplace(key, std::move(rest)).second) fail("duplicate field '" + key + "'");
        }
        if (first) fail("empty model file");
    }

    [[nodiscard]] const std::string& manifest() const { return manifest_; }
    [[nodiscard]] bool has(const std::string& key) const { return fields_.count(key) != 0; }

    [[nodiscard]] const std::string& text(const std::string& key) const {
        const auto& v = get(key);
        if (v.size() != 1) fail("field '" + key + "' expects one value");
        return v[0];
    }

    template <class Int>
    [[nodiscard]] Int integer(const std::string& key) const {
        return parse<Int>(key, text(key));
    }

    [[nodiscard]] std::vector<double> values(const std::string& key) const {
        const auto& v = get(key);
        const auto n = count(key, v, 0);
        if (v.size() != n + 1) fail("field '" + key + "' has the wrong number of values");
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = parse<double>(key, v[i + 1]);
        return out;
    }

    [[nodiscard]] std::vector<std::size_t> indices(const std::string& key) const {
        const auto& v = get(key);
        const auto n = count(key, v, 0);
        if (v.size() != n + 1) fail("field '" + key + "' has the wrong number of values");
        std::vector<std::size_t> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = parse<std::size_t>(key, v[i + 1]);
        return out;
    }

    [[nodiscard]] Matrix matrix(const std::string& key) const {
        const auto& v = get(key);
        Matrix m(count(key, v, 0), count(key, v, 1));
        if (v.size() != m.data.size() + 2) fail("field '" + key + "' has the wrong number of values");
        for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = parse<double>(key, v[i + 2]);
        return m;
    }

    [[noreturn]] void fail(const std::string& what) const { throw DataError(origin_ + ": " + what); }

private:
    const std::vector<std::string>& get(const std::string& key) const {
        auto it = fields_.find(key);
        if (it == fields_.end()) fail("missing field '" + key + "'");
        return it->second;
    }

    std::size_t count(const std::string& key, const std::vector<std::string>& v,
                      std::size_t pos) const {
        if (v.size() <= pos) fail("field '" + key + "' is truncated");
        return parse<std::size_t>(key, v[pos]);
    }

    template <class T>
    T parse(const std::string& key, const std::string& token) const {
        T out{};
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
        if (ec != std::errc() || ptr != token.data() + token.size()) {
            fail("field '" + key + "': cannot parse '" + token + "'");
        }
        return out;
    }

    std::string origin_;
    std::string manifest_;
    std::map<std::string, std::vector<std::string>> fields_;
};

void write_functional(Writer& w, const FunctionalModel& m) {
    w.integer("rank", m.rank);
    w.integer("dim", m.dim);
    w.integer("dof_index", m.dof_index);
    w.field("precision", m.bases[0].precision == Precision::Free ? "free" : "factored");
    if (m.kind == ModelKind::Tucker) {
        w.values("core", m.core.values());
    } else {
        w.values("weights", m.weights);
    }
    for (std::size_t i = 0; i < 3; ++i) {
        const std::string prefix = "basis" + std::to_string(i);
        w.values(prefix + ".centers", m.bases[i].centers);
        w.values(prefix + ".shape", m.bases[i].shape);
    }
}

FunctionalModel read_functional(const Reader& r, ModelKind kind) {
    FunctionalModel m;
    m.kind = kind;
    m.rank = r.integer<std::size_t>("rank");
    m.dim = r.integer<std::size_t>("dim");
    m.dof_index = r.integer<std::size_t>("dof_index");
    const std::string& precision = r.text("precision");
    if (precision != "free" && precision != "factored") r.fail("unknown precision '" + precision + "'");
    if (kind == ModelKind::Tucker) {
        try {
            m.core = DenseTensor({m.rank, m.rank, m.rank}, r.values("core"));
        } catch (const ShapeError& e) {
            r.fail(e.what());
        }
    } else {
        m.weights = r.values("weights");
    }
    for (std::size_t i = 0; i < 3; ++i) {
        const std::string prefix = "basis" + std::to_string(i);
        auto& b = m.bases[i];
        b.rank = m.rank;
        b.dim = m.dim;
        b.precision = precision == "free" ? Precision::Free : Precision::Factored;
        b.centers = r.values(prefix + ".centers");
        b.shape = r.values(prefix + ".shape");
    }
    try {
        m.validate();
    } catch (const ShapeError& e) {
        r.fail(e.what());
    }
    return m;
}

}  // namespace

std::string ModelFile::kind_tag() const {
    if (const auto* f = std::get_if<FunctionalModel>(&model)) return std::string(to_string(f->kind));
    if (std::holds_alternative<LinearModel>(model)) return "linear";
    return "rbf-net";
}

Matrix ModelFile::predict(const TrajectoryDataset& ds) const {
    if (ds.dof != dof) {
        throw ShapeError("model expects " + std::to_string(dof) + " joints, data has " +
                         std::to_string(ds.dof));
    }
    if (const auto* f = std::get_if<FunctionalModel>(&model)) {
        const auto y = functensor::predict(*f, {ds.positions, ds.velocities, ds.accelerations});
        Matrix out(y.size(), 1);
        out.data = y;
        return out;
    }
    const Matrix x = ds.inputs();
    if (const auto* lin = std::get_if<LinearModel>(&model)) return lin->predict(x);
    return std::get<RbfNetwork>(model).predict(x);
}

std::string serialize_model(const ModelFile& file) {
    Writer w;
    w.integer("functensor-model", kModelFormatVersion);
    w.field("kind", file.kind_tag());
    w.integer("split_seed", file.split_seed);
    w.integer("joints", file.dof);
    w.integer("dataset_size", file.dataset_size);
    w.indices("channels", file.channels);
    w.field("standardize", file.standardizer.standardize_inputs ? "true" : "false");
    w.values("input_mean", file.standardizer.input_mean);
    w.values("input_std", file.standardizer.input_std);
    w.values("target_variance", file.standardizer.target_variance);
    w.field("standardizer_digest", file.standardizer.digest());
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, FunctionalModel>) {
                write_functional(w, m);
            } else if constexpr (std::is_same_v<T, LinearModel>) {
                w.matrix("linear.weights", m.weights);
                w.values("linear.bias", m.bias);
            } else {
                w.matrix("rbf.centers", m.centers);
                w.values("rbf.width_roots", m.width_roots);
                w.matrix("rbf.weights", m.weights);
            }
        },
        file.model);
    std::string body = w.str();
    if (!file.manifest.empty()) {
        // Manifest goes right after the header line.
        const auto eol = body.find('\n');
        body.insert(eol + 1, "# manifest: " + file.manifest + "\n");
    }
    return body;
}

ModelFile parse_model(const std::string& text, const std::string& origin) {
    Reader r(text, origin);
    ModelFile f;
    f.manifest = r.manifest();
    f.split_seed = r.integer<std::uint64_t>("split_seed");
    f.dof = r.integer<std::size_t>("joints");
    f.dataset_size = r.integer<std::size_t>("dataset_size");
    f.channels = r.indices("channels");
    const std::string& standardize = r.text("standardize");
    f.standardizer.standardize_inputs = standardize == "true";
    f.standardizer.input_mean = r.values("input_mean");
    f.standardizer.input_std = r.values("input_std");
    f.standardizer.target_variance = r.values("target_variance");
    if (f.standardizer.input_mean.size() != 3 * f.dof ||
        f.standardizer.input_std.size() != 3 * f.dof) {
        r.fail("standardizer does not match joint count");
    }
    if (r.text("standardizer_digest") != f.standardizer.digest()) {
        r.fail("standardizer digest mismatch");
    }

    const std::string& kind = r.text("kind");
    if (kind == "tucker" || kind == "parafac") {
        auto m = read_functional(r, kind == "tucker" ? ModelKind::Tucker : ModelKind::Parafac);
        if (m.dim != f.dof) r.fail("model dim does not match joint count");
        f.model = std::move(m);
    } else if (kind == "linear") {
        LinearModel m{r.matrix("linear.weights"), r.values("linear.bias")};
        if (m.weights.cols != 3 * f.dof || m.bias.size() != m.weights.rows) {
            r.fail("linear model shape mismatch");
        }
        f.model = std::move(m);
    } else if (kind == "rbf-net") {
        RbfNetwork m{r.matrix("rbf.centers"), r.values("rbf.width_roots"), r.matrix("rbf.weights")};
        if (m.centers.cols != 3 * f.dof || m.width_roots.size() != m.centers.rows ||
            m.weights.rows != m.centers.rows) {
            r.fail("rbf-net shape mismatch");
        }
        f.model = std::move(m);
    } else {
        r.fail("unknown model kind '" + kind + "'");
    }

    std::size_t outputs = 1;
    if (const auto* lin = std::get_if<LinearModel>(&f.model)) outputs = lin->weights.rows;
    if (const auto* net = std::get_if<RbfNetwork>(&f.model)) outputs = net->weights.cols;
    if (outputs != f.channels.size()) r.fail("channel list does not match model outputs");
    for (std::size_t ch : f.channels) {
        if (ch >= f.standardizer.target_variance.size()) r.fail("channel index out of range");
    }
    return f;
}

void save_model(const ModelFile& file, const std::filesystem::path& path) {
    write_file_atomic(path, serialize_model(file));
}

ModelFile load_model(const std::filesystem::path& path) {
    return parse_model(read_text_file(path), path.string());
}

}  // namespace functensor
