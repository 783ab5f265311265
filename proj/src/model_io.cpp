#include "uwbaoa/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <type_traits>

#include "uwbaoa/errors.hpp"

namespace uwbaoa {

static_assert(std::endian::native == std::endian::little, "model files are written in host byte order");

namespace {

constexpr char kMagic[8] = {'U', 'W', 'B', 'A', 'O', 'A', 'M', 'D'};
// Upper bound on any element count read from a file; keeps corrupt headers
// from triggering huge allocations before the contents are checked.
constexpr std::uint64_t kMaxCount = 1u << 26;

class Writer {
public:
    template <class T>
    void put(T v) {
        static_assert(std::is_trivially_copyable_v<T>);
        char buf[sizeof(T)];
        std::memcpy(buf, &v, sizeof(T));
        out_.append(buf, sizeof(T));
    }
    void u8(bool v) { put<std::uint8_t>(v ? 1 : 0); }
    void u32(std::size_t v) { put(static_cast<std::uint32_t>(v)); }
    void f64(double v) { put(v); }
    void doubles(const double* p, std::size_t n) { out_.append(reinterpret_cast<const char*>(p), n * sizeof(double)); }
    std::string& bytes() { return out_; }

private:
    std::string out_;
};

class Reader {
public:
    explicit Reader(std::string_view bytes) : in_(bytes) {}

    template <class T>
    T get() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, in_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    bool u8() {
        const auto v = get<std::uint8_t>();
        if (v > 1) throw ModelLoadError("corrupt model file: bad boolean at offset " + std::to_string(pos_ - 1));
        return v == 1;
    }
    std::uint32_t count() {
        const auto v = get<std::uint32_t>();
        if (v > kMaxCount) throw ModelLoadError("corrupt model file: implausible count " + std::to_string(v));
        return v;
    }
    double f64() { return get<double>(); }
    void doubles(double* p, std::size_t n) {
        need(n * sizeof(double));
        std::memcpy(p, in_.data() + pos_, n * sizeof(double));
        pos_ += n * sizeof(double);
    }
    bool done() const { return pos_ == in_.size(); }

private:
    void need(std::size_t n) const {
        if (in_.size() - pos_ < n) throw ModelLoadError("truncated model file");
    }
    std::string_view in_;
    std::size_t pos_ = 0;
};

void put_standardizer(Writer& w, const Standardizer& s) {
    w.f64(s.mean);
    w.f64(s.std);
    w.u8(s.degenerate);
}
Standardizer get_standardizer(Reader& r) {
    Standardizer s;
    s.mean = r.f64();
    s.std = r.f64();
    s.degenerate = r.u8();
    return s;
}
void put_minmax(Writer& w, const MinMaxScaler& s) {
    w.f64(s.min);
    w.f64(s.max);
    w.u8(s.degenerate);
}
MinMaxScaler get_minmax(Reader& r) {
    MinMaxScaler s;
    s.min = r.f64();
    s.max = r.f64();
    s.degenerate = r.u8();
    return s;
}

template <class E>
E get_enum(Reader& r, std::uint32_t max_value, const char* what) {
    const auto v = r.get<std::uint32_t>();
    if (v > max_value) throw ModelLoadError(std::string("corrupt model file: bad ") + what);
    return static_cast<E>(v);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string serialize_model(const CorrectionModel& m) {
    m.validate();
    Writer w;
    w.bytes().append(kMagic, sizeof(kMagic));
    w.put(kModelFormatVersion);
    w.u32(static_cast<std::uint32_t>(m.kind));
    w.u32(static_cast<std::uint32_t>(m.task));

    const FeatureSpec& f = m.features;
    w.put<std::int32_t>(f.window_before);
    w.put<std::int32_t>(f.window_after);
    for (bool b : {f.flags.pdoa, f.flags.tdoa, f.flags.twr_distance, f.flags.power_ratio, f.flags.cir_a, f.flags.cir_b})
        w.u8(b);
    put_standardizer(w, f.pdoa);
    put_standardizer(w, f.tdoa);
    put_standardizer(w, f.power_ratio);
    put_minmax(w, f.twr_distance);
    put_minmax(w, f.true_distance);

    w.f64(m.carrier_frequency);
    w.f64(m.antenna_spacing);
    w.f64(m.speed_of_light);

    w.f64(m.split.train_fraction);
    w.u32(static_cast<std::uint32_t>(m.split.stratify_by));
    w.put<std::uint64_t>(m.split.seed);
    w.u8(m.split.group_by_pose);

    if (m.kind == ModelKind::mlp) {
        w.u32(static_cast<std::uint32_t>(m.mlp.output_kind()));
        w.u32(m.mlp.layers().size());
        for (const DenseLayer& l : m.mlp.layers()) {
            w.u32(static_cast<std::size_t>(l.weights.rows()));
            w.u32(static_cast<std::size_t>(l.weights.cols()));
            w.f64(l.dropout);
            w.doubles(l.weights.data(), static_cast<std::size_t>(l.weights.size()));
            w.doubles(l.bias.data(), static_cast<std::size_t>(l.bias.size()));
        }
    } else {
        w.u32(m.gbt.size());
        for (const GbtModel& g : m.gbt) {
            w.f64(g.base_prediction);
            w.f64(g.learning_rate);
            w.put<std::int32_t>(g.max_depth);
            w.put<std::int32_t>(g.n_estimators);
            w.put<std::int32_t>(g.n_features);
            w.u32(g.trees.size());
            for (const RegressionTree& t : g.trees) {
                w.u32(t.nodes.size());
                for (const TreeNode& n : t.nodes) {
                    w.put<std::int32_t>(n.feature);
                    w.f64(n.threshold);
                    w.put<std::int32_t>(n.left);
                    w.put<std::int32_t>(n.right);
                    w.f64(n.value);
                }
            }
        }
    }

    w.u32(m.zone_polynomials.size());
    for (const ZonePolynomial& p : m.zone_polynomials) {
        w.u32(static_cast<std::uint32_t>(p.zone));
        w.f64(p.lo);
        w.f64(p.hi);
        w.u32(p.coefficients.size());
        w.doubles(p.coefficients.data(), p.coefficients.size());
    }

    const std::uint64_t checksum = fnv1a64(w.bytes());
    w.put(checksum);
    return std::move(w.bytes());
}

CorrectionModel deserialize_model(std::string_view bytes) {
    if (bytes.size() < sizeof(kMagic) + sizeof(std::uint32_t) + sizeof(std::uint64_t))
        throw ModelLoadError("truncated model file");
    if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) throw ModelLoadError("not a model file (bad magic)");
    std::uint32_t version = 0;
    std::memcpy(&version, bytes.data() + sizeof(kMagic), sizeof(version));
    if (version != kModelFormatVersion)
        throw ModelLoadError("unsupported model format version " + std::to_string(version) + " (expected " +
                             std::to_string(kModelFormatVersion) + ")");
    const std::string_view body = bytes.substr(0, bytes.size() - sizeof(std::uint64_t));
    std::uint64_t stored = 0;
    std::memcpy(&stored, bytes.data() + body.size(), sizeof(stored));
    if (fnv1a64(body) != stored) throw ModelLoadError("model file checksum mismatch (corrupt or truncated)");

    Reader r(body.substr(sizeof(kMagic) + sizeof(std::uint32_t)));
    CorrectionModel m;
    m.kind = get_enum<ModelKind>(r, 1, "model kind");
    m.task = get_enum<ModelTask>(r, 1, "model task");

    FeatureSpec& f = m.features;
    f.window_before = r.get<std::int32_t>();
    f.window_after = r.get<std::int32_t>();
    if (f.window_before < 0 || f.window_after < 0 || f.window_before + f.window_after >= kCirLength)
        throw ModelLoadError("corrupt model file: bad CIR window");
    f.flags.pdoa = r.u8();
    f.flags.tdoa = r.u8();
    f.flags.twr_distance = r.u8();
    f.flags.power_ratio = r.u8();
    f.flags.cir_a = r.u8();
    f.flags.cir_b = r.u8();
    f.pdoa = get_standardizer(r);
    f.tdoa = get_standardizer(r);
    f.power_ratio = get_standardizer(r);
    f.twr_distance = get_minmax(r);
    f.true_distance = get_minmax(r);

    m.carrier_frequency = r.f64();
    m.antenna_spacing = r.f64();
    m.speed_of_light = r.f64();

    m.split.train_fraction = r.f64();
    m.split.stratify_by = get_enum<Stratify>(r, 2, "stratification");
    m.split.seed = r.get<std::uint64_t>();
    m.split.group_by_pose = r.u8();

    if (m.kind == ModelKind::mlp) {
        const auto kind = get_enum<OutputKind>(r, 1, "output kind");
        const auto n_layers = r.count();
        std::vector<DenseLayer> layers(n_layers);
        for (DenseLayer& l : layers) {
            const auto rows = r.count();
            const auto cols = r.count();
            if (static_cast<std::uint64_t>(rows) * cols > kMaxCount)
                throw ModelLoadError("corrupt model file: layer too large");
            l.dropout = r.f64();
            l.weights.resize(rows, cols);
            r.doubles(l.weights.data(), static_cast<std::size_t>(l.weights.size()));
            l.bias.resize(rows);
            r.doubles(l.bias.data(), rows);
        }
        try {
            m.mlp = MlpModel(std::move(layers), kind);
        } catch (const std::invalid_argument& e) {
            throw ModelLoadError(std::string("corrupt model file: ") + e.what());
        }
    } else {
        m.gbt.resize(r.count());
        for (GbtModel& g : m.gbt) {
            g.base_prediction = r.f64();
            g.learning_rate = r.f64();
            g.max_depth = r.get<std::int32_t>();
            g.n_estimators = r.get<std::int32_t>();
            g.n_features = r.get<std::int32_t>();
            g.trees.resize(r.count());
            for (RegressionTree& t : g.trees) {
                t.nodes.resize(r.count());
                for (TreeNode& n : t.nodes) {
                    n.feature = r.get<std::int32_t>();
                    n.threshold = r.f64();
                    n.left = r.get<std::int32_t>();
                    n.right = r.get<std::int32_t>();
                    n.value = r.f64();
                }
            }
        }
    }

    m.zone_polynomials.resize(r.count());
    for (ZonePolynomial& p : m.zone_polynomials) {
        p.zone = get_enum<Zone>(r, 3, "zone");
        p.lo = r.f64();
        p.hi = r.f64();
        p.coefficients.resize(r.count());
        r.doubles(p.coefficients.data(), p.coefficients.size());
    }
    if (!r.done()) throw ModelLoadError("corrupt model file: trailing bytes");

    try {
        m.validate();
    } catch (const std::exception& e) {
        throw ModelLoadError(std::string("inconsistent model file: ") + e.what());
    }
    return m;
}

std::size_t save_model(const CorrectionModel& model, const std::filesystem::path& path) {
    const std::string bytes = serialize_model(model);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("failed writing " + path.string());
    return bytes.size();
}

CorrectionModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelLoadError("cannot open model file " + path.string());
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_model(bytes);
}

}  // namespace uwbaoa
