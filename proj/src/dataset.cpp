#include "uwbaoa/dataset.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <tuple>

#include <boost/archive/iterators/base64_from_binary.hpp>
#include <boost/archive/iterators/binary_from_base64.hpp>
#include <boost/archive/iterators/transform_width.hpp>
#include "json.hpp"

#include "uwbaoa/errors.hpp"
#include "uwbaoa/zone.hpp"

namespace uwbaoa {

static_assert(std::endian::native == std::endian::little, "canonical CIR payload assumes little-endian host");

// ---------------------------------------------------------------- manifest

std::size_t DatasetManifest::dropped_count() const {
    std::size_t n = 0;
    for (const auto& [name, count] : filter_counts) n += count;
    return n;
}

std::string DatasetManifest::to_json() const {
    nlohmann::ordered_json j;
    j["record_count"] = record_count;
    j["kept_count"] = kept_count;
    j["filter_counts"] = filter_counts;
    j["split_seed"] = split_seed;
    j["source"] = source == DatasetSource::synthetic ? "synthetic" : "imported";
    return j.dump(2) + "\n";
}

DatasetManifest DatasetManifest::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    DatasetManifest m;
    m.record_count = j.at("record_count").get<std::size_t>();
    m.kept_count = j.at("kept_count").get<std::size_t>();
    m.filter_counts = j.at("filter_counts").get<std::map<std::string, std::size_t>>();
    m.split_seed = j.at("split_seed").get<std::uint64_t>();
    const auto src = j.at("source").get<std::string>();
    if (src == "synthetic") {
        m.source = DatasetSource::synthetic;
    } else if (src == "imported") {
        m.source = DatasetSource::imported;
    } else {
        throw std::invalid_argument("unknown dataset source '" + src + "'");
    }
    return m;
}

// ---------------------------------------------------------------- filters

FilterResult apply_quality_filters(std::span<const MeasurementRecord> records,
                                   const FilterConfig& config) {
    FilterResult out;
    out.manifest.record_count = records.size();
    out.manifest.filter_counts[kFilterTdoaMax] = 0;
    out.manifest.filter_counts[kFilterTwrMin] = 0;
    for (const MeasurementRecord& r : records) {
        if (!(std::abs(r.tdoa) <= config.tdoa_max)) {
            ++out.manifest.filter_counts[kFilterTdoaMax];
        } else if (!(twr_raw_ticks(r.twr) >= config.twr_min_raw)) {
            ++out.manifest.filter_counts[kFilterTwrMin];
        } else {
            out.kept.push_back(r);
        }
    }
    out.manifest.kept_count = out.kept.size();
    return out;
}

// ---------------------------------------------------------------- split

Split split(std::span<const MeasurementRecord> records, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw std::invalid_argument("train_fraction must lie in (0, 1)");
    if (records.empty()) throw std::invalid_argument("cannot split an empty dataset");

    // stratum key -> record indices, in first-seen order
    std::vector<std::vector<std::size_t>> strata;
    std::map<double, std::size_t> stratum_of_key;
    for (std::size_t i = 0; i < records.size(); ++i) {
        double key = 0.0;
        switch (spec.stratify_by) {
            case Stratify::none: key = 0.0; break;
            case Stratify::angle_zone: key = static_cast<double>(zone_of(records[i].true_aoa)); break;
            case Stratify::distance: key = records[i].true_distance; break;
        }
        auto [it, inserted] = stratum_of_key.try_emplace(key, strata.size());
        if (inserted) strata.emplace_back();
        strata[it->second].push_back(i);
    }

    // Largest-remainder allocation of the train quota across strata.
    const auto n_train = static_cast<std::size_t>(
        std::llround(spec.train_fraction * static_cast<double>(records.size())));
    std::vector<std::size_t> quota(strata.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t s = 0; s < strata.size(); ++s) {
        const double share = spec.train_fraction * static_cast<double>(strata[s].size());
        quota[s] = static_cast<std::size_t>(std::floor(share));
        assigned += quota[s];
        remainders.emplace_back(share - std::floor(share), s);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; assigned < n_train && k < remainders.size(); ++k) {
        ++quota[remainders[k].second];
        ++assigned;
    }

    std::mt19937_64 rng(spec.seed);
    Split out;
    for (std::size_t s = 0; s < strata.size(); ++s) {
        // group by pose (or singletons), shuffle groups, fill quota in order
        std::vector<std::vector<std::size_t>> groups;
        if (spec.group_by_pose) {
            std::map<std::int64_t, std::size_t> group_of_pose;
            for (std::size_t i : strata[s]) {
                auto [it, inserted] = group_of_pose.try_emplace(records[i].pose_id, groups.size());
                if (inserted) groups.emplace_back();
                groups[it->second].push_back(i);
            }
        } else {
            for (std::size_t i : strata[s]) groups.push_back({i});
        }
        std::shuffle(groups.begin(), groups.end(), rng);
        std::size_t taken = 0;
        for (const auto& g : groups) {
            for (std::size_t i : g) {
                if (taken < quota[s]) {
                    out.train.push_back(i);
                    ++taken;
                } else {
                    out.test.push_back(i);
                }
            }
        }
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

std::vector<MeasurementRecord> select(std::span<const MeasurementRecord> records,
                                      std::span<const std::size_t> indices) {
    std::vector<MeasurementRecord> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) out.push_back(records[i]);
    return out;
}

// ---------------------------------------------------------------- canonical format

namespace {

constexpr const char* kVersionLine = "# uwbaoa-dataset v1";

const std::vector<std::string>& canonical_columns() {
    static const std::vector<std::string> cols = {
        "pose_id",        "repetition",        "true_aoa_deg",     "true_distance_m",
        "pdoa_deg",       "tdoa_s",            "round_trip_s",     "reply_s",
        "responder_drift", "antenna_delay_s",  "distance_estimate_m", "fp_power_ratio",
        "flags",          "cir_sample_period_s", "cir_a_fp",       "cir_b_fp",
        "cir_a",          "cir_b",
    };
    return cols;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <class Int>
std::string format_int(Int v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string base64_encode(const std::vector<unsigned char>& bytes) {
    using namespace boost::archive::iterators;
    using It = base64_from_binary<transform_width<const unsigned char*, 6, 8>>;
    std::string out(It(bytes.data()), It(bytes.data() + bytes.size()));
    out.append((3 - bytes.size() % 3) % 3, '=');
    return out;
}

std::vector<unsigned char> base64_decode(std::string text) {
    using namespace boost::archive::iterators;
    using It = transform_width<binary_from_base64<std::string::const_iterator>, 8, 6>;
    if (text.size() % 4 != 0) throw std::invalid_argument("base64 length not a multiple of 4");
    std::size_t pad = 0;
    while (!text.empty() && pad < 2 && text[text.size() - 1 - pad] == '=') ++pad;
    std::replace(text.end() - static_cast<std::ptrdiff_t>(pad), text.end(), '=', 'A');
    std::vector<unsigned char> out;
    try {
        out.assign(It(text.cbegin()), It(text.cend()));
    } catch (const std::exception&) {
        throw std::invalid_argument("invalid base64 payload");
    }
    out.resize(text.size() / 4 * 3 - pad);
    return out;
}

std::string encode_cir(const Cir& cir) {
    std::vector<unsigned char> bytes(cir.samples.size() * 2 * sizeof(double));
    std::memcpy(bytes.data(), cir.samples.data(), bytes.size());
    return base64_encode(bytes);
}

std::vector<std::complex<double>> decode_cir(const std::string& text) {
    const auto bytes = base64_decode(text);
    if (bytes.size() != static_cast<std::size_t>(kCirLength) * 2 * sizeof(double))
        throw std::invalid_argument("CIR payload must hold 512 complex float64 samples");
    std::vector<std::complex<double>> samples(kCirLength);
    std::memcpy(samples.data(), bytes.data(), bytes.size());
    return samples;
}

std::vector<std::string> split_fields(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delim, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

template <class T>
bool parse_number(const std::string& text, T& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

}  // namespace

void write_records(std::span<const MeasurementRecord> records, std::ostream& out) {
    out << kVersionLine << '\n';
    const auto& cols = canonical_columns();
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "\t" : "") << cols[c];
    out << '\n';
    for (const MeasurementRecord& r : records) {
        out << format_int(r.pose_id) << '\t' << format_int(r.repetition) << '\t'
            << format_double(r.true_aoa.degrees()) << '\t' << format_double(r.true_distance) << '\t'
            << format_double(r.pdoa.degrees()) << '\t' << format_double(r.tdoa) << '\t'
            << format_double(r.twr.round_trip_time) << '\t' << format_double(r.twr.reply_time) << '\t'
            << format_double(r.twr.responder_drift) << '\t' << format_double(r.twr.antenna_delay) << '\t'
            << format_double(r.distance_estimate) << '\t' << format_double(r.first_path_power_ratio)
            << '\t' << format_int(r.flags) << '\t' << format_double(r.cir_a.sample_period) << '\t'
            << format_int(r.cir_a.first_path_index) << '\t' << format_int(r.cir_b.first_path_index)
            << '\t' << encode_cir(r.cir_a) << '\t' << encode_cir(r.cir_b) << '\n';
    }
}

void write_records(std::span<const MeasurementRecord> records, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open dataset for writing: " + path.string());
    write_records(records, out);
    if (!out) throw std::runtime_error("failed writing dataset: " + path.string());
}

std::vector<MeasurementRecord> read_records(std::istream& in, const ReadOptions& options) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) return {};
    ++line_no;
    if (trim(line) != kVersionLine)
        throw SchemaError("version", "unsupported dataset version line: '" + trim(line) + "'");
    if (!std::getline(in, line)) throw SchemaError("header", "dataset header missing");
    ++line_no;

    const auto header = split_fields(trim(line), '\t');
    std::map<std::string, std::size_t> index;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const auto& known = canonical_columns();
        if (std::find(known.begin(), known.end(), header[c]) == known.end()) {
            if (options.strict) throw SchemaError(header[c], "unknown column '" + header[c] + "'");
            continue;
        }
        index[header[c]] = c;
    }
    for (const auto& col : canonical_columns()) {
        if (!index.count(col)) throw SchemaError(col, "missing column '" + col + "'");
    }

    std::vector<MeasurementRecord> out;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_fields(line, '\t');
        if (fields.size() != header.size())
            throw ParseError(line_no, fields.size() < header.size() ? header[fields.size()] : "(extra)",
                             "expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(fields.size()));

        auto get = [&](const char* col) -> const std::string& { return fields[index.at(col)]; };
        auto num = [&](const char* col) {
            double v = 0.0;
            if (!parse_number(get(col), v)) throw ParseError(line_no, col, "not a number: '" + get(col) + "'");
            return v;
        };
        auto integer = [&](const char* col, auto& dst) {
            if (!parse_number(get(col), dst))
                throw ParseError(line_no, col, "not an integer: '" + get(col) + "'");
        };

        MeasurementRecord r;
        integer("pose_id", r.pose_id);
        integer("repetition", r.repetition);
        try {
            r.true_aoa = Angle(num("true_aoa_deg"));
            r.pdoa = Angle(num("pdoa_deg"));
        } catch (const std::invalid_argument& e) {
            throw ParseError(line_no, "pdoa_deg", e.what());
        }
        r.true_distance = num("true_distance_m");
        r.tdoa = num("tdoa_s");
        r.twr.round_trip_time = num("round_trip_s");
        r.twr.reply_time = num("reply_s");
        r.twr.responder_drift = num("responder_drift");
        r.twr.antenna_delay = num("antenna_delay_s");
        r.distance_estimate = num("distance_estimate_m");
        r.first_path_power_ratio = num("fp_power_ratio");
        integer("flags", r.flags);
        r.cir_a.sample_period = r.cir_b.sample_period = num("cir_sample_period_s");
        integer("cir_a_fp", r.cir_a.first_path_index);
        integer("cir_b_fp", r.cir_b.first_path_index);
        for (auto [col, cir] : {std::pair{"cir_a", &r.cir_a}, std::pair{"cir_b", &r.cir_b}}) {
            try {
                cir->samples = decode_cir(get(col));
            } catch (const std::invalid_argument& e) {
                throw ParseError(line_no, col, e.what());
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<MeasurementRecord> read_records(const std::filesystem::path& path, const ReadOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dataset: " + path.string());
    return read_records(in, options);
}

// ---------------------------------------------------------------- import

const std::vector<std::string>& ImportMapping::required_fields() {
    static const std::vector<std::string> f = {"pdoa", "tdoa", "round_trip", "reply", "true_aoa",
                                               "true_distance"};
    return f;
}

const std::vector<std::string>& ImportMapping::known_fields() {
    static const std::vector<std::string> f = {
        "pdoa",           "tdoa",         "round_trip",     "reply",      "true_aoa",
        "true_distance",  "responder_drift", "antenna_delay", "distance_estimate",
        "fp_power_ratio", "first_path_index", "cir_sample_period", "pose_id", "repetition",
        "cir_a_real",     "cir_a_imag",   "cir_b_real",     "cir_b_imag",
    };
    return f;
}

ImportMapping ImportMapping::parse(std::istream& in) {
    ImportMapping m;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(line_no, line, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "delimiter") {
            if (value == "tab" || value == "\\t") {
                m.delimiter = '\t';
            } else if (value.size() == 1) {
                m.delimiter = value[0];
            } else {
                throw ParseError(line_no, key, "delimiter must be a single character or 'tab'");
            }
            continue;
        }
        const auto& known = known_fields();
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw SchemaError(key, "unknown canonical field '" + key + "' in mapping");

        std::istringstream tokens(value);
        std::string tok;
        Column col;
        tokens >> tok;
        if (tok == "const") {
            std::string v;
            tokens >> v;
            if (!parse_number(v, col.constant)) throw ParseError(line_no, key, "bad constant '" + v + "'");
            col.is_constant = true;
        } else {
            col.column = tok;
            std::string op;
            while (tokens >> op) {
                std::string v;
                tokens >> v;
                double x = 0.0;
                if (!parse_number(v, x)) throw ParseError(line_no, key, "bad number '" + v + "'");
                if (op == "*") {
                    col.scale *= x;
                } else if (op == "+") {
                    col.offset += x;
                } else {
                    throw ParseError(line_no, key, "unsupported operator '" + op + "'");
                }
            }
        }
        if (col.column.empty() && !col.is_constant) throw ParseError(line_no, key, "empty column name");
        m.fields[key] = col;
    }
    for (const auto& f : required_fields()) {
        if (!m.fields.count(f)) throw SchemaError(f, "mapping lacks required field '" + f + "'");
    }
    return m;
}

ImportMapping ImportMapping::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mapping file: " + path.string());
    return parse(in);
}

namespace {

std::string expand_pattern(const std::string& pattern, int i) {
    const auto pos = pattern.find("{i}");
    if (pos == std::string::npos) return pattern;
    return pattern.substr(0, pos) + std::to_string(i) + pattern.substr(pos + 3);
}

}  // namespace

std::vector<MeasurementRecord> import_records(std::istream& csv, const ImportMapping& mapping) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(csv, line) || trim(line).empty()) return {};
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split_fields(line, mapping.delimiter);
    std::map<std::string, std::size_t> col_index;
    for (std::size_t c = 0; c < header.size(); ++c) col_index[trim(header[c])] = c;

    auto column_of = [&](const std::string& field, const std::string& column) {
        auto it = col_index.find(column);
        if (it == col_index.end())
            throw SchemaError(field, "source lacks column '" + column + "' mapped to '" + field + "'");
        return it->second;
    };

    struct Resolved {
        bool present = false;
        bool constant = false;
        double value = 0.0;
        std::size_t index = 0;
        double scale = 1.0;
        double offset = 0.0;
    };
    std::map<std::string, Resolved> scalars;
    for (const auto& [field, col] : mapping.fields) {
        if (field.rfind("cir_", 0) == 0 && field != "cir_sample_period") continue;
        Resolved r;
        r.present = true;
        r.constant = col.is_constant;
        r.value = col.constant;
        if (!col.is_constant) r.index = column_of(field, col.column);
        r.scale = col.scale;
        r.offset = col.offset;
        scalars[field] = r;
    }
    std::map<std::string, std::vector<std::size_t>> cir_cols;
    for (const char* f : {"cir_a_real", "cir_a_imag", "cir_b_real", "cir_b_imag"}) {
        auto it = mapping.fields.find(f);
        if (it == mapping.fields.end()) continue;
        std::vector<std::size_t> idx;
        for (int i = 0; i < kCirLength; ++i) idx.push_back(column_of(f, expand_pattern(it->second.column, i)));
        cir_cols[f] = std::move(idx);
    }

    std::vector<MeasurementRecord> out;
    std::map<std::pair<double, double>, std::int64_t> pose_ids;
    std::map<std::int64_t, std::int32_t> reps;
    while (std::getline(csv, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line, mapping.delimiter);

        auto raw = [&](const std::string& field, std::size_t idx) {
            if (idx >= fields.size()) throw ParseError(line_no, field, "row has too few columns");
            double v = 0.0;
            if (!parse_number(trim(fields[idx]), v))
                throw ParseError(line_no, field, "not a number: '" + fields[idx] + "'");
            return v;
        };
        auto value = [&](const std::string& field, double fallback) {
            auto it = scalars.find(field);
            if (it == scalars.end()) return fallback;
            const Resolved& r = it->second;
            const double v = r.constant ? r.value : raw(field, r.index);
            return v * r.scale + r.offset;
        };

        MeasurementRecord rec;
        rec.flags |= kFlagImported;
        try {
            rec.pdoa = Angle(value("pdoa", 0.0));
        } catch (const std::invalid_argument&) {
            throw ParseError(line_no, "pdoa", "non-finite value");
        }
        try {
            rec.true_aoa = Angle(value("true_aoa", 0.0));
        } catch (const std::invalid_argument&) {
            throw ParseError(line_no, "true_aoa", "non-finite value");
        }
        rec.tdoa = value("tdoa", 0.0);
        rec.true_distance = value("true_distance", 0.0);
        rec.twr.round_trip_time = value("round_trip", 0.0);
        rec.twr.reply_time = value("reply", 0.0);
        rec.twr.responder_drift = value("responder_drift", 0.0);
        rec.twr.antenna_delay = value("antenna_delay", 0.0);
        if (scalars.count("distance_estimate")) {
            rec.distance_estimate = value("distance_estimate", 0.0);
        } else {
            rec.distance_estimate = 299'792'458.0 *
                                    (rec.twr.round_trip_time - rec.twr.reply_time - 2.0 * rec.twr.antenna_delay) /
                                    2.0;
        }
        if (rec.distance_estimate < 0.0) rec.flags |= kFlagNegativeDistance;
        rec.first_path_power_ratio = value("fp_power_ratio", 1.0);
        const double period = value("cir_sample_period", 1e-9);
        const auto fp = static_cast<int>(std::lround(value("first_path_index", 0.0)));
        for (Cir* cir : {&rec.cir_a, &rec.cir_b}) {
            cir->sample_period = period;
            cir->first_path_index = std::clamp(fp, 0, kCirLength - 1);
        }
        if (fp < 5 || fp + 100 > kCirLength - 1) rec.flags |= kFlagWindowInvalid;
        for (auto& [field, idx] : cir_cols) {
            Cir& cir = field.rfind("cir_a", 0) == 0 ? rec.cir_a : rec.cir_b;
            const bool real = field.ends_with("real");
            const auto& col = mapping.fields.at(field);
            for (int i = 0; i < kCirLength; ++i) {
                const double v = raw(field, idx[static_cast<std::size_t>(i)]) * col.scale + col.offset;
                auto& s = cir.samples[static_cast<std::size_t>(i)];
                s = real ? std::complex<double>(v, s.imag()) : std::complex<double>(s.real(), v);
            }
        }
        if (scalars.count("pose_id")) {
            rec.pose_id = static_cast<std::int64_t>(std::llround(value("pose_id", 0.0)));
        } else {
            const auto key = std::pair{rec.true_distance, rec.true_aoa.degrees()};
            auto [it, inserted] = pose_ids.try_emplace(key, static_cast<std::int64_t>(pose_ids.size()));
            rec.pose_id = it->second;
        }
        rec.repetition = scalars.count("repetition")
                             ? static_cast<std::int32_t>(std::lround(value("repetition", 0.0)))
                             : reps[rec.pose_id]++;
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<MeasurementRecord> import_records(const std::filesystem::path& csv_path,
                                              const ImportMapping& mapping) {
    std::ifstream in(csv_path);
    if (!in) throw std::runtime_error("cannot open source capture: " + csv_path.string());
    return import_records(in, mapping);
}

}  // namespace uwbaoa
