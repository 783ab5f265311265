#include "uwbaoa/report.hpp"

#include <charconv>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "uwbaoa/errors.hpp"

namespace uwbaoa {

using nlohmann::json;

std::vector<NamedWindow> default_windows() {
    return {
        {"full", AngleWindow::full(), {}},
        {"pm90", AngleWindow{Angle(0.0), 90.0}, {}},
        {"pm45", AngleWindow{Angle(0.0), 45.0}, {}},
    };
}

namespace {

json metrics_json(const WindowMetrics& m) {
    return {{"mse_deg2", m.mse_deg2},
            {"rmse_deg", m.rmse_deg},
            {"mae_deg", m.mae_deg},
            {"median_ae_deg", m.median_ae_deg},
            {"count", m.count}};
}

template <class T>
json opt(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

// Field access that reports the dotted path of whatever is missing.
const json& at(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) throw SchemaError(path + key, "report field missing: " + path + key);
    return j.at(key);
}

double num(const json& j, const std::string& key, const std::string& path) {
    const json& v = at(j, key, path);
    if (!v.is_number()) throw SchemaError(path + key, "report field not a number: " + path + key);
    return v.get<double>();
}

std::size_t count(const json& j, const std::string& key, const std::string& path) {
    const json& v = at(j, key, path);
    if (!v.is_number_unsigned()) throw SchemaError(path + key, "report field not a count: " + path + key);
    return v.get<std::size_t>();
}

std::optional<double> opt_num(const json& j, const std::string& key, const std::string& path) {
    if (at(j, key, path).is_null()) return std::nullopt;
    return num(j, key, path);
}

WindowMetrics metrics_from(const json& j, const std::string& path) {
    WindowMetrics m;
    m.mse_deg2 = num(j, "mse_deg2", path);
    m.rmse_deg = num(j, "rmse_deg", path);
    m.mae_deg = num(j, "mae_deg", path);
    m.median_ae_deg = num(j, "median_ae_deg", path);
    m.count = count(j, "count", path);
    return m;
}

}  // namespace

std::string report_to_json(const MetricsReport& r) {
    json j;
    j["schema_version"] = kReportSchemaVersion;
    j["estimator"] = r.estimator;
    j["task"] = r.task;
    j["record_count"] = r.record_count;
    j["out_of_range_count"] = r.out_of_range_count;
    json windows = json::array();
    for (const auto& w : r.windows) {
        json e = metrics_json(w.metrics);
        e["name"] = w.name;
        e["center_deg"] = w.window.center.degrees();
        e["half_width_deg"] = w.window.half_width;
        windows.push_back(std::move(e));
    }
    j["windows"] = std::move(windows);
    json zones = json::object();
    for (Zone z : kAllZones) zones[std::string(zone_name(z))] = metrics_json(r.zones[static_cast<std::size_t>(z)]);
    j["zones"] = std::move(zones);
    j["front_back_accuracy"] = opt(r.front_back_accuracy);
    j["distance_rmse_m"] = opt(r.distance_rmse_m);
    if (r.classification) {
        json c = json::object();
        for (Zone z : kAllZones) {
            const ClassMetrics& m = (*r.classification)[static_cast<std::size_t>(z)];
            c[std::string(zone_name(z))] = {{"precision", opt(m.precision)},
                                            {"recall", opt(m.recall)},
                                            {"support", m.support},
                                            {"predicted", m.predicted}};
        }
        j["classification"] = std::move(c);
    } else {
        j["classification"] = nullptr;
    }
    if (r.stability) {
        j["stability"] = {{"std_raw_deg", r.stability->std_raw},
                          {"std_avg_deg", r.stability->std_avg},
                          {"group_size", r.stability->group_size},
                          {"groups", r.stability->groups},
                          {"mean_deg", r.stability->mean.degrees()}};
    } else {
        j["stability"] = nullptr;
    }
    return j.dump(2) + "\n";
}

MetricsReport report_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError("", std::string("report is not valid JSON: ") + e.what());
    }
    if (num(j, "schema_version", "") != kReportSchemaVersion)
        throw SchemaError("schema_version", "unsupported report schema version");
    MetricsReport r;
    const auto str = [&](const std::string& key) {
        const json& v = at(j, key, "");
        if (!v.is_string()) throw SchemaError(key, "report field not a string: " + key);
        return v.get<std::string>();
    };
    r.estimator = str("estimator");
    r.task = str("task");
    r.record_count = count(j, "record_count", "");
    r.out_of_range_count = count(j, "out_of_range_count", "");
    const json& windows = at(j, "windows", "");
    if (!windows.is_array()) throw SchemaError("windows", "report field not an array: windows");
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const std::string path = "windows[" + std::to_string(i) + "].";
        const json& w = windows[i];
        NamedWindow nw;
        const json& name = at(w, "name", path);
        if (!name.is_string()) throw SchemaError(path + "name", "report field not a string: " + path + "name");
        nw.name = name.get<std::string>();
        nw.window.center = Angle(num(w, "center_deg", path));
        nw.window.half_width = num(w, "half_width_deg", path);
        nw.metrics = metrics_from(w, path);
        r.windows.push_back(std::move(nw));
    }
    const json& zones = at(j, "zones", "");
    for (Zone z : kAllZones) {
        const std::string name(zone_name(z));
        r.zones[static_cast<std::size_t>(z)] = metrics_from(at(zones, name, "zones."), "zones." + name + ".");
    }
    r.front_back_accuracy = opt_num(j, "front_back_accuracy", "");
    r.distance_rmse_m = opt_num(j, "distance_rmse_m", "");
    if (const json& c = at(j, "classification", ""); !c.is_null()) {
        std::array<ClassMetrics, kZoneCount> cm;
        for (Zone z : kAllZones) {
            const std::string path = "classification." + std::string(zone_name(z)) + ".";
            const json& e = at(c, std::string(zone_name(z)), "classification.");
            ClassMetrics& m = cm[static_cast<std::size_t>(z)];
            m.precision = opt_num(e, "precision", path);
            m.recall = opt_num(e, "recall", path);
            m.support = count(e, "support", path);
            m.predicted = count(e, "predicted", path);
        }
        r.classification = cm;
    }
    if (const json& s = at(j, "stability", ""); !s.is_null()) {
        StabilityResult st;
        st.std_raw = num(s, "std_raw_deg", "stability.");
        st.std_avg = num(s, "std_avg_deg", "stability.");
        st.group_size = static_cast<int>(count(s, "group_size", "stability."));
        st.groups = count(s, "groups", "stability.");
        st.mean = Angle(num(s, "mean_deg", "stability."));
        r.stability = st;
    }
    return r;
}

void emit_report(const MetricsReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << report_to_json(report);
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

MetricsReport read_report(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open report " + path.string());
    return report_from_json(std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>()));
}

namespace {

std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

void write_plot_table(std::span<const PlotRow> rows, std::ostream& out) {
    out << "pose_id,repetition,true_distance_m,true_aoa_deg,naive_aoa_deg,corrected_aoa_deg,true_zone,"
           "predicted_zone\n";
    for (const PlotRow& r : rows) {
        out << r.pose_id << ',' << r.repetition << ',' << fmt(r.true_distance_m) << ',' << fmt(r.true_aoa.degrees())
            << ',' << fmt(r.naive_aoa.degrees()) << ',';
        if (r.corrected_aoa) out << fmt(r.corrected_aoa->degrees());
        out << ',' << zone_name(zone_of(r.true_aoa)) << ',';
        if (r.predicted_zone) out << zone_name(*r.predicted_zone);
        out << '\n';
    }
}

void write_plot_table(std::span<const PlotRow> rows, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_plot_table(rows, out);
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace uwbaoa
