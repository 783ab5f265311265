#include "cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "uwbaoa/dataset.hpp"
#include "uwbaoa/errors.hpp"
#include "uwbaoa/model_io.hpp"
#include "uwbaoa/pipeline.hpp"

namespace uwbaoa::cli {

namespace fs = std::filesystem;

namespace {

/// Invalid option value; `field` is the option name.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& what)
        : std::runtime_error("--" + field + ": " + what) {}
};

struct GeometryOptions {
    double frequency = kChannel5Frequency;
    double spacing = kReferenceSpacing;
    double speed_of_light = kSpeedOfLight;
};

struct SimulateOptions {
    GeometryOptions geom;
    double delta = 0.0077;
    std::vector<double> distances = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5};
    double angle_step = 1.0;
    int reps = 5;
    std::string profile = "office";
    std::optional<double> pdoa_noise;
    std::optional<double> back_attenuation;
    std::optional<double> amplitude_noise;
    bool quantize_cir = false;
    double timestamp_tick = 0.0;
    std::uint64_t seed = 0;
    std::string out = "out/simulate";
};

struct ImportOptions {
    std::string source;
    std::string mapping;
    std::uint64_t seed = 0;
    std::string out = "out/import";
};

struct SplitOptions {
    double train_fraction = 0.6;
    std::string stratify = "zone";
    bool no_group = false;
};

struct TrainOptionsCli {
    GeometryOptions geom;
    SplitOptions split;
    std::string dataset;
    std::string model = "mlp";
    std::string task = "regress";
    std::string zone = "all";
    std::vector<int> hidden = {224};
    std::vector<double> dropout;
    int epochs = 30;
    int batch_size = 64;
    double learning_rate = 0.01;
    double momentum = 0.9;
    double lr_decay = 1.0;
    int n_estimators = 100;
    int max_depth = 3;
    double gbt_learning_rate = 0.1;
    double subsample = 1.0;
    int window_before = 5;
    int window_after = 100;
    std::vector<std::string> disable_features;
    std::uint64_t seed = 0;
    std::string out = "out/train";
};

struct EvaluateOptions {
    GeometryOptions geom;
    SplitOptions split;
    std::string dataset;
    std::string model;
    std::string subset;  // test | train | all; default test with a model, all without
    std::string zone = "all";
    std::uint64_t seed = 0;
    std::string out = "out/evaluate";
};

struct ReportOptions {
    std::vector<std::string> metrics;
    std::string out = "out/report";
};

std::string fmt(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

// Shortest round-trip text for the echoed config.
std::string repr(double v) { return fmt(v); }
std::string repr(int v) { return std::to_string(v); }
std::string repr(std::uint64_t v) { return std::to_string(v); }
std::string repr(const std::string& v) { return v; }
template <class T>
std::string repr(const std::vector<T>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + repr(v[i]);
    return s + "]";
}

void add_geometry(CLI::App* cmd, GeometryOptions& g) {
    cmd->add_option("--frequency", g.frequency, "Carrier frequency, Hz")->default_str(repr(g.frequency));
    cmd->add_option("--spacing", g.spacing, "Nominal antenna spacing, m")->default_str(repr(g.spacing));
    cmd->add_option("--speed-of-light", g.speed_of_light, "Propagation speed, m/s")->default_str(repr(g.speed_of_light));
}

void add_split(CLI::App* cmd, SplitOptions& s) {
    cmd->add_option("--train-fraction", s.train_fraction, "Fraction of kept records used for training")
        ->default_str(repr(s.train_fraction));
    cmd->add_option("--stratify", s.stratify, "none | zone | distance")->default_str(repr(s.stratify));
    cmd->add_flag("--no-group", s.no_group, "Split records individually instead of by pose");
}

AntennaGeometry make_geometry(const GeometryOptions& g, double delta = 0.0) {
    if (!(g.frequency > 0.0)) throw ConfigError("frequency", "must be positive");
    if (!(g.spacing > 0.0)) throw ConfigError("spacing", "must be positive");
    if (!(g.speed_of_light > 0.0)) throw ConfigError("speed-of-light", "must be positive");
    try {
        return AntennaGeometry(g.frequency, g.spacing, delta, g.speed_of_light);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("delta", e.what());
    }
}

SplitSpec make_split(const SplitOptions& s, std::uint64_t seed) {
    if (!(s.train_fraction > 0.0 && s.train_fraction < 1.0))
        throw ConfigError("train-fraction", "must lie in (0, 1)");
    SplitSpec spec;
    spec.train_fraction = s.train_fraction;
    spec.seed = seed;
    spec.group_by_pose = !s.no_group;
    if (s.stratify == "none") spec.stratify_by = Stratify::none;
    else if (s.stratify == "zone") spec.stratify_by = Stratify::angle_zone;
    else if (s.stratify == "distance") spec.stratify_by = Stratify::distance;
    else throw ConfigError("stratify", "expected none, zone or distance, got '" + s.stratify + "'");
    return spec;
}

std::optional<Zone> parse_zone(const std::string& s) {
    if (s == "all") return std::nullopt;
    for (Zone z : kAllZones)
        if (s == zone_name(z)) return z;
    throw ConfigError("zone", "expected all, Z0, Z90, Z180 or Z270, got '" + s + "'");
}

std::vector<MeasurementRecord> in_zone(std::vector<MeasurementRecord> records, std::optional<Zone> zone) {
    if (!zone) return records;
    std::erase_if(records, [&](const MeasurementRecord& r) { return zone_of(r.true_aoa) != *zone; });
    return records;
}

void prepare_out(const std::string& dir, const std::string& resolved_config) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("out", "cannot create directory " + dir + ": " + ec.message());
    std::ofstream cfg(fs::path(dir) / "config.ini", std::ios::binary | std::ios::trunc);
    if (!cfg) throw ConfigError("out", "cannot write to " + dir);
    cfg << resolved_config;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}


std::vector<MeasurementRecord> load_dataset(const std::string& path) {
    if (path.empty()) throw ConfigError("dataset", "required");
    if (!fs::exists(path)) throw ConfigError("dataset", "file not found: " + path);
    return read_records(fs::path(path));
}

int cmd_simulate(const SimulateOptions& o, const std::string& config, std::ostream& out) {
    const AntennaGeometry geom = make_geometry(o.geom, o.delta);
    if (o.distances.empty()) throw ConfigError("distances", "at least one distance required");
    for (double d : o.distances)
        if (!(d > 0.0)) throw ConfigError("distances", "distances must be positive");
    if (!(o.angle_step > 0.0)) throw ConfigError("angle-step", "must be positive");
    const double steps = 360.0 / o.angle_step;
    if (std::abs(steps - std::round(steps)) > 1e-9) throw ConfigError("angle-step", "must divide 360");
    if (o.reps < 1) throw ConfigError("reps", "must be at least 1");

    ChannelProfile profile;
    if (o.profile == "office") profile = ChannelProfile::office();
    else if (o.profile == "ideal") profile = ChannelProfile::ideal();
    else throw ConfigError("profile", "expected office or ideal, got '" + o.profile + "'");
    if (o.pdoa_noise) profile.pdoa_noise_std = *o.pdoa_noise;
    if (o.back_attenuation) profile.back_attenuation = *o.back_attenuation;
    if (o.amplitude_noise) profile.amplitude_noise_std = *o.amplitude_noise;
    try {
        profile.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("profile", e.what());
    }
    SimulationConfig sim;
    sim.quantize_cir = o.quantize_cir;
    if (o.timestamp_tick < 0.0) throw ConfigError("timestamp-tick", "must be non-negative");
    sim.timestamp_tick = o.timestamp_tick;

    prepare_out(o.out, config);
    const auto records = sweep_dataset(geom, profile, o.distances, o.angle_step, o.reps, o.seed, sim);
    FilterResult filtered = apply_quality_filters(records);
    filtered.manifest.split_seed = o.seed;
    write_records(records, fs::path(o.out) / "dataset.uwb");
    write_text(fs::path(o.out) / "manifest.json", filtered.manifest.to_json());
    out << "simulated " << records.size() << " records (" << filtered.manifest.kept_count
        << " pass filters) -> " << o.out << "\n";
    return kExitOk;
}

int cmd_import(const ImportOptions& o, const std::string& config, std::ostream& out) {
    if (o.source.empty()) throw ConfigError("source", "required");
    if (o.mapping.empty()) throw ConfigError("mapping", "required");
    if (!fs::exists(o.source)) throw ConfigError("source", "file not found: " + o.source);
    if (!fs::exists(o.mapping)) throw ConfigError("mapping", "file not found: " + o.mapping);
    const ImportMapping mapping = ImportMapping::load(o.mapping);
    const auto records = import_records(fs::path(o.source), mapping);
    prepare_out(o.out, config);
    FilterResult filtered = apply_quality_filters(records);
    filtered.manifest.source = DatasetSource::imported;
    filtered.manifest.split_seed = o.seed;
    write_records(records, fs::path(o.out) / "dataset.uwb");
    write_text(fs::path(o.out) / "manifest.json", filtered.manifest.to_json());
    out << "imported " << records.size() << " records (" << filtered.manifest.kept_count << " pass filters) -> "
        << o.out << "\n";
    return kExitOk;
}

FeatureFlags parse_flags(const std::vector<std::string>& disabled) {
    FeatureFlags f;
    for (const auto& name : disabled) {
        if (name == "pdoa") f.pdoa = false;
        else if (name == "tdoa") f.tdoa = false;
        else if (name == "twr") f.twr_distance = false;
        else if (name == "power") f.power_ratio = false;
        else if (name == "cir_a") f.cir_a = false;
        else if (name == "cir_b") f.cir_b = false;
        else throw ConfigError("disable-feature", "unknown feature '" + name + "'");
    }
    return f;
}

int cmd_train(const TrainOptionsCli& o, const std::string& config, std::ostream& out) {
    const AntennaGeometry geom = make_geometry(o.geom);
    const SplitSpec split_spec = make_split(o.split, o.seed);
    const std::optional<Zone> zone = parse_zone(o.zone);

    TrainOptions t;
    if (o.model == "mlp") t.kind = ModelKind::mlp;
    else if (o.model == "gbt") t.kind = ModelKind::gbt;
    else throw ConfigError("model", "expected mlp or gbt, got '" + o.model + "'");
    if (o.task == "regress") t.task = ModelTask::regress;
    else if (o.task == "zone-classify") t.task = ModelTask::zone_classify;
    else throw ConfigError("task", "expected regress or zone-classify, got '" + o.task + "'");
    if (o.hidden.empty() || o.hidden.size() > 3) throw ConfigError("hidden", "need 1 to 3 hidden layer widths");
    for (int h : o.hidden)
        if (h < 1) throw ConfigError("hidden", "layer widths must be positive");
    if (!o.dropout.empty() && o.dropout.size() != o.hidden.size())
        throw ConfigError("dropout", "give one rate per hidden layer");
    for (double d : o.dropout)
        if (!(d >= 0.0 && d < 1.0)) throw ConfigError("dropout", "rates must lie in [0, 1)");
    if (o.epochs < 0) throw ConfigError("epochs", "must be non-negative");
    if (o.batch_size < 1) throw ConfigError("batch-size", "must be positive");
    if (!(o.learning_rate > 0.0)) throw ConfigError("learning-rate", "must be positive");
    if (!(o.momentum >= 0.0 && o.momentum < 1.0)) throw ConfigError("momentum", "must lie in [0, 1)");
    if (!(o.lr_decay > 0.0 && o.lr_decay <= 1.0)) throw ConfigError("lr-decay", "must lie in (0, 1]");
    if (o.n_estimators < 1) throw ConfigError("n-estimators", "must be positive");
    if (o.max_depth < 1) throw ConfigError("max-depth", "must be positive");
    if (!(o.gbt_learning_rate > 0.0)) throw ConfigError("gbt-learning-rate", "must be positive");
    if (!(o.subsample > 0.0 && o.subsample <= 1.0)) throw ConfigError("subsample", "must lie in (0, 1]");
    if (o.window_before < 0 || o.window_after < 0 || o.window_before + o.window_after >= kCirLength)
        throw ConfigError("window-before", "CIR window does not fit the capture");
    t.layout.window_before = o.window_before;
    t.layout.window_after = o.window_after;
    t.layout.flags = parse_flags(o.disable_features);
    if (t.layout.length() == 0) throw ConfigError("disable-feature", "every feature is disabled");
    t.hidden = o.hidden;
    t.dropout = o.dropout;
    t.mlp.seed = o.seed;
    t.mlp.epochs = o.epochs;
    t.mlp.batch_size = o.batch_size;
    t.mlp.learning_rate = o.learning_rate;
    t.mlp.momentum = o.momentum;
    t.mlp.learning_rate_decay = o.lr_decay;
    t.gbt.seed = o.seed;
    t.gbt.n_estimators = o.n_estimators;
    t.gbt.max_depth = o.max_depth;
    t.gbt.learning_rate = o.gbt_learning_rate;
    t.gbt.subsample = o.subsample;

    const auto records = load_dataset(o.dataset);
    prepare_out(o.out, config);
    const FilterResult filtered = apply_quality_filters(records);
    const Split s = split(filtered.kept, split_spec);
    const auto train = in_zone(select(filtered.kept, s.train), zone);
    if (train.empty()) throw ConfigError("dataset", "no training records after filtering");

    const TrainedModel trained = train_correction_model(train, geom, t, split_spec);
    const std::size_t bytes = save_model(trained.model, fs::path(o.out) / "model.bin");

    std::ostringstream log;
    if (t.kind == ModelKind::mlp) {
        log << "epoch,loss\n";
        for (std::size_t e = 0; e < trained.epoch_loss.size(); ++e)
            log << e + 1 << ',' << fmt(trained.epoch_loss[e]) << '\n';
    } else {
        // training MSE of each output after the full ensemble
        const FeatureMatrix x = extract_batch(train, trained.model.features);
        const Eigen::MatrixXd y =
            make_target_matrix(train, x.indices, trained.model.geometry(), trained.model.features, t.task);
        log << "output,estimators,train_mse\n";
        for (std::size_t c = 0; c < trained.model.gbt.size(); ++c) {
            const Eigen::VectorXd pred = trained.model.gbt[c].predict(x.values);
            const double mse = (pred - y.col(static_cast<Eigen::Index>(c))).squaredNorm() /
                               static_cast<double>(pred.size());
            log << c << ',' << trained.model.gbt[c].n_estimators << ',' << fmt(mse) << '\n';
        }
    }
    write_text(fs::path(o.out) / "train_log.csv", log.str());

    nlohmann::json summary = {
        {"model", std::string(to_string(t.kind))},
        {"task", std::string(to_string(t.task))},
        {"zone", o.zone},
        {"input_length", trained.model.features.length()},
        {"estimator_count", trained.model.estimator_count()},
        {"parameter_count", trained.model.parameter_count()},
        {"model_bytes", bytes},
        {"train_records", train.size()},
        {"skipped_records", trained.skipped_records},
    };
    if (!trained.epoch_loss.empty()) summary["final_loss"] = trained.epoch_loss.back();
    write_text(fs::path(o.out) / "train_summary.json", summary.dump(2) + "\n");

    out << "trained " << to_string(t.kind) << " (" << to_string(t.task) << ") on " << train.size()
        << " records: " << trained.model.estimator_count() << " estimator(s), "
        << trained.model.parameter_count() << " parameters, " << bytes << " bytes -> " << o.out << "\n";
    return kExitOk;
}

int cmd_evaluate(const EvaluateOptions& o, const std::string& config, std::ostream& out) {
    const std::optional<Zone> zone = parse_zone(o.zone);
    std::optional<CorrectionModel> model;
    if (!o.model.empty()) {
        if (!fs::exists(o.model)) throw ConfigError("model", "file not found: " + o.model);
        model = load_model(fs::path(o.model));
    }
    const std::string subset = o.subset.empty() ? (model ? "test" : "all") : o.subset;
    if (subset != "test" && subset != "train" && subset != "all")
        throw ConfigError("subset", "expected test, train or all, got '" + subset + "'");
    const SplitSpec split_spec = model ? model->split : make_split(o.split, o.seed);
    const AntennaGeometry geom = model ? model->geometry() : make_geometry(o.geom);

    const auto records = load_dataset(o.dataset);
    prepare_out(o.out, config);
    const FilterResult filtered = apply_quality_filters(records);
    std::vector<MeasurementRecord> chosen;
    if (subset == "all") {
        chosen = filtered.kept;
    } else {
        const Split s = split(filtered.kept, split_spec);
        chosen = select(filtered.kept, subset == "test" ? s.test : s.train);
    }
    chosen = in_zone(std::move(chosen), zone);

    const Evaluation ev = evaluate_records(chosen, geom, model ? &*model : nullptr);
    emit_report(ev.report, fs::path(o.out) / "metrics.json");
    write_plot_table(ev.rows, fs::path(o.out) / "plot.csv");
    const WindowMetrics& full = ev.report.windows.front().metrics;
    out << "evaluated " << ev.report.estimator << " on " << chosen.size() << " " << subset
        << " records: full-circle MSE " << fmt(full.mse_deg2) << " deg^2 -> " << o.out << "\n";
    return kExitOk;
}

int cmd_report(const ReportOptions& o, const std::string& config, std::ostream& out) {
    if (o.metrics.empty()) throw ConfigError("metrics", "at least one metrics file required");
    std::vector<MetricsReport> reports;
    for (const auto& path : o.metrics) {
        if (!fs::exists(path)) throw ConfigError("metrics", "file not found: " + path);
        reports.push_back(read_report(fs::path(path)));
    }
    prepare_out(o.out, config);
    std::ostringstream csv;
    csv << "source,estimator,task,window,count,mse_deg2,rmse_deg,mae_deg,median_ae_deg\n";
    out << std::left << std::setw(28) << "source" << std::setw(8) << "window" << std::right << std::setw(8)
        << "count" << std::setw(14) << "mse_deg2" << std::setw(12) << "mae_deg" << "\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const MetricsReport& r = reports[i];
        auto row = [&](const std::string& name, const WindowMetrics& m) {
            csv << o.metrics[i] << ',' << r.estimator << ',' << r.task << ',' << name << ',' << m.count << ','
                << fmt(m.mse_deg2) << ',' << fmt(m.rmse_deg) << ',' << fmt(m.mae_deg) << ','
                << fmt(m.median_ae_deg) << '\n';
            out << std::left << std::setw(28) << o.metrics[i].substr(0, 27) << std::setw(8) << name << std::right
                << std::setw(8) << m.count << std::setw(14) << std::fixed << std::setprecision(3) << m.mse_deg2
                << std::setw(12) << m.mae_deg << "\n";
        };
        for (const auto& w : r.windows) row(w.name, w.metrics);
        for (Zone z : kAllZones) row(std::string(zone_name(z)), r.zones[static_cast<std::size_t>(z)]);
    }
    write_text(fs::path(o.out) / "summary.csv", csv.str());
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dual-antenna UWB angle-of-arrival simulation, correction and evaluation"};
    app.set_config("--config", "", "INI or TOML file; command-line flags override it");
    app.fallthrough();
    app.require_subcommand(1);

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "Synthesize a swept measurement dataset");
    add_geometry(simulate, sim.geom);
    simulate->add_option("--delta", sim.delta, "Phase-centre spacing offset, m")->default_str(repr(sim.delta));
    simulate->add_option("--distances", sim.distances, "Distances, m")->default_str(repr(sim.distances));
    simulate->add_option("--angle-step", sim.angle_step, "Rotation step, deg (must divide 360)")
        ->default_str(repr(sim.angle_step));
    simulate->add_option("--reps", sim.reps, "Records per pose")->default_str(repr(sim.reps));
    simulate->add_option("--profile", sim.profile, "office | ideal")->default_str(repr(sim.profile));
    simulate->add_option("--pdoa-noise", sim.pdoa_noise, "PDoA noise std at boresight, deg");
    simulate->add_option("--back-attenuation", sim.back_attenuation, "Gain for arrivals from behind");
    simulate->add_option("--amplitude-noise", sim.amplitude_noise, "Complex CIR noise std");
    simulate->add_flag("--quantize-cir", sim.quantize_cir, "Round CIR components to 18 bits");
    simulate->add_option("--timestamp-tick", sim.timestamp_tick, "Timestamp resolution, s (0 = exact)")
        ->default_str(repr(sim.timestamp_tick));
    simulate->add_option("--seed", sim.seed, "Random seed")->default_str(repr(sim.seed));
    simulate->add_option("--out", sim.out, "Output directory")->default_str(repr(sim.out));

    ImportOptions imp;
    auto* import = app.add_subcommand("import", "Convert an external CSV capture to the canonical format");
    import->add_option("--source", imp.source, "CSV capture");
    import->add_option("--mapping", imp.mapping, "Column mapping file");
    import->add_option("--seed", imp.seed, "Seed recorded in the manifest")->default_str(repr(imp.seed));
    import->add_option("--out", imp.out, "Output directory")->default_str(repr(imp.out));

    TrainOptionsCli tr;
    auto* train = app.add_subcommand("train", "Train one correction model");
    add_geometry(train, tr.geom);
    add_split(train, tr.split);
    train->add_option("--dataset", tr.dataset, "Canonical dataset file");
    train->add_option("--model", tr.model, "mlp | gbt")->default_str(repr(tr.model));
    train->add_option("--task", tr.task, "regress | zone-classify")->default_str(repr(tr.task));
    train->add_option("--zone", tr.zone, "Restrict training to one true zone: all | Z0 | Z90 | Z180 | Z270")
        ->default_str(repr(tr.zone));
    train->add_option("--hidden", tr.hidden, "Hidden layer widths")->default_str(repr(tr.hidden));
    train->add_option("--dropout", tr.dropout, "Dropout rate per hidden layer");
    train->add_option("--epochs", tr.epochs)->default_str(repr(tr.epochs));
    train->add_option("--batch-size", tr.batch_size)->default_str(repr(tr.batch_size));
    train->add_option("--learning-rate", tr.learning_rate)->default_str(repr(tr.learning_rate));
    train->add_option("--momentum", tr.momentum)->default_str(repr(tr.momentum));
    train->add_option("--lr-decay", tr.lr_decay, "Learning-rate multiplier per epoch")->default_str(repr(tr.lr_decay));
    train->add_option("--n-estimators", tr.n_estimators)->default_str(repr(tr.n_estimators));
    train->add_option("--max-depth", tr.max_depth)->default_str(repr(tr.max_depth));
    train->add_option("--gbt-learning-rate", tr.gbt_learning_rate)->default_str(repr(tr.gbt_learning_rate));
    train->add_option("--subsample", tr.subsample, "Row fraction per boosted tree")->default_str(repr(tr.subsample));
    train->add_option("--window-before", tr.window_before, "CIR samples before the first path")
        ->default_str(repr(tr.window_before));
    train->add_option("--window-after", tr.window_after, "CIR samples after the first path")
        ->default_str(repr(tr.window_after));
    train->add_option("--disable-feature", tr.disable_features, "pdoa | tdoa | twr | power | cir_a | cir_b");
    train->add_option("--seed", tr.seed, "Seed for split, initialization and shuffling")->default_str(repr(tr.seed));
    train->add_option("--out", tr.out, "Output directory")->default_str(repr(tr.out));

    EvaluateOptions ev;
    auto* evaluate = app.add_subcommand("evaluate", "Compute angle metrics for the naive or a trained estimator");
    add_geometry(evaluate, ev.geom);
    add_split(evaluate, ev.split);
    evaluate->add_option("--dataset", ev.dataset, "Canonical dataset file");
    evaluate->add_option("--model", ev.model, "Model file; omit for the naive estimator");
    evaluate->add_option("--subset", ev.subset, "test | train | all");
    evaluate->add_option("--zone", ev.zone, "Restrict to one true zone")->default_str(repr(ev.zone));
    evaluate->add_option("--seed", ev.seed, "Split seed for the naive estimator")->default_str(repr(ev.seed));
    evaluate->add_option("--out", ev.out, "Output directory")->default_str(repr(ev.out));

    ReportOptions rep;
    auto* report = app.add_subcommand("report", "Tabulate one or more metrics files");
    report->add_option("--metrics", rep.metrics, "metrics.json files");
    report->add_option("--out", rep.out, "Output directory")->default_str(repr(rep.out));

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    std::string config;
    for (const CLI::App* sub : app.get_subcommands())
        config += "[" + sub->get_name() + "]\n" + sub->config_to_str(true, false);
    try {
        if (simulate->parsed()) return cmd_simulate(sim, config, out);
        if (import->parsed()) return cmd_import(imp, config, out);
        if (train->parsed()) return cmd_train(tr, config, out);
        if (evaluate->parsed()) return cmd_evaluate(ev, config, out);
        if (report->parsed()) return cmd_report(rep, config, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SchemaError& e) {
        err << "error: " << e.what() << " (field '" << e.field() << "')\n";
        return kExitConfig;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ModelLoadError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const TrainingDivergedError& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    err << "error: no subcommand\n";
    return kExitConfig;
}

}  // namespace uwbaoa::cli
