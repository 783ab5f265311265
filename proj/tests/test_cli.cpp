#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "uwbaoa/dataset.hpp"
#include "uwbaoa/model_io.hpp"
#include "uwbaoa/report.hpp"

using namespace uwbaoa;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "uwbaoa");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

class TempDir {
public:
    explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / ("uwbaoa_test_cli_" + name)) {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    fs::path operator/(const std::string& s) const { return path_ / s; }
    std::string str(const std::string& s) const { return (path_ / s).string(); }

private:
    fs::path path_;
};

// Small sweep: 2 distances, 10 degree steps, 3 repetitions = 216 records.
Run simulate(const TempDir& d, const std::string& sub, const std::string& seed = "11") {
    return run({"simulate", "--distances", "1.0", "3.0", "--angle-step", "10", "--reps", "3", "--seed", seed,
                "--out", d.str(sub)});
}

}  // namespace

TEST_CASE("help and usage errors") {
    CHECK(run({"--help"}).code == cli::kExitOk);
    CHECK(run({"train", "--help"}).code == cli::kExitOk);
    CHECK(run({}).code == cli::kExitConfig);
    CHECK(run({"frobnicate"}).code == cli::kExitConfig);
    CHECK(run({"simulate", "--reps", "many"}).code == cli::kExitConfig);
}

TEST_CASE("simulate writes dataset, manifest and resolved config") {
    TempDir d("simulate");
    const Run r = run({"simulate", "--distances", "3.0", "--angle-step", "90", "--reps", "1", "--out", d.str("s")});
    REQUIRE(r.code == cli::kExitOk);
    const auto recs = read_records(d / "s/dataset.uwb");
    REQUIRE(recs.size() == 4);
    CHECK(recs[1].true_aoa.degrees() == 90.0);
    const DatasetManifest m = DatasetManifest::from_json(slurp(d / "s/manifest.json"));
    CHECK(m.record_count == 4);
    CHECK(m.kept_count + m.dropped_count() == 4);
    CHECK(slurp(d / "s/config.ini").find("[simulate]") != std::string::npos);
}

TEST_CASE("simulate rejects invalid parameters with exit code 2") {
    TempDir d("simulate_bad");
    const Run r = run({"simulate", "--angle-step", "7", "--out", d.str("s")});
    CHECK(r.code == cli::kExitConfig);
    CHECK(r.err.find("--angle-step") != std::string::npos);
    CHECK(run({"simulate", "--reps", "0", "--out", d.str("s")}).code == cli::kExitConfig);
    CHECK(run({"simulate", "--profile", "desert", "--out", d.str("s")}).code == cli::kExitConfig);
}

TEST_CASE("same seed and config give byte-identical outputs") {
    TempDir d("determinism");
    REQUIRE(simulate(d, "a").code == 0);
    REQUIRE(simulate(d, "b").code == 0);
    CHECK(slurp(d / "a/dataset.uwb") == slurp(d / "b/dataset.uwb"));
    // re-running from the echoed config reproduces the dataset
    REQUIRE(run({"--config", d.str("a/config.ini"), "simulate", "--out", d.str("c")}).code == 0);
    CHECK(slurp(d / "a/dataset.uwb") == slurp(d / "c/dataset.uwb"));
    REQUIRE(simulate(d, "other", "12").code == 0);
    CHECK(slurp(d / "a/dataset.uwb") != slurp(d / "other/dataset.uwb"));

    for (const char* sub : {"m1", "m2"}) {
        REQUIRE(run({"train", "--dataset", d.str("a/dataset.uwb"), "--hidden", "8", "--epochs", "2", "--seed", "5",
                     "--out", d.str(sub)})
                    .code == 0);
    }
    CHECK(slurp(d / "m1/model.bin") == slurp(d / "m2/model.bin"));
    CHECK(slurp(d / "m1/train_log.csv") == slurp(d / "m2/train_log.csv"));
}

TEST_CASE("train and evaluate an MLP") {
    TempDir d("mlp");
    REQUIRE(simulate(d, "s").code == 0);
    const Run t = run({"train", "--dataset", d.str("s/dataset.uwb"), "--hidden", "16", "--epochs", "3", "--out",
                       d.str("m")});
    REQUIRE(t.code == 0);
    const auto summary = nlohmann::json::parse(slurp(d / "m/train_summary.json"));
    CHECK(summary.at("model") == "mlp");
    CHECK(summary.at("input_length") == 428);
    CHECK(summary.at("parameter_count") == 428 * 16 + 16 + 16 * 3 + 3);
    CHECK(summary.at("model_bytes") == fs::file_size(d / "m/model.bin"));
    const CorrectionModel model = load_model(d / "m/model.bin");
    CHECK(model.task == ModelTask::regress);

    const Run e = run({"evaluate", "--dataset", d.str("s/dataset.uwb"), "--model", d.str("m/model.bin"), "--out",
                       d.str("e")});
    REQUIRE(e.code == 0);
    const MetricsReport rep = read_report(d / "e/metrics.json");
    CHECK(rep.estimator == "mlp");
    CHECK(rep.record_count > 0);
    CHECK(rep.record_count < 216);  // test subset only
    const std::string plot = slurp(d / "e/plot.csv");
    CHECK(static_cast<std::size_t>(std::count(plot.begin(), plot.end(), '\n')) == rep.record_count + 1);
}

TEST_CASE("GBT model reports its estimator count") {
    TempDir d("gbt");
    REQUIRE(simulate(d, "s").code == 0);
    REQUIRE(run({"train", "--dataset", d.str("s/dataset.uwb"), "--model", "gbt", "--n-estimators", "100",
                 "--max-depth", "2", "--disable-feature", "cir_a", "--disable-feature", "cir_b", "--out", d.str("m")})
                .code == 0);
    const auto summary = nlohmann::json::parse(slurp(d / "m/train_summary.json"));
    CHECK(summary.at("estimator_count") == 100);
    CHECK(summary.at("input_length") == 4);
    CHECK(load_model(d / "m/model.bin").estimator_count() == 100);
}

TEST_CASE("zone classification run reports precision and recall") {
    TempDir d("classify");
    REQUIRE(simulate(d, "s").code == 0);
    REQUIRE(run({"train", "--dataset", d.str("s/dataset.uwb"), "--task", "zone-classify", "--hidden", "16",
                 "--epochs", "3", "--out", d.str("m")})
                .code == 0);
    REQUIRE(run({"evaluate", "--dataset", d.str("s/dataset.uwb"), "--model", d.str("m/model.bin"), "--out",
                 d.str("e")})
                .code == 0);
    const MetricsReport rep = read_report(d / "e/metrics.json");
    CHECK(rep.task == "zone-classify");
    REQUIRE(rep.classification.has_value());
}

TEST_CASE("naive evaluation of a zero-noise sweep is exact within 45 degrees") {
    TempDir d("naive");
    REQUIRE(run({"simulate", "--profile", "ideal", "--delta", "0", "--distances", "2.0", "--angle-step", "5",
                 "--reps", "1", "--out", d.str("s")})
                .code == 0);
    REQUIRE(run({"evaluate", "--dataset", d.str("s/dataset.uwb"), "--out", d.str("e")}).code == 0);
    const MetricsReport rep = read_report(d / "e/metrics.json");
    CHECK(rep.estimator == "naive");
    CHECK(rep.record_count == 72);
    bool found = false;
    for (const NamedWindow& w : rep.windows) {
        if (w.name != "pm45") continue;
        found = true;
        CHECK(w.metrics.count == 19);
        CHECK(w.metrics.mse_deg2 <= 1e-12);
    }
    CHECK(found);

    const Run r = run({"report", "--metrics", d.str("e/metrics.json"), "--metrics", d.str("e/metrics.json"),
                       "--out", d.str("r")});
    REQUIRE(r.code == 0);
    const std::string summary = slurp(d / "r/summary.csv");
    CHECK(static_cast<int>(std::count(summary.begin(), summary.end(), '\n')) >= 3);
    CHECK(r.out.find("naive") != std::string::npos);
}

TEST_CASE("missing and corrupt inputs exit with code 2") {
    TempDir d("missing");
    CHECK(run({"train", "--dataset", d.str("nope.uwb"), "--out", d.str("m")}).code == cli::kExitConfig);
    CHECK(run({"train", "--out", d.str("m")}).code == cli::kExitConfig);
    REQUIRE(simulate(d, "s").code == 0);
    std::ofstream(d / "bad.bin") << "not a model";
    CHECK(run({"evaluate", "--dataset", d.str("s/dataset.uwb"), "--model", d.str("bad.bin"), "--out", d.str("e")})
              .code == cli::kExitConfig);
    std::ofstream(d / "bad.json") << "{}";
    CHECK(run({"report", "--metrics", d.str("bad.json"), "--out", d.str("r")}).code == cli::kExitConfig);
}

TEST_CASE("import names the missing mapping field") {
    TempDir d("import");
    std::ofstream(d / "map.txt") << "pdoa = p\ntdoa = t\nround_trip = rt\nreply = rp\ntrue_aoa = a\n";
    std::ofstream(d / "cap.csv") << "p,t,rt,rp,a,dist\n1,0,0.0005001,0.0005,10,2\n";
    const Run bad = run({"import", "--source", d.str("cap.csv"), "--mapping", d.str("map.txt"), "--out", d.str("o")});
    CHECK(bad.code == cli::kExitConfig);
    CHECK(bad.err.find("true_distance") != std::string::npos);

    std::ofstream(d / "map.txt", std::ios::app) << "true_distance = dist\n";
    const Run ok = run({"import", "--source", d.str("cap.csv"), "--mapping", d.str("map.txt"), "--out", d.str("o")});
    REQUIRE(ok.code == 0);
    CHECK(read_records(d / "o/dataset.uwb").size() == 1);
    CHECK(DatasetManifest::from_json(slurp(d / "o/manifest.json")).source == DatasetSource::imported);
}
