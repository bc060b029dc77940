#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

std::string bin() {
    const char* b = std::getenv("ORDCP_BIN");
    REQUIRE(b != nullptr);
    return b;
}

int run(const std::string& args) {
    const std::string cmd = bin() + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("ordcp_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string s(const std::string& rel) const { return (path / rel).string(); }
};

}  // namespace

TEST_CASE("full pipeline runs end to end and is deterministic") {
    TempDir tmp;
    REQUIRE(run("synth --n 800 --seed 3 --groups --docs --file " + tmp.s("fix.csv")) == 0);

    for (const std::string round : {"r1", "r2"}) {
        fs::create_directories(tmp.path / round);
        const std::string out = tmp.s(round);
        REQUIRE(run("split --input " + tmp.s("fix.csv") + " --fraction 0.68 --seed 5 --out " + out) == 0);
        REQUIRE(run("calibrate --input " + out + "/dev_cal.csv --score aps --alpha 0.1 --out " + out) == 0);
        REQUIRE(run("predict --input " + out + "/dev_tune.csv --threshold " + out +
                    "/threshold.json --score aps --decoder cp_mean --emit-weights --out " + out) == 0);
        REQUIRE(run("evaluate --predictions " + out + "/predictions.csv --gold " + out +
                    "/dev_tune.csv --out " + out) == 0);
    }
    for (const std::string f : {"dev_cal.csv", "dev_tune.csv", "split_manifest.json",
                                "threshold.json", "predictions.csv", "doc_predictions.csv",
                                "weights.jsonl", "report.json", "report.csv"})
        CHECK(read_file(tmp.path / "r1" / f) == read_file(tmp.path / "r2" / f));

    const auto report = nlohmann::json::parse(read_file(tmp.path / "r1/report.json"));
    CHECK(report["coverage"].get<double>() >= 0.85);
    CHECK(report["qwk"].get<double>() > 0.0);
    CHECK(report["per_group_failure"].contains("overall"));
    // weights rows parse and sum to 1
    std::ifstream w(tmp.path / "r1/weights.jsonl");
    std::string line;
    REQUIRE(std::getline(w, line));
    const auto row = nlohmann::json::parse(line);
    double sum = 0.0;
    for (double x : row["weights"]) sum += x;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("split manifest per-class counts") {
    TempDir tmp;
    REQUIRE(run("synth --n 500 --seed 8 --file " + tmp.s("fix.csv")) == 0);
    REQUIRE(run("split --input " + tmp.s("fix.csv") + " --fraction 0.8 --seed 1 --out " + tmp.s("")) == 0);
    const auto manifest = nlohmann::json::parse(read_file(tmp.path / "split_manifest.json"));
    int first = 0, second = 0;
    for (const auto& [cls, counts] : manifest["per_class"].items()) {
        CHECK(counts["first"].get<int>() + counts["second"].get<int>() ==
              counts["total"].get<int>());
        first += counts["first"].get<int>();
        second += counts["second"].get<int>();
    }
    CHECK(first == manifest["totals"]["first"].get<int>());
    CHECK(first + second == 500);
}

TEST_CASE("two-row two-class split at fraction 0.5") {
    TempDir tmp;
    std::ofstream f(tmp.path / "two.csv");
    f << "id,gold,doc_id,group,p1,p2\na,1,,,0.9,0.1\nb,2,,,0.2,0.8\n";
    f.close();
    REQUIRE(run("split --input " + tmp.s("two.csv") + " --fraction 0.5 --k 2 --out " + tmp.s("")) == 0);
    const auto manifest = nlohmann::json::parse(read_file(tmp.path / "split_manifest.json"));
    CHECK(manifest["totals"]["first"].get<int>() == 2);  // singleton classes go first
    CHECK(manifest["totals"]["second"].get<int>() == 0);
}

TEST_CASE("exit codes") {
    TempDir tmp;
    // 2: parse failure
    std::ofstream bad(tmp.path / "bad.csv");
    bad << "id,gold,doc_id,group,p1,p2\nr1,1,,,x,0.5\n";
    bad.close();
    CHECK(run("calibrate --input " + tmp.s("bad.csv") + " --k 2 --out " + tmp.s("")) == 2);

    // 3: missing gold at calibration
    std::ofstream nogold(tmp.path / "nogold.csv");
    nogold << "id,gold,doc_id,group,p1,p2\nr1,,,,0.5,0.5\n";
    nogold.close();
    CHECK(run("calibrate --input " + tmp.s("nogold.csv") + " --k 2 --out " + tmp.s("")) == 3);

    // 4: invalid alpha
    std::ofstream ok(tmp.path / "ok.csv");
    ok << "id,gold,doc_id,group,p1,p2\nr1,1,,,0.6,0.4\nr2,2,,,0.3,0.7\n";
    ok.close();
    CHECK(run("calibrate --input " + tmp.s("ok.csv") + " --k 2 --alpha 1.5 --out " + tmp.s("")) == 4);

    // 5: score kind mismatch between threshold and flag
    REQUIRE(run("calibrate --input " + tmp.s("ok.csv") + " --k 2 --score aps --out " + tmp.s("")) == 0);
    CHECK(run("predict --input " + tmp.s("ok.csv") + " --threshold " + tmp.s("threshold.json") +
              " --score naive --k 2 --out " + tmp.s("")) == 5);

    // 6: id mismatch between predictions and gold
    REQUIRE(run("predict --input " + tmp.s("ok.csv") + " --threshold " + tmp.s("threshold.json") +
                " --score aps --k 2 --out " + tmp.s("")) == 0);
    std::ofstream other(tmp.path / "other.csv");
    other << "id,gold,doc_id,group,p1,p2\nzz,1,,,0.6,0.4\nr2,2,,,0.3,0.7\n";
    other.close();
    CHECK(run("evaluate --predictions " + tmp.s("predictions.csv") + " --gold " +
              tmp.s("other.csv") + " --k 2 --out " + tmp.s("")) == 6);

    // 3: oracle decoder without gold labels
    CHECK(run("predict --input " + tmp.s("nogold.csv") + " --threshold " + tmp.s("threshold.json") +
              " --score aps --k 2 --decoder oracle --out " + tmp.s("")) == 3);
}

TEST_CASE("one-hot inputs decode to singleton argmax sets") {
    TempDir tmp;
    std::ofstream f(tmp.path / "onehot.csv");
    f << "id,gold,doc_id,group,p1,p2,p3\n";
    f << "a,1,,,1,0,0\nb,2,,,0,1,0\nc,3,,,0,0,1\nd,1,,,1,0,0\ne,2,,,0,1,0\n";
    f.close();
    REQUIRE(run("calibrate --input " + tmp.s("onehot.csv") + " --k 3 --score naive --alpha 0.4 --out " + tmp.s("")) == 0);
    REQUIRE(run("predict --input " + tmp.s("onehot.csv") + " --threshold " + tmp.s("threshold.json") +
                " --score naive --k 3 --out " + tmp.s("")) == 0);
    const std::string preds = read_file(tmp.path / "predictions.csv");
    CHECK(preds.find("a,1,1,1") != std::string::npos);
    CHECK(preds.find("b,2,2,2") != std::string::npos);
}

TEST_CASE("document rows aggregate to the max sentence level") {
    TempDir tmp;
    std::ofstream f(tmp.path / "docs.csv");
    f << "id,gold,doc_id,group,p1,p2,p3,p4,p5,p6,p7\n";
    f << "a,3,D,,0,0,1,0,0,0,0\nb,7,D,,0,0,0,0,0,0,1\nc,5,D,,0,0,0,0,1,0,0\n";
    f << "d,2,E,,0,1,0,0,0,0,0\n";
    f.close();
    REQUIRE(run("calibrate --input " + tmp.s("docs.csv") + " --k 7 --score naive --alpha 0.4 --out " + tmp.s("")) == 0);
    REQUIRE(run("predict --input " + tmp.s("docs.csv") + " --threshold " + tmp.s("threshold.json") +
                " --score naive --k 7 --out " + tmp.s("")) == 0);
    const std::string docs = read_file(tmp.path / "doc_predictions.csv");
    CHECK(docs.find("D,7") != std::string::npos);
    CHECK(docs.find("E,2") != std::string::npos);
}

TEST_CASE("sweep emits one row per (kind, alpha) cell") {
    TempDir tmp;
    REQUIRE(run("synth --n 400 --seed 21 --file " + tmp.s("cal.csv")) == 0);
    REQUIRE(run("synth --n 400 --seed 22 --file " + tmp.s("tune.csv")) == 0);
    REQUIRE(run("sweep --cal " + tmp.s("cal.csv") + " --tune " + tmp.s("tune.csv") +
                " --scores naive,aps,raps --alphas 0.1,0.2,0.3 --out " + tmp.s("")) == 0);
    const std::string csv = read_file(tmp.path / "sweep.csv");
    std::size_t rows = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
    CHECK(rows == 10);  // header + 9 cells
}

TEST_CASE("ensemble average and vote modes") {
    TempDir tmp;
    REQUIRE(run("synth --n 300 --seed 31 --file " + tmp.s("m1.csv")) == 0);
    // same ids, different posteriors: reuse the generator with another seed and patch ids
    REQUIRE(run("synth --n 300 --seed 32 --file " + tmp.s("m2.csv")) == 0);

    REQUIRE(run("calibrate --input " + tmp.s("m1.csv") + " --input " + tmp.s("m2.csv") +
                " --ensemble average --score aps --out " + tmp.s("")) == 0);
    REQUIRE(run("predict --input " + tmp.s("m1.csv") + " --input " + tmp.s("m2.csv") +
                " --ensemble average --threshold " + tmp.s("threshold.json") +
                " --score aps --out " + tmp.s("avg_")) == 0);
    CHECK(fs::exists(tmp.path / "avg_/predictions.csv"));

    REQUIRE(run("calibrate --input " + tmp.s("m2.csv") + " --score aps --out " + tmp.s("t2_")) == 0);
    REQUIRE(run("predict --input " + tmp.s("m1.csv") + " --input " + tmp.s("m2.csv") +
                " --ensemble vote --threshold " + tmp.s("threshold.json") + " --threshold " +
                tmp.s("t2_/threshold.json") + " --score aps --out " + tmp.s("vote_")) == 0);
    CHECK(fs::exists(tmp.path / "vote_/predictions.csv"));
}

TEST_CASE("evaluate perfect predictions") {
    TempDir tmp;
    std::ofstream g(tmp.path / "gold.csv");
    g << "id,gold,doc_id,group,p1,p2,p3\na,1,,,1,0,0\nb,3,,,0,0,1\n";
    g.close();
    std::ofstream p(tmp.path / "preds.csv");
    p << "id,pred,baseline,set\na,1,1,1\nb,3,3,3\n";
    p.close();
    REQUIRE(run("evaluate --predictions " + tmp.s("preds.csv") + " --gold " + tmp.s("gold.csv") +
                " --k 3 --out " + tmp.s("")) == 0);
    const auto report = nlohmann::json::parse(read_file(tmp.path / "report.json"));
    CHECK(report["qwk"].get<double>() == 1.0);
    CHECK(report["acc"].get<double>() == 1.0);
    CHECK(report["dist"].get<double>() == 0.0);
}

TEST_CASE("shipped coarse maps file parses") {
    TempDir tmp;
    const char* data = std::getenv("ORDCP_DATA");
    REQUIRE(data != nullptr);
    std::ofstream g(tmp.path / "gold.csv");
    g << "id,gold,doc_id,group,p1";
    for (int i = 2; i <= 19; ++i) g << ",p" << i;
    g << "\na,5,,,";
    for (int i = 1; i <= 19; ++i) g << (i == 5 ? "1" : "0") << (i < 19 ? "," : "\n");
    g.close();
    std::ofstream p(tmp.path / "preds.csv");
    p << "id,pred,baseline,set\na,5,5,5\n";
    p.close();
    REQUIRE(run("evaluate --predictions " + tmp.s("preds.csv") + " --gold " + tmp.s("gold.csv") +
                " --coarse-maps " + std::string(data) + "/coarse_maps.json --out " + tmp.s("")) == 0);
    const auto report = nlohmann::json::parse(read_file(tmp.path / "report.json"));
    CHECK(report["acc7"].get<double>() == 1.0);
}
