// Copyright 2026 The qimg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "qimg/io.hpp"
#include "qimg/netpbm.hpp"
#include "test_support.hpp"

namespace qimg {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

struct Result {
    int status = -1;
    std::string out;
    std::string err;
};

std::string Slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Runs the CLI inside `dir`, capturing stdout and stderr.
Result RunCli(const TempDir &dir, const std::string &args) {
    const auto out = dir.path() / "stdout.txt";
    const auto err = dir.path() / "stderr.txt";
    const std::string cmd = "cd '" + dir.path().string() + "' && '" + QIMG_CLI_PATH + "' " + args + " >'" + out.string() +
                            "' 2>'" + err.string() + "'";
    const int raw = std::system(cmd.c_str());
    Result r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = Slurp(out);
    r.err = Slurp(err);
    return r;
}

void MustRun(const TempDir &dir, const std::string &args) {
    const auto r = RunCli(dir, args);
    ASSERT_EQ(r.status, 0) << args << "\n" << r.out << r.err;
}

double ParseSeconds(const std::string &text, const std::string &label) {
    const std::regex re(label + " ([0-9.]+) (us|ms|s)");
    std::smatch m;
    if (!std::regex_search(text, m, re)) return -1.0;
    const double v = std::stod(m[1]);
    return m[2] == "us" ? v * 1e-6 : m[2] == "ms" ? v * 1e-3 : v;
}

TEST(Cli, EncodeWritesOneRowPerImage) {
    TempDir dir("cli_encode");
    MustRun(dir, "gen-data --classes 2 --per-class 5 --out data");
    MustRun(dir, "encode --dataset data --method qcnn --out q");
    const auto q = load_features(dir.path() / "q" / "features.json");
    EXPECT_EQ(q.rows.size(), 10u);
    EXPECT_EQ(q.feature_length, 64u);
    for (const auto &row : q.rows) EXPECT_EQ(row.size(), 64u);
    MustRun(dir, "encode --dataset data --method frqi --out f");
    EXPECT_EQ(load_features(dir.path() / "f" / "features.json").feature_length, 256u);
    const auto r = RunCli(dir, "encode --dataset data --method cnn --out c");
    EXPECT_NE(r.status, 0);
    EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST(Cli, EncodeTimingGrowsWithImageCount) {
    TempDir dir("cli_timing");
    MustRun(dir, "gen-data --classes 2 --per-class 2 --out small");
    MustRun(dir, "gen-data --classes 2 --per-class 64 --out large");
    const auto small = RunCli(dir, "encode --dataset small --method neqr --out s");
    const auto large = RunCli(dir, "encode --dataset large --method neqr --out l");
    ASSERT_EQ(small.status, 0);
    ASSERT_EQ(large.status, 0);
    const double a = ParseSeconds(small.out, "total");
    const double b = ParseSeconds(large.out, "total");
    ASSERT_GT(a, 0.0) << small.out;
    EXPECT_GT(b, a) << small.out << large.out;
    EXPECT_GT(ParseSeconds(large.out, "mean"), 0.0);
    EXPECT_GT(ParseSeconds(large.out, "median"), 0.0);
}

TEST(Cli, TrainWritesCurvesAndIsReproducible) {
    TempDir dir("cli_train");
    MustRun(dir, "gen-data --classes 4 --per-class 30 --blur 2 --noise 0.05 --out data");
    MustRun(dir, "train --dataset data --method qcnn --epochs 5 --seed 3 --out a");
    MustRun(dir, "train --dataset data --method qcnn --epochs 5 --seed 3 --out b");
    const auto csv = Slurp(dir.path() / "a" / "report.csv");
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "epoch,train_loss,train_acc,val_loss,val_acc");
    int expected = 1;
    while (std::getline(lines, line)) EXPECT_EQ(std::stoi(line.substr(0, line.find(','))), expected++);
    EXPECT_EQ(expected, 6);
    for (const char *f : {"report.csv", "confusion.csv", "model.json"}) {
        EXPECT_EQ(Slurp(dir.path() / "a" / f), Slurp(dir.path() / "b" / f)) << f;
    }
    auto config_a = read_json_file(dir.path() / "a" / "config.json");
    auto config_b = read_json_file(dir.path() / "b" / "config.json");
    config_a.erase("out");
    config_b.erase("out");
    EXPECT_EQ(config_a, config_b);
    MustRun(dir, "encode --dataset data --method qcnn --out enc");
    MustRun(dir, "train --features enc/features.json --epochs 5 --seed 3 --out c");
    EXPECT_EQ(Slurp(dir.path() / "c" / "report.csv"), csv);
    EXPECT_NE(RunCli(dir, "train --features enc/features.json --method frqi --out d").status, 0);
}

TEST(Cli, TrainSummaryMirrorsTableRow) {
    TempDir dir("cli_summary");
    MustRun(dir, "gen-data --classes 2 --per-class 10 --out data");
    const auto r = RunCli(dir, "train --dataset data --method cnn --epochs 2 --out m");
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_NE(r.out.find("Model"), std::string::npos);
    EXPECT_NE(r.out.find("Accuracy"), std::string::npos);
    EXPECT_NE(r.out.find("cnn"), std::string::npos);
    EXPECT_NE(r.out.find("20"), std::string::npos);
}

TEST(Cli, PredictClassifiesAndRejectsMismatches) {
    TempDir dir("cli_predict");
    MustRun(dir, "gen-data --classes 4 --per-class 40 --out data");
    MustRun(dir, "train --dataset data --method qcnn --out m");
    const std::vector<std::string> classes{"00_vbar", "01_cross", "02_disk", "03_ring"};
    for (const auto &cls : classes) {
        const auto r = RunCli(dir, "predict --model m/model.json --image data/" + cls + "/00000.pgm");
        ASSERT_EQ(r.status, 0) << r.err;
        EXPECT_NE(r.out.find("class: " + cls + "\n"), std::string::npos) << r.out;
        EXPECT_NE(r.out.find("encode time:"), std::string::npos);
        EXPECT_NE(r.out.find("inference time:"), std::string::npos);
    }
    auto probabilities = [](const std::string &out) { return out.substr(0, out.find("encode time:")); };
    const auto first = RunCli(dir, "predict --model m/model.json --image data/01_cross/00003.pgm");
    const auto second = RunCli(dir, "predict --model m/model.json --image data/01_cross/00003.pgm");
    EXPECT_EQ(probabilities(first.out), probabilities(second.out));

    MustRun(dir, "gen-data --classes 4 --per-class 1 --side 32 --out big");
    const auto side = RunCli(dir, "predict --model m/model.json --image big/00_vbar/00000.pgm");
    EXPECT_NE(side.status, 0);
    EXPECT_NE(side.err.find("expects 16x16"), std::string::npos) << side.err;
    const auto method = RunCli(dir, "predict --model m/model.json --method frqi --image data/00_vbar/00000.pgm");
    EXPECT_NE(method.status, 0);
    EXPECT_NE(RunCli(dir, "predict --model missing.json --image data/00_vbar/00000.pgm").status, 0);
}

TEST(Cli, BenchComparesAllMethodsOnOneDataset) {
    TempDir dir("cli_bench");
    MustRun(dir, "bench --per-class 25 --epochs 3 --out b");
    const auto doc = read_json_file(dir.path() / "b" / "bench.json");
    const auto &rows = doc.at("rows");
    ASSERT_EQ(rows.size(), 5u);
    std::map<std::string, std::size_t> features;
    for (const auto &row : rows) {
        EXPECT_EQ(row.at("dataset_id"), rows[0].at("dataset_id"));
        EXPECT_EQ(row.at("error"), "");
        features[row.at("method")] = row.at("features");
        EXPECT_TRUE(fs::exists(dir.path() / "b" / ("confusion_" + row.at("method").get<std::string>() + ".csv")));
    }
    EXPECT_EQ(features["qcnn"], 64u);
    EXPECT_EQ(features["mlp"], 256u);
    EXPECT_LT(features["qcnn"], features["mlp"]);

    const auto csv = Slurp(dir.path() / "b" / "bench.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
    const auto text = Slurp(dir.path() / "b" / "bench.txt");
    for (const char *m : {"qcnn", "frqi", "neqr", "cnn", "mlp"}) EXPECT_NE(text.find(m), std::string::npos);
}

TEST(Cli, BenchRecordsFailuresInRow) {
    TempDir dir("cli_bench_fail");
    const auto r = RunCli(dir, "bench --method neqr --side 512 --classes 2 --per-class 2 --epochs 1 --out b");
    EXPECT_NE(r.status, 0);
    const auto doc = read_json_file(dir.path() / "b" / "bench.json");
    ASSERT_EQ(doc.at("rows").size(), 1u);
    EXPECT_NE(doc["rows"][0]["error"].get<std::string>().find("qubits"), std::string::npos);
}

TEST(Cli, ConfigFileIsValidatedAndOverriddenByFlags) {
    TempDir dir("cli_config");
    MustRun(dir, "gen-data --classes 2 --per-class 10 --out data");
    std::ofstream(dir.path() / "good.json") << R"({"method": "mlp", "epochs": 7, "hidden": [8], "noise_spec": {"depolarizing_prob": 0.0}})";
    MustRun(dir, "train --dataset data --config good.json --epochs 2 --out m");
    const auto cfg = read_json_file(dir.path() / "m" / "config.json");
    EXPECT_EQ(cfg["epochs"], 2);
    EXPECT_EQ(cfg["hidden"], nlohmann::json::array({8}));
    EXPECT_EQ(cfg["method"], nlohmann::json::array({"mlp"}));

    std::ofstream(dir.path() / "unknown.json") << R"({"epoch": 7})";
    const auto unknown = RunCli(dir, "train --dataset data --config unknown.json --out u");
    EXPECT_NE(unknown.status, 0);
    EXPECT_NE(unknown.err.find("unknown key 'epoch'"), std::string::npos) << unknown.err;
    std::ofstream(dir.path() / "typed.json") << R"({"lr": "fast"})";
    EXPECT_NE(RunCli(dir, "train --dataset data --config typed.json --out t").status, 0);
    EXPECT_NE(RunCli(dir, "train --dataset data --config missing.json --out t").status, 0);
}

TEST(Cli, OutputDirectoryFromEnvironment) {
    TempDir dir("cli_env");
    const std::string cmd = "cd '" + dir.path().string() + "' && QIMG_OUT_DIR=from_env '" + QIMG_CLI_PATH +
                            "' gen-data --classes 2 --per-class 2 >/dev/null";
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    EXPECT_TRUE(fs::exists(dir.path() / "from_env" / "manifest.json"));
}

TEST(Cli, ReconstructRoundTripsExactly) {
    TempDir dir("cli_recon");
    MustRun(dir, "gen-data --classes 4 --per-class 1 --noise 0.2 --out data");
    for (const char *m : {"frqi", "neqr"}) {
        MustRun(dir, std::string("reconstruct --image data/03_ring/00000.pgm --method ") + m + " --out r");
        EXPECT_EQ(Slurp(dir.path() / "r" / (std::string("reconstructed_") + m + ".pgm")), Slurp(dir.path() / "data/03_ring/00000.pgm"));
    }
    MustRun(dir, "reconstruct --image data/03_ring/00000.pgm --method qcnn --out r");
    const auto q = read_netpbm(dir.path() / "r" / "reconstructed_qcnn.pgm");
    EXPECT_EQ(q.width, 8);
}

TEST(Cli, UsageErrorsExitNonzero) {
    TempDir dir("cli_usage");
    EXPECT_NE(RunCli(dir, "").status, 0);
    EXPECT_NE(RunCli(dir, "frobnicate").status, 0);
    EXPECT_NE(RunCli(dir, "train --epochs banana").status, 0);
    EXPECT_NE(RunCli(dir, "train").status, 0);
    EXPECT_EQ(RunCli(dir, "--help").status, 0);
}

}  // namespace
}  // namespace qimg
