// Copyright 2026 The usynth Authors
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

#include "usynth/cli.hpp"

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "usynth/io.hpp"

namespace usynth {
namespace {

namespace fs = std::filesystem;

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
};

CliRun run(std::vector<std::string> args) {
    args.insert(args.begin(), "usynth");
    std::vector<const char*> argv;
    for (const std::string& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    CliRun r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("usynth_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

TEST(Bound, Values) {
    EXPECT_EQ(cnot_lower_bound(1), 0u);
    EXPECT_EQ(cnot_lower_bound(2), 3u);
    EXPECT_EQ(cnot_lower_bound(3), 14u);
    EXPECT_EQ(cnot_lower_bound(4), 61u);
    EXPECT_EQ(cnot_lower_bound(5), 252u);
    EXPECT_EQ(cnot_lower_bound(6), 1020u);
    EXPECT_THROW(cnot_lower_bound(0), std::out_of_range);
    EXPECT_THROW(cnot_lower_bound(32), std::out_of_range);
}

TEST(Bound, MatchesCeilingFormula) {
    for (int n = 1; n <= 20; ++n) {
        const std::uint64_t p = std::uint64_t{1} << (2 * n);
        const std::uint64_t num = p - 3 * static_cast<std::uint64_t>(n) - 1;
        EXPECT_EQ(cnot_lower_bound(n), num / 4 + (num % 4 != 0));
    }
}

TEST(Bound, Subcommand) {
    const CliRun r = run({"bound", "5"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "252\n");
    EXPECT_EQ(run({"bound", "0"}).code, 1);
    EXPECT_EQ(run({"bound"}).code, 1);
}

TEST_F(CliTest, RandomIsDeterministicAndUnitary) {
    const CliRun a = run({"random", "3", "--seed", "9"});
    const CliRun b = run({"random", "3", "--seed", "9"});
    const CliRun c = run({"random", "3", "--seed", "10"});
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out, c.out);
    std::istringstream in(a.out);
    EXPECT_LE(unitarity_defect(read_umat(in)), 1e-12);
    EXPECT_EQ(run({"random", "2", "-o", path("u.umat")}).code, 0);
    EXPECT_TRUE(fs::exists(path("u.umat")));
}

TEST_F(CliTest, DecomposeThenVerify) {
    ASSERT_EQ(run({"random", "2", "--seed", "4", "-o", path("u.umat")}).code, 0);
    const CliRun d = run({"decompose", path("u.umat"), "--seed", "4"});
    ASSERT_EQ(d.code, 0) << d.err;
    EXPECT_NE(d.out.find("cnot_count 3"), std::string::npos);
    EXPECT_NE(d.out.find("converged true"), std::string::npos);
    ASSERT_TRUE(fs::exists(path("u.qasm")));
    ASSERT_TRUE(fs::exists(path("u.json")));
    const auto report = nlohmann::json::parse(slurp(path("u.json")));
    EXPECT_EQ(report["cnot_count"], 3);
    EXPECT_LE(report["spectral_error"].get<double>(), 1e-6);
    EXPECT_TRUE(report.contains("wall_time"));
    EXPECT_EQ(report["config"]["layers"], nlohmann::json::array({3}));

    const CliRun v = run({"verify", path("u.qasm"), path("u.umat")});
    EXPECT_EQ(v.code, 0);
    EXPECT_NE(v.out.find("spectral_error"), std::string::npos);
    // Against u itself instead of u† the circuit is far off.
    EXPECT_EQ(run({"verify", path("u.qasm"), path("u.umat"), "--invert-input"}).code, 2);
}

TEST_F(CliTest, InvertInputRealizesU) {
    ASSERT_EQ(run({"random", "2", "--seed", "5", "-o", path("u.umat")}).code, 0);
    ASSERT_EQ(run({"decompose", path("u.umat"), "--invert-input", "-o", path("c.qasm"), "--report", path("r.json")})
                  .code,
              0);
    EXPECT_EQ(run({"verify", path("c.qasm"), path("u.umat"), "--invert-input"}).code, 0);
    EXPECT_EQ(run({"verify", path("c.qasm"), path("u.umat")}).code, 2);
}

TEST_F(CliTest, OmitTimingReportsAreByteIdentical) {
    ASSERT_EQ(run({"random", "2", "--seed", "6", "-o", path("u.umat")}).code, 0);
    for (const char* name : {"a", "b"}) {
        ASSERT_EQ(run({"decompose", path("u.umat"), "--omit-timing", "-o", path(std::string(name) + ".qasm"),
                       "--report", path(std::string(name) + ".json")})
                      .code,
                  0);
    }
    const std::string a = slurp(path("a.json"));
    EXPECT_EQ(a.find("wall_time"), std::string::npos);
    EXPECT_NE(a.find("a.qasm"), std::string::npos);
    const std::string b = slurp(path("b.json"));
    auto ja = nlohmann::json::parse(a);
    auto jb = nlohmann::json::parse(b);
    ja["config"].erase("qasm");
    jb["config"].erase("qasm");
    EXPECT_EQ(ja.dump(), jb.dump());
    EXPECT_EQ(slurp(path("a.qasm")), slurp(path("b.qasm")));
}

TEST_F(CliTest, DecomposeErrors) {
    write_umat_file(path("bad.umat"), 2.0 * identity(4));
    EXPECT_EQ(run({"decompose", path("bad.umat")}).code, 1);
    EXPECT_EQ(run({"decompose", path("missing.umat")}).code, 1);
    ASSERT_EQ(run({"random", "1", "-o", path("one.umat")}).code, 0);
    EXPECT_EQ(run({"decompose", path("one.umat")}).code, 1);
    ASSERT_EQ(run({"random", "2", "-o", path("u.umat")}).code, 0);
    EXPECT_EQ(run({"decompose", path("u.umat"), "--entangler", "swap"}).code, 1);
    EXPECT_EQ(run({"decompose", path("u.umat"), "--layers", "3,3"}).code, 1);
    const CliRun r = run({"decompose", path("u.umat"), "--topology", "nowhere"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.err.rfind("usynth: ", 0), 0u);
}

TEST_F(CliTest, UnconvergedDecomposeExitsTwo) {
    ASSERT_EQ(run({"random", "3", "--seed", "2", "-o", path("u.umat")}).code, 0);
    const CliRun r = run({"decompose", path("u.umat"), "--layers", "2,3", "--timeout-s", "2", "--no-fine-tune"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("converged false"), std::string::npos);
}

TEST_F(CliTest, SweepCsvIsDeterministic) {
    const std::vector<std::string> args = {"sweep", "-n", "2", "--min-layers", "1", "--max-layers",
                                           "3",     "--trials", "2", "--omit-timing", "--seed", "3"};
    const CliRun a = run(args);
    const CliRun b = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    std::istringstream lines(a.out);
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "n,layers,eps_mean,eps_std,seconds_mean");
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        EXPECT_EQ(line.substr(0, 2), "2,");
        EXPECT_EQ(line.substr(line.size() - 3), ",NA");
    }
    EXPECT_EQ(rows, 3);
}

TEST(SweepSpecTest, Validation) {
    SweepSpec s;
    s.n_qubits = 3;
    s.layer_min = 6;
    s.layer_max = 4;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s.layer_max = 10;
    s.layer_step = 2;
    EXPECT_NO_THROW(s.validate());
    EXPECT_EQ(s.layer_counts(), (std::vector<int>{6, 8, 10}));
    s.trials = 0;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s.trials = 1;
    s.layer_min = 1;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s.layer_min = 2;
    s.n_qubits = 6;
    EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(SweepCsv, Formatting) {
    SweepRow row;
    row.n_qubits = 3;
    row.layers = 9;
    row.eps_mean = 0.5;
    row.seconds_mean = 1.25;
    EXPECT_EQ(sweep_csv({row}, false), "n,layers,eps_mean,eps_std,seconds_mean\n3,9,0.5,NA,1.25\n");
    EXPECT_EQ(sweep_csv({row}, true), "n,layers,eps_mean,eps_std,seconds_mean\n3,9,0.5,NA,NA\n");
}

TEST(Executable, ExitCodes) {
    const std::string exe = USYNTH_CLI_PATH;
    const int ok = std::system((exe + " bound 3 > /dev/null").c_str());
    ASSERT_TRUE(WIFEXITED(ok));
    EXPECT_EQ(WEXITSTATUS(ok), 0);
    const int bad = std::system((exe + " frobnicate > /dev/null 2>&1").c_str());
    ASSERT_TRUE(WIFEXITED(bad));
    EXPECT_EQ(WEXITSTATUS(bad), 1);
    const int help = std::system((exe + " --help > /dev/null").c_str());
    EXPECT_EQ(WEXITSTATUS(help), 0);
}

}  // namespace
}  // namespace usynth
