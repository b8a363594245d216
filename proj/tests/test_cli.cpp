#include <gtest/gtest.h>

#include <filesystem>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"
#include "lobrate/cli.hpp"
#include "lobrate/csv.hpp"

using namespace lobrate;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("lobrate_cli_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int run(std::vector<std::string> args) {
        std::vector<const char*> argv{"lobrate"};
        for (const auto& a : args) argv.push_back(a.c_str());
        out_.str("");
        err_.str("");
        return cli::run(static_cast<int>(argv.size()), argv.data(), out_, err_);
    }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    static std::string read(const std::string& p) {
        std::ifstream is(p, std::ios::binary);
        std::ostringstream ss;
        ss << is.rdbuf();
        return ss.str();
    }

    void write(const std::string& p, const std::string& content) const {
        std::ofstream os(p, std::ios::binary);
        os << content;
    }

    fs::path dir_;
    std::ostringstream out_;
    std::ostringstream err_;
};

std::vector<std::vector<std::string>> rows(const std::string& text) {
    std::vector<std::vector<std::string>> out;
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) {
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string f;
        while (std::getline(ls, f, ',')) fields.push_back(f);
        out.push_back(fields);
    }
    return out;
}

}  // namespace

TEST_F(CliTest, FullPipelineAndDeterminism) {
    ASSERT_EQ(run({"synth", "--seed", "5", "--days", "8", "--orders-per-day", "400", "--out", path("s")}), 0);
    ASSERT_EQ(run({"rates", path("s/stream.lobf"), "--out", path("r1")}), 0);
    ASSERT_EQ(run({"rates", path("s/stream.lobf"), "--out", path("r2")}), 0);
    EXPECT_EQ(read(path("r1/rates.csv")), read(path("r2/rates.csv")));
    EXPECT_EQ(read(path("r1/cancels.csv")), read(path("r2/cancels.csv")));

    ASSERT_EQ(run({"fit", path("r1/rates.csv"), "--out", path("f1"), "--threads", "1"}), 0);
    ASSERT_EQ(run({"fit", path("r1/rates.csv"), "--out", path("f2"), "--threads", "3"}), 0);
    for (const char* f : {"fits.json", "scores.csv", "nps.csv", "welch.csv"}) {
        EXPECT_EQ(read(path(std::string("f1/") + f)), read(path(std::string("f2/") + f))) << f;
    }
    const auto fits = nlohmann::json::parse(read(path("f1/fits.json")));
    EXPECT_EQ(fits["fits"].size(), fits["instances"].get<std::size_t>() * 5);
    const auto& first = fits["fits"][0];
    for (const char* k : {"bucket", "side", "family", "params", "tick_curve", "l1_error", "converged", "starts_used"}) {
        EXPECT_TRUE(first.contains(k)) << k;
    }
    EXPECT_EQ(read(path("f1/nps.csv")).substr(0, 38), "timestep,group,family,mean_nps,sd_nps,");

    ASSERT_EQ(run({"cancel-test", path("r1/cancels.csv"), "--out", path("c")}), 0);
    const auto chi = rows(read(path("c/chi2.csv")));
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& r : chi) {
        EXPECT_TRUE(r[0].starts_with("weekly:") || r[0].starts_with("monthly:"));
        EXPECT_TRUE(seen.insert({r[0], r[1]}).second) << "duplicate row " << r[0] << ' ' << r[1];
    }
    EXPECT_FALSE(chi.empty());
}

TEST_F(CliTest, SynthIsByteIdenticalAcrossRuns) {
    ASSERT_EQ(run({"synth", "--seed", "9", "--days", "2", "--out", path("a")}), 0);
    ASSERT_EQ(run({"synth", "--seed", "9", "--days", "2", "--out", path("b")}), 0);
    EXPECT_EQ(read(path("a/stream.lobf")), read(path("b/stream.lobf")));
    EXPECT_EQ(read(path("a/ground_truth.json")), read(path("b/ground_truth.json")));
}

TEST_F(CliTest, EmptyInputFailsWithoutOutputs) {
    write(path("empty.lobf"), "");
    EXPECT_EQ(run({"rates", path("empty.lobf"), "--out", path("r")}), cli::kExitInput);
    EXPECT_FALSE(fs::exists(path("r/rates.csv")));
    EXPECT_FALSE(fs::exists(path("r/cancels.csv")));
    EXPECT_NE(err_.str().find("error"), std::string::npos);
}

TEST_F(CliTest, CorruptInputIsAnInputError) {
    write(path("bad.lobf"), "LOBFgarbage");
    EXPECT_EQ(run({"rates", path("bad.lobf"), "--out", path("r")}), cli::kExitInput);
    EXPECT_EQ(run({"rates", path("missing.lobf"), "--out", path("r")}), cli::kExitInput);
    EXPECT_FALSE(fs::exists(path("r")));
}

TEST_F(CliTest, BadFlagsAreInputErrors) {
    EXPECT_EQ(run({}), cli::kExitInput);
    EXPECT_EQ(run({"synth"}), cli::kExitInput);
    EXPECT_EQ(run({"synth", "--out", path("s"), "--cancel-probability", "2"}), cli::kExitInput);
    EXPECT_EQ(run({"synth", "--out", path("s"), "--arrival", "normal:0,1"}), cli::kExitInput);
    EXPECT_EQ(run({"rates", "x", "--out", path("r"), "--granularity", "yearly"}), cli::kExitInput);
    EXPECT_EQ(run({"rates", "x", "--out", path("r"), "--reference", "mid"}), cli::kExitInput);
    EXPECT_EQ(run({"fit", "x", "--out", path("f"), "--families", "dw,normal"}), cli::kExitInput);
    EXPECT_EQ(run({"fit", "x", "--out", path("f"), "--tail", "three"}), cli::kExitInput);
    EXPECT_EQ(run({"--help"}), cli::kExitOk);
}

TEST_F(CliTest, RatesFlagsShapeOutput) {
    ASSERT_EQ(run({"synth", "--seed", "2", "--days", "3", "--orders-per-day", "300", "--out", path("s")}), 0);
    ASSERT_EQ(run({"rates", path("s/stream.lobf"), "--out", path("r"), "--granularity", "weekly", "--side", "sell",
                   "--reference", "opposite"}),
              0);
    const auto r = rows(read(path("r/rates.csv")));
    ASSERT_EQ(r.size(), 15u);
    for (const auto& row : r) {
        EXPECT_EQ(row[0], "weekly:2017-W31");
        EXPECT_EQ(row[1], "sell");
    }
    // Measured from the best bid, every sell arrival sits at least two ticks out.
    EXPECT_EQ(r[0][3], "0");
}

TEST_F(CliTest, FitFamilySubsetAndOneTail) {
    ASSERT_EQ(run({"synth", "--seed", "4", "--days", "10", "--orders-per-day", "300", "--out", path("s")}), 0);
    ASSERT_EQ(run({"rates", path("s/stream.lobf"), "--out", path("r"), "--granularity", "daily"}), 0);
    ASSERT_EQ(run({"fit", path("r/rates.csv"), "--out", path("f"), "--families", "dw,bb", "--tail", "one",
                   "--truncated-likelihood"}),
              0);
    const auto fits = nlohmann::json::parse(read(path("f/fits.json")));
    EXPECT_EQ(fits["fits"].size(), 20u * 2u);
    EXPECT_TRUE(fits["options"]["truncated_likelihood"].get<bool>());
    const auto welch = rows(read(path("f/welch.csv")));
    ASSERT_EQ(welch.size(), 2u);
    for (const auto& w : welch) {
        EXPECT_EQ(w[1], "dw_vs_bb");
        EXPECT_EQ(w[2], "one");
        // One-sided p that DW scores lower; DW wins on DW data.
        EXPECT_LT(csv::parse_double(w[5]), 0.05);
    }
}

TEST_F(CliTest, ExactCurveInstanceScoresOne) {
    const auto curve = dist::tick_curve(dist::DiscreteWeibull{0.75, 1.3});
    std::ostringstream csv;
    csv << "bucket_key,side,tick,quantity,density\n";
    for (int i = 0; i < 15; ++i) {
        csv << "daily:2017-08-01,buy," << i + 1 << ',' << std::llround(curve[i] * 1e15) << ",0\n";
    }
    write(path("rates.csv"), csv.str());
    ASSERT_EQ(run({"fit", path("rates.csv"), "--out", path("f")}), 0);
    for (const auto& r : rows(read(path("f/scores.csv")))) {
        if (r[3] == "dw") EXPECT_EQ(r[5], "1") << r[2];
    }
}

TEST_F(CliTest, CancelTestSkipsMissingTicksAndFlagsSkew) {
    std::ostringstream csv;
    csv << "bucket_key,side,tick,count,mean_ratio\n";
    for (int i = 1; i <= 10; ++i) csv << "weekly:2017-W31,buy," << i << ",5," << (i == 1 ? "1" : "0") << '\n';
    for (int i = 1; i <= 10; ++i) csv << "weekly:2017-W31,sell," << i << ',' << (i == 4 ? "0,NA" : "3,0.2") << '\n';
    for (int i = 1; i <= 10; ++i) csv << "daily:2017-08-01,buy," << i << ",3,0.1\n";
    for (int i = 1; i <= 10; ++i) csv << "monthly:2017-08,sell," << i << ",3,0.1\n";
    write(path("cancels.csv"), csv.str());
    ASSERT_EQ(run({"cancel-test", path("cancels.csv"), "--out", path("c")}), 0);
    EXPECT_NE(err_.str().find("MissingTicks: weekly:2017-W31 sell"), std::string::npos);

    const auto chi = rows(read(path("c/chi2.csv")));
    ASSERT_EQ(chi.size(), 2u);
    EXPECT_EQ(chi[0][0], "weekly:2017-W31");
    EXPECT_LT(csv::parse_double(chi[0][4]), 1e-6);
    EXPECT_EQ(chi[1][0], "monthly:2017-08");
    EXPECT_EQ(chi[1][4], "1");

    const auto table = rows(read(path("c/chi2_table.csv")));
    ASSERT_EQ(table.size(), 2u);
    EXPECT_EQ(table[0][2], "NA");
    EXPECT_EQ(table[0][4], "NA");
}

// Uniform arrival ticks and tick-blind uniform cancels give level sizes, and
// so ratios, that do not depend on the tick.
TEST_F(CliTest, UniformCancelsPassTheUniformityTest) {
    int buckets = 0;
    int accepted = 0;
    for (int seed = 1; seed <= 5; ++seed) {
        const auto s = path("s" + std::to_string(seed));
        ASSERT_EQ(run({"synth", "--seed", std::to_string(seed), "--arrival", "bb:1,1", "--cancel-fraction", "uniform",
                       "--out", s}),
                  0);
        ASSERT_EQ(run({"rates", s + "/stream.lobf", "--out", s + "/r", "--granularity", "weekly,monthly"}), 0);
        ASSERT_EQ(run({"cancel-test", s + "/r/cancels.csv", "--out", s + "/c"}), 0);
        for (const auto& r : rows(read(s + "/c/chi2.csv"))) {
            ++buckets;
            accepted += csv::parse_double(r[4]) > 0.05;
        }
    }
    EXPECT_EQ(buckets, 5 * 22);
    EXPECT_GE(accepted, buckets * 9 / 10);
}

TEST(CliProcess, ExitCodes) {
    const std::string bin = LOBRATE_CLI_PATH;
    EXPECT_EQ(std::system((bin + " --help > /dev/null").c_str()), 0);
    const int rc = std::system((bin + " rates /nonexistent.lobf --out /tmp/lobrate_never > /dev/null 2>&1").c_str());
    ASSERT_TRUE(WIFEXITED(rc));
    EXPECT_EQ(WEXITSTATUS(rc), 1);
}
