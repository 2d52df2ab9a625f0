#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <hmgibbs/error.hpp>

#include "commands.hpp"
#include "problem.hpp"

#ifndef HMG_TEST_DATA
#error "HMG_TEST_DATA must point at tests/data"
#endif

namespace fs = std::filesystem;
using namespace hmg;

namespace {

const fs::path kData = HMG_TEST_DATA;

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "hmgibbs");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("hmgibbs_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST(Problem, ParsesFamiliesAndSchedule) {
    const auto ps = cli::load_problem(kData / "generic_chain.json");
    EXPECT_EQ(ps.source->size(), 3u);
    ASSERT_TRUE(ps.map);
    EXPECT_EQ((*ps.map)(2), 1u);
    ASSERT_TRUE(ps.table);
    EXPECT_NEAR(ps.table->value(Word::parse(ps.source, "12").rank()), std::log(0.7), 1e-15);
    EXPECT_EQ(ps.n, std::optional<std::size_t>(12));
    const auto g = cli::load_problem(kData / "geometric.json");
    EXPECT_EQ(g.family, cli::Family::GeometricTail);
    EXPECT_TRUE(g.general);
    EXPECT_EQ(g.max_states, 729u);
}

TEST(Problem, ErrorsCarryContext) {
    try {
        cli::parse_problem("{\n  \"alphabet\": [\"0\", \"1\"],\n  oops\n}", "inline");
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("inline:3:"), std::string::npos) << e.what();
    }
    try {
        cli::parse_problem(R"({"alphabet": ["0","1"], "potential": {"family": "table", "r": 1,
            "entries": [{"word": "00", "value": 0}, {"word": "0x", "value": 1}]}})", "inline");
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("entries[1]"), std::string::npos) << e.what();
    }
}

TEST(Cli, BernoulliMeasure) {
    const auto out = scratch("bernoulli");
    const auto r = run({"measure", "--spec", (kData / "bernoulli.json").string(), "--out", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = lines(slurp(out / "measure.csv"));
    EXPECT_EQ(rows.front(), "word,length,log_prob");
    EXPECT_EQ(rows.size(), 1u + 2 + 4 + 8 + 16 + 32);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto a = rows[i].find(','), b = rows[i].rfind(',');
        const double n = std::stod(rows[i].substr(a + 1, b - a - 1));
        EXPECT_NEAR(std::stod(rows[i].substr(b + 1)), -n * std::log(2.0), 1e-13);
    }
    const auto summary = slurp(out / "measure_summary.json");
    EXPECT_NE(summary.find("\"pressure\": 0.6931471805599453"), std::string::npos) << summary;
}

TEST(Cli, Log2DisplayFlag) {
    const auto out = scratch("log2");
    ASSERT_EQ(run({"measure", "--spec", (kData / "bernoulli.json").string(), "--out", out.string(), "--log2"}).code, 0);
    const auto rows = lines(slurp(out / "measure.csv"));
    EXPECT_EQ(rows[1], "a,1,-1");
}

TEST(Cli, StochasticPressureIsZero) {
    const auto out = scratch("stochastic");
    ASSERT_EQ(run({"measure", "--spec", (kData / "generic_chain.json").string(), "--out", out.string()}).code, 0);
    const auto s = slurp(out / "measure_summary.json");
    const auto at = s.find("\"pressure\": ");
    ASSERT_NE(at, std::string::npos);
    EXPECT_LT(std::abs(std::stod(s.substr(at + 12))), 1e-10);
}

TEST(Cli, NonSurjectiveMapNamesMissingSymbol) {
    const auto r = run({"pushforward", "--spec", (kData / "bad_map.json").string(), "--out", scratch("bad").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("'2'"), std::string::npos) << r.err;
}

TEST(Cli, MalformedJsonHasLineContext) {
    const auto r = run({"measure", "--spec", (kData / "malformed.json").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("malformed.json:4:"), std::string::npos) << r.err;
}

TEST(Cli, UnknownFlagIsValidationError) {
    EXPECT_EQ(run({"measure", "--bogus"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
}

TEST(Cli, PushforwardVerifyAndProductRows) {
    const auto out = scratch("product");
    const auto r = run({"pushforward", "--spec", (kData / "product.json").string(), "--out", out.string(), "--verify"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = lines(slurp(out / "pushforward.csv"));
    EXPECT_EQ(rows.front(), "word,length,log_prob,oracle_log_prob");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto a = rows[i].find(','), b = rows[i].find(',', a + 1), c = rows[i].find(',', b + 1);
        const double n = std::stod(rows[i].substr(a + 1, b - a - 1));
        EXPECT_NEAR(std::stod(rows[i].substr(b + 1, c - b - 1)), -n * std::log(2.0), 1e-12);
    }
}

TEST(Cli, ProductVariationRowsVanish) {
    const auto out = scratch("product_induced");
    ASSERT_EQ(run({"induced", "--spec", (kData / "product.json").string(), "--out", out.string()}).code, 0);
    const auto rows = lines(slurp(out / "variation_report.csv"));
    EXPECT_EQ(rows.front(), "n,empirical_var,certified_bound,error_bar");
    for (std::size_t i = 2; i < rows.size(); ++i) EXPECT_EQ(rows[i].substr(rows[i].find(',') + 1, 2), "0,") << rows[i];
}

TEST(Cli, GenericCertifiedColumnNonincreasing) {
    const auto out = scratch("generic_induced");
    ASSERT_EQ(run({"induced", "--spec", (kData / "generic_chain.json").string(), "--out", out.string()}).code, 0);
    const auto rows = lines(slurp(out / "variation_report.csv"));
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto a = rows[i].find(','), b = rows[i].find(',', a + 1), c = rows[i].find(',', b + 1);
        const double emp = std::stod(rows[i].substr(a + 1, b - a - 1));
        const double cert = std::stod(rows[i].substr(b + 1, c - b - 1));
        EXPECT_LE(cert, prev);
        EXPECT_LT(emp, cert);
        prev = cert;
    }
    const auto j = slurp(out / "induced.json");
    for (const char* key : {"\"theta\"", "\"s_psi\"", "\"C\"", "\"C0\"", "\"C1\"", "\"r\"", "\"n\""})
        EXPECT_NE(j.find(key), std::string::npos) << key;
}

TEST(Cli, VerifyMismatchExitsFour) {
    // Zero tolerance: last-bit differences between the two code paths count as mismatches.
    const auto dir = scratch("mismatch");
    fs::create_directories(dir);
    auto text = slurp(kData / "generic_chain.json");
    text.insert(text.find('{') + 1, "\n  \"verify_tolerance\": 0,");
    std::ofstream(dir / "spec.json") << text;
    const auto r = run({"verify", "--spec", (dir / "spec.json").string(), "--out", dir.string()});
    EXPECT_EQ(r.code, 4) << r.err;
    EXPECT_NE(r.err.find("mismatch at word "), std::string::npos) << r.err;
    const auto ok = run({"verify", "--spec", (kData / "generic_chain.json").string(), "--out", dir.string()});
    EXPECT_EQ(ok.code, 0) << ok.err;
}

TEST(Cli, BudgetUnreachableExitsThree) {
    const auto r = run({"induced", "--spec", (kData / "geometric.json").string(), "--tol", "1e-12", "--out",
                        scratch("budget").string()});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("achievable tolerance"), std::string::npos) << r.err;
}

TEST(Cli, GeneralPotentialDoubleLimit) {
    const auto out = scratch("geometric");
    const auto r = run({"induced", "--spec", (kData / "geometric.json").string(), "--out", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = slurp(out / "induced.json");
    EXPECT_NE(j.find("\"target\": \"phi\""), std::string::npos);
    EXPECT_NE(j.find("\"limit_bar\""), std::string::npos);
    EXPECT_NE(j.find("\"r_star\""), std::string::npos);
    EXPECT_NE(slurp(out / "decay_certificate.json").find("\"kind\": \"stretched\""), std::string::npos);
}
