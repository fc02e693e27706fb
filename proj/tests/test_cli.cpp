#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "doctest.h"

#include "rainstick/analytics.hpp"
#include "rainstick/cli.hpp"

using namespace rainstick;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) v.push_back(l);
    return v;
}

}  // namespace

TEST_CASE("exit codes") {
    CHECK(run({}).code == cli::kUsage);
    CHECK(run({"nonsense"}).code == cli::kUsage);
    CHECK(run({"block", "--bogus"}).code == cli::kUsage);
    CHECK(run({"block", "--reps", "abc"}).code == cli::kUsage);
    CHECK(run({"block", "--raw", "--csv"}).code == cli::kUsage);
    CHECK(run({"sieve", "--weights", "beta"}).code == cli::kUsage);

    const Run bad_p = run({"block", "--p", "1.5", "--reps", "3"});
    CHECK(bad_p.code == cli::kDomain);
    CHECK(bad_p.out.empty());
    CHECK(bad_p.err.find("domain error") != std::string::npos);
    CHECK(run({"ratio-check", "--p", "0.9", "--k", "3"}).code == cli::kDomain);

    const Run numeric = run({"constant-b", "--tol", "1e-300"});
    CHECK(numeric.code == cli::kNumeric);
    CHECK(numeric.err.find("best estimate") != std::string::npos);

    CHECK(run({"--help"}).code == cli::kOk);
    CHECK(run({"--version"}).code == cli::kOk);
}

TEST_CASE("constant-b output") {
    const Run r = run({"constant-b"});
    REQUIRE(r.code == cli::kOk);
    const json j = json::parse(r.out);
    CHECK(j["config"]["command"] == "constant-b");
    CHECK(j["config"]["version"] == cli::version());
    CHECK(j["b"].get<double>() == doctest::Approx(compute_b()).epsilon(1e-12));
}

TEST_CASE("sampler summary") {
    const Run r = run({"block", "--p", "0.5", "--reps", "2000", "--seed", "3", "--workers", "2"});
    REQUIRE(r.code == cli::kOk);
    const json j = json::parse(r.out);
    const json& c = j["config"];
    CHECK(c["command"] == "block");
    CHECK(c["seed"] == 3);
    CHECK(c["reps"] == 2000);
    CHECK(c["p"] == 0.5);
    CHECK_FALSE(c.contains("workers"));
    const json& k = j["summary"]["k"];
    CHECK(k["count"] == 2000);
    for (const char* key : {"mean", "variance", "ci95", "ci99", "quantiles", "median", "trimmed_mean"})
        CHECK(k.contains(key));
    CHECK(j["summary"].contains("log_eta"));
    CHECK(j["summary"]["capped_fraction"] == 0.0);
}

TEST_CASE("raw records and config echo") {
    const Run r = run({"block-discrete", "--p", "0.5", "--reps", "20", "--raw"});
    REQUIRE(r.code == cli::kOk);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 21);
    const json cfg = json::parse(ls[0]);
    CHECK(cfg["config"]["command"] == "block-discrete");
    CHECK(cfg["config"]["dist"] == "geo");
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const json rec = json::parse(ls[i]);
        CHECK(rec["rep"] == i - 1);
        CHECK(rec["k"].get<std::uint64_t>() >= 1);
        CHECK(rec["n"].get<std::uint64_t>() >= rec["k"].get<std::uint64_t>());
        CHECK(rec["capped"] == false);
    }
}

TEST_CASE("csv records") {
    const Run r = run({"paintstick", "--p", "0.4", "--reps", "5", "--csv"});
    REQUIRE(r.code == cli::kOk);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 6);
    CHECK(ls[0] == "rep,k,log_eta,n,capped");
    CHECK(ls[1].rfind("0,", 0) == 0);
}

TEST_CASE("capped outcomes are reported") {
    const Run r = run({"stretched", "--alpha", "0.5", "--reps", "50", "--site-cap", "5", "--raw"});
    REQUIRE(r.code == cli::kOk);
    int capped = 0;
    for (const auto& l : lines(r.out)) {
        const json rec = json::parse(l);
        if (rec.contains("capped") && rec["capped"] == "site") ++capped;
    }
    CHECK(capped > 0);
}

TEST_CASE("same config gives the same bytes for any worker count") {
    for (const std::vector<std::string>& base :
         {std::vector<std::string>{"block", "--p", "0.3", "--reps", "500", "--raw"},
          std::vector<std::string>{"sieve", "--reps", "500"},
          std::vector<std::string>{"forgetful", "--p", "0.4", "--reps", "300", "--bootstrap", "50"}}) {
        auto with = [&](const char* w) {
            auto a = base;
            a.push_back("--workers");
            a.push_back(w);
            return run(a);
        };
        const Run one = with("1");
        REQUIRE(one.code == cli::kOk);
        CHECK(with("1").out == one.out);
        CHECK(with("4").out == one.out);
        CHECK(with("7").out == one.out);
    }
}

TEST_CASE("output file") {
    const auto path = std::filesystem::temp_directory_path() / "rainstick_cli_test.json";
    const Run r = run({"escape-prob", "--p", "0.5", "0.3", "--out", path.string()});
    REQUIRE(r.code == cli::kOk);
    CHECK(r.out.empty());
    std::ifstream in(path);
    const json j = json::parse(in);
    REQUIRE(j["rows"].size() == 2);
    CHECK(j["rows"][0]["p"] == 0.5);
    CHECK(j["rows"][0]["escape_prob"].get<double>() == doctest::Approx(escape_prob(0.5)).epsilon(1e-12));
    std::filesystem::remove(path);
}

TEST_CASE("analytic tables") {
    SUBCASE("gblock") {
        const Run r = run({"gblock", "--p", "0.3", "--k", "3", "--t", "0.7", "--j-max", "4"});
        REQUIRE(r.code == cli::kOk);
        const json j = json::parse(r.out);
        REQUIRE(j["rows"].size() == 5);
        CHECK(j["rows"][2]["log_p"].get<double>() == doctest::Approx(log_pG({2, 3, 0.7, 0.3})).epsilon(1e-14));
    }
    SUBCASE("bound-pk") {
        const Run r = run({"bound-pk", "--p", "0.5", "--k-max", "2"});
        REQUIRE(r.code == cli::kOk);
        const json j = json::parse(r.out);
        CHECK(j["rows"][0]["bound"].get<double>() >= 0.5);
    }
    SUBCASE("ratio-check") {
        const Run r = run({"ratio-check", "--p", "0.05", "--k", "3", "--n", "2"});
        REQUIRE(r.code == cli::kOk);
        const json j = json::parse(r.out);
        REQUIRE(j["rows"].size() == 4);
        for (const auto& row : j["rows"]) CHECK(row["holds"] == true);
    }
}
