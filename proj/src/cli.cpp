#include "rainstick/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rainstick/analytics.hpp"
#include "rainstick/errors.hpp"
#include "rainstick/experiments.hpp"
#include "rainstick/montecarlo.hpp"

#ifndef RAINSTICK_VERSION
#define RAINSTICK_VERSION "dev"
#endif

namespace rainstick::cli {

namespace {

using Json = nlohmann::ordered_json;

struct Options {
    // replication
    std::uint64_t reps = 10000;
    std::uint64_t seed = 1;
    unsigned workers = 0;
    Site site_cap = Caps{}.site;
    std::uint64_t drop_cap = Caps{}.drop;
    std::uint64_t step_cap = Caps{}.step;
    bool summary = false;
    bool raw = false;
    bool csv = false;
    std::string out_path;

    // laws
    std::string dist = "geo";
    double p = 0.3;
    double alpha = 0.5;
    std::string weights = "uniform";
    double weight = 0.5;
    std::optional<double> escape_q;

    // analytics
    double tol = 1e-10;
    std::vector<double> ps;
    std::int64_t k = 20;
    std::int64_t k_max = 30;
    std::optional<std::int64_t> j;
    std::int64_t j_max = -1;
    double t = 0.7;
    std::vector<double> ts;
    double t_min = 0.01;
    double t_max = 10.0;
    unsigned t_steps = 50;
    double n = 2.0;
    double slack = 3.0;
    std::size_t bootstrap = 0;
};

QuadratureSpec quad_spec(const Options& o) { return QuadratureSpec::with_tolerance(o.tol); }

Json config_echo(const std::string& command) {
    Json c;
    c["command"] = command;
    c["version"] = RAINSTICK_VERSION;
    return c;
}

void echo_run(Json& c, const Options& o) {
    c["seed"] = o.seed;
    c["reps"] = o.reps;
    c["site_cap"] = o.site_cap;
    c["drop_cap"] = o.drop_cap;
    c["step_cap"] = o.step_cap;
}

Json summary_json(const std::vector<double>& values, std::size_t capped, const Options& o) {
    Json s;
    if (values.empty()) {
        s["error"] = "no uncapped samples";
        s["capped"] = capped;
        return s;
    }
    const Summary sum = summarize(values, capped);
    s["count"] = sum.count;
    s["capped"] = sum.capped;
    s["capped_fraction"] = sum.capped_fraction;
    s["mean"] = sum.mean;
    s["variance"] = sum.variance;
    s["ci95"] = sum.ci95;
    s["ci99"] = sum.ci99;
    Json q;
    const char* names[] = {"p01", "p05", "p25", "p50", "p75", "p95", "p99"};
    for (std::size_t i = 0; i < kQuantileLevels.size(); ++i) q[names[i]] = sum.quantiles[i];
    s["quantiles"] = q;
    s["median"] = sum.median;
    s["trimmed_mean"] = sum.trimmed_mean;
    if (o.bootstrap > 0) {
        auto median = [](std::span<const double> v) { return quantile_sorted(v, 0.5); };
        const Interval ci = bootstrap_ci(values, median, o.bootstrap, 0.95, o.seed);
        s["median_ci95"] = Json::array({ci.lo, ci.hi});
    }
    return s;
}

std::string csv_cell(const Json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

void write_csv(std::ostream& os, const Json& rows) {
    if (rows.empty()) return;
    bool first = true;
    for (const auto& [key, _] : rows.front().items()) {
        os << (first ? "" : ",") << key;
        first = false;
    }
    os << '\n';
    for (const auto& row : rows) {
        first = true;
        for (const auto& [key, val] : row.items()) {
            os << (first ? "" : ",") << csv_cell(val);
            first = false;
        }
        os << '\n';
    }
}

Json record_json(const Record& r) {
    Json j;
    j["rep"] = r.rep;
    j["k"] = r.k;
    j["log_eta"] = r.log_eta ? Json(*r.log_eta) : Json(nullptr);
    j["n"] = r.n ? Json(*r.n) : Json(nullptr);
    j["capped"] = r.capped == CapKind::none ? Json(false) : Json(cap_kind_name(r.capped));
    return j;
}

RunConfig run_config(const Options& o) {
    RunConfig rc;
    rc.master_seed = o.seed;
    rc.reps = o.reps;
    rc.workers = o.workers > 0 ? o.workers : default_workers();
    rc.caps = {o.site_cap, o.drop_cap, o.step_cap};
    return rc;
}

// Emits the result of a sampling experiment in the requested format.
void emit_records(std::ostream& os, const Json& config, const std::vector<Record>& records,
                  const Options& o) {
    if (o.raw) {
        os << Json{{"config", config}}.dump() << '\n';
        for (const auto& r : records) os << record_json(r).dump() << '\n';
        return;
    }
    if (o.csv) {
        Json rows = Json::array();
        for (const auto& r : records) rows.push_back(record_json(r));
        write_csv(os, rows);
        return;
    }
    std::vector<double> ks;
    std::vector<double> log_eta;
    std::vector<double> drops;
    std::size_t capped = 0;
    for (const auto& r : records) {
        if (r.capped != CapKind::none) {
            ++capped;
            continue;
        }
        ks.push_back(static_cast<double>(r.k));
        if (r.log_eta) log_eta.push_back(*r.log_eta);
        if (r.n) drops.push_back(static_cast<double>(*r.n));
    }
    Json summary;
    summary["k"] = summary_json(ks, capped, o);
    if (!log_eta.empty()) summary["log_eta"] = summary_json(log_eta, capped, o);
    if (!drops.empty()) summary["n"] = summary_json(drops, capped, o);
    summary["capped_fraction"] =
        records.empty() ? 0.0 : static_cast<double>(capped) / static_cast<double>(records.size());
    os << Json{{"config", config}, {"summary", summary}}.dump(2) << '\n';
}

void emit_table(std::ostream& os, const Json& config, const Json& rows, const Options& o) {
    if (o.csv) {
        write_csv(os, rows);
        return;
    }
    if (o.raw) {
        os << Json{{"config", config}}.dump() << '\n';
        for (const auto& r : rows) os << r.dump() << '\n';
        return;
    }
    os << Json{{"config", config}, {"rows", rows}}.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

void run_sampler(const std::string& command, const Options& o, std::ostream& os) {
    ExperimentSpec spec;
    spec.name = command;
    spec.dist = o.dist;
    spec.p = o.p;
    spec.alpha = o.alpha;
    spec.weights = o.weights;
    spec.weight = o.weight;
    spec.escape_q = o.escape_q;
    validate_experiment(spec);

    Json c = config_echo(command);
    echo_run(c, o);
    const bool uses_dist = command == "block" || command == "block-discrete";
    const std::string law = uses_dist ? o.dist : command == "stretched" ? "stretched"
                                               : command == "sieve"     ? "sieve"
                                                                        : "geo";
    if (uses_dist) c["dist"] = o.dist;
    if (law == "geo") c["p"] = o.p;
    if (law == "stretched") c["alpha"] = o.alpha;
    if (law == "sieve") {
        c["weights"] = o.weights;
        if (o.weights == "constant") c["weight"] = o.weight;
    }
    if (command == "forgetful") {
        spec.escape_q = o.escape_q ? *o.escape_q : escape_prob(o.p);
        c["escape_q"] = *spec.escape_q;
    }
    if (o.bootstrap > 0) c["bootstrap"] = o.bootstrap;

    const auto records = run_experiment(spec, run_config(o));
    emit_records(os, c, records, o);
}

void run_dominance(const Options& o, std::ostream& os) {
    const std::vector<double> ps = o.ps.empty() ? std::vector<double>{0.5, 0.3, 0.2} : o.ps;
    Json c = config_echo("dominance");
    echo_run(c, o);
    c["ps"] = ps;
    c["slack"] = o.slack;
    const double b = compute_b();
    Json rows = Json::array();
    for (double p : ps) {
        ExperimentSpec spec;
        spec.name = "block";
        spec.p = p;
        const auto records = run_experiment(spec, run_config(o));
        std::vector<std::uint64_t> ks;
        std::vector<double> kd;
        std::size_t capped = 0;
        for (const auto& r : records) {
            // capped replicates exceed the cap, which is above every bound checked
            ks.push_back(r.capped == CapKind::none ? r.k : o.site_cap + 1);
            if (r.capped == CapKind::none) kd.push_back(static_cast<double>(r.k));
            else ++capped;
        }
        const double rate = dominance_rate(p);
        const double log_keep = std::log1p(-rate);
        const auto dom = dominance_check(
            ks, [&](double x) { return x < 0 ? 1.0 : std::exp(x * log_keep); }, o.slack);
        const Summary s = summarize(kd, capped);
        const double mean_bound = std::exp(b / p) / p;
        Json row;
        row["p"] = p;
        row["rate"] = rate;
        row["dominance_holds"] = dom.holds;
        row["worst_x"] = dom.worst_x;
        row["worst_gap"] = dom.worst_gap;
        row["mean"] = s.mean;
        row["ci99"] = s.ci99;
        row["mean_bound"] = mean_bound;
        row["mean_bound_holds"] = s.mean + s.ci99 <= mean_bound;
        rows.push_back(row);
    }
    emit_table(os, c, rows, o);
}

void run_trend(const Options& o, std::ostream& os) {
    const std::vector<double> ps =
        o.ps.empty() ? std::vector<double>{0.4, 0.3, 0.2, 0.1} : o.ps;
    Json c = config_echo("trend");
    echo_run(c, o);
    c["ps"] = ps;
    const double b = compute_b();
    Json rows = Json::array();
    for (double p : ps) {
        ExperimentSpec spec;
        spec.name = "block";
        spec.p = p;
        const auto records = run_experiment(spec, run_config(o));
        std::vector<double> plogk;
        std::vector<double> ploglog;
        for (const auto& r : records) {
            if (r.capped != CapKind::none) continue;
            plogk.push_back(p * std::log(static_cast<double>(r.k)));
            if (r.log_eta && *r.log_eta > 0.0) ploglog.push_back(p * std::log(*r.log_eta));
        }
        Json row;
        row["p"] = p;
        row["b"] = b;
        row["median_p_log_k"] =
            plogk.empty() ? Json(nullptr) : Json(summarize(plogk).median);
        row["median_p_loglog_eta"] =
            ploglog.empty() ? Json(nullptr) : Json(summarize(ploglog).median);
        row["uncapped"] = plogk.size();
        rows.push_back(row);
    }
    emit_table(os, c, rows, o);
}

void run_constant_b(const Options& o, std::ostream& os) {
    Json c = config_echo("constant-b");
    c["tol"] = o.tol;
    const double b = compute_b(quad_spec(o));
    if (o.csv) {
        os << "b\n" << Json(b).dump() << '\n';
        return;
    }
    os << Json{{"config", c}, {"b", b}}.dump(2) << '\n';
}

void run_escape(const Options& o, std::ostream& os) {
    const std::vector<double> ps = o.ps.empty() ? std::vector<double>{o.p} : o.ps;
    Json c = config_echo("escape-prob");
    c["ps"] = ps;
    c["tol"] = o.tol;
    const double b = compute_b(quad_spec(o));
    Json rows = Json::array();
    for (double p : ps) {
        const double q = escape_prob(p, quad_spec(o));
        const double lower = std::exp(-b / p);
        rows.push_back(Json{{"p", p}, {"escape_prob", q}, {"lower_bound", lower},
                            {"holds", q >= lower}});
    }
    emit_table(os, c, rows, o);
}

void run_gblock(const Options& o, std::ostream& os) {
    Json c = config_echo("gblock");
    c["p"] = o.p;
    c["k"] = o.k;
    Json rows = Json::array();
    if (o.j) {
        // fixed j, sweep t on a log grid
        if (!(o.t_min > 0.0 && o.t_max > o.t_min) || o.t_steps < 2)
            throw DomainError("gblock: need 0 < t-min < t-max and t-steps >= 2");
        c["j"] = *o.j;
        c["t_min"] = o.t_min;
        c["t_max"] = o.t_max;
        c["t_steps"] = o.t_steps;
        const double ratio = std::log(o.t_max / o.t_min) / (o.t_steps - 1);
        for (unsigned i = 0; i < o.t_steps; ++i) {
            const double t = o.t_min * std::exp(ratio * i);
            rows.push_back(Json{{"j", *o.j}, {"t", t}, {"log_p", log_pG({*o.j, o.k, t, o.p})}});
        }
    } else {
        const std::int64_t j_max = o.j_max >= 0 ? o.j_max : o.k + 50;
        c["t"] = o.t;
        c["j_max"] = j_max;
        c["j_of_t"] = j_of_t(o.t, o.p, o.k);
        for (std::int64_t j = 0; j <= j_max; ++j)
            rows.push_back(Json{{"j", j}, {"t", o.t}, {"log_p", log_pG({j, o.k, o.t, o.p})}});
    }
    emit_table(os, c, rows, o);
}

void run_bound_pk(const Options& o, std::ostream& os) {
    if (o.k_max < 1) throw DomainError("bound-pk: k-max must be >= 1");
    Json c = config_echo("bound-pk");
    c["p"] = o.p;
    c["k_max"] = o.k_max;
    c["tol"] = o.tol;
    Json rows = Json::array();
    for (std::int64_t k = 1; k <= o.k_max; ++k)
        rows.push_back(Json{{"k", k}, {"bound", pk_upper_bound(k, o.p, quad_spec(o))}});
    emit_table(os, c, rows, o);
}

void run_ratio(const Options& o, std::ostream& os) {
    const std::vector<double> ts =
        o.ts.empty() ? std::vector<double>{3.0 * std::numbers::ln2, 5.0, 10.0, 50.0} : o.ts;
    Json c = config_echo("ratio-check");
    c["p"] = o.p;
    c["k"] = o.k;
    c["n"] = o.n;
    c["ts"] = ts;
    Json rows = Json::array();
    for (double t : ts) {
        const RatioCheck r = ratio_bound_check(o.k, o.p, t, o.n);
        rows.push_back(Json{{"t", t},
                            {"j", r.j},
                            {"ratio", r.ratio},
                            {"log_ratio", r.log_ratio},
                            {"bound", r.bound},
                            {"holds", r.holds},
                            {"ell_star", r.ell_star},
                            {"gamma", r.gamma},
                            {"geometric_bound", r.geometric_bound}});
    }
    emit_table(os, c, rows, o);
}

// ---------------------------------------------------------------------------

void add_run_options(CLI::App* sub, Options& o) {
    sub->add_option("--reps", o.reps, "Number of replicates");
    sub->add_option("--seed", o.seed, "Master seed");
    sub->add_option("--workers", o.workers,
                    "Worker threads (default: RAINSTICK_WORKERS or hardware concurrency)");
    sub->add_option("--site-cap", o.site_cap, "Largest block size examined by clock samplers")
        ->check(CLI::PositiveNumber);
    sub->add_option("--drop-cap", o.drop_cap, "Drop limit for the discrete sampler")
        ->check(CLI::PositiveNumber);
    sub->add_option("--step-cap", o.step_cap, "Step limit for the paintstick")
        ->check(CLI::PositiveNumber);
    auto* summary = sub->add_flag("--summary", o.summary, "Emit one JSON summary (default)");
    auto* raw = sub->add_flag("--raw", o.raw, "Emit JSON-lines records");
    auto* csv = sub->add_flag("--csv", o.csv, "Emit CSV records");
    summary->excludes(raw)->excludes(csv);
    raw->excludes(csv);
    sub->add_option("--out", o.out_path, "Write output to this file instead of stdout");
    sub->add_option("--bootstrap", o.bootstrap, "Bootstrap resamples for a median CI");
}

void add_table_options(CLI::App* sub, Options& o) {
    auto* raw = sub->add_flag("--raw", o.raw, "Emit JSON-lines rows");
    auto* csv = sub->add_flag("--csv", o.csv, "Emit CSV rows");
    raw->excludes(csv);
    sub->add_option("--out", o.out_path, "Write output to this file instead of stdout");
}

void add_law_options(CLI::App* sub, Options& o, bool with_dist) {
    if (with_dist)
        sub->add_option("--dist", o.dist, "Site law")->check(
            CLI::IsMember({"geo", "stretched", "sieve"}));
    sub->add_option("--p", o.p, "Geometric parameter p");
    sub->add_option("--alpha", o.alpha, "Stretched-exponential exponent");
    sub->add_option("--weights", o.weights, "Sieve weights")->check(
        CLI::IsMember({"uniform", "constant"}));
    sub->add_option("--weight", o.weight, "Constant sieve weight");
}

}  // namespace

const char* version() noexcept { return RAINSTICK_VERSION; }

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Simulation and numerics for the first block of p-biased permutations",
                 "rainstick"};
    app.set_version_flag("--version", std::string(RAINSTICK_VERSION));
    app.require_subcommand(1, 1);

    std::vector<CLI::App*> samplers;
    auto* block = app.add_subcommand("block", "Block size via exponential clocks");
    add_law_options(block, o, true);
    samplers.push_back(block);
    auto* discrete = app.add_subcommand("block-discrete", "Block size drop by drop (exact N)");
    add_law_options(discrete, o, true);
    samplers.push_back(discrete);
    auto* forgetful = app.add_subcommand("forgetful", "Terminal maximum of the forgetful process");
    forgetful->add_option("--p", o.p, "Geometric parameter p");
    forgetful->add_option("--escape-q", o.escape_q, "Escape probability (default: computed)");
    samplers.push_back(forgetful);
    auto* paint = app.add_subcommand("paintstick", "Paintstick block size K'");
    paint->add_option("--p", o.p, "Geometric parameter p");
    samplers.push_back(paint);
    auto* stretched = app.add_subcommand("stretched", "Block size for a stretched-exponential law");
    stretched->add_option("--alpha", o.alpha, "Stretched-exponential exponent");
    samplers.push_back(stretched);
    auto* sieve = app.add_subcommand("sieve", "Block size in the Bernoulli sieve");
    sieve->add_option("--weights", o.weights, "Sieve weights")->check(
        CLI::IsMember({"uniform", "constant"}));
    sieve->add_option("--weight", o.weight, "Constant sieve weight");
    samplers.push_back(sieve);
    for (auto* s : samplers) add_run_options(s, o);

    auto* dominance = app.add_subcommand("dominance", "Empirical check of geometric dominance");
    dominance->add_option("--p", o.ps, "Values of p")->expected(1, -1);
    dominance->add_option("--slack", o.slack, "Slack in binomial standard errors");
    add_run_options(dominance, o);
    auto* trend = app.add_subcommand("trend", "Medians of p log K and p log log eta over p");
    trend->add_option("--p", o.ps, "Values of p")->expected(1, -1);
    add_run_options(trend, o);

    auto* cb = app.add_subcommand("constant-b", "Evaluate the constant b");
    cb->add_option("--tol", o.tol, "Quadrature tolerance")->check(CLI::PositiveNumber);
    add_table_options(cb, o);
    auto* esc = app.add_subcommand("escape-prob", "Escape probability of the forgetful process");
    esc->add_option("--p", o.ps, "Values of p")->expected(1, -1)->required();
    esc->add_option("--tol", o.tol, "Quadrature tolerance")->check(CLI::PositiveNumber);
    add_table_options(esc, o);
    auto* gb = app.add_subcommand("gblock", "log P[G_{j,t}] over j (or over t with --j)");
    gb->add_option("--p", o.p, "Geometric parameter p");
    gb->add_option("--k", o.k, "Reference site");
    gb->add_option("--t", o.t, "Rescaled time for the j sweep");
    gb->add_option("--j-max", o.j_max, "Largest j in the sweep (default k + 50)");
    gb->add_option("--j", o.j, "Fixed j; sweeps t instead");
    gb->add_option("--t-min", o.t_min, "Smallest t in the t sweep");
    gb->add_option("--t-max", o.t_max, "Largest t in the t sweep");
    gb->add_option("--t-steps", o.t_steps, "Points in the t sweep");
    add_table_options(gb, o);
    auto* bpk = app.add_subcommand("bound-pk", "Integral upper bound on P[K = k]");
    bpk->add_option("--p", o.p, "Geometric parameter p");
    bpk->add_option("--k-max", o.k_max, "Largest k");
    bpk->add_option("--tol", o.tol, "Quadrature tolerance")->check(CLI::PositiveNumber);
    add_table_options(bpk, o);
    auto* rc = app.add_subcommand("ratio-check", "P[G_{k,t}] / P[G_{j(t),t}] against t^-n");
    rc->add_option("--p", o.p, "Geometric parameter p");
    rc->add_option("--k", o.k, "Reference site");
    rc->add_option("--t", o.ts, "Times (default 3 log 2, 5, 10, 50)")->expected(1, -1);
    rc->add_option("--n", o.n, "Exponent n");
    add_table_options(rc, o);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }

    std::ostringstream buffer;
    try {
        const std::string command = app.get_subcommands().front()->get_name();
        if (command == "dominance") run_dominance(o, buffer);
        else if (command == "trend") run_trend(o, buffer);
        else if (command == "constant-b") run_constant_b(o, buffer);
        else if (command == "escape-prob") run_escape(o, buffer);
        else if (command == "gblock") run_gblock(o, buffer);
        else if (command == "bound-pk") run_bound_pk(o, buffer);
        else if (command == "ratio-check") run_ratio(o, buffer);
        else run_sampler(command, o, buffer);
    } catch (const ConfigError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return kDomain;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << " (best estimate " << e.best_estimate()
            << ")\n";
        return kNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }

    if (o.out_path.empty()) {
        out << buffer.str();
        out.flush();
    } else {
        std::ofstream file(o.out_path, std::ios::binary);
        if (!file) {
            err << "error: cannot open " << o.out_path << " for writing\n";
            return kFailure;
        }
        file << buffer.str();
    }
    return kOk;
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return dispatch(args, out, err);
}

}  // namespace rainstick::cli
