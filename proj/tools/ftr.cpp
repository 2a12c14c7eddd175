// SPDX-License-Identifier: Apache-2.0
//
// ftr: evaluate FTR fading metrics, sweep parameter grids, run the KS
// validation protocol, and run the embedded selftest.
//
// Exit codes: 0 success, 1 validation rejection, 2 usage error, 3 numeric error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ftr/errors.hpp"
#include "ftr/figures.hpp"
#include "ftr/ftr_dist.hpp"
#include "ftr/link_metrics.hpp"
#include "ftr/mc.hpp"
#include "ftr/selftest.hpp"
#include "ftr/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRejected = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct CommonOpts {
    double m = 1.0;
    double k = 0.0;
    double delta = 0.0;
    double snr_linear = std::numeric_limits<double>::quiet_NaN();
    double snr_db = std::numeric_limits<double>::quiet_NaN();
    int max_terms = 40;
    double rel_tol = 1e-9;
    std::string format = "csv";
};

void add_param_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--m", o.m, "shadowing severity m > 0");
    cmd->add_option("--k", o.k, "specular-to-diffuse power ratio K >= 0");
    cmd->add_option("--delta", o.delta, "specular balance, 0 <= delta <= 1");
    auto* lin = cmd->add_option("--snr", o.snr_linear, "average SNR, linear scale");
    auto* db = cmd->add_option("--snr-db", o.snr_db, "average SNR in dB");
    lin->excludes(db);
    db->excludes(lin);
    cmd->add_option("--max-terms", o.max_terms, "series truncation cap")
        ->envname("FTR_MAX_TERMS");
    cmd->add_option("--rel-tol", o.rel_tol, "series relative tolerance")
        ->envname("FTR_REL_TOL");
    cmd->add_option("--format", o.format, "output format: csv or jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}));
}

double resolve_snr(const CommonOpts& o, bool required) {
    const bool has_lin = !std::isnan(o.snr_linear);
    const bool has_db = !std::isnan(o.snr_db);
    if (!has_lin && !has_db) {
        if (required)
            throw CLI::ValidationError("--snr or --snr-db is required (exactly one)");
        return 1.0;
    }
    return has_lin ? o.snr_linear : ftr::db_to_linear(o.snr_db);
}

void emit_records(const std::vector<ftr::OutputRecord>& recs, const std::string& format) {
    if (format == "csv") {
        std::cout << ftr::output_record_header() << "\n";
        for (const auto& r : recs) std::cout << ftr::to_csv(r) << "\n";
    } else {
        for (const auto& r : recs) std::cout << ftr::to_jsonl(r) << "\n";
    }
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> seed) {
    if (seed) return *seed;
    std::random_device rd;
    const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::cerr << "seed: " << s << "\n";
    return s;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fluctuating two-ray fading model: exact PDF/CDF, capacity, BER, and Monte Carlo validation"};
    app.require_subcommand(1);
    app.set_config("--config", "", "config file mirroring the flags (flags win)");
    app.allow_config_extras(CLI::config_extras_mode::error);

    // ---- eval ----
    auto* eval = app.add_subcommand("eval", "evaluate one metric at one point");
    CommonOpts eo;
    std::string eval_metric = "cdf";
    std::string eval_mod = "bpsk";
    double eval_x = std::numeric_limits<double>::quiet_NaN();
    eval->add_option("--metric", eval_metric, "pdf | cdf | capacity | ber_exact | ber_asymptotic")
        ->check(CLI::IsMember({"pdf", "cdf", "capacity", "ber_exact", "ber_asymptotic"}));
    eval->add_option("--x", eval_x, "SNR argument for pdf/cdf");
    eval->add_option("--mod", eval_mod, "modulation preset: bpsk | bfsk | dbpsk")
        ->check(CLI::IsMember({"bpsk", "bfsk", "dbpsk"}));
    add_param_flags(eval, eo);

    // ---- sweep ----
    auto* sweep = app.add_subcommand("sweep", "evaluate a metric over a parameter sweep");
    CommonOpts so;
    std::string sweep_metric = "capacity";
    std::string sweep_mod = "bpsk";
    std::string sweep_param;
    std::string sweep_values;
    std::string sweep_figure;
    double sweep_x = std::numeric_limits<double>::quiet_NaN();
    unsigned sweep_workers = 0;
    sweep->add_option("--metric", sweep_metric, "pdf | cdf | capacity | ber_exact | ber_asymptotic")
        ->check(CLI::IsMember({"pdf", "cdf", "capacity", "ber_exact", "ber_asymptotic"}));
    sweep->add_option("--param", sweep_param, "swept parameter: m | k | delta | avg_snr_db | x");
    sweep->add_option("--values", sweep_values, "explicit list v1,v2,... or range start:stop:step");
    sweep->add_option("--figure", sweep_figure, "figure preset: 1 | 2 | 3a | 3b | 4 | 5");
    sweep->add_option("--x", sweep_x, "SNR argument for pdf/cdf metrics");
    sweep->add_option("--mod", sweep_mod, "modulation preset")
        ->check(CLI::IsMember({"bpsk", "bfsk", "dbpsk"}));
    sweep->add_option("--workers", sweep_workers, "worker threads (0 = hardware)");
    add_param_flags(sweep, so);

    // ---- validate ----
    auto* validate = app.add_subcommand("validate", "KS goodness-of-fit against the physical model");
    bool val_table1 = false, val_full = false;
    std::size_t val_v = 10000;
    double val_alpha = 0.05;
    std::optional<std::uint64_t> val_seed;
    unsigned val_workers = 0;
    std::string val_format = "csv";
    validate->add_flag("--table1", val_table1, "run the six reference parameter rows");
    validate->add_flag("--full", val_full, "run the full (m, K, delta) grid; emits a JSON summary");
    validate->add_option("--v", val_v, "sample count per row");
    validate->add_option("--alpha", val_alpha, "significance level");
    validate->add_option("--seed", val_seed, "RNG seed (random and printed when omitted)");
    validate->add_option("--workers", val_workers, "sampling worker threads (0 = hardware)");
    validate->add_option("--format", val_format, "row output format: csv or jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}));

    // ---- selftest ----
    auto* selftest = app.add_subcommand("selftest", "run the embedded oracle suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*eval) {
            const double snr = resolve_snr(eo, true);
            ftr::FtrParams params{eo.m, eo.k, eo.delta, snr};
            params.validate();
            if ((eval_metric == "pdf" || eval_metric == "cdf") && std::isnan(eval_x))
                throw CLI::ValidationError("--x is required for pdf/cdf");
            ftr::SeriesControl ctl{eo.max_terms, eo.rel_tol, 3};
            const auto table = ftr::build_coefficients(params, ctl);
            const auto rec = ftr::evaluate_point(eval_metric, params, eval_mod, eval_x, table);
            emit_records({rec}, eo.format);
            return kExitOk;
        }

        if (*sweep) {
            const unsigned workers =
                sweep_workers ? sweep_workers : std::max(1u, std::thread::hardware_concurrency());
            std::vector<ftr::OutputRecord> recs;
            if (!sweep_figure.empty()) {
                const auto& fig = ftr::figure_preset(sweep_figure);
                std::optional<ftr::SeriesControl> override;
                if (sweep->count("--max-terms") || sweep->count("--rel-tol"))
                    override = ftr::SeriesControl{so.max_terms, so.rel_tol, 3};
                recs = ftr::run_figure(fig, workers, override);
            } else {
                if (sweep_param.empty() || sweep_values.empty())
                    throw CLI::ValidationError("sweep needs --param and --values (or --figure)");
                ftr::SweepSpec spec;
                spec.parameter = sweep_param;
                spec.values = ftr::parse_values(sweep_values);
                const bool snr_swept = sweep_param == "avg_snr_db";
                spec.fixed = ftr::FtrParams{so.m, so.k, so.delta, resolve_snr(so, !snr_swept)};
                spec.metric = sweep_metric;
                spec.modulation = sweep_mod;
                spec.x = sweep_x;
                spec.series = ftr::SeriesControl{so.max_terms, so.rel_tol, 3};
                spec.workers = workers;
                recs = ftr::run_sweep(spec);
            }
            emit_records(recs, so.format);
            return kExitOk;
        }

        if (*validate) {
            if (val_table1 == val_full)
                throw CLI::ValidationError("validate needs exactly one of --table1 | --full");
            const std::uint64_t seed = resolve_seed(val_seed);
            const unsigned workers =
                val_workers ? val_workers : std::max(1u, std::thread::hardware_concurrency());

            std::vector<ftr::FtrParams> rows;
            if (val_table1) {
                rows = {{5.5, 15.0, 0.4, 1.0}, {8.5, 5.0, 0.35, 1.0}, {9.2, 3.0, 1.0, 1.0},
                        {10.0, 10.0, 0.5, 1.0}, {15.0, 20.0, 0.2, 1.0}, {20.0, 5.0, 0.43, 1.0}};
            } else {
                for (double m : {0.5, 1.5, 5.5, 10.0, 25.5})
                    for (double k : {0.0, 1.0, 5.0, 15.0, 30.0})
                        for (double d : {0.0, 0.35, 0.5, 0.9, 1.0})
                            rows.push_back({m, k, d, 1.0});
            }

            std::size_t accepted = 0;
            std::vector<ftr::KsReport> reports;
            reports.reserve(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i) {
                // decorrelate rows; derived deterministically from the seed
                const auto rep = ftr::ks_test(rows[i], val_v, val_alpha, seed + 1000003 * i, workers);
                reports.push_back(rep);
                if (rep.accepted) ++accepted;
            }

            auto row_json = [&](std::size_t i) {
                const auto& p = rows[i];
                const auto& r = reports[i];
                std::string s = "{\"m\":" + fmt17(p.m) + ",\"k\":" + fmt17(p.k) +
                                ",\"delta\":" + fmt17(p.delta) + ",\"statistic\":" + fmt17(r.statistic) +
                                ",\"critical\":" + fmt17(r.critical) +
                                ",\"accepted\":" + (r.accepted ? "true" : "false") + "}";
                return s;
            };

            if (val_full) {
                std::cout << "{\"seed\":" << seed << ",\"v\":" << val_v << ",\"alpha\":" << fmt17(val_alpha)
                          << ",\"total\":" << rows.size() << ",\"accepted\":" << accepted
                          << ",\"rejected\":" << rows.size() - accepted << ",\"rows\":[";
                for (std::size_t i = 0; i < rows.size(); ++i)
                    std::cout << (i ? "," : "") << row_json(i);
                std::cout << "]}\n";
            } else if (val_format == "jsonl") {
                for (std::size_t i = 0; i < rows.size(); ++i) std::cout << row_json(i) << "\n";
            } else {
                std::cout << "m,k,delta,v,alpha,statistic,critical,accepted\n";
                for (std::size_t i = 0; i < rows.size(); ++i) {
                    const auto& p = rows[i];
                    const auto& r = reports[i];
                    std::cout << fmt17(p.m) << ',' << fmt17(p.k) << ',' << fmt17(p.delta) << ','
                              << val_v << ',' << fmt17(val_alpha) << ',' << fmt17(r.statistic) << ','
                              << fmt17(r.critical) << ',' << (r.accepted ? "true" : "false") << "\n";
                }
            }
            return accepted == rows.size() ? kExitOk : kExitRejected;
        }

        if (*selftest) {
            return ftr::run_selftest(std::cout) == 0 ? kExitOk : kExitRejected;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ftr::convergence_error& e) {
        std::cerr << "numeric error in " << e.kernel_name << ": " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::range_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const ftr::consistency_error& e) {
        std::cerr << "internal consistency error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitOk;
}
