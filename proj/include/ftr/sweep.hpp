// SPDX-License-Identifier: Apache-2.0
//
// Sweep engine and machine-readable output records. Sweep points run on a
// small worker pool; records are emitted in spec order regardless of
// completion order.
#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "ftr/figures.hpp"
#include "ftr/ftr_dist.hpp"
#include "ftr/link_metrics.hpp"

namespace ftr {

/// Swept-parameter description: one swept axis, the remaining parameters fixed.
struct SweepSpec {
    std::string parameter;        // m | k | delta | avg_snr_db | x
    std::vector<double> values;   // explicit list (range already expanded)
    FtrParams fixed;              // swept field ignored
    std::string metric;           // pdf | cdf | capacity | ber_exact | ber_asymptotic
    std::string modulation = "bpsk";
    double x = std::numeric_limits<double>::quiet_NaN();  // for pdf/cdf
    SeriesControl series;
    unsigned workers = 1;
};

/// One evaluated point; every record echoes its full inputs.
struct OutputRecord {
    std::string metric;
    double m = 0, k = 0, delta = 0;
    double avg_snr = 0;     // linear
    double avg_snr_db = 0;
    double x = std::numeric_limits<double>::quiet_NaN();
    std::string modulation;  // empty for non-BER metrics
    double value = 0;
    double truncation_bound = 0;
    std::size_t terms_used = 0;
    double wall_time_s = 0;
    std::string note;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

namespace detail {

inline std::string fmt_double(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace detail

inline const char* output_record_header() {
    return "metric,m,k,delta,avg_snr,avg_snr_db,x,modulation,value,truncation_bound,terms_used,wall_time_s,note";
}

inline std::string to_csv(const OutputRecord& r) {
    using detail::csv_quote;
    using detail::fmt_double;
    std::string out;
    out += csv_quote(r.metric);
    out += ',';
    out += fmt_double(r.m) + ',' + fmt_double(r.k) + ',' + fmt_double(r.delta) + ',';
    out += fmt_double(r.avg_snr) + ',' + fmt_double(r.avg_snr_db) + ',' + fmt_double(r.x) + ',';
    out += csv_quote(r.modulation) + ',';
    out += fmt_double(r.value) + ',' + fmt_double(r.truncation_bound) + ',';
    out += std::to_string(r.terms_used) + ',' + fmt_double(r.wall_time_s) + ',';
    out += csv_quote(r.note);
    return out;
}

inline std::string to_jsonl(const OutputRecord& r) {
    using detail::fmt_double;
    auto num = [](double v) -> std::string {
        if (std::isnan(v)) return "null";
        return detail::fmt_double(v);
    };
    std::string out = "{";
    out += "\"metric\":\"" + r.metric + "\"";
    out += ",\"m\":" + num(r.m) + ",\"k\":" + num(r.k) + ",\"delta\":" + num(r.delta);
    out += ",\"avg_snr\":" + num(r.avg_snr) + ",\"avg_snr_db\":" + num(r.avg_snr_db);
    out += ",\"x\":" + num(r.x);
    out += ",\"modulation\":\"" + r.modulation + "\"";
    out += ",\"value\":" + num(r.value);
    out += ",\"truncation_bound\":" + num(r.truncation_bound);
    out += ",\"terms_used\":" + std::to_string(r.terms_used);
    out += ",\"wall_time_s\":" + num(r.wall_time_s);
    out += ",\"note\":\"" + r.note + "\"";
    out += "}";
    return out;
}

namespace detail {

/// Shared coefficient tables keyed by (m, k, delta); the folded coefficients
/// do not depend on avg_snr, so snr sweeps reuse one table.
class TableCache {
  public:
    explicit TableCache(const SeriesControl& ctl) : ctl_(ctl) {}

    std::shared_ptr<const CoefficientTable> get(const FtrParams& p) {
        const auto key = std::make_tuple(p.m, p.k, p.delta);
        const auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        FtrParams canonical = p;
        canonical.avg_snr = 1.0;
        auto table = std::make_shared<CoefficientTable>(build_coefficients(canonical, ctl_));
        cache_.emplace(key, table);
        return table;
    }

  private:
    SeriesControl ctl_;
    std::map<std::tuple<double, double, double>, std::shared_ptr<const CoefficientTable>> cache_;
};

}  // namespace detail

/// Evaluate a single metric point. `table` must match (m, k, delta) of params;
/// its avg_snr is overridden by params.
inline OutputRecord evaluate_point(const std::string& metric, const FtrParams& params,
                                   const std::string& modulation, double x,
                                   const CoefficientTable& table_in) {
    const auto t0 = std::chrono::steady_clock::now();
    CoefficientTable table = table_in;
    table.params = params;

    OutputRecord rec;
    rec.metric = metric;
    rec.m = params.m;
    rec.k = params.k;
    rec.delta = params.delta;
    rec.avg_snr = params.avg_snr;
    rec.avg_snr_db = linear_to_db(params.avg_snr);
    rec.truncation_bound = table.truncation_error_bound;
    rec.terms_used = table.terms_used();

    if (metric == "pdf") {
        rec.x = x;
        rec.value = ftr_pdf(x, table);
    } else if (metric == "cdf") {
        rec.x = x;
        rec.value = ftr_cdf(x, table);
    } else if (metric == "capacity") {
        rec.value = capacity(table).value;
    } else if (metric == "ber_exact") {
        rec.modulation = modulation;
        rec.value = ber_exact(table, ModulationScheme::from_name(modulation)).value;
    } else if (metric == "ber_asymptotic") {
        rec.modulation = modulation;
        rec.value = ber_asymptotic(params, ModulationScheme::from_name(modulation));
        rec.truncation_bound = 0.0;
        rec.terms_used = 1;
        if (rec.avg_snr_db < 15.0) rec.note = "below-asymptotic-regime";
    } else {
        throw std::domain_error("evaluate_point: unknown metric '" + metric + "'");
    }
    if (!table.converged && rec.note.empty()) rec.note = "series-truncated";
    rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

/// Run a sweep; output order equals the values order.
inline std::vector<OutputRecord> run_sweep(const SweepSpec& spec) {
    if (spec.values.empty()) throw std::domain_error("run_sweep: empty value list");
    const bool needs_x = spec.metric == "pdf" || spec.metric == "cdf";
    if (needs_x && spec.parameter != "x" && std::isnan(spec.x))
        throw std::domain_error("run_sweep: metric '" + spec.metric + "' requires --x");

    std::vector<FtrParams> points(spec.values.size(), spec.fixed);
    std::vector<double> xs(spec.values.size(), spec.x);
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
        const double v = spec.values[i];
        if (spec.parameter == "m") points[i].m = v;
        else if (spec.parameter == "k") points[i].k = v;
        else if (spec.parameter == "delta") points[i].delta = v;
        else if (spec.parameter == "avg_snr_db") points[i].avg_snr = db_to_linear(v);
        else if (spec.parameter == "x") xs[i] = v;
        else throw std::domain_error("run_sweep: unknown parameter '" + spec.parameter + "'");
        points[i].validate();
    }

    // Tables are built once per distinct (m, k, delta) up front; the parallel
    // phase then only reads shared immutable state.
    detail::TableCache cache(spec.series);
    std::vector<std::shared_ptr<const CoefficientTable>> tables(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) tables[i] = cache.get(points[i]);

    std::vector<OutputRecord> records(points.size());
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= points.size()) return;
            records[i] = evaluate_point(spec.metric, points[i], spec.modulation, xs[i], *tables[i]);
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(spec.workers, points.size()));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return records;
}

/// Expand "start:stop:step" (inclusive of stop within half a step) or a
/// comma-separated list into values.
inline std::vector<double> parse_values(const std::string& text) {
    std::vector<double> out;
    const auto colon = std::count(text.begin(), text.end(), ':');
    if (colon == 2) {
        double start, stop, step;
        if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 || step <= 0.0)
            throw std::domain_error("parse_values: expected start:stop:step with step > 0, got '" + text + "'");
        for (double v = start; v <= stop + 0.5 * step; v += step) out.push_back(v);
        return out;
    }
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        out.push_back(std::stod(text.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    if (out.empty()) throw std::domain_error("parse_values: empty list");
    return out;
}

/// Records for one figure preset, in curve-major order.
inline std::vector<OutputRecord> run_figure(const FigurePreset& fig, unsigned workers,
                                            std::optional<SeriesControl> series_override = {}) {
    SeriesControl ctl = series_override.value_or(SeriesControl{fig.max_terms, 1e-12, 3});
    std::vector<OutputRecord> all;
    for (const auto& curve : fig.curves) {
        for (const auto& metric : fig.metrics) {
            SweepSpec spec;
            spec.parameter = fig.axis == "x" ? "x" : "avg_snr_db";
            for (double v = fig.axis_start; v <= fig.axis_stop + 0.5 * fig.axis_step; v += fig.axis_step)
                spec.values.push_back(v);
            spec.fixed = {curve.m, curve.k, curve.delta, fig.fixed_avg_snr};
            spec.metric = metric;
            spec.modulation = fig.modulation.empty() ? "bpsk" : fig.modulation;
            spec.series = ctl;
            spec.workers = workers;
            auto recs = run_sweep(spec);
            all.insert(all.end(), recs.begin(), recs.end());
        }
    }
    return all;
}

}  // namespace ftr
