// SPDX-License-Identifier: Apache-2.0
//
// Parameter presets reproducing the reference figure curves. Each preset
// carries the caption parameters verbatim plus an evaluation axis; a unit
// test pins these against the checked-in constants file.
#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace ftr {

struct FigureCurve {
    double m;
    double k;
    double delta;
};

struct FigurePreset {
    std::string id;
    std::vector<std::string> metrics;
    std::vector<FigureCurve> curves;
    std::string axis;  // "x" (pdf argument, fixed snr) or "avg_snr_db"
    double axis_start;
    double axis_stop;
    double axis_step;
    double fixed_avg_snr = 1.0;  // used when axis == "x"
    std::string modulation;     // empty when not a BER figure
    // Coefficient-series budget adequate for the preset's largest K; the
    // 40-term default undershoots the K = 25..30 curves badly.
    int max_terms = 512;
};

inline const std::vector<FigurePreset>& figure_presets() {
    static const std::vector<FigurePreset> presets = {
        {"1", {"pdf"}, {{1.5, 15.0, 0.5}, {2.0, 15.0, 0.5}}, "x", 0.0, 6.0, 0.05, 1.0, "", 512},
        {"2", {"capacity"}, {{0.3, 10.0, 0.5}, {10.3, 10.0, 0.5}}, "avg_snr_db", -10.0, 30.0, 2.0, 1.0, "", 2048},
        {"3a", {"capacity"}, {{25.5, 1.0, 0.9}, {25.5, 10.0, 0.9}}, "avg_snr_db", -10.0, 30.0, 2.0, 1.0, "", 512},
        {"3b", {"capacity"}, {{25.5, 1.0, 1.0}, {25.5, 10.0, 1.0}}, "avg_snr_db", -10.0, 30.0, 2.0, 1.0, "", 512},
        {"4", {"ber_exact", "ber_asymptotic"}, {{10.5, 30.0, 0.45}}, "avg_snr_db", 0.0, 40.0, 2.0, 1.0, "bpsk", 2048},
        {"5", {"ber_exact", "ber_asymptotic"}, {{10.5, 10.0, 0.35}, {10.5, 25.0, 0.35}}, "avg_snr_db", 0.0, 40.0, 2.0, 1.0, "bpsk", 2048},
    };
    return presets;
}

inline const FigurePreset& figure_preset(const std::string& id) {
    for (const auto& p : figure_presets())
        if (p.id == id) return p;
    throw std::domain_error("figure_preset: unknown figure '" + id + "' (expected 1, 2, 3a, 3b, 4, 5)");
}

}  // namespace ftr
