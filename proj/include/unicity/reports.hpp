// Copyright 2026 The Unicity Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "unicity/core.hpp"
#include "unicity/estimator.hpp"
#include "unicity/fit.hpp"
#include "unicity/scaling.hpp"
#include "unicity/temporal.hpp"
#include "unicity/version.hpp"

// JSON report shapes and the plot-ready '#'-headered tables. All output
// is byte-deterministic: nlohmann orders object keys lexicographically
// and double formatting is shortest-round-trip.

namespace unicity {

using json = nlohmann::json;

inline json to_json(PeriodRange w) { return json{{"first", w.first}, {"last", w.last}}; }

inline json to_json(const UnicityEstimate& e) {
    return json{
        {"window", to_json(e.window)},
        {"n_apps", e.n_apps},
        {"strategy", strategy_name(e.strategy)},
        {"seed", e.seed},
        {"s", e.s},
        {"sample_size", e.sample_size},
        {"population", e.population_size},
        {"mean", e.mean},
        {"std", e.stddev},
        {"per_sample", e.per_sample},
    };
}

inline json unicity_report(const std::vector<UnicityEstimate>& estimates) {
    json records = json::array();
    for (const auto& e : estimates) records.push_back(to_json(e));
    return records;
}

inline json to_json(const FitResult& f) {
    json j{
        {"form", fit_form_name(f.form)},
        {"a", f.a},
        {"b", f.b},
        {"pseudo_r2", f.degenerate_variance ? json() : json(f.pseudo_r2)},
        {"sse", f.sse},
        {"iterations", f.iterations},
        {"converged", f.converged},
        {"degenerate_variance", f.degenerate_variance},
        {"x_unit", f.x_unit},
    };
    j["gamma"] = f.form == FitForm::kLinear ? json() : json(f.gamma);
    return j;
}

inline FitResult fit_from_json(const json& j) {
    FitResult f;
    f.form = parse_fit_form(j.at("form").get<std::string>());
    f.a = j.at("a").get<double>();
    f.b = j.at("b").get<double>();
    if (f.form != FitForm::kLinear) f.gamma = j.at("gamma").get<double>();
    if (j.contains("pseudo_r2") && !j.at("pseudo_r2").is_null())
        f.pseudo_r2 = j.at("pseudo_r2").get<double>();
    if (j.contains("sse")) f.sse = j.at("sse").get<double>();
    if (j.contains("converged")) f.converged = j.at("converged").get<bool>();
    if (j.contains("x_unit")) f.x_unit = j.at("x_unit").get<std::string>();
    return f;
}

inline json to_json(const Extrapolation& e) {
    return json{{"x", e.x}, {"value", e.value}, {"raw", e.raw}, {"clamped", e.clamped}};
}

inline json to_json(const ScalingCurve& curve) {
    json sizes = json::array();
    for (const auto& p : curve.sizes) {
        sizes.push_back(json{
            {"population_size", p.population_size},
            {"mean", p.mean},
            {"std", p.stddev},
            {"per_realization", p.per_realization},
        });
    }
    json schedule = json::array();
    for (const auto& p : curve.sizes)
        schedule.push_back(json{{"population_size", p.population_size},
                                {"realizations", p.per_realization.size()}});
    return json{
        {"window", to_json(curve.window)},
        {"n_apps", curve.n_apps},
        {"strategy", strategy_name(curve.strategy)},
        {"seed", curve.seed},
        {"s", curve.s},
        {"sample_size", curve.sample_size},
        {"popularity_from_parent", curve.popularity_from_parent},
        {"schedule", schedule},
        {"sizes", sizes},
        {"x_unit", "millions_of_users"},
    };
}

inline ScalingCurve scaling_curve_from_json(const json& j) {
    ScalingCurve curve;
    curve.window = {j.at("window").at("first").get<PeriodIndex>(),
                    j.at("window").at("last").get<PeriodIndex>()};
    curve.n_apps = j.at("n_apps").get<std::uint32_t>();
    curve.strategy = parse_strategy(j.at("strategy").get<std::string>());
    curve.seed = j.at("seed").get<std::uint64_t>();
    curve.s = j.at("s").get<std::uint32_t>();
    curve.sample_size = j.at("sample_size").get<std::uint32_t>();
    for (const auto& p : j.at("sizes")) {
        ScalingCurve::SizePoint point;
        point.population_size = p.at("population_size").get<std::uint64_t>();
        point.mean = p.at("mean").get<double>();
        point.stddev = p.at("std").get<double>();
        if (p.contains("per_realization"))
            point.per_realization = p.at("per_realization").get<std::vector<double>>();
        curve.sizes.push_back(std::move(point));
    }
    return curve;
}

// ---------------------------------------------------------------------------
// '#'-headered tables (plot-ready, one row per period)

inline std::string seasonal_table(const SeasonalCurve& curve) {
    std::string out;
    out += "# seasonal unicity, n_apps=" + std::to_string(curve.n_apps) + ", strategy=" +
           strategy_name(curve.strategy) + "\n";
    out += "# columns: period\traw_mean\traw_std\tpopulation\tapp_set_size\trescaled\n";
    for (const auto& p : curve.points) {
        out += std::to_string(p.period) + "\t" + json(p.mean).dump() + "\t" +
               json(p.stddev).dump() + "\t" + std::to_string(p.population) + "\t" +
               std::to_string(p.app_set_size) + "\t" + json(p.rescaled).dump() + "\n";
    }
    return out;
}

inline std::string usage_table(const UsageStats& stats) {
    std::string out = "# apps per user per period\n# columns: period\tusers\tmean_items\tmedian_items\n";
    for (const auto& p : stats.points)
        out += std::to_string(p.period) + "\t" + std::to_string(p.users) + "\t" +
               json(p.mean_items).dump() + "\t" + json(p.median_items).dump() + "\n";
    return out;
}

inline std::string drift_table(const DriftSeries& series) {
    std::string out = "# fingerprint drift (jaccard distance), mode=" +
                      std::string(drift_mode_name(series.mode)) +
                      "\n# columns: period\tusers\tmean\tmedian\tq1\tq3\n";
    for (const auto& p : series.points) {
        if (p.empty) {
            out += std::to_string(p.period) + "\t0\tnan\tnan\tnan\tnan\n";
        } else {
            out += std::to_string(p.period) + "\t" + std::to_string(p.users) + "\t" +
                   json(p.mean).dump() + "\t" + json(p.median).dump() + "\t" +
                   json(p.q1).dump() + "\t" + json(p.q3).dump() + "\n";
        }
    }
    return out;
}

inline std::string histogram_table(const PopularityHistogram& hist) {
    std::string out = "# item popularity histogram, window=[" + std::to_string(hist.window.first) +
                      "," + std::to_string(hist.window.last) + "], scheme=" + hist.scheme +
                      "\n# columns: bin_lo\tbin_hi_exclusive\titems\n";
    for (const auto& b : hist.bins)
        out += std::to_string(b.lo) + "\t" + std::to_string(b.hi) + "\t" +
               std::to_string(b.items) + "\n";
    return out;
}

inline std::string category_table(const CategoryFractions& fractions) {
    std::string out = std::string("# category fractions, basis=") +
                      (fractions.pair_weighted ? "user_item_pairs" : "distinct_items") +
                      "\n# columns: period\tlabel\tfraction\n";
    for (const auto& p : fractions.points)
        for (const auto& [label, value] : p.fractions)
            out += std::to_string(p.period) + "\t" + label + "\t" + json(value).dump() + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// run manifest

/// Record of one CLI invocation: enough to re-run it bit-for-bit. The
/// duration is informational and excluded from reproducibility.
struct RunManifest {
    std::string subcommand;
    std::vector<std::string> argv;  // original arguments, without argv[0]
    json params;                    // parsed parameter set
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> inputs;  // path, digest
    double duration_seconds = 0.0;

    json to_json() const {
        json in = json::array();
        for (const auto& [path, digest] : inputs)
            in.push_back(json{{"path", path}, {"digest", digest}});
        return json{
            {"tool", "unicity"},
            {"version", kVersion},
            {"subcommand", subcommand},
            {"argv", argv},
            {"params", params},
            {"seed", seed},
            {"inputs", in},
            {"duration_seconds", duration_seconds},
        };
    }

    static RunManifest from_json(const json& j) {
        RunManifest m;
        m.subcommand = j.at("subcommand").get<std::string>();
        m.argv = j.at("argv").get<std::vector<std::string>>();
        if (j.contains("params")) m.params = j.at("params");
        if (j.contains("seed")) m.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("inputs"))
            for (const auto& e : j.at("inputs"))
                m.inputs.emplace_back(e.at("path").get<std::string>(),
                                      e.at("digest").get<std::string>());
        return m;
    }
};

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write: " + path);
    out << content;
    if (!out) throw DataError("write failed: " + path);
}

inline void write_json(const std::string& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

inline json read_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError(path + ": invalid JSON: " + e.what());
    }
}

}  // namespace unicity
