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

// Command-line front door: ingest, unicity, seasonal, scaling, fit,
// extrapolate, synth, stats, rerun. Every run writes a manifest
// (<output>.manifest.json) recording the full argument vector, parameter
// set, seed and input digests; `rerun --manifest <file>` replays it and
// reproduces the outputs byte for byte.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "unicity/unicity.hpp"

namespace {

using unicity::json;

int dispatch(const std::vector<std::string>& args);

// -------------------------------------------------------------------------
// small helpers

std::vector<std::uint32_t> parse_n_list(const std::string& text) {
    std::vector<std::uint32_t> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string tok = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        const std::size_t colon = tok.find(':');
        try {
            if (colon == std::string::npos) {
                out.push_back(static_cast<std::uint32_t>(std::stoul(tok)));
            } else {
                const auto lo = std::stoul(tok.substr(0, colon));
                const auto hi = std::stoul(tok.substr(colon + 1));
                if (hi < lo) throw unicity::UsageError("bad range in --n: " + tok);
                for (auto v = lo; v <= hi; ++v) out.push_back(static_cast<std::uint32_t>(v));
            }
        } catch (const std::logic_error&) {
            throw unicity::UsageError("cannot parse n value '" + tok + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw unicity::UsageError("--n produced no values");
    return out;
}

unicity::PeriodRange parse_window(const std::string& text, std::uint32_t num_periods) {
    if (text.empty() || text == "all") return {0, num_periods - 1};
    const std::size_t colon = text.find(':');
    try {
        if (colon == std::string::npos) {
            const auto p = static_cast<std::uint32_t>(std::stoul(text));
            return {p, p};
        }
        return {static_cast<std::uint32_t>(std::stoul(text.substr(0, colon))),
                static_cast<std::uint32_t>(std::stoul(text.substr(colon + 1)))};
    } catch (const std::logic_error&) {
        throw unicity::UsageError("cannot parse window '" + text + "' (expected F:L or P or all)");
    }
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string tok = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        try {
            out.push_back(std::stod(tok));
        } catch (const std::logic_error&) {
            throw unicity::UsageError(std::string("cannot parse ") + what + " value '" + tok + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::vector<std::uint64_t> parse_u64_list(const std::string& text, const char* what) {
    std::vector<std::uint64_t> out;
    for (const double v : parse_double_list(text, what)) {
        if (v < 0 || v != static_cast<double>(static_cast<std::uint64_t>(v)))
            throw unicity::UsageError(std::string("expected integer ") + what);
        out.push_back(static_cast<std::uint64_t>(v));
    }
    return out;
}

/// Collects manifest data while a command runs and writes it at the end.
class ManifestScope {
  public:
    ManifestScope(std::string subcommand, std::vector<std::string> argv)
        : start_(std::chrono::steady_clock::now()) {
        manifest_.subcommand = std::move(subcommand);
        manifest_.argv = std::move(argv);
        manifest_.params = json::object();
    }

    void input(const std::string& path) {
        manifest_.inputs.emplace_back(path, unicity::file_digest(path));
    }
    template <typename T>
    void param(const std::string& key, const T& value) {
        manifest_.params[key] = value;
    }
    void seed(std::uint64_t s) { manifest_.seed = s; }

    void write(const std::string& path) {
        const auto elapsed = std::chrono::steady_clock::now() - start_;
        manifest_.duration_seconds =
            std::chrono::duration_cast<std::chrono::duration<double>>(elapsed).count();
        unicity::write_json(path, manifest_.to_json());
    }

  private:
    unicity::RunManifest manifest_;
    std::chrono::steady_clock::time_point start_;
};

// -------------------------------------------------------------------------
// dataset loading shared by the analysis subcommands

struct DatasetArgs {
    std::string path;
    std::string exclusions;
    std::uint32_t min_items = 3;
    std::uint32_t periods = 0;  // 0 = infer from data

    void attach(CLI::App* cmd) {
        cmd->add_option("dataset", path, "dataset cache or event text file")->required();
        cmd->add_option("--exclusions", exclusions, "exclusion list (text ingestion only)");
        cmd->add_option("--min-items", min_items,
                        "min items per user per period (text ingestion only)");
        cmd->add_option("--periods", periods, "declared period count (text ingestion only)");
    }

    unicity::FingerprintTensor load(ManifestScope& manifest) const {
        manifest.input(path);
        if (unicity::is_dataset_cache(path)) return unicity::load_dataset(path);
        unicity::ReadStats stats;
        auto events = unicity::read_events(path, stats, periods);
        std::unordered_set<unicity::ItemId> excl;
        if (!exclusions.empty()) {
            manifest.input(exclusions);
            excl = unicity::read_exclusions(exclusions);
        }
        return unicity::build_tensor(std::move(events), excl, min_items, periods);
    }
};

std::string manifest_path_for(const std::string& out, const std::string& explicit_path) {
    return explicit_path.empty() ? out + ".manifest.json" : explicit_path;
}

// -------------------------------------------------------------------------
// subcommand bodies

int run_ingest(const std::vector<std::string>& argv, const std::string& input,
               const std::string& exclusions, std::uint32_t min_items, std::uint32_t periods,
               const std::string& out, const std::string& manifest_path) {
    ManifestScope manifest("ingest", argv);
    manifest.input(input);
    unicity::ReadStats rstats;
    auto events = unicity::read_events(input, rstats, periods);
    std::unordered_set<unicity::ItemId> excl;
    if (!exclusions.empty()) {
        manifest.input(exclusions);
        excl = unicity::read_exclusions(exclusions);
    }
    unicity::BuildStats bstats;
    const auto tensor = unicity::build_tensor(std::move(events), excl, min_items, periods, &bstats);
    unicity::save_dataset(tensor, out);

    manifest.param("input", input);
    manifest.param("exclusions", exclusions);
    manifest.param("min_items", min_items);
    manifest.param("periods", periods);
    manifest.param("out", out);
    manifest.write(manifest_path_for(out, manifest_path));

    std::cout << "lines " << rstats.lines << ", records " << rstats.records << ", malformed "
              << rstats.malformed << ", out-of-range periods " << rstats.bad_period << "\n"
              << "events kept " << bstats.kept << " (excluded " << bstats.excluded
              << ", duplicates " << bstats.duplicates << ", below threshold "
              << bstats.below_threshold << ")\n"
              << "users " << tensor.num_users() << ", items " << tensor.num_items()
              << ", periods " << tensor.num_periods() << "\n"
              << "wrote " << out << "\n";
    return 0;
}

int run_unicity(const std::vector<std::string>& argv, const DatasetArgs& ds,
                const std::string& n_list, const std::string& strategy_name,
                const std::string& window_text, std::uint32_t s, std::uint32_t sample_size,
                std::uint64_t seed, std::uint32_t workers, bool global_popularity,
                const std::string& out, const std::string& manifest_path) {
    ManifestScope manifest("unicity", argv);
    const auto tensor = ds.load(manifest);
    const auto window = parse_window(window_text, tensor.num_periods());
    tensor.check_window(window);
    const auto ns = parse_n_list(n_list);
    const auto strategy = unicity::parse_strategy(strategy_name);

    const auto scope = global_popularity ? unicity::PopularityScope::kGlobal
                                         : unicity::PopularityScope::kWindow;
    const auto ctx = unicity::WindowContext::build(tensor, window, scope);
    std::vector<unicity::UnicityEstimate> estimates;
    for (const auto n : ns) {
        unicity::EstimatorParams params;
        params.n_apps = n;
        params.strategy = strategy;
        params.s = s;
        params.sample_size = sample_size;
        params.seed = seed;
        params.workers = workers;
        estimates.push_back(unicity::estimate_unicity(ctx, params));
    }
    unicity::write_json(out, unicity::unicity_report(estimates));

    manifest.seed(seed);
    manifest.param("n", n_list);
    manifest.param("strategy", strategy_name);
    manifest.param("window", window_text);
    manifest.param("s", s);
    manifest.param("sample_size", sample_size);
    manifest.param("workers", workers);
    manifest.param("global_popularity", global_popularity);
    manifest.param("out", out);
    manifest.write(manifest_path_for(out, manifest_path));
    std::cout << "wrote " << out << "\n";
    return 0;
}

int run_seasonal(const std::vector<std::string>& argv, const DatasetArgs& ds, std::uint32_t n,
                 const std::string& strategy_name, std::uint32_t s, std::uint32_t sample_size,
                 std::uint64_t seed, std::uint32_t workers, bool global_popularity,
                 const std::string& out, const std::string& manifest_path) {
    ManifestScope manifest("seasonal", argv);
    const auto tensor = ds.load(manifest);
    unicity::EstimatorParams params;
    params.n_apps = n;
    params.strategy = unicity::parse_strategy(strategy_name);
    params.s = s;
    params.sample_size = sample_size;
    params.seed = seed;
    params.workers = workers;
    params.popularity_scope = global_popularity ? unicity::PopularityScope::kGlobal
                                                : unicity::PopularityScope::kWindow;
    const auto curve = unicity::seasonal_unicity(tensor, params);
    unicity::write_text(out, unicity::seasonal_table(curve));

    manifest.seed(seed);
    manifest.param("n", n);
    manifest.param("strategy", strategy_name);
    manifest.param("s", s);
    manifest.param("sample_size", sample_size);
    manifest.param("workers", workers);
    manifest.param("global_popularity", global_popularity);
    manifest.param("out", out);
    manifest.write(manifest_path_for(out, manifest_path));
    std::cout << "wrote " << out << "\n";
    return 0;
}

int run_scaling(const std::vector<std::string>& argv, const DatasetArgs& ds,
                const std::string& sizes_text, const std::string& realizations_text,
                std::uint32_t n, const std::string& strategy_name, const std::string& window_text,
                std::uint32_t s, std::uint32_t sample_size, std::uint64_t seed,
                std::uint32_t workers, bool popularity_from_parent, const std::string& fit_forms,
                const std::string& extrapolate_x, const std::string& out,
                const std::string& manifest_path) {
    ManifestScope manifest("scaling", argv);
    const auto tensor = ds.load(manifest);
    const auto window = parse_window(window_text, tensor.num_periods());
    tensor.check_window(window);

    unicity::SubsampleSchedule schedule;
    if (sizes_text.empty() || sizes_text == "tiered") {
        schedule = unicity::SubsampleSchedule::tiered(
            tensor.window_population(window).size());
    } else {
        const auto sizes = parse_u64_list(sizes_text, "--sizes");
        std::vector<std::uint64_t> reals;
        if (!realizations_text.empty())
            reals = parse_u64_list(realizations_text, "--realizations");
        if (reals.size() > 1 && reals.size() != sizes.size())
            throw unicity::UsageError("--realizations must be one value or match --sizes");
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            std::uint32_t r = unicity::SubsampleSchedule::default_realizations(sizes[i]);
            if (reals.size() == 1) r = static_cast<std::uint32_t>(reals[0]);
            if (reals.size() > 1) r = static_cast<std::uint32_t>(reals[i]);
            schedule.entries.push_back({sizes[i], r});
        }
    }

    unicity::EstimatorParams params;
    params.n_apps = n;
    params.strategy = unicity::parse_strategy(strategy_name);
    params.s = s;
    params.sample_size = sample_size;
    params.seed = seed;
    params.workers = workers;
    const auto curve =
        unicity::scaling_curve(tensor, schedule, window, params, popularity_from_parent);
    json report = unicity::to_json(curve);

    if (!fit_forms.empty()) {
        const auto xs = curve.x_millions();
        const auto ys = curve.means();
        std::vector<unicity::FitForm> forms;
        if (fit_forms == "all") {
            forms = {unicity::FitForm::kPowerLaw, unicity::FitForm::kStretchedExp,
                     unicity::FitForm::kExponential, unicity::FitForm::kLinear};
        } else {
            std::size_t pos = 0;
            while (pos < fit_forms.size()) {
                const auto comma = fit_forms.find(',', pos);
                forms.push_back(unicity::parse_fit_form(
                    fit_forms.substr(pos, comma == std::string::npos ? comma : comma - pos)));
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
        }
        json fits = json::array();
        for (const auto form : forms) fits.push_back(unicity::to_json(unicity::fit_curve(xs, ys, form)));
        report["fits"] = fits;

        if (!extrapolate_x.empty()) {
            json table = json::array();
            for (const auto form : forms) {
                const auto fit = unicity::fit_curve(xs, ys, form);
                json points = json::array();
                for (const double x : parse_double_list(extrapolate_x, "--extrapolate-x"))
                    points.push_back(unicity::to_json(unicity::extrapolate(fit, x)));
                table.push_back(json{{"form", unicity::fit_form_name(form)}, {"points", points}});
            }
            report["extrapolations"] = table;
        }
    }
    unicity::write_json(out, report);

    manifest.seed(seed);
    manifest.param("sizes", sizes_text);
    manifest.param("realizations", realizations_text);
    manifest.param("n", n);
    manifest.param("strategy", strategy_name);
    manifest.param("window", window_text);
    manifest.param("s", s);
    manifest.param("sample_size", sample_size);
    manifest.param("workers", workers);
    manifest.param("popularity_from_parent", popularity_from_parent);
    manifest.param("fit", fit_forms);
    manifest.param("extrapolate_x", extrapolate_x);
    manifest.param("out", out);
    manifest.write(manifest_path_for(out, manifest_path));
    std::cout << "wrote " << out << "\n";
    return 0;
}

int run_fit(const std::vector<std::string>& argv, const std::string& curve_path,
            const std::string& forms_text, bool weighted, const std::string& out,
            const std::string& manifest_path) {
    ManifestScope manifest("fit", argv);
    manifest.input(curve_path);
    const auto curve = unicity::scaling_curve_from_json(unicity::read_json(curve_path));
    const auto xs = curve.x_millions();
    const auto ys = curve.means();

    std::vector<unicity::FitForm> forms;
    if (forms_text == "all") {
        forms = {unicity::FitForm::kPowerLaw, unicity::FitForm::kStretchedExp,
                 unicity::FitForm::kExponential, unicity::FitForm::kLinear};
    } else {
        std::size_t pos = 0;
        while (pos < forms_text.size()) {
            const auto comma = forms_text.find(',', pos);
            forms.push_back(unicity::parse_fit_form(
                forms_text.substr(pos, comma == std::string::npos ? comma : comma - pos)));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }
    unicity::FitOptions options;
    options.inverse_variance_weights = weighted;
    if (weighted) options.stddevs = curve.stddevs();

    json fits = json::array();
    for (const auto form : forms)
        fits.push_back(unicity::to_json(unicity::fit_curve(xs, ys, form, options)));
    const json report{{"curve", curve_path},
                      {"n_apps", curve.n_apps},
                      {"strategy", unicity::strategy_name(curve.strategy)},
                      {"weighted", weighted},
                      {"fits", fits}};
    unicity::write_json(out, report);

    manifest.param("curve", curve_path);
    manifest.param("forms", forms_text);
    manifest.param("weighted", weighted);
    manifest.param("out", out);
    manifest.write(manifest_path_for(out, manifest_path));
    std::cout << "wrote " << out << "\n";
    return 0;
}

int run_extrapolate(const std::vector<std::string>& argv, const std::string& fit_path,
                    const std::string& form_text, const std::string& x_text,
                    const std::string& out, const std::string& manifest_path) {
    ManifestScope manifest("extrapolate", argv);
    manifest.input(fit_path);
    const auto doc = unicity::read_json(fit_path);
    if (!doc.contains("fits") || doc.at("fits").empty())
        throw unicity::DataError(fit_path + ": no fits in file");

    std::optional<unicity::FitResult> chosen;
    for (const auto& f : doc.at("fits")) {
        const auto fit = unicity::fit_from_json(f);
        if (form_text.empty()) {  // highest pseudo-R2 wins
            if (!chosen || fit.pseudo_r2 > chosen->pseudo_r2) chosen = fit;
        } else if (unicity::fit_form_name(fit.form) == form_text) {
            chosen = fit;
        }
    }
    if (!chosen)
        throw unicity::DataError("fit form '" + form_text + "' not present in " + fit_path);

    json points = json::array();
    for (const double x : parse_double_list(x_text, "--x"))
        points.push_back(unicity::to_json(unicity::extrapolate(*chosen, x)));
    const json report{{"fit", unicity::to_json(*chosen)}, {"points", points}};
    unicity::write_json(out, report);

    manifest.param("fit", fit_path);
    manifest.param("form", form_text);
    manifest.param("x", x_text);
    manifest.param("out", out);
    manifest.write(manifest_path_for(out, manifest_path));
    std::cout << "wrote " << out << "\n";
    return 0;
}

int run_synth(const std::vector<std::string>& argv, const unicity::GeneratorConfig& config,
              std::uint32_t plant_k, std::uint32_t plant_rarity, const std::string& out,
              const std::string& cache_out, const std::string& manifest_path) {
    ManifestScope manifest("synth", argv);
    auto tensor = unicity::generate(config);
    json sidecar{
        {"users", config.users},
        {"catalog", config.catalog},
        {"periods", config.periods},
        {"alpha", config.alpha},
        {"mean_items", config.mean_items},
        {"yearly_union_target", config.yearly_union_target},
        {"churn", config.effective_churn()},
        {"min_items_per_period", config.min_items_per_period},
        {"seed", config.seed},
        {"planted_users", json::array()},
        {"planted_items", json::array()},
    };
    if (plant_k > 0) {
        auto planted = unicity::plant_unique_users(tensor, plant_k, plant_rarity, config.seed);
        tensor = std::move(planted.tensor);
        sidecar["planted_users"] = planted.planted_users;
        sidecar["planted_items"] = planted.planted_items;
        sidecar["plant_rarity"] = plant_rarity;
    }
    unicity::write_events(tensor, out);
    unicity::write_json(out + ".meta.json", sidecar);
    if (!cache_out.empty()) unicity::save_dataset(tensor, cache_out);

    manifest.seed(config.seed);
    manifest.param("users", config.users);
    manifest.param("catalog", config.catalog);
    manifest.param("periods", config.periods);
    manifest.param("alpha", config.alpha);
    manifest.param("mean_items", config.mean_items);
    manifest.param("union_target", config.yearly_union_target);
    manifest.param("churn", config.churn);
    manifest.param("min_items", config.min_items_per_period);
    manifest.param("plant", plant_k);
    manifest.param("plant_rarity", plant_rarity);
    manifest.param("out", out);
    manifest.param("cache", cache_out);
    manifest.write(manifest_path_for(out, manifest_path));
    std::cout << "wrote " << out << " (+" << out << ".meta.json)\n";
    if (!cache_out.empty()) std::cout << "wrote " << cache_out << "\n";
    return 0;
}

int run_stats(const std::vector<std::string>& argv, const DatasetArgs& ds,
              const std::string& window_text, const std::string& categories_path,
              bool pair_weighted, const std::string& drift_mode, const std::string& out_prefix,
              const std::string& manifest_path) {
    ManifestScope manifest("stats", argv);
    const auto tensor = ds.load(manifest);
    const auto window = parse_window(window_text, tensor.num_periods());
    tensor.check_window(window);

    unicity::write_text(out_prefix + ".usage.tsv",
                        unicity::usage_table(unicity::usage_stats(tensor)));
    unicity::write_text(out_prefix + ".pophist.tsv",
                        unicity::histogram_table(unicity::popularity_histogram(tensor, window)));

    std::unordered_map<unicity::ItemId, std::string> categories;
    if (!categories_path.empty()) {
        manifest.input(categories_path);
        std::ifstream in(categories_path, std::ios::binary);
        if (!in) throw unicity::DataError("cannot open categories file: " + categories_path);
        std::string line;
        std::uint64_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            const auto comma = line.find(',');
            if (comma == std::string::npos)
                throw unicity::DataError(categories_path + ":" + std::to_string(lineno) +
                                         ": expected item_id,label");
            const auto id = unicity::detail::parse_u64(line.data(), line.data() + comma);
            if (!id) {
                if (lineno == 1) continue;  // header
                throw unicity::DataError(categories_path + ":" + std::to_string(lineno) +
                                         ": bad item id");
            }
            categories[*id] = line.substr(comma + 1);
        }
    }
    unicity::write_text(
        out_prefix + ".categories.tsv",
        unicity::category_table(unicity::category_fractions(tensor, categories, pair_weighted)));

    if (drift_mode != "none" && tensor.num_periods() >= 2) {
        if (drift_mode == "consecutive" || drift_mode == "both")
            unicity::write_text(out_prefix + ".drift_consecutive.tsv",
                                unicity::drift_table(unicity::jaccard_drift(
                                    tensor, unicity::DriftMode::kConsecutive)));
        if (drift_mode == "baseline" || drift_mode == "both")
            unicity::write_text(out_prefix + ".drift_baseline.tsv",
                                unicity::drift_table(unicity::jaccard_drift(
                                    tensor, unicity::DriftMode::kFromBaseline)));
    }

    manifest.param("window", window_text);
    manifest.param("categories", categories_path);
    manifest.param("pair_weighted", pair_weighted);
    manifest.param("drift_mode", drift_mode);
    manifest.param("out_prefix", out_prefix);
    manifest.write(manifest_path_for(out_prefix, manifest_path));
    std::cout << "wrote " << out_prefix << ".{usage,pophist,categories}.tsv\n";
    return 0;
}

int run_rerun(const std::string& manifest_file) {
    const auto manifest = unicity::RunManifest::from_json(unicity::read_json(manifest_file));
    if (manifest.subcommand == "rerun")
        throw unicity::UsageError("refusing to rerun a rerun manifest");
    return dispatch(manifest.argv);
}

// -------------------------------------------------------------------------

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"re-identification risk analysis for sparse binary fingerprints"};
    app.require_subcommand(1);
    int rc = 0;

    // ingest
    std::string in_input, in_exclusions, in_out, in_manifest;
    std::uint32_t in_min_items = 3, in_periods = 0;
    auto* ingest = app.add_subcommand("ingest", "parse an event file into a dataset cache");
    ingest->add_option("input", in_input, "event text file")->required();
    ingest->add_option("--exclusions", in_exclusions, "one item_id per line");
    ingest->add_option("--min-items", in_min_items, "min items per user per period");
    ingest->add_option("--periods", in_periods, "declared period count (0 = infer)");
    ingest->add_option("-o,--out", in_out, "dataset cache path")->required();
    ingest->add_option("--manifest", in_manifest, "manifest path");
    ingest->callback([&] {
        rc = run_ingest(args, in_input, in_exclusions, in_min_items, in_periods, in_out,
                        in_manifest);
    });

    // unicity
    DatasetArgs un_ds;
    std::string un_n = "1:10", un_strategy = "popularity", un_window = "all", un_out, un_manifest;
    std::uint32_t un_s = 20, un_sample = 10000, un_workers = 0;
    std::uint64_t un_seed = unicity::kDefaultSeed;
    bool un_global_pop = false;
    auto* un = app.add_subcommand("unicity", "estimate unicity for a list of n");
    un_ds.attach(un);
    un->add_option("--n", un_n, "n values: list and ranges, e.g. 1:10 or 1,2,5");
    un->add_option("--strategy", un_strategy, "random|popularity");
    un->add_option("--window", un_window, "period window F:L (default all)");
    un->add_option("--s", un_s, "number of samples");
    un->add_option("--sample-size", un_sample, "users per sample");
    un->add_option("--seed", un_seed, "RNG seed");
    un->add_option("--workers", un_workers, "worker threads (0 = auto)");
    un->add_flag("--global-popularity", un_global_pop,
                 "rank by whole-dataset popularity instead of the attacked window's");
    un->add_option("-o,--out", un_out, "JSON report path")->required();
    un->add_option("--manifest", un_manifest, "manifest path");
    un->callback([&] {
        rc = run_unicity(args, un_ds, un_n, un_strategy, un_window, un_s, un_sample, un_seed,
                         un_workers, un_global_pop, un_out, un_manifest);
    });

    // seasonal
    DatasetArgs se_ds;
    std::string se_strategy = "popularity", se_out, se_manifest;
    std::uint32_t se_n = 5, se_s = 20, se_sample = 10000, se_workers = 0;
    std::uint64_t se_seed = unicity::kDefaultSeed;
    bool se_global_pop = false;
    auto* se = app.add_subcommand("seasonal", "per-period unicity with catalog rescaling");
    se_ds.attach(se);
    se->add_option("--n", se_n, "quasi-identifier size");
    se->add_option("--strategy", se_strategy, "random|popularity");
    se->add_option("--s", se_s, "number of samples");
    se->add_option("--sample-size", se_sample, "users per sample");
    se->add_option("--seed", se_seed, "RNG seed");
    se->add_option("--workers", se_workers, "worker threads (0 = auto)");
    se->add_flag("--global-popularity", se_global_pop,
                 "rank by whole-dataset popularity instead of each month's");
    se->add_option("-o,--out", se_out, "table path")->required();
    se->add_option("--manifest", se_manifest, "manifest path");
    se->callback([&] {
        rc = run_seasonal(args, se_ds, se_n, se_strategy, se_s, se_sample, se_seed, se_workers,
                          se_global_pop, se_out, se_manifest);
    });

    // scaling
    DatasetArgs sc_ds;
    std::string sc_sizes, sc_reals, sc_strategy = "popularity", sc_window = "all";
    std::string sc_fit, sc_extrax, sc_out, sc_manifest;
    std::uint32_t sc_n = 5, sc_s = 20, sc_sample = 10000, sc_workers = 0;
    std::uint64_t sc_seed = unicity::kDefaultSeed;
    bool sc_parent_pop = false;
    auto* sc = app.add_subcommand("scaling", "unicity vs subsample size");
    sc_ds.attach(sc);
    sc->add_option("--sizes", sc_sizes, "subsample sizes, comma list (default tiered)");
    sc->add_option("--realizations", sc_reals, "per size or single value (default tiered rule)");
    sc->add_option("--n", sc_n, "quasi-identifier size");
    sc->add_option("--strategy", sc_strategy, "random|popularity");
    sc->add_option("--window", sc_window, "period window F:L");
    sc->add_option("--s", sc_s, "samples per estimate");
    sc->add_option("--sample-size", sc_sample, "users per sample");
    sc->add_option("--seed", sc_seed, "RNG seed");
    sc->add_option("--workers", sc_workers, "worker threads (0 = auto)");
    sc->add_flag("--popularity-from-parent", sc_parent_pop,
                 "rank by parent-dataset popularity instead of the subsample's");
    sc->add_option("--fit", sc_fit, "fit forms: all or comma list");
    sc->add_option("--extrapolate-x", sc_extrax, "x values (millions) to extrapolate to");
    sc->add_option("-o,--out", sc_out, "JSON report path")->required();
    sc->add_option("--manifest", sc_manifest, "manifest path");
    sc->callback([&] {
        rc = run_scaling(args, sc_ds, sc_sizes, sc_reals, sc_n, sc_strategy, sc_window, sc_s,
                         sc_sample, sc_seed, sc_workers, sc_parent_pop, sc_fit, sc_extrax, sc_out,
                         sc_manifest);
    });

    // fit
    std::string ft_curve, ft_forms = "all", ft_out, ft_manifest;
    bool ft_weighted = false;
    auto* ft = app.add_subcommand("fit", "fit functional forms to a scaling curve");
    ft->add_option("curve", ft_curve, "scaling report JSON")->required();
    ft->add_option("--forms", ft_forms, "all or comma list of forms");
    ft->add_flag("--weighted", ft_weighted, "weight points by 1/std^2");
    ft->add_option("-o,--out", ft_out, "JSON report path")->required();
    ft->add_option("--manifest", ft_manifest, "manifest path");
    ft->callback([&] { rc = run_fit(args, ft_curve, ft_forms, ft_weighted, ft_out, ft_manifest); });

    // extrapolate
    std::string ex_fit, ex_form, ex_x, ex_out, ex_manifest;
    auto* ex = app.add_subcommand("extrapolate", "evaluate a fit at new population sizes");
    ex->add_option("fit", ex_fit, "fit report JSON")->required();
    ex->add_option("--form", ex_form, "which form (default: best pseudo-R2)");
    ex->add_option("--x", ex_x, "x values in millions, comma list")->required();
    ex->add_option("-o,--out", ex_out, "JSON report path")->required();
    ex->add_option("--manifest", ex_manifest, "manifest path");
    ex->callback([&] { rc = run_extrapolate(args, ex_fit, ex_form, ex_x, ex_out, ex_manifest); });

    // synth
    unicity::GeneratorConfig config;
    std::string sy_out, sy_cache, sy_manifest;
    std::uint32_t sy_plant = 0, sy_rarity = 1;
    auto* sy = app.add_subcommand("synth", "generate a synthetic dataset with ground truth");
    sy->add_option("--users", config.users, "user count");
    sy->add_option("--catalog", config.catalog, "item-id space size");
    sy->add_option("--periods", config.periods, "period count");
    sy->add_option("--alpha", config.alpha, "Zipf weight exponent");
    sy->add_option("--mean-items", config.mean_items, "mean items per user per period");
    sy->add_option("--union-target", config.yearly_union_target,
                   "target distinct items across all periods");
    sy->add_option("--churn", config.churn, "per-period replacement rate (default derived)");
    sy->add_option("--min-items", config.min_items_per_period, "floor on per-period items");
    sy->add_option("--seed", config.seed, "RNG seed");
    sy->add_option("--workers", config.workers, "worker threads (0 = auto)");
    sy->add_option("--plant", sy_plant, "plant k users with a personal fresh item");
    sy->add_option("--plant-rarity", sy_rarity, "popularity of each planted item");
    sy->add_option("-o,--out", sy_out, "event text output")->required();
    sy->add_option("--cache", sy_cache, "also write a dataset cache");
    sy->add_option("--manifest", sy_manifest, "manifest path");
    sy->callback([&] {
        rc = run_synth(args, config, sy_plant, sy_rarity, sy_out, sy_cache, sy_manifest);
    });

    // stats
    DatasetArgs st_ds;
    std::string st_window = "all", st_categories, st_drift = "both", st_prefix, st_manifest;
    bool st_pairs = false;
    auto* st = app.add_subcommand("stats", "usage, popularity and category tables");
    st_ds.attach(st);
    st->add_option("--window", st_window, "window for the popularity histogram");
    st->add_option("--categories", st_categories, "item_id,label file");
    st->add_flag("--pair-weighted", st_pairs, "weight categories by user-item pairs");
    st->add_option("--drift-mode", st_drift, "consecutive|baseline|both|none");
    st->add_option("-o,--out-prefix", st_prefix, "output path prefix")->required();
    st->add_option("--manifest", st_manifest, "manifest path");
    st->callback([&] {
        rc = run_stats(args, st_ds, st_window, st_categories, st_pairs, st_drift, st_prefix,
                       st_manifest);
    });

    // rerun
    std::string rr_manifest;
    auto* rr = app.add_subcommand("rerun", "replay a recorded run from its manifest");
    rr->add_option("--manifest", rr_manifest, "manifest JSON")->required();
    rr->callback([&] { rc = run_rerun(rr_manifest); });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return dispatch(args);
    } catch (const unicity::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const unicity::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const unicity::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
