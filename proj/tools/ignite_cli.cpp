// Command-line front end for the experiment harness.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ignite/artifacts.hpp"
#include "ignite/dataset_io.hpp"
#include "ignite/errors.hpp"
#include "ignite/experiment.hpp"
#include "ignite/sharpness.hpp"

namespace fs = std::filesystem;
using namespace ignite;
using nlohmann::json;

namespace {

struct CommonFlags {
    std::string config;
    std::string out;
    std::string seeds;
    std::optional<std::uint64_t> master_seed;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "Experiment config (.toml or .json)");
    cmd->add_option("--out", f.out, "Output directory (overrides output_dir)");
    cmd->add_option("--seeds", f.seeds, "Seed count n (0..n-1), list a,b,c or range a-b");
    cmd->add_option("--master-seed", f.master_seed, "Master seed for per-seed stream derivation");
}

ExperimentConfig resolve(const CommonFlags& f) {
    ExperimentConfig c = f.config.empty() ? ExperimentConfig{} : load_experiment_config(f.config);
    if (!f.out.empty()) c.output_dir = f.out;
    if (!f.seeds.empty()) c.seeds = parse_seed_list(f.seeds);
    if (f.master_seed) c.master_seed = *f.master_seed;
    c.validate();
    return c;
}

fs::path data_path(const ExperimentConfig& c, std::uint64_t s) {
    return c.output_dir / "data" / ("seed_" + std::to_string(s) + ".csv");
}
fs::path model_path(const ExperimentConfig& c, std::uint64_t s, std::size_t k) {
    return c.output_dir / "models" / ("seed_" + std::to_string(s) + "_member_" + std::to_string(k) + ".json");
}
fs::path candidate_path(const ExperimentConfig& c, std::uint64_t s) {
    return c.output_dir / "candidates" / ("seed_" + std::to_string(s) + ".csv");
}

// Dataset in the surrogate's coordinates.
OfflineDataset load_training_data(const ExperimentConfig& c, const SyntheticTask& task, std::uint64_t s) {
    const StoredDataset stored = load_dataset(data_path(c, s));
    if (stored.data.task_name != task.name) {
        throw IoError(data_path(c, s).string() + " holds task " + stored.data.task_name + ", config says " + task.name);
    }
    return c.unit_box ? in_unit_box(task, stored.data) : stored.data;
}

std::vector<Surrogate> load_members(const ExperimentConfig& c, std::uint64_t s) {
    std::vector<Surrogate> models;
    for (std::size_t k = 0; k < c.members(); ++k) models.push_back(load_surrogate(model_path(c, s, k)));
    return models;
}

void write_config_snapshot(const ExperimentConfig& c, const std::string& stage) {
    fs::create_directories(c.output_dir);
    const json j = {{"tool", "ignite"}, {"version", std::string(kToolVersion)}, {"stage", stage},
                    {"config", config_to_json(c)}};
    std::ofstream(c.output_dir / (stage + ".json")) << j.dump(2) << '\n';
}

int cmd_gen_data(const ExperimentConfig& c) {
    const SyntheticTask task = c.make_task();
    for (std::uint64_t s : c.seeds) {
        const auto d = generate_offline_dataset(task, c.task.n_pool, c.task.keep_quantile, data_seed(c.master_seed, s));
        save_dataset(data_path(c, s), d, task.bounds);
        std::cout << "seed " << s << ": " << d.size() << " rows, best normalized " << d.z_norm.maxCoeff() << '\n';
    }
    write_config_snapshot(c, "gen-data");
    return 0;
}

int cmd_train(const ExperimentConfig& c, bool traces_only) {
    const SyntheticTask task = c.make_task();
    const MlpSpec spec = c.spec_for(task);
    for (std::uint64_t s : c.seeds) {
        OfflineDataset data;
        if (traces_only) {
            const auto raw = generate_offline_dataset(task, c.task.n_pool, c.task.keep_quantile, data_seed(c.master_seed, s));
            data = c.unit_box ? in_unit_box(task, raw) : raw;
        } else {
            data = load_training_data(c, task, s);
        }
        for (std::size_t k = 0; k < c.members(); ++k) {
            IgniteConfig tc = c.trainer;
            tc.seed = train_seed(c.master_seed, s, k);
            const TrainResult res = train(c.regime, data, spec, tc, c.penalty_weight);
            const std::string stem = "seed_" + std::to_string(s) + "_member_" + std::to_string(k);
            write_trace_csv(c.output_dir / "traces" / (stem + ".csv"), res.trace, c.trainer.rho);
            if (!traces_only) save_surrogate(model_path(c, s, k), res.surrogate);
            const auto& last = res.trace.records.back();
            std::cout << stem << ": final loss " << last.loss << ", grad_norm " << last.grad_norm << ", lambda "
                      << last.lambda << '\n';
        }
    }
    write_config_snapshot(c, traces_only ? "traces" : "train");
    return 0;
}

int cmd_search(const ExperimentConfig& c) {
    const SyntheticTask task = c.make_task();
    const Box box = c.unit_box ? Box::uniform(task.dim, 0.0, 1.0) : task.bounds;
    for (std::uint64_t s : c.seeds) {
        const OfflineDataset data = load_training_data(c, task, s);
        const auto models = load_members(c, s);
        SearchConfig sc = c.search;
        sc.seed = search_seed(c.master_seed, s);
        CandidateSet cand = run_search(models, data, sc, box);
        if (c.unit_box) cand.designs = from_unit_box(task, cand.designs);
        save_candidates(candidate_path(c, s), cand);
        std::cout << "seed " << s << ": " << cand.size() << " candidates\n";
    }
    write_config_snapshot(c, "search");
    return 0;
}

int cmd_eval(const ExperimentConfig& c) {
    const SyntheticTask task = c.make_task();
    std::vector<SeedResult> rows;
    for (std::uint64_t s : c.seeds) {
        CandidateSet cand = load_candidates(candidate_path(c, s));
        SeedResult r;
        r.seed = s;
        r.report = evaluate_candidates(cand, task, c.levels, s);
        r.ok = true;
        save_candidates(candidate_path(c, s), cand);
        rows.push_back(std::move(r));
    }
    std::ofstream out(c.output_dir / "eval.csv");
    out << "seed";
    for (double l : c.levels) out << ",p" << format_double(l) << "_norm";
    for (double l : c.levels) out << ",p" << format_double(l) << "_raw";
    out << '\n';
    for (const auto& r : rows) {
        out << r.seed;
        for (double v : r.report.normalized) out << ',' << format_double(v);
        for (double v : r.report.raw) out << ',' << format_double(v);
        out << '\n';
    }
    std::ofstream agg(c.output_dir / "eval_aggregate.csv");
    agg << "level,n,mean,std,median\n";
    for (const auto& a : aggregate_levels(rows, c.levels)) {
        agg << format_double(a.level) << ',' << a.n << ',' << format_double(a.mean) << ',' << format_double(a.std)
            << ',' << format_double(a.median) << '\n';
        std::cout << "p" << a.level << ": " << a.mean << " +- " << a.std << '\n';
    }
    write_config_snapshot(c, "eval");
    return 0;
}

int cmd_sharpness(const ExperimentConfig& c) {
    const SyntheticTask task = c.make_task();
    std::ofstream out(c.output_dir / "sharpness.csv");
    out << "seed,member,candidate_sharpness,train_sharpness,grad_norm_candidates,grad_norm_train\n";
    for (std::uint64_t s : c.seeds) {
        const OfflineDataset data = load_training_data(c, task, s);
        CandidateSet cand = load_candidates(candidate_path(c, s));
        if (c.unit_box) cand.designs = to_unit_box(task, cand.designs);
        const auto models = load_members(c, s);
        for (std::size_t k = 0; k < models.size(); ++k) {
            const auto on_cand = candidate_sharpness(models[k], cand, c.trainer.rho);
            const auto on_train = first_order_sharpness(models[k], data.X, c.trainer.rho);
            out << s << ',' << k << ',' << format_double(on_cand.estimate) << ',' << format_double(on_train.estimate)
                << ',' << format_double(on_cand.grad_norm) << ',' << format_double(on_train.grad_norm) << '\n';
            std::cout << "seed " << s << " member " << k << ": candidates " << on_cand.estimate << ", train "
                      << on_train.estimate << '\n';
        }
    }
    return 0;
}

int cmd_run(const ExperimentConfig& c) {
    const RunReport rep = run_experiment(c);
    for (const auto& a : rep.aggregate) {
        std::cout << "p" << a.level << ": " << a.mean << " +- " << a.std << " (median " << a.median << ", n=" << a.n
                  << ")\n";
    }
    if (!rep.complete()) {
        std::cerr << "some seeds failed; see " << (c.output_dir / "FAILED").string() << '\n';
        return 3;
    }
    return 0;
}

int cmd_compare(const std::string& base, const std::string& treated, const std::string& out) {
    const auto rows = compare(load_report(base), load_report(treated));
    for (const auto& g : rows) {
        std::cout << "p" << g.level << ": " << g.base_mean << " -> " << g.treated_mean << "  gain "
                  << (g.gain_pp >= 0 ? "+" : "") << g.gain_pp << "%\n";
    }
    if (!out.empty()) write_gain_csv(out, rows);
    return 0;
}

int cmd_sweep(const ExperimentConfig& c, const std::string& param, const std::vector<double>& values) {
    const auto res = sweep(c, parse_sweep_param(param), values);
    for (std::size_t i = 0; i < res.values.size(); ++i) {
        std::cout << param << " = " << res.values[i] << ":";
        for (const auto& g : res.gains[i]) std::cout << "  p" << g.level << " " << g.gain_pp << "%";
        std::cout << '\n';
    }
    return 0;
}

int cmd_overhead(const ExperimentConfig& c, std::size_t repeats) {
    const auto o = measure_overhead(c, repeats);
    const json j = {{"iterations", o.iterations},
                    {"repeats", o.repeats},
                    {"erm_ms_per_iter", 1e3 * o.erm_seconds_per_iter},
                    {"ignite_ms_per_iter", 1e3 * o.ignite_seconds_per_iter},
                    {"ratio", o.ratio()}};
    fs::create_directories(c.output_dir);
    std::ofstream(c.output_dir / "overhead.json") << j.dump(2) << '\n';
    std::cout << j.dump(2) << '\n';
    return 0;
}

void print_error(std::string_view kind, const std::string& message, const std::string& field = {}) {
    json e = {{"kind", std::string(kind)}, {"message", message}};
    if (!field.empty()) e["field"] = field;
    std::cerr << json{{"error", e}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sharpness-constrained surrogate training for offline black-box optimization"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    CommonFlags f;
    auto* gen = app.add_subcommand("gen-data", "Generate truncated offline datasets");
    auto* trn = app.add_subcommand("train", "Train surrogates on generated datasets");
    auto* sea = app.add_subcommand("search", "Search trained surrogates for candidates");
    auto* evl = app.add_subcommand("eval", "Evaluate candidates with the oracle");
    auto* run = app.add_subcommand("run", "Full pipeline for every seed");
    auto* shp = app.add_subcommand("sharpness", "Surrogate sharpness on candidates and training data");
    auto* trc = app.add_subcommand("traces", "Train and write per-iteration traces only");
    auto* swp = app.add_subcommand("sweep", "Sweep one trainer parameter against an ERM baseline");
    auto* ovh = app.add_subcommand("overhead", "Per-iteration training time, ERM vs IGNITE");
    for (auto* cmd : {gen, trn, sea, evl, run, shp, trc, swp, ovh}) add_common(cmd, f);

    std::string param = "epsilon";
    std::vector<double> values{0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
    swp->add_option("--param", param, "epsilon | eta_lambda | rho | r");
    swp->add_option("--values", values, "Comma-separated values")->delimiter(',');

    std::size_t repeats = 3;
    ovh->add_option("--repeats", repeats, "Alternating timing repeats");

    std::string base, treated, gains_out;
    auto* cmp = app.add_subcommand("compare", "Gain table between two run directories");
    cmp->add_option("base", base, "Baseline run directory")->required();
    cmp->add_option("treated", treated, "Treated run directory")->required();
    cmp->add_option("--out", gains_out, "Write the gain table CSV here");

    std::size_t count = 100;
    std::uint64_t theory_seed = 0;
    auto* thc = app.add_subcommand("theory-check", "Executable check of the constant-Hessian construction");
    thc->add_option("--count", count, "Randomized instances");
    thc->add_option("--master-seed", theory_seed, "Sampling seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("usage", e.what());
        return 2;
    }

    try {
        if (*cmp) return cmd_compare(base, treated, gains_out);
        if (*thc) {
            const auto rep = theory_report(count, theory_seed);
            std::cout << rep.text;
            return rep.passed ? 0 : 1;
        }
        const ExperimentConfig c = resolve(f);
        if (*gen) return cmd_gen_data(c);
        if (*trn) return cmd_train(c, false);
        if (*trc) return cmd_train(c, true);
        if (*sea) return cmd_search(c);
        if (*evl) return cmd_eval(c);
        if (*run) return cmd_run(c);
        if (*shp) return cmd_sharpness(c);
        if (*swp) return cmd_sweep(c, param, values);
        if (*ovh) return cmd_overhead(c, repeats);
    } catch (const ConfigError& e) {
        print_error(to_string(e.kind()), e.what(), e.field());
        return 2;
    } catch (const Error& e) {
        print_error(to_string(e.kind()), e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return 1;
    }
    return 0;
}
