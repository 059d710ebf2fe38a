#include "ignite/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "ignite/artifacts.hpp"
#include "ignite/errors.hpp"
#include "ignite/random.hpp"
#include "ignite/sharpness.hpp"
#include "ignite/theory.hpp"
#include "ignite/toml_lite.hpp"

namespace ignite {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Walks one JSON object, recording which keys were consumed so that leftovers
// can be reported as unknown fields.
class FieldReader {
public:
    FieldReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected a table");
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* find(const std::string& key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    void number(const std::string& key, double& out) {
        if (const json* v = find(key)) {
            if (v->is_number()) {
                out = v->get<double>();
            } else if (v->is_string() && (*v == "-inf" || *v == "inf")) {
                out = *v == "inf" ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
            } else {
                throw ConfigError(field(key), "expected a number");
            }
        }
    }

    template <class Int>
    void count(const std::string& key, Int& out) {
        if (const json* v = find(key)) {
            if (!v->is_number_unsigned()) throw ConfigError(field(key), "expected a nonnegative integer");
            out = v->get<Int>();
        }
    }

    void text(const std::string& key, std::string& out) {
        if (const json* v = find(key)) {
            if (!v->is_string()) throw ConfigError(field(key), "expected a string");
            out = v->get<std::string>();
        }
    }

    void boolean(const std::string& key, bool& out) {
        if (const json* v = find(key)) {
            if (!v->is_boolean()) throw ConfigError(field(key), "expected true or false");
            out = v->get<bool>();
        }
    }

    void counts(const std::string& key, std::vector<std::size_t>& out) {
        if (const json* v = find(key)) {
            if (!v->is_array()) throw ConfigError(field(key), "expected an array of integers");
            out.clear();
            for (const auto& e : *v) {
                if (!e.is_number_unsigned()) throw ConfigError(field(key), "expected an array of integers");
                out.push_back(e.get<std::size_t>());
            }
        }
    }

    void numbers(const std::string& key, std::vector<double>& out) {
        if (const json* v = find(key)) {
            if (!v->is_array()) throw ConfigError(field(key), "expected an array of numbers");
            out.clear();
            for (const auto& e : *v) {
                if (!e.is_number()) throw ConfigError(field(key), "expected an array of numbers");
                out.push_back(e.get<double>());
            }
        }
    }

    template <class Fn>
    void table(const std::string& key, Fn&& fn) {
        if (const json* v = find(key)) {
            FieldReader sub(*v, field(key));
            fn(sub);
            sub.finish();
        }
    }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown field");
        }
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

template <class Fn>
auto as_config_error(const std::string& field, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(field, e.what());
    }
}

std::vector<std::uint64_t> default_seeds() {
    std::vector<std::uint64_t> s(16);
    std::iota(s.begin(), s.end(), 0);
    return s;
}

std::string level_name(double level) { return "p" + format_double(level); }

std::string sanitize(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return s;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

SeedResult run_seed(const ExperimentConfig& cfg, const SyntheticTask& task, std::uint64_t seed) {
    SeedResult out;
    out.seed = seed;
    out.report.levels = cfg.levels;
    out.report.seed = seed;
    try {
        const OfflineDataset raw = generate_offline_dataset(task, cfg.task.n_pool, cfg.task.keep_quantile,
                                                            data_seed(cfg.master_seed, seed));
        const OfflineDataset data = cfg.unit_box ? in_unit_box(task, raw) : raw;
        const Box box = cfg.unit_box ? Box::uniform(task.dim, 0.0, 1.0) : task.bounds;
        out.dataset_best = data.z_norm.maxCoeff();

        const MlpSpec spec = cfg.spec_for(task);
        std::vector<Surrogate> models;
        for (std::size_t k = 0; k < cfg.members(); ++k) {
            IgniteConfig tc = cfg.trainer;
            tc.seed = train_seed(cfg.master_seed, seed, k);
            TrainResult res = train(cfg.regime, data, spec, tc, cfg.penalty_weight);
            out.train_seconds += res.trace.seconds;
            out.train_iterations += res.trace.size();
            out.traces.push_back(std::move(res.trace));
            models.push_back(std::move(res.surrogate));
        }

        SearchConfig sc = cfg.search;
        sc.seed = search_seed(cfg.master_seed, seed);
        const CandidateSet cand = run_search(models, data, sc, box);
        out.candidate_sharpness = candidate_sharpness(models[0], cand, cfg.trainer.rho).estimate;
        out.train_sharpness = first_order_sharpness(models[0], data.X, cfg.trainer.rho).estimate;

        CandidateSet in_task{cfg.unit_box ? from_unit_box(task, cand.designs) : cand.designs, cand.surrogate_scores,
                             std::nullopt};
        out.report = evaluate_candidates(in_task, task, cfg.levels, seed);
        out.ok = true;
    } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
    }
    return out;
}

}  // namespace

ExperimentConfig::ExperimentConfig() : seeds(default_seeds()) {}

SyntheticTask ExperimentConfig::make_task() const {
    return as_config_error("task.name", [&] { return ignite::make_task(task.name, task.dim); });
}

MlpSpec ExperimentConfig::spec_for(const SyntheticTask& t) const {
    return MlpSpec{t.dim, surrogate.hidden_widths, surrogate.hidden_activation, surrogate.output_activation};
}

std::size_t ExperimentConfig::members() const {
    return (search.method == SearchMethod::ens_mean || search.method == SearchMethod::ens_min) ? search.ensemble_size
                                                                                               : 1;
}

void ExperimentConfig::validate() const {
    const SyntheticTask t = make_task();
    if (task.n_pool < 10) throw ConfigError("task.n_pool", "n_pool must be >= 10");
    if (!(task.keep_quantile > 0.0 && task.keep_quantile <= 1.0)) {
        throw ConfigError("task.keep_quantile", "keep_quantile must be in (0, 1]");
    }
    for (std::size_t w : surrogate.hidden_widths) {
        if (w == 0) throw ConfigError("surrogate.hidden_widths", "widths must be positive");
    }
    auto positive = [](double v, const char* field) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(field, "must be positive and finite");
    };
    positive(trainer.rho, "trainer.rho");
    positive(trainer.r, "trainer.r");
    positive(trainer.eta_w, "trainer.eta_w");
    positive(trainer.epsilon, "trainer.epsilon");
    if (!(trainer.eta_lambda >= 0.0) || !std::isfinite(trainer.eta_lambda)) {
        throw ConfigError("trainer.eta_lambda", "must be >= 0");
    }
    if (trainer.iterations == 0) throw ConfigError("trainer.iterations", "must be positive");
    if (trainer.batch_size == 0) throw ConfigError("trainer.batch_size", "must be positive");
    if (std::isnan(trainer.lambda_floor) || trainer.lambda_floor == std::numeric_limits<double>::infinity()) {
        throw ConfigError("trainer.lambda_floor", "must be a real or -inf");
    }
    if (!std::isfinite(trainer.lambda0) || trainer.lambda0 < trainer.lambda_floor) {
        throw ConfigError("trainer.lambda0", "must be finite and >= lambda_floor");
    }
    if (!(penalty_weight >= 0.0) || !std::isfinite(penalty_weight)) {
        throw ConfigError("trainer.penalty_weight", "must be >= 0");
    }
    search.validate();
    if (seeds.empty()) throw ConfigError("seeds", "at least one seed is required");
    if (levels.empty()) throw ConfigError("levels", "at least one percentile level is required");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!(levels[i] > 0.0 && levels[i] <= 100.0)) throw ConfigError("levels", "levels must lie in (0, 100]");
        if (i > 0 && !(levels[i] > levels[i - 1])) throw ConfigError("levels", "levels must be strictly increasing");
    }
    (void)t;
}

ExperimentConfig config_from_json(const json& doc) {
    ExperimentConfig c;
    FieldReader root(doc, "");
    root.text("name", c.name);
    root.count("master_seed", c.master_seed);
    if (const json* s = root.find("seeds")) {
        if (s->is_number_unsigned()) {
            c.seeds.resize(s->get<std::size_t>());
            std::iota(c.seeds.begin(), c.seeds.end(), 0);
        } else if (s->is_array()) {
            c.seeds.clear();
            for (const auto& e : *s) {
                if (!e.is_number_unsigned()) throw ConfigError("seeds", "expected nonnegative integers");
                c.seeds.push_back(e.get<std::uint64_t>());
            }
        } else {
            throw ConfigError("seeds", "expected a count or an array of seeds");
        }
    }
    root.numbers("levels", c.levels);
    std::string out_dir = c.output_dir.string();
    root.text("output_dir", out_dir);
    c.output_dir = out_dir;
    root.boolean("unit_box", c.unit_box);

    root.table("task", [&](FieldReader& r) {
        r.text("name", c.task.name);
        std::size_t dim = 0;
        if (r.find("dim")) {
            r.count("dim", dim);
            c.task.dim = dim;
        }
        r.count("n_pool", c.task.n_pool);
        r.number("keep_quantile", c.task.keep_quantile);
    });
    root.table("surrogate", [&](FieldReader& r) {
        r.counts("hidden_widths", c.surrogate.hidden_widths);
        std::string h(to_string(c.surrogate.hidden_activation)), o(to_string(c.surrogate.output_activation));
        r.text("hidden_activation", h);
        r.text("output_activation", o);
        c.surrogate.hidden_activation =
            as_config_error(r.field("hidden_activation"), [&] { return parse_hidden_activation(h); });
        c.surrogate.output_activation =
            as_config_error(r.field("output_activation"), [&] { return parse_output_activation(o); });
    });
    root.table("trainer", [&](FieldReader& r) {
        std::string regime(to_string(c.regime));
        r.text("regime", regime);
        c.regime = as_config_error(r.field("regime"), [&] { return parse_regime(regime); });
        r.number("lambda0", c.trainer.lambda0);
        r.number("rho", c.trainer.rho);
        r.number("r", c.trainer.r);
        r.number("eta_w", c.trainer.eta_w);
        r.number("eta_lambda", c.trainer.eta_lambda);
        r.number("epsilon", c.trainer.epsilon);
        r.count("iterations", c.trainer.iterations);
        r.count("batch_size", c.trainer.batch_size);
        r.number("lambda_floor", c.trainer.lambda_floor);
        r.number("penalty_weight", c.penalty_weight);
    });
    root.table("search", [&](FieldReader& r) {
        std::string method(to_string(c.search.method)), init(to_string(c.search.init));
        r.text("method", method);
        r.text("init", init);
        c.search.method = parse_search_method(method);
        c.search.init = parse_search_init(init);
        r.count("steps", c.search.steps);
        if (r.find("step_size")) {
            double step = 0.0;
            r.number("step_size", step);
            c.search.step_size = step;
        }
        r.count("num_candidates", c.search.num_candidates);
        r.count("ensemble_size", c.search.ensemble_size);
        r.table("reinforce", [&](FieldReader& q) {
            q.count("population_size", c.search.reinforce.population_size);
            q.number("sigma_init", c.search.reinforce.sigma_init);
            q.number("sigma_decay", c.search.reinforce.sigma_decay);
        });
    });
    root.finish();
    c.validate();
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    json task = {{"name", c.task.name}, {"n_pool", c.task.n_pool}, {"keep_quantile", c.task.keep_quantile}};
    if (c.task.dim) task["dim"] = *c.task.dim;
    json floor = std::isfinite(c.trainer.lambda_floor) ? json(c.trainer.lambda_floor) : json("-inf");
    json search = {{"method", std::string(to_string(c.search.method))},
                   {"init", std::string(to_string(c.search.init))},
                   {"steps", c.search.steps},
                   {"num_candidates", c.search.num_candidates},
                   {"ensemble_size", c.search.ensemble_size},
                   {"reinforce",
                    {{"population_size", c.search.reinforce.population_size},
                     {"sigma_init", c.search.reinforce.sigma_init},
                     {"sigma_decay", c.search.reinforce.sigma_decay}}}};
    if (c.search.step_size) search["step_size"] = *c.search.step_size;
    return {
        {"name", c.name},
        {"master_seed", c.master_seed},
        {"seeds", c.seeds},
        {"levels", c.levels},
        {"output_dir", c.output_dir.string()},
        {"unit_box", c.unit_box},
        {"task", task},
        {"surrogate",
         {{"hidden_widths", c.surrogate.hidden_widths},
          {"hidden_activation", std::string(to_string(c.surrogate.hidden_activation))},
          {"output_activation", std::string(to_string(c.surrogate.output_activation))}}},
        {"trainer",
         {{"regime", std::string(to_string(c.regime))},
          {"lambda0", c.trainer.lambda0},
          {"rho", c.trainer.rho},
          {"r", c.trainer.r},
          {"eta_w", c.trainer.eta_w},
          {"eta_lambda", c.trainer.eta_lambda},
          {"epsilon", c.trainer.epsilon},
          {"iterations", c.trainer.iterations},
          {"batch_size", c.trainer.batch_size},
          {"lambda_floor", floor},
          {"penalty_weight", c.penalty_weight}}},
        {"search", search},
    };
}

ExperimentConfig load_experiment_config(const fs::path& path) { return config_from_json(load_config_document(path)); }

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
    auto parse_one = [&](std::string_view tok) {
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (tok.empty() || ec != std::errc{} || p != tok.data() + tok.size()) {
            throw ConfigError("seeds", "bad seed '" + std::string(tok) + "'");
        }
        return v;
    };
    std::vector<std::uint64_t> out;
    if (text.find_first_of(",-") == std::string_view::npos) {
        const std::uint64_t n = parse_one(text);
        if (n == 0) throw ConfigError("seeds", "seed count must be positive");
        out.resize(n);
        std::iota(out.begin(), out.end(), 0);
        return out;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find(',', start), text.size());
        const std::string_view item = text.substr(start, end - start);
        const std::size_t dash = item.find('-');
        if (dash == std::string_view::npos) {
            out.push_back(parse_one(item));
        } else {
            const std::uint64_t lo = parse_one(item.substr(0, dash)), hi = parse_one(item.substr(dash + 1));
            if (hi < lo) throw ConfigError("seeds", "empty seed range '" + std::string(item) + "'");
            for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
        }
        start = end + 1;
    }
    return out;
}

std::uint64_t data_seed(std::uint64_t master, std::uint64_t seed) { return derive_seed(master, seed, stream::data); }

std::uint64_t train_seed(std::uint64_t master, std::uint64_t seed, std::size_t member) {
    return derive_seed(derive_seed(master, seed, stream::init), member);
}

std::uint64_t search_seed(std::uint64_t master, std::uint64_t seed) { return derive_seed(master, seed, stream::search); }

bool RunReport::complete() const {
    return std::all_of(seeds.begin(), seeds.end(), [](const SeedResult& s) { return s.ok; });
}

std::vector<const SeedResult*> RunReport::succeeded() const {
    std::vector<const SeedResult*> out;
    for (const auto& s : seeds) {
        if (s.ok) out.push_back(&s);
    }
    return out;
}

std::vector<LevelAggregate> aggregate_levels(const std::vector<SeedResult>& seeds, const std::vector<double>& levels) {
    std::vector<LevelAggregate> out;
    for (std::size_t l = 0; l < levels.size(); ++l) {
        LevelAggregate a;
        a.level = levels[l];
        std::vector<double> v;
        for (const auto& s : seeds) {
            if (s.ok) v.push_back(s.report.normalized[l]);
        }
        a.n = v.size();
        if (!v.empty()) {
            double sum = 0.0;
            for (double x : v) sum += x;
            a.mean = sum / static_cast<double>(v.size());
            if (v.size() > 1) {
                double ss = 0.0;
                for (double x : v) ss += (x - a.mean) * (x - a.mean);
                a.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
            }
            a.median = median_of(v);
        }
        out.push_back(a);
    }
    return out;
}

RunReport run_experiment(const ExperimentConfig& cfg, bool write_artifacts) {
    cfg.validate();
    const SyntheticTask task = cfg.make_task();
    RunReport rep;
    rep.config = cfg;
    rep.task_name = task.name;
    for (std::uint64_t s : cfg.seeds) rep.seeds.push_back(run_seed(cfg, task, s));
    rep.aggregate = aggregate_levels(rep.seeds, cfg.levels);
    if (write_artifacts) write_report(rep, cfg.output_dir);
    return rep;
}

void write_report(const RunReport& rep, const fs::path& dir) {
    fs::create_directories(dir);
    const auto& levels = rep.config.levels;

    std::ofstream ps(dir / "per_seed.csv");
    if (!ps) throw IoError("cannot write " + (dir / "per_seed.csv").string());
    ps << "seed,status";
    for (double l : levels) ps << ',' << level_name(l) << "_norm";
    for (double l : levels) ps << ',' << level_name(l) << "_raw";
    ps << ",candidate_sharpness,train_sharpness,dataset_best,error\n";
    for (const auto& s : rep.seeds) {
        ps << s.seed << ',' << (s.ok ? "ok" : "failed");
        for (std::size_t i = 0; i < levels.size(); ++i) ps << ',' << (s.ok ? format_double(s.report.normalized[i]) : "");
        for (std::size_t i = 0; i < levels.size(); ++i) ps << ',' << (s.ok ? format_double(s.report.raw[i]) : "");
        if (s.ok) {
            ps << ',' << format_double(s.candidate_sharpness) << ',' << format_double(s.train_sharpness) << ','
               << format_double(s.dataset_best) << ",\n";
        } else {
            ps << ",,,," << sanitize(s.error) << '\n';
        }
    }

    std::ofstream ag(dir / "aggregate.csv");
    ag << "level,n,mean,std,median\n";
    for (const auto& a : rep.aggregate) {
        ag << format_double(a.level) << ',' << a.n << ',' << format_double(a.mean) << ',' << format_double(a.std) << ','
           << format_double(a.median) << '\n';
    }

    std::ofstream tm(dir / "timing.csv");
    tm << "seed,members,iterations,train_seconds,ms_per_iter\n";
    for (const auto& s : rep.seeds) {
        const double per = s.train_iterations ? 1e3 * s.train_seconds / static_cast<double>(s.train_iterations) : 0.0;
        tm << s.seed << ',' << s.traces.size() << ',' << s.train_iterations << ',' << s.train_seconds << ',' << per
           << '\n';
    }

    const auto trace_paths = emit_traces(rep, dir / "traces");
    json failed = json::array();
    for (const auto& s : rep.seeds) {
        if (!s.ok) failed.push_back({{"seed", s.seed}, {"error", s.error}});
    }
    json agg = json::array();
    for (const auto& a : rep.aggregate) {
        agg.push_back({{"level", a.level}, {"n", a.n}, {"mean", a.mean}, {"std", a.std}, {"median", a.median}});
    }
    json traces = json::array();
    for (const auto& p : trace_paths) traces.push_back(fs::relative(p, dir).generic_string());
    const json run = {{"tool", "ignite"},        {"version", std::string(kToolVersion)},
                      {"task", rep.task_name},   {"config", config_to_json(rep.config)},
                      {"complete", rep.complete()}, {"failed", failed},
                      {"aggregate", agg},        {"traces", traces}};
    std::ofstream rj(dir / "run.json");
    rj << run.dump(2) << '\n';

    const fs::path marker = dir / "FAILED";
    if (rep.complete()) {
        fs::remove(marker);
    } else {
        std::ofstream f(marker);
        for (const auto& s : rep.seeds) {
            if (!s.ok) f << "seed " << s.seed << ": " << s.error << '\n';
        }
    }
}

RunReport load_report(const fs::path& dir) {
    std::ifstream rj(dir / "run.json");
    if (!rj) throw IoError("missing " + (dir / "run.json").string());
    json run;
    try {
        rj >> run;
    } catch (const json::exception& e) {
        throw IoError((dir / "run.json").string() + ": " + e.what());
    }
    RunReport rep;
    rep.config = config_from_json(run.at("config"));
    rep.task_name = run.at("task").get<std::string>();
    const auto& levels = rep.config.levels;

    const CsvTable ps = read_csv(dir / "per_seed.csv");
    const std::string where = (dir / "per_seed.csv").string();
    for (const auto& row : ps.rows) {
        SeedResult s;
        s.seed = static_cast<std::uint64_t>(std::stoull(row[ps.column("seed")]));
        s.ok = row[ps.column("status")] == "ok";
        s.error = row[ps.column("error")];
        s.report.levels = levels;
        s.report.seed = s.seed;
        if (s.ok) {
            for (double l : levels) {
                s.report.normalized.push_back(parse_double_field(row[ps.column(level_name(l) + "_norm")], where));
                s.report.raw.push_back(parse_double_field(row[ps.column(level_name(l) + "_raw")], where));
            }
            s.candidate_sharpness = parse_double_field(row[ps.column("candidate_sharpness")], where);
            s.train_sharpness = parse_double_field(row[ps.column("train_sharpness")], where);
            s.dataset_best = parse_double_field(row[ps.column("dataset_best")], where);
        }
        rep.seeds.push_back(std::move(s));
    }

    const CsvTable ag = read_csv(dir / "aggregate.csv");
    const std::string agw = (dir / "aggregate.csv").string();
    for (const auto& row : ag.rows) {
        LevelAggregate a;
        a.level = parse_double_field(row[ag.column("level")], agw);
        a.n = static_cast<std::size_t>(std::stoull(row[ag.column("n")]));
        a.mean = parse_double_field(row[ag.column("mean")], agw);
        a.std = parse_double_field(row[ag.column("std")], agw);
        a.median = parse_double_field(row[ag.column("median")], agw);
        rep.aggregate.push_back(a);
    }
    const auto expected = aggregate_levels(rep.seeds, levels);
    if (expected.size() != rep.aggregate.size()) throw IoError(agw + ": level count differs from per_seed.csv");
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const auto& e = expected[i];
        const auto& a = rep.aggregate[i];
        if (e.level != a.level || e.n != a.n || e.mean != a.mean || e.std != a.std || e.median != a.median) {
            throw IoError(agw + ": aggregate at level " + format_double(a.level) +
                          " is not recomputable from per_seed.csv");
        }
    }
    return rep;
}

std::vector<fs::path> emit_traces(const RunReport& rep, const fs::path& dir) {
    std::vector<fs::path> paths;
    for (const auto& s : rep.seeds) {
        for (std::size_t k = 0; k < s.traces.size(); ++k) {
            const fs::path p = dir / ("seed_" + std::to_string(s.seed) + "_member_" + std::to_string(k) + ".csv");
            write_trace_csv(p, s.traces[k], rep.config.trainer.rho);
            paths.push_back(p);
        }
    }
    return paths;
}

std::vector<GainRow> compare(const RunReport& base, const RunReport& treated) {
    if (base.task_name != treated.task_name) {
        throw ParameterError("compare: mismatched protocols (task " + base.task_name + " vs " + treated.task_name + ")");
    }
    if (base.config.levels != treated.config.levels) throw ParameterError("compare: mismatched protocols (levels)");
    const auto nb = base.succeeded().size(), nt = treated.succeeded().size();
    if (nb != nt || nb == 0) {
        throw ParameterError("compare: mismatched protocols (" + std::to_string(nb) + " vs " + std::to_string(nt) +
                             " successful seeds)");
    }
    const auto ab = aggregate_levels(base.seeds, base.config.levels);
    const auto at = aggregate_levels(treated.seeds, treated.config.levels);
    std::vector<GainRow> rows;
    for (std::size_t i = 0; i < ab.size(); ++i) {
        GainRow g;
        g.level = ab[i].level;
        g.base_mean = ab[i].mean;
        g.treated_mean = at[i].mean;
        g.gain_pp = 100.0 * (at[i].mean - ab[i].mean);
        g.base_median = ab[i].median;
        g.treated_median = at[i].median;
        g.median_gain_pp = 100.0 * (at[i].median - ab[i].median);
        rows.push_back(g);
    }
    return rows;
}

void write_gain_csv(const fs::path& path, const std::vector<GainRow>& rows) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "level,base_mean,treated_mean,gain_pp,base_median,treated_median,median_gain_pp\n";
    for (const auto& g : rows) {
        out << format_double(g.level) << ',' << format_double(g.base_mean) << ',' << format_double(g.treated_mean)
            << ',' << format_double(g.gain_pp) << ',' << format_double(g.base_median) << ','
            << format_double(g.treated_median) << ',' << format_double(g.median_gain_pp) << '\n';
    }
}

std::string_view to_string(SweepParam p) noexcept {
    switch (p) {
        case SweepParam::epsilon: return "epsilon";
        case SweepParam::eta_lambda: return "eta_lambda";
        case SweepParam::rho: return "rho";
        case SweepParam::r: return "r";
    }
    return "unknown";
}

SweepParam parse_sweep_param(std::string_view name) {
    for (auto p : {SweepParam::epsilon, SweepParam::eta_lambda, SweepParam::rho, SweepParam::r}) {
        if (name == to_string(p)) return p;
    }
    throw ConfigError("sweep.parameter", "unknown sweep parameter '" + std::string(name) + "'");
}

SweepResult sweep(const ExperimentConfig& cfg, SweepParam parameter, const std::vector<double>& values,
                  bool write_artifacts) {
    if (values.size() < 2) throw ConfigError("sweep.values", "a sweep needs at least two values");
    cfg.validate();
    SweepResult out;
    out.parameter = parameter;
    out.values = values;

    ExperimentConfig base = cfg;
    base.regime = Regime::erm;
    base.output_dir = cfg.output_dir / "baseline";
    out.baseline = run_experiment(base, write_artifacts);

    for (double v : values) {
        ExperimentConfig c = cfg;
        switch (parameter) {
            case SweepParam::epsilon: c.trainer.epsilon = v; break;
            case SweepParam::eta_lambda: c.trainer.eta_lambda = v; break;
            case SweepParam::rho: c.trainer.rho = v; break;
            case SweepParam::r: c.trainer.r = v; break;
        }
        c.output_dir = cfg.output_dir / (std::string(to_string(parameter)) + "_" + format_double(v));
        out.runs.push_back(run_experiment(c, write_artifacts));
        out.gains.push_back(compare(out.baseline, out.runs.back()));
    }

    if (write_artifacts) {
        std::ofstream sw(cfg.output_dir / "sweep.csv");
        if (!sw) throw IoError("cannot write " + (cfg.output_dir / "sweep.csv").string());
        sw << "parameter,value,level,base_mean,treated_mean,gain_pp,median_gain_pp\n";
        for (std::size_t i = 0; i < values.size(); ++i) {
            for (const auto& g : out.gains[i]) {
                sw << to_string(parameter) << ',' << format_double(values[i]) << ',' << format_double(g.level) << ','
                   << format_double(g.base_mean) << ',' << format_double(g.treated_mean) << ','
                   << format_double(g.gain_pp) << ',' << format_double(g.median_gain_pp) << '\n';
            }
        }
    }
    return out;
}

OverheadReport measure_overhead(const ExperimentConfig& cfg, std::size_t repeats) {
    cfg.validate();
    if (repeats == 0) throw ParameterError("measure_overhead: repeats must be positive");
    const SyntheticTask task = cfg.make_task();
    const std::uint64_t seed = cfg.seeds.front();
    const OfflineDataset raw =
        generate_offline_dataset(task, cfg.task.n_pool, cfg.task.keep_quantile, data_seed(cfg.master_seed, seed));
    const OfflineDataset data = cfg.unit_box ? in_unit_box(task, raw) : raw;
    const MlpSpec spec = cfg.spec_for(task);
    IgniteConfig tc = cfg.trainer;
    tc.seed = train_seed(cfg.master_seed, seed, 0);

    OverheadReport rep;
    rep.iterations = tc.iterations;
    rep.repeats = repeats;
    double erm = 0.0, ign = 0.0;
    for (std::size_t i = 0; i < repeats; ++i) {
        erm += train_erm(data, spec, tc).trace.seconds;
        ign += train_ignite(data, spec, tc).trace.seconds;
    }
    const double n = static_cast<double>(repeats * tc.iterations);
    rep.erm_seconds_per_iter = erm / n;
    rep.ignite_seconds_per_iter = ign / n;
    return rep;
}

TheoryReport theory_report(std::size_t randomized, std::uint64_t seed) {
    std::ostringstream os;
    bool ok = true;

    Vector a = Vector::LinSpaced(8, 0.2, 0.8);
    Vector m = Vector::LinSpaced(8, -0.5, 0.5);
    const auto def = verify_construction(QuadraticSurrogate::make(a, m, 1.0, 1.0), 10000, seed);
    os << "== default construction (dim 8, gamma 1, tau 1)\n" << format_report(def);
    ok = ok && def.passed();

    const auto flat = verify_construction(QuadraticSurrogate::make(a, m, 0.0, 1.0), 1000, seed);
    os << "== gamma = 0 (expected degenerate)\n" << format_report(flat);
    const bool flagged = !flat.positive_definite();
    os << "degenerate flagged: " << (flagged ? "PASS" : "FAIL") << '\n';
    ok = ok && flagged;

    Rng rng(seed);
    std::size_t positive = 0, matched = 0, bounded = 0;
    double worst_diff = 0.0;
    for (std::size_t k = 0; k < randomized; ++k) {
        const QuadraticSurrogate q = random_quadratic_surrogate(rng);
        const HessianDiagonal h = reference_hessian_diagonal(q);
        const Vector num = second_difference_diagonal(q, q.omega_plus, 1e-4);
        const double diff = (num - h.entries).cwiseAbs().maxCoeff();
        worst_diff = std::max(worst_diff, diff);
        positive += h.entries.minCoeff() > 0.0;
        matched += diff < 1e-5;
        bounded += verify_construction(q, 500, derive_seed(seed, k)).bounded();
    }
    os << "== " << randomized << " randomized instances\n";
    os << "positive hessian diagonal: " << positive << "/" << randomized << '\n';
    os << "second differences within 1e-5: " << matched << "/" << randomized << " (worst " << worst_diff << ")\n";
    os << "bound respected: " << bounded << "/" << randomized << '\n';
    ok = ok && positive == randomized && matched == randomized && bounded == randomized;
    os << "theory check: " << (ok ? "PASS" : "FAIL") << '\n';
    return {os.str(), ok};
}

}  // namespace ignite
