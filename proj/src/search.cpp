#include "ignite/search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "ignite/errors.hpp"
#include "ignite/random.hpp"

namespace ignite {

namespace {

void check_models(std::span<const Surrogate> models, std::size_t dim) {
    if (models.empty()) throw ConfigError("search.ensemble_size", "no surrogate supplied");
    for (const auto& m : models) {
        if (m.input_dim() != dim) throw ShapeError("search: surrogate input_dim does not match the designs");
    }
}

void uniform_fill(Matrix& X, const Box& bounds, Rng& rng) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            const auto k = static_cast<std::size_t>(j);
            X(i, j) = std::uniform_real_distribution<double>(bounds.lo[k], bounds.hi[k])(rng);
        }
    }
}

Eigen::Index best_row(const OfflineDataset& data) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < data.z_norm.size(); ++i) {
        if (data.z_norm[i] > data.z_norm[best]) best = i;
    }
    return best;
}

}  // namespace

std::string_view to_string(SearchMethod m) noexcept {
    switch (m) {
        case SearchMethod::ga: return "ga";
        case SearchMethod::ens_mean: return "ens_mean";
        case SearchMethod::ens_min: return "ens_min";
        case SearchMethod::reinforce: return "reinforce";
    }
    return "unknown";
}

std::string_view to_string(SearchInit i) noexcept {
    return i == SearchInit::top_k_dataset ? "top_k_dataset" : "random_box";
}

SearchMethod parse_search_method(std::string_view name) {
    for (auto m : {SearchMethod::ga, SearchMethod::ens_mean, SearchMethod::ens_min, SearchMethod::reinforce}) {
        if (name == to_string(m)) return m;
    }
    throw ConfigError("search.method", "unknown search method '" + std::string(name) + "'");
}

SearchInit parse_search_init(std::string_view name) {
    for (auto i : {SearchInit::top_k_dataset, SearchInit::random_box}) {
        if (name == to_string(i)) return i;
    }
    throw ConfigError("search.init", "unknown search init '" + std::string(name) + "'");
}

double SearchConfig::resolved_step_size(const Box& bounds) const {
    return step_size.value_or(0.01 * bounds.diagonal());
}

void SearchConfig::validate() const {
    if (steps == 0 && method != SearchMethod::reinforce) {
        throw ConfigError("search.steps", "steps must be positive");
    }
    if (step_size && !(*step_size > 0.0 && std::isfinite(*step_size))) {
        throw ConfigError("search.step_size", "step_size must be positive");
    }
    if (num_candidates == 0) throw ConfigError("search.num_candidates", "num_candidates must be >= 1");
    if ((method == SearchMethod::ens_mean || method == SearchMethod::ens_min) && ensemble_size < 2) {
        throw ConfigError("search.ensemble_size", "ensemble methods need ensemble_size >= 2");
    }
    if (method == SearchMethod::reinforce) {
        if (reinforce.population_size < 2) {
            throw ConfigError("search.reinforce.population_size", "population_size must be >= 2");
        }
        if (!(reinforce.sigma_init > 0.0)) throw ConfigError("search.reinforce.sigma_init", "sigma_init must be positive");
        if (!(reinforce.sigma_decay > 0.0 && reinforce.sigma_decay <= 1.0)) {
            throw ConfigError("search.reinforce.sigma_decay", "sigma_decay must be in (0, 1]");
        }
    }
}

Vector aggregate_predict(std::span<const Surrogate> models, SearchMethod method, const Matrix& X) {
    check_models(models, static_cast<std::size_t>(X.cols()));
    Vector out = predict_batch(models[0], X);
    for (std::size_t m = 1; m < models.size(); ++m) {
        const Vector p = predict_batch(models[m], X);
        if (method == SearchMethod::ens_min) out = out.cwiseMin(p);
        else out += p;
    }
    if (method != SearchMethod::ens_min) out /= static_cast<double>(models.size());
    return out;
}

Matrix aggregate_input_grad(std::span<const Surrogate> models, SearchMethod method, const Matrix& X) {
    check_models(models, static_cast<std::size_t>(X.cols()));
    if (models.size() == 1) return input_grad_batch(models[0], X);
    if (method != SearchMethod::ens_min) {
        Matrix G = input_grad_batch(models[0], X);
        for (std::size_t m = 1; m < models.size(); ++m) G += input_grad_batch(models[m], X);
        return G / static_cast<double>(models.size());
    }
    Vector best = predict_batch(models[0], X);
    std::vector<std::size_t> arg(static_cast<std::size_t>(X.rows()), 0);
    for (std::size_t m = 1; m < models.size(); ++m) {
        const Vector p = predict_batch(models[m], X);
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            if (p[i] < best[i]) {
                best[i] = p[i];
                arg[static_cast<std::size_t>(i)] = m;
            }
        }
    }
    Matrix G(X.rows(), X.cols());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const std::span<const double> x(X.row(i).data(), static_cast<std::size_t>(X.cols()));
        G.row(i) = input_grad(models[arg[static_cast<std::size_t>(i)]], x).transpose();
    }
    return G;
}

Matrix initial_designs(const OfflineDataset& data, const SearchConfig& cfg, const Box& bounds) {
    const auto n = static_cast<Eigen::Index>(cfg.num_candidates);
    Matrix X(n, static_cast<Eigen::Index>(bounds.dim()));
    if (cfg.init == SearchInit::random_box) {
        Rng rng(derive_seed(cfg.seed, 0, stream::search));
        uniform_fill(X, bounds, rng);
        return X;
    }
    if (data.size() == 0) throw EmptyInputError("search: top-k initialization needs a nonempty dataset");
    if (data.dim() != bounds.dim()) throw ShapeError("search: dataset dimension does not match bounds");
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return data.z_norm[static_cast<Eigen::Index>(a)] > data.z_norm[static_cast<Eigen::Index>(b)];
    });
    for (Eigen::Index i = 0; i < n; ++i) {
        X.row(i) = data.X.row(static_cast<Eigen::Index>(order[static_cast<std::size_t>(i) % order.size()]));
    }
    return X;
}

CandidateSet grad_ascent_search(std::span<const Surrogate> models, const OfflineDataset& data,
                                const SearchConfig& cfg, const Box& bounds) {
    cfg.validate();
    bounds.validate();
    if (cfg.method == SearchMethod::reinforce) {
        throw ConfigError("search.method", "grad_ascent_search does not handle reinforce");
    }
    if (cfg.method == SearchMethod::ga && models.size() != 1) {
        throw ConfigError("search.ensemble_size", "ga takes exactly one surrogate, got " + std::to_string(models.size()));
    }
    if (cfg.method != SearchMethod::ga && models.size() != cfg.ensemble_size) {
        throw ConfigError("search.ensemble_size", "expected " + std::to_string(cfg.ensemble_size) +
                                                      " surrogates, got " + std::to_string(models.size()));
    }
    check_models(models, bounds.dim());

    const double eta = cfg.resolved_step_size(bounds);
    Matrix X = initial_designs(data, cfg, bounds);
    for (std::size_t t = 0; t < cfg.steps; ++t) {
        X += eta * aggregate_input_grad(models, cfg.method, X);
        bounds.project(X);
    }
    CandidateSet c;
    c.surrogate_scores = aggregate_predict(models, cfg.method, X);
    c.designs = std::move(X);
    return c;
}

ReinforceResult reinforce_search_detailed(const Surrogate& model, const OfflineDataset& data,
                                          const SearchConfig& cfg, const Box& bounds) {
    cfg.validate();
    bounds.validate();
    if (data.size() == 0) throw EmptyInputError("reinforce_search: empty dataset");
    if (data.dim() != bounds.dim() || model.input_dim() != bounds.dim()) {
        throw ShapeError("reinforce_search: dimension mismatch");
    }
    const auto dim = static_cast<Eigen::Index>(bounds.dim());
    const auto pop = static_cast<Eigen::Index>(cfg.reinforce.population_size);
    const double eta = cfg.resolved_step_size(bounds);

    Rng rng(derive_seed(cfg.seed, 1, stream::search));
    std::normal_distribution<double> normal(0.0, 1.0);

    ReinforceResult out;
    Vector mu = data.X.row(best_row(data)).transpose();
    out.initial_mean = mu;
    double sigma = std::max(kSigmaFloor, cfg.reinforce.sigma_init);

    Matrix eps(pop, dim);
    for (std::size_t t = 0; t < cfg.steps; ++t) {
        for (Eigen::Index i = 0; i < pop; ++i)
            for (Eigen::Index j = 0; j < dim; ++j) eps(i, j) = normal(rng);
        Matrix samples = (sigma * eps).rowwise() + mu.transpose();
        bounds.project(samples);
        const Vector f = predict_batch(model, samples);
        const Vector adv = f.array() - f.mean();
        // score-function gradient of E[f] w.r.t. the mean: E[(f - b) eps / sigma]
        const Vector grad = (eps.transpose() * adv) / (static_cast<double>(pop) * sigma);
        mu += eta * grad;
        for (Eigen::Index j = 0; j < dim; ++j) {
            const auto k = static_cast<std::size_t>(j);
            mu[j] = std::clamp(mu[j], bounds.lo[k], bounds.hi[k]);
        }
        sigma = std::max(kSigmaFloor, sigma * cfg.reinforce.sigma_decay);
    }

    Matrix X(static_cast<Eigen::Index>(cfg.num_candidates), dim);
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index j = 0; j < dim; ++j) X(i, j) = mu[j] + sigma * normal(rng);
    bounds.project(X);

    out.candidates.surrogate_scores = predict_batch(model, X);
    out.candidates.designs = std::move(X);
    out.final_mean = std::move(mu);
    out.final_sigma = sigma;
    return out;
}

CandidateSet reinforce_search(const Surrogate& model, const OfflineDataset& data, const SearchConfig& cfg,
                              const Box& bounds) {
    return reinforce_search_detailed(model, data, cfg, bounds).candidates;
}

CandidateSet run_search(std::span<const Surrogate> models, const OfflineDataset& data, const SearchConfig& cfg,
                        const Box& bounds) {
    if (cfg.method == SearchMethod::reinforce) {
        if (models.empty()) throw ConfigError("search.method", "reinforce needs a surrogate");
        return reinforce_search(models[0], data, cfg, bounds);
    }
    return grad_ascent_search(models, data, cfg, bounds);
}

double nearest_rank_percentile(std::span<const double> values, double level) {
    if (values.empty()) throw EmptyInputError("percentile of an empty set");
    if (!(level > 0.0 && level <= 100.0)) throw ParameterError("percentile level must be in (0, 100]");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    // tolerate round-off in level/100*n landing just above an integer
    auto rank = static_cast<std::size_t>(std::ceil(level / 100.0 * n - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

PercentileReport evaluate_candidates(CandidateSet& c, const SyntheticTask& task, const std::vector<double>& levels,
                                     std::uint64_t seed) {
    if (c.size() == 0) throw EmptyInputError("evaluate_candidates: no candidates");
    if (c.surrogate_scores.size() != c.designs.rows()) throw ShapeError("evaluate_candidates: score count mismatch");
    const Vector y = oracle_eval_batch(task, c.designs);
    PercentileReport rep;
    rep.levels = levels;
    rep.seed = seed;
    const std::span<const double> ys(y.data(), static_cast<std::size_t>(y.size()));
    for (double level : levels) {
        const double raw = nearest_rank_percentile(ys, level);
        rep.raw.push_back(raw);
        rep.normalized.push_back(normalize_score(task, raw));
    }
    c.oracle_scores = y;
    return rep;
}

SharpnessEstimate candidate_sharpness(const Surrogate& model, const CandidateSet& c, double rho) {
    return first_order_sharpness(model, c.designs, rho);
}

}  // namespace ignite
