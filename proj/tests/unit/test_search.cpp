#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "ignite/errors.hpp"
#include "ignite/search.hpp"
#include "oracles.hpp"

using namespace ignite;

namespace {

OfflineDataset data_from(Matrix X) {
    OfflineDataset d;
    d.task_name = "hand";
    d.z_norm = X.rowwise().sum() / (10.0 * static_cast<double>(X.cols()));
    d.z_norm.array() += 0.5;
    d.z_raw = d.z_norm;
    d.X = std::move(X);
    d.y_max_box = 1.0;
    return d;
}

Surrogate affine(std::vector<double> w, double b) {
    const auto d = w.size();
    Vector p(static_cast<Eigen::Index>(d + 1));
    for (std::size_t i = 0; i < d; ++i) p[static_cast<Eigen::Index>(i)] = w[i];
    p[static_cast<Eigen::Index>(d)] = b;
    return Surrogate(MlpSpec::affine(d), ParamVector(p));
}

Surrogate constant(std::size_t d, double c) { return affine(std::vector<double>(d, 0.0), c); }

Surrogate random_mlp(std::size_t d, std::uint64_t seed) {
    const MlpSpec spec{d, {8}, HiddenActivation::tanh, OutputActivation::identity};
    return Surrogate(spec, init_params(spec, seed));
}

SearchConfig ga_cfg(std::size_t steps, double step, std::size_t n) {
    SearchConfig c;
    c.steps = steps;
    c.step_size = step;
    c.num_candidates = n;
    return c;
}

}  // namespace

TEST_CASE("affine ga moves by step_size * w per step") {
    std::mt19937_64 rng(1);
    const auto data = data_from(oracle::random_matrix(rng, 20, 2, -0.5, 0.5));
    const Box box = Box::uniform(2, -10.0, 10.0);
    const auto model = affine({1.0, -2.0}, 0.3);
    const std::vector<Surrogate> models{model};

    const auto c0 = grad_ascent_search(models, data, ga_cfg(1, 0.1, 4) , box);
    const Matrix X0 = initial_designs(data, ga_cfg(1, 0.1, 4), box);
    for (Eigen::Index i = 0; i < 4; ++i) {
        CHECK(c0.designs(i, 0) == doctest::Approx(X0(i, 0) + 0.1).epsilon(1e-14));
        CHECK(c0.designs(i, 1) == doctest::Approx(X0(i, 1) - 0.2).epsilon(1e-14));
    }

    // strict ascent by step * ||w||^2 per step while no projection is active
    double prev = aggregate_predict(models, SearchMethod::ga, X0).sum();
    for (std::size_t s = 1; s <= 5; ++s) {
        const auto c = grad_ascent_search(models, data, ga_cfg(s, 0.1, 4), box);
        const double now = c.surrogate_scores.sum();
        CHECK(now - prev == doctest::Approx(4 * 0.1 * 5.0).epsilon(1e-10));
        prev = now;
    }
}

TEST_CASE("top-k initialization picks the best rows") {
    Matrix X(5, 1);
    X << 0.1, 0.9, 0.5, 0.9, 0.3;
    const auto data = data_from(X);
    const auto X0 = initial_designs(data, ga_cfg(1, 0.1, 3), Box::uniform(1, 0.0, 1.0));
    CHECK(X0(0, 0) == 0.9);
    CHECK(X0(1, 0) == 0.9);
    CHECK(X0(2, 0) == 0.5);
    const auto cyc = initial_designs(data, ga_cfg(1, 0.1, 7), Box::uniform(1, 0.0, 1.0));
    CHECK(cyc(5, 0) == 0.9);
}

TEST_CASE("designs stay in the box") {
    std::mt19937_64 rng(2);
    const auto data = data_from(oracle::random_matrix(rng, 30, 3, 0.0, 1.0));
    const Box box = Box::uniform(3, 0.0, 1.0);
    const std::vector<Surrogate> models{affine({5.0, -5.0, 1.0}, 0.0)};
    const auto c = grad_ascent_search(models, data, ga_cfg(50, 0.5, 16), box);
    CHECK(c.designs.minCoeff() >= 0.0);
    CHECK(c.designs.maxCoeff() <= 1.0);
    CHECK(c.designs(0, 0) == 1.0);
    CHECK(c.designs(0, 1) == 0.0);

    SearchConfig rc;
    rc.method = SearchMethod::reinforce;
    rc.steps = 30;
    rc.reinforce.sigma_init = 2.0;
    rc.num_candidates = 64;
    const auto r = reinforce_search(models[0], data, rc, box);
    CHECK(r.designs.minCoeff() >= 0.0);
    CHECK(r.designs.maxCoeff() <= 1.0);
}

TEST_CASE("ensemble aggregation") {
    std::mt19937_64 rng(3);
    const auto data = data_from(oracle::random_matrix(rng, 20, 3, 0.0, 1.0));
    const Box box = Box::uniform(3, 0.0, 1.0);
    const auto m = random_mlp(3, 11);

    SearchConfig ga = ga_cfg(20, 0.05, 8);
    SearchConfig mean = ga;
    mean.method = SearchMethod::ens_mean;
    mean.ensemble_size = 2;
    const std::vector<Surrogate> one{m}, two{m, m};
    const auto a = grad_ascent_search(one, data, ga, box);
    const auto b = grad_ascent_search(two, data, mean, box);
    CHECK((a.designs - b.designs).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((a.surrogate_scores - b.surrogate_scores).cwiseAbs().maxCoeff() < 1e-14);

    SearchConfig mn = mean;
    mn.method = SearchMethod::ens_min;
    const std::vector<Surrogate> consts{constant(3, 0.0), constant(3, 1.0)};
    const auto c = grad_ascent_search(consts, data, mn, box);
    CHECK(c.designs == initial_designs(data, mn, box));
    CHECK(c.surrogate_scores.cwiseAbs().maxCoeff() == 0.0);

    // ens_min <= ens_mean <= max member, pointwise
    const std::vector<Surrogate> ens{random_mlp(3, 1), random_mlp(3, 2), random_mlp(3, 3)};
    const Matrix X = oracle::random_matrix(rng, 200, 3, -2.0, 2.0);
    const Vector lo = aggregate_predict(ens, SearchMethod::ens_min, X);
    const Vector avg = aggregate_predict(ens, SearchMethod::ens_mean, X);
    Vector hi = predict_batch(ens[0], X);
    for (std::size_t k = 1; k < ens.size(); ++k) hi = hi.cwiseMax(predict_batch(ens[k], X));
    CHECK((avg - lo).minCoeff() >= 0.0);
    CHECK((hi - avg).minCoeff() >= -1e-15);

    // ens_min gradient follows the minimizing member, lowest index on ties
    const std::vector<Surrogate> tie{affine({1.0, 0.0, 0.0}, 0.0), affine({0.0, 1.0, 0.0}, 0.0)};
    Matrix P(1, 3);
    P << 0.5, 0.5, 0.0;
    const Matrix G = aggregate_input_grad(tie, SearchMethod::ens_min, P);
    CHECK(G(0, 0) == 1.0);
    CHECK(G(0, 1) == 0.0);
}

TEST_CASE("search configuration errors") {
    std::mt19937_64 rng(4);
    const auto data = data_from(oracle::random_matrix(rng, 10, 2, 0.0, 1.0));
    const Box box = Box::uniform(2, 0.0, 1.0);
    const auto m = affine({1.0, 1.0}, 0.0);
    const std::vector<Surrogate> two{m, m};
    CHECK_THROWS_AS(grad_ascent_search(two, data, ga_cfg(1, 0.1, 2), box), ConfigError);
    auto ens = ga_cfg(1, 0.1, 2);
    ens.method = SearchMethod::ens_mean;
    ens.ensemble_size = 3;
    CHECK_THROWS_AS(grad_ascent_search(two, data, ens, box), ConfigError);
    ens.ensemble_size = 1;
    CHECK_THROWS_AS(ens.validate(), ConfigError);
    auto zero = ga_cfg(1, 0.1, 0);
    try {
        zero.validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "search.num_candidates");
    }
    SearchConfig rc;
    rc.method = SearchMethod::reinforce;
    rc.reinforce.population_size = 1;
    CHECK_THROWS_AS(rc.validate(), ConfigError);
    CHECK(parse_search_method("ens_min") == SearchMethod::ens_min);
    CHECK_THROWS_AS(parse_search_method("cma_es"), ConfigError);
    CHECK(SearchConfig{}.resolved_step_size(Box::uniform(4, 0.0, 1.0)) == doctest::Approx(0.02));
}

TEST_CASE("reinforce with a constant surrogate keeps its mean") {
    std::mt19937_64 rng(5);
    const auto data = data_from(oracle::random_matrix(rng, 10, 2, 0.0, 1.0));
    SearchConfig rc;
    rc.method = SearchMethod::reinforce;
    rc.steps = 25;
    rc.reinforce.sigma_init = kSigmaFloor;
    const auto res = reinforce_search_detailed(constant(2, 0.7), data, rc, Box::uniform(2, 0.0, 1.0));
    CHECK(res.final_mean == res.initial_mean);
    CHECK(res.final_sigma == kSigmaFloor);
}

TEST_CASE("reinforce climbs an increasing affine surrogate") {
    Matrix X(3, 1);
    X << 0.2, 0.4, 0.3;
    const auto data = data_from(X);
    std::vector<double> moves;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SearchConfig rc;
        rc.method = SearchMethod::reinforce;
        rc.steps = 20;
        rc.step_size = 0.01;
        rc.seed = seed;
        rc.reinforce.population_size = 16;
        const auto res = reinforce_search_detailed(affine({2.0}, 0.0), data, rc, Box::uniform(1, 0.0, 1.0));
        moves.push_back(res.final_mean[0] - res.initial_mean[0]);
    }
    const auto positives = std::count_if(moves.begin(), moves.end(), [](double m) { return m > 0.0; });
    std::nth_element(moves.begin(), moves.begin() + 10, moves.end());
    CHECK(moves[10] > 0.0);
    // sign test: at least 15 of 20 (one-sided p < 0.021 under a fair coin)
    CHECK(positives >= 15);
}

TEST_CASE("search is deterministic per seed") {
    std::mt19937_64 rng(6);
    const auto data = data_from(oracle::random_matrix(rng, 40, 3, 0.0, 1.0));
    const Box box = Box::uniform(3, 0.0, 1.0);
    const std::vector<Surrogate> ens{random_mlp(3, 1), random_mlp(3, 2)};
    for (auto method : {SearchMethod::ga, SearchMethod::ens_mean, SearchMethod::ens_min, SearchMethod::reinforce}) {
        SearchConfig c = ga_cfg(10, 0.05, 16);
        c.method = method;
        c.ensemble_size = 2;
        c.init = SearchInit::random_box;
        c.seed = 77;
        const std::span<const Surrogate> models =
            method == SearchMethod::ga ? std::span<const Surrogate>(ens.data(), 1) : std::span<const Surrogate>(ens);
        const auto a = run_search(models, data, c, box);
        const auto b = run_search(models, data, c, box);
        CHECK(bitwise_equal(std::span<const double>(a.designs.data(), static_cast<std::size_t>(a.designs.size())),
                            std::span<const double>(b.designs.data(), static_cast<std::size_t>(b.designs.size()))));
    }
}

TEST_CASE("nearest-rank percentiles") {
    std::vector<double> v(100);
    std::iota(v.begin(), v.end(), 1.0);
    CHECK(nearest_rank_percentile(v, 50.0) == 50.0);
    CHECK(nearest_rank_percentile(v, 80.0) == 80.0);
    CHECK(nearest_rank_percentile(v, 100.0) == 100.0);
    CHECK(nearest_rank_percentile(v, 0.5) == 1.0);
    std::shuffle(v.begin(), v.end(), std::mt19937_64(1));
    CHECK(nearest_rank_percentile(v, 50.0) == 50.0);
    const std::vector<double> same(7, 3.25);
    for (double l : kDefaultLevels) CHECK(nearest_rank_percentile(same, l) == 3.25);
    CHECK_THROWS_AS(nearest_rank_percentile(v, 0.0), ParameterError);
    CHECK_THROWS_AS(nearest_rank_percentile(std::vector<double>{}, 50.0), EmptyInputError);
}

TEST_CASE("evaluate_candidates on 128 designs") {
    const auto task = make_task(OracleKind::quad_bowl, 2);
    std::mt19937_64 rng(7);
    CandidateSet c;
    c.designs = oracle::random_matrix(rng, 128, 2, -2.0, 2.0);
    c.surrogate_scores = Vector::Zero(128);
    const auto rep = evaluate_candidates(c, task, kDefaultLevels, 3);
    REQUIRE(c.oracle_scores.has_value());
    CHECK(rep.raw.back() == c.oracle_scores->maxCoeff());
    CHECK(rep.normalized.back() == normalize_score(task, c.oracle_scores->maxCoeff()));
    CHECK(std::is_sorted(rep.raw.begin(), rep.raw.end()));
    CHECK(std::is_sorted(rep.normalized.begin(), rep.normalized.end()));
    CHECK(rep.seed == 3);

    // permutation invariance
    CandidateSet p = c;
    p.designs = c.designs.colwise().reverse();
    CHECK(evaluate_candidates(p, task).raw == rep.raw);
}

TEST_CASE("candidate sharpness") {
    Matrix X(2, 2);
    X << 1.0, 2.0, 3.0, 4.0;
    CandidateSet c{X, Vector::Zero(2), std::nullopt};
    const auto m = affine({0.5, -1.0}, 0.0);
    // mean row (2, 3) -> rho * ||(2, 3, 1)||
    CHECK(candidate_sharpness(m, c, 0.1).estimate == doctest::Approx(0.1 * std::sqrt(14.0)).epsilon(1e-14));
    CandidateSet dup{Matrix(X.row(0)), Vector::Zero(1), std::nullopt};
    CandidateSet dup2{Matrix(X.row(0).replicate(3, 1)), Vector::Zero(3), std::nullopt};
    CHECK(candidate_sharpness(m, dup, 0.1).estimate == doctest::Approx(candidate_sharpness(m, dup2, 0.1).estimate).epsilon(1e-15));
}
