#include <cmath>
#include <random>

#include "doctest.h"
#include "ignite/errors.hpp"
#include "ignite/mlp.hpp"
#include "oracles.hpp"

using namespace ignite;

namespace {

Surrogate affine12() { return Surrogate(MlpSpec::affine(2), ParamVector{1.0, 2.0, 0.0}); }

Matrix rows(std::initializer_list<std::initializer_list<double>> r) {
    Matrix X(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& row : r) {
        Eigen::Index j = 0;
        for (double v : row) X(i, j++) = v;
        ++i;
    }
    return X;
}

MlpSpec random_spec(std::mt19937_64& rng, HiddenActivation act) {
    std::uniform_int_distribution<std::size_t> dim(1, 6), width(1, 8), depth(0, 2);
    MlpSpec spec;
    spec.input_dim = dim(rng);
    for (std::size_t l = depth(rng); l > 0; --l) spec.hidden_widths.push_back(width(rng));
    spec.hidden_activation = act;
    spec.output_activation = rng() % 3 == 0 ? OutputActivation::unit_sigmoid : OutputActivation::identity;
    return spec;
}

}  // namespace

TEST_CASE("parameter count and validation") {
    CHECK(MlpSpec::affine(2).parameter_count() == 3);
    CHECK((MlpSpec{3, {4, 5}}.parameter_count()) == (3 + 1) * 4 + (4 + 1) * 5 + 6);
    CHECK_THROWS_AS((MlpSpec{0, {}}.validate()), ParameterError);
    CHECK_THROWS_AS(MlpSpec({2, {3, 0}}).validate(), ParameterError);
    CHECK_THROWS_AS(Surrogate(MlpSpec::affine(2), ParamVector{1.0, 2.0}), ShapeError);
    CHECK_THROWS_AS(Surrogate(MlpSpec::affine(1), ParamVector{NAN, 0.0}), ParameterError);
}

TEST_CASE("predict") {
    const std::vector<double> x{3.0, 4.0};
    CHECK(predict(affine12(), x) == 11.0);

    SUBCASE("zero parameters give zero") {
        MlpSpec spec{4, {5, 3}, HiddenActivation::tanh, OutputActivation::identity};
        Surrogate s(spec, ParamVector(spec.parameter_count()));
        CHECK(predict(s, std::vector<double>{0.3, -2.0, 7.0, 1.0}) == 0.0);
    }
    SUBCASE("one relu hidden layer, hand evaluated") {
        // z = (1 - 2 + 0, 0.5 + 4 - 1) = (-1, 3.5) -> relu (0, 3.5) -> 2*0 - 3*3.5 + 0.5
        Surrogate s(MlpSpec{2, {2}}, ParamVector{1, -1, 0.5, 2, 0, -1, 2, -3, 0.5});
        CHECK(predict(s, std::vector<double>{1.0, 2.0}) == doctest::Approx(-10.0).epsilon(1e-15));
    }
    SUBCASE("unit sigmoid stays inside (0,1)") {
        MlpSpec spec{1, {}, HiddenActivation::relu, OutputActivation::unit_sigmoid};
        Surrogate s(spec, ParamVector{5.0, 0.0});
        for (double v : {-10.0, -1.0, 0.0, 1.0, 6.0}) {
            const double y = predict(s, std::vector<double>{v});
            CHECK(y > 0.0);
            CHECK(y < 1.0);
        }
    }
    CHECK_THROWS_AS(predict(affine12(), std::vector<double>{1.0}), ShapeError);
}

TEST_CASE("predict is deterministic and matches the naive forward pass") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        MlpSpec spec = random_spec(rng, trial % 2 ? HiddenActivation::relu : HiddenActivation::tanh);
        Surrogate s(spec, init_params(spec, rng()));
        Matrix X = oracle::random_matrix(rng, 5, static_cast<Eigen::Index>(spec.input_dim));
        Vector a = predict_batch(s, X);
        Vector b = predict_batch(s, X);
        CHECK(bitwise_equal(std::span<const double>(a.data(), 5), std::span<const double>(b.data(), 5)));
        for (Eigen::Index i = 0; i < 5; ++i) {
            const double ref = oracle::naive_forward(spec, oracle::to_std(s.params().span()), oracle::row(X, i)).value;
            CHECK(a[i] == doctest::Approx(ref).epsilon(1e-12));
            CHECK(predict(s, oracle::row(X, i)) == a[i]);
        }
    }
}

TEST_CASE("predict_batch") {
    Surrogate s = affine12();
    CHECK(predict_batch(s, Matrix(0, 2)).size() == 0);
    Vector y = predict_batch(s, rows({{1, 1}, {1, 1}, {0, -1}}));
    CHECK(y[0] == y[1]);
    CHECK(y[0] == 3.0);
    CHECK(y[2] == -2.0);
    CHECK_THROWS_AS(predict_batch(s, Matrix(2, 3)), ShapeError);
}

TEST_CASE("loss_and_grad") {
    SUBCASE("affine hand values") {
        Surrogate s(MlpSpec::affine(2), ParamVector{1.0, 0.0, 0.0});
        auto lg = loss_and_grad(s, rows({{1, 1}}), std::vector<double>{0.0});
        CHECK(lg.loss == 1.0);
        CHECK(lg.grad[0] == 2.0);
        CHECK(lg.grad[1] == 2.0);
        CHECK(lg.grad[2] == 2.0);
    }
    SUBCASE("perfect fit") {
        Surrogate s = affine12();
        Matrix X = rows({{1, 0}, {0, 1}, {2, 2}});
        auto lg = loss_and_grad(s, X, std::vector<double>{1.0, 2.0, 6.0});
        CHECK(lg.loss == 0.0);
        CHECK(norm2(lg.grad) == 0.0);
    }
    CHECK_THROWS_AS(loss_and_grad(affine12(), Matrix(0, 2), std::vector<double>{}), EmptyInputError);
    CHECK_THROWS_AS(loss_and_grad(affine12(), rows({{1, 1}}), std::vector<double>{1, 2}), ShapeError);
}

TEST_CASE("mean_output_grad") {
    ParamVector g = mean_output_grad(affine12(), rows({{1, 0}, {0, 1}}));
    CHECK(g[0] == 0.5);
    CHECK(g[1] == 0.5);
    CHECK(g[2] == 1.0);

    std::mt19937_64 rng(3);
    MlpSpec spec{3, {6}, HiddenActivation::tanh};
    Surrogate s(spec, init_params(spec, 11));
    Matrix one = oracle::random_matrix(rng, 1, 3);
    Matrix repeated(4, 3);
    for (int i = 0; i < 4; ++i) repeated.row(i) = one.row(0);
    ParamVector a = mean_output_grad(s, one);
    ParamVector b = mean_output_grad(s, repeated);
    CHECK(norm2(axpy(a, b, -1.0)) < 1e-15);

    // affine models: exactly (column means, 1)
    Matrix X = oracle::random_matrix(rng, 7, 3);
    Surrogate aff(MlpSpec::affine(3), ParamVector{0.3, -1.0, 2.0, 0.1});
    ParamVector ga = mean_output_grad(aff, X);
    Vector means = X.colwise().mean().transpose();
    for (int j = 0; j < 3; ++j) CHECK(ga[static_cast<std::size_t>(j)] == doctest::Approx(means[j]).epsilon(1e-15));
    CHECK(ga[3] == 1.0);
    CHECK_THROWS_AS(mean_output_grad(aff, Matrix(0, 3)), EmptyInputError);
}

TEST_CASE("input_grad") {
    Vector g = input_grad(affine12(), std::vector<double>{-5.0, 9.0});
    CHECK(g[0] == 1.0);
    CHECK(g[1] == 2.0);
    MlpSpec spec{3, {4}};
    Surrogate zero(spec, ParamVector(spec.parameter_count()));
    CHECK(input_grad(zero, std::vector<double>{1, 2, 3}).norm() == 0.0);
    CHECK_THROWS_AS(input_grad(zero, std::vector<double>{1, 2}), ShapeError);
}

TEST_CASE("gradients match central finite differences") {
    std::mt19937_64 rng(2024);
    const double h = 1e-5;
    int checked = 0;
    while (checked < 30) {
        MlpSpec spec = random_spec(rng, checked % 2 ? HiddenActivation::relu : HiddenActivation::tanh);
        Surrogate s(spec, init_params(spec, rng()));
        const auto d = static_cast<Eigen::Index>(spec.input_dim);
        Matrix X = oracle::random_matrix(rng, 4, d);
        std::vector<double> z{0.1, 0.5, -0.2, 0.9};
        std::vector<double> w = oracle::to_std(s.params().span());

        // keep relu away from kinks so the oracle itself is valid
        bool near_kink = false;
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            near_kink |= oracle::naive_forward(spec, w, oracle::row(X, i)).min_abs_hidden_preactivation < 1e-3;
        if (spec.hidden_activation == HiddenActivation::relu && near_kink) continue;

        auto loss = [&](const std::vector<double>& p) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < X.rows(); ++i) {
                const double e = oracle::naive_forward(spec, p, oracle::row(X, i)).value - z[static_cast<std::size_t>(i)];
                acc += e * e;
            }
            return acc / static_cast<double>(X.rows());
        };
        auto mean_pred = [&](const std::vector<double>& p) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < X.rows(); ++i) acc += oracle::naive_forward(spec, p, oracle::row(X, i)).value;
            return acc / static_cast<double>(X.rows());
        };
        CHECK(oracle::max_rel_error(loss_and_grad(s, X, z).grad.span(), oracle::central_diff(loss, w, h)) < 1e-6);
        CHECK(oracle::max_rel_error(mean_output_grad(s, X).span(), oracle::central_diff(mean_pred, w, h)) < 1e-6);

        std::vector<double> x0 = oracle::row(X, 0);
        auto at_x = [&](const std::vector<double>& x) { return oracle::naive_forward(spec, w, x).value; };
        Vector gx = input_grad(s, x0);
        CHECK(oracle::max_rel_error(std::span<const double>(gx.data(), x0.size()), oracle::central_diff(at_x, x0, h)) < 1e-6);
        ++checked;
    }
}

TEST_CASE("axpy and norm2") {
    ParamVector p{1.0, 2.0};
    CHECK(bitwise_equal(axpy(p, ParamVector{2.0, 2.0}, 0.0), p));
    CHECK(norm2(axpy(p, p, -1.0)) == 0.0);
    ParamVector q = axpy(p, ParamVector{2.0, 2.0}, 0.5);
    CHECK(q[0] == 2.0);
    CHECK(q[1] == 3.0);
    CHECK_THROWS_AS(axpy(p, ParamVector{1.0}, 1.0), ShapeError);

    CHECK(norm2(ParamVector{3.0, 4.0}) == 5.0);
    CHECK(norm2(ParamVector{}) == 0.0);
    CHECK(norm2(ParamVector{1, 1, 1, 1}) == 2.0);

    std::mt19937_64 rng(5);
    std::normal_distribution<double> n01;
    for (int t = 0; t < 100; ++t) {
        ParamVector a(9), b(9);
        for (std::size_t i = 0; i < 9; ++i) {
            a[i] = n01(rng);
            b[i] = n01(rng);
        }
        const double k = n01(rng);
        CHECK(norm2(axpy(a, b, 1.0)) <= norm2(a) + norm2(b) + 1e-12);
        CHECK(norm2(axpy(ParamVector(9), a, k)) == doctest::Approx(std::abs(k) * norm2(a)).epsilon(1e-13));
    }
}

TEST_CASE("init_params") {
    MlpSpec spec{5, {7, 3}};
    ParamVector a = init_params(spec, 42);
    CHECK(bitwise_equal(a, init_params(spec, 42)));
    CHECK_FALSE(bitwise_equal(a, init_params(spec, 43)));
    // layer 0: fan 5 -> 7, layer 1: 7 -> 3, output: 3 -> 1
    const std::size_t ends[] = {6 * 7, 6 * 7 + 8 * 3, spec.parameter_count()};
    const double bounds[] = {init_bound(5, 7), init_bound(7, 3), init_bound(3, 1)};
    std::size_t begin = 0;
    for (int l = 0; l < 3; ++l) {
        for (std::size_t i = begin; i < ends[l]; ++i) CHECK(std::abs(a[i]) <= bounds[l]);
        begin = ends[l];
    }
}
