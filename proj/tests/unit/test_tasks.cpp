#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <vector>

#include "ignite/dataset_io.hpp"
#include "ignite/errors.hpp"
#include "ignite/tasks.hpp"

using namespace ignite;

TEST_CASE("oracle values at known points") {
    const auto bowl2 = make_task(OracleKind::quad_bowl, 2);
    CHECK(oracle_eval(bowl2, std::vector<double>{0.0, 0.0}) == 0.0);
    CHECK(oracle_eval(bowl2, std::vector<double>{1.0, 2.0}) == -5.0);

    const auto ackley = make_task(OracleKind::neg_ackley);
    CHECK(std::abs(oracle_eval(ackley, std::vector<double>(8, 0.0))) < 1e-12);

    const auto rastrigin = make_task(OracleKind::neg_rastrigin);
    CHECK(std::abs(oracle_eval(rastrigin, std::vector<double>(8, 0.0))) < 1e-12);
    // each coordinate at 1 contributes 1 - 10 cos(2 pi) + 10 = 1
    CHECK(oracle_eval(rastrigin, std::vector<double>(8, 1.0)) == doctest::Approx(-8.0).epsilon(1e-12));
}

TEST_CASE("known argmax attains y_max_box") {
    for (const auto& t : standard_suite()) {
        REQUIRE(t.known_argmax.has_value());
        CHECK(t.y_min_box < t.y_max_box);
        CHECK(std::abs(oracle_eval(t, *t.known_argmax) - t.y_max_box) < 1e-9);
    }
}

TEST_CASE("branin metadata is the standard range") {
    const auto b = make_task("neg_branin");
    CHECK(b.dim == 2);
    CHECK(b.y_max_box == doctest::Approx(-0.397887).epsilon(1e-6));
    CHECK(b.y_min_box == doctest::Approx(-308.129).epsilon(1e-5));
    // the other two global minimizers of Branin
    CHECK(oracle_eval(b, std::vector<double>{-std::numbers::pi, 12.275}) == doctest::Approx(b.y_max_box).epsilon(1e-9));
    CHECK(oracle_eval(b, std::vector<double>{9.42478, 2.475}) == doctest::Approx(b.y_max_box).epsilon(1e-6));
}

TEST_CASE("oracle errors") {
    const auto bowl = make_task(OracleKind::quad_bowl, 2);
    CHECK_THROWS_AS(oracle_eval(bowl, std::vector<double>{2.5, 0.0}), DomainError);
    CHECK_THROWS_AS(oracle_eval(bowl, std::vector<double>{0.0}), ShapeError);
    CHECK_THROWS_AS(make_task("no_such_task"), ParameterError);
    CHECK_THROWS_AS(make_task(OracleKind::quad_bowl, 0), ParameterError);
}

TEST_CASE("task names") {
    CHECK(make_task("neg_ackley-4").dim == 4);
    CHECK(make_task("neg_ackley-4").name == "neg_ackley-4");
    CHECK(make_task("quad_bowl").name == "quad_bowl-16");
    const auto suite = standard_suite();
    REQUIRE(suite.size() == 4);
    CHECK(suite[3].name == "neg_branin-2");
}

TEST_CASE("normalize_score is affine and increasing") {
    const auto t = make_task(OracleKind::neg_ackley);
    CHECK(normalize_score(t, t.y_min_box) == 0.0);
    CHECK(normalize_score(t, t.y_max_box) == 1.0);
    CHECK(normalize_score(t, 0.5 * (t.y_min_box + t.y_max_box)) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normalize_score(t, -3.0) < normalize_score(t, -2.0));
}

TEST_CASE("dataset generation truncates the pool") {
    const auto t = make_task(OracleKind::quad_bowl);
    const auto full = generate_offline_dataset(t, 200, 1.0, 3);
    CHECK(full.size() == 200);

    const auto d = generate_offline_dataset(t, 5000, 0.4, 11);
    d.validate();
    CHECK(d.size() >= 2000);
    CHECK(d.z_raw.maxCoeff() <= d.pool_quantile);
    CHECK(d.z_norm.maxCoeff() < 1.0);
    CHECK(d.z_norm.minCoeff() >= 0.0);
    for (Eigen::Index i = 0; i < d.X.rows(); ++i) {
        const std::span<const double> x(d.X.row(i).data(), d.dim());
        CHECK(t.bounds.contains(x));
    }
}

TEST_CASE("dataset generation is deterministic per seed") {
    const auto t = make_task(OracleKind::neg_rastrigin);
    const auto a = generate_offline_dataset(t, 500, 0.4, 7);
    const auto b = generate_offline_dataset(t, 500, 0.4, 7);
    const auto c = generate_offline_dataset(t, 500, 0.4, 8);
    CHECK(a.X == b.X);
    CHECK(a.z_raw == b.z_raw);
    CHECK_FALSE((a.X.rows() == c.X.rows() && a.X == c.X));
}

TEST_CASE("dataset generation errors") {
    const auto t = make_task(OracleKind::quad_bowl, 2);
    CHECK_THROWS_AS(generate_offline_dataset(t, 9, 0.4, 0), ParameterError);
    CHECK_THROWS_AS(generate_offline_dataset(t, 100, 0.0, 0), EmptyInputError);
    CHECK_THROWS_AS(generate_offline_dataset(t, 100, 1.5, 0), ParameterError);
}

TEST_CASE("unit box maps invert each other") {
    const auto t = make_task(OracleKind::neg_branin);
    const auto d = generate_offline_dataset(t, 100, 0.5, 1);
    const Matrix U = to_unit_box(t, d.X);
    CHECK(U.minCoeff() >= 0.0);
    CHECK(U.maxCoeff() <= 1.0);
    CHECK((from_unit_box(t, U) - d.X).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dataset csv round trip") {
    const auto t = make_task(OracleKind::neg_ackley, 3);
    const auto d = generate_offline_dataset(t, 50, 0.4, 5);
    const auto dir = std::filesystem::temp_directory_path() / "ignite_test_tasks";
    const auto path = dir / "data.csv";
    save_dataset(path, d, t.bounds);
    const auto back = load_dataset(path);
    CHECK(back.data.task_name == d.task_name);
    CHECK(back.data.X == d.X);
    CHECK(back.data.z_raw == d.z_raw);
    CHECK(back.data.z_norm == d.z_norm);
    CHECK(back.data.gen.seed == 5);
    CHECK(back.bounds.lo == t.bounds.lo);
    CHECK_THROWS_AS(load_dataset(dir / "missing.csv"), IoError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("oracle range metadata holds under dense sampling") {
    for (const auto& t : standard_suite()) {
        const auto check = check_task_metadata(t, 1'000'000, 2024);
        INFO(t.name << " observed [" << check.observed_min << ", " << check.observed_max << "] vs ["
                    << t.y_min_box << ", " << t.y_max_box << "]");
        CHECK(check.escapes == 0);
    }
}
