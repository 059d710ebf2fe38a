#include "ignite/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "ignite/errors.hpp"
#include "ignite/random.hpp"

namespace ignite {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;

constexpr double kAckleyHalfWidth = 5.0;
constexpr double kRastriginHalfWidth = 5.12;
constexpr double kBowlHalfWidth = 2.0;

// Branin constants (standard form).
constexpr double kBraninB = 5.1 / (4.0 * kPi * kPi);
constexpr double kBraninC = 5.0 / kPi;
constexpr double kBraninT = 1.0 / (8.0 * kPi);

double branin(double x1, double x2) {
    const double u = x2 - kBraninB * x1 * x1 + kBraninC * x1 - 6.0;
    return u * u + 10.0 * (1.0 - kBraninT) * std::cos(x1) + 10.0;
}

double rastrigin_term(double x) { return x * x - 10.0 * std::cos(2.0 * kPi * x) + 10.0; }

// max of rastrigin_term over [-w, w]: dense grid, then golden-section
// refinement around the best grid point. The term is even, so [0, w] suffices.
double rastrigin_term_max(double w) {
    constexpr int grid = 200000;
    double best_x = 0.0, best = rastrigin_term(0.0);
    for (int i = 1; i <= grid; ++i) {
        const double x = w * i / grid;
        const double v = rastrigin_term(x);
        if (v > best) {
            best = v;
            best_x = x;
        }
    }
    const double step = w / grid;
    double a = std::max(0.0, best_x - step), b = std::min(w, best_x + step);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 100; ++it) {
        const double c = b - inv_phi * (b - a);
        const double d = a + inv_phi * (b - a);
        if (rastrigin_term(c) > rastrigin_term(d)) b = d; else a = c;
    }
    return std::max(best, rastrigin_term(0.5 * (a + b)));
}

double oracle_value(OracleKind kind, std::span<const double> x) {
    const auto d = static_cast<double>(x.size());
    switch (kind) {
        case OracleKind::quad_bowl: {
            double s = 0.0;
            for (double v : x) s += v * v;
            return -s;
        }
        case OracleKind::neg_ackley: {
            double sq = 0.0, cs = 0.0;
            for (double v : x) {
                sq += v * v;
                cs += std::cos(2.0 * kPi * v);
            }
            const double f = -20.0 * std::exp(-0.2 * std::sqrt(sq / d)) - std::exp(cs / d) + 20.0 + kE;
            return -f;
        }
        case OracleKind::neg_rastrigin: {
            double s = 0.0;
            for (double v : x) s += rastrigin_term(v);
            return -s;
        }
        case OracleKind::neg_branin:
            return -branin(x[0], x[1]);
    }
    return 0.0;
}

}  // namespace

std::string_view to_string(OracleKind kind) noexcept {
    switch (kind) {
        case OracleKind::quad_bowl: return "quad_bowl";
        case OracleKind::neg_ackley: return "neg_ackley";
        case OracleKind::neg_rastrigin: return "neg_rastrigin";
        case OracleKind::neg_branin: return "neg_branin";
    }
    return "unknown";
}

OracleKind parse_oracle_kind(std::string_view name) {
    for (OracleKind k : {OracleKind::quad_bowl, OracleKind::neg_ackley, OracleKind::neg_rastrigin,
                         OracleKind::neg_branin}) {
        if (name == to_string(k)) return k;
    }
    throw ParameterError("unknown task '" + std::string(name) + "'");
}

Box Box::uniform(std::size_t dim, double lo, double hi) {
    return Box{std::vector<double>(dim, lo), std::vector<double>(dim, hi)};
}

double Box::diagonal() const {
    double s = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) s += (hi[i] - lo[i]) * (hi[i] - lo[i]);
    return std::sqrt(s);
}

bool Box::contains(std::span<const double> x) const {
    if (x.size() != dim()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= lo[i] && x[i] <= hi[i])) return false;
    }
    return true;
}

void Box::project(Matrix& X) const {
    if (static_cast<std::size_t>(X.cols()) != dim()) throw ShapeError("Box::project: dimension mismatch");
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            const auto k = static_cast<std::size_t>(j);
            X(i, j) = std::clamp(X(i, j), lo[k], hi[k]);
        }
    }
}

void Box::validate() const {
    if (lo.empty() || lo.size() != hi.size()) throw ParameterError("Box: bad dimensions");
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!(lo[i] < hi[i])) throw ParameterError("Box: lo must be < hi in every coordinate");
    }
}

SyntheticTask make_task(OracleKind kind, std::optional<std::size_t> dim) {
    SyntheticTask t;
    t.oracle = kind;
    switch (kind) {
        case OracleKind::quad_bowl: {
            t.dim = dim.value_or(16);
            t.bounds = Box::uniform(t.dim, -kBowlHalfWidth, kBowlHalfWidth);
            t.y_max_box = 0.0;
            t.y_min_box = -static_cast<double>(t.dim) * kBowlHalfWidth * kBowlHalfWidth;
            t.known_argmax = std::vector<double>(t.dim, 0.0);
            break;
        }
        case OracleKind::neg_ackley: {
            t.dim = dim.value_or(8);
            t.bounds = Box::uniform(t.dim, -kAckleyHalfWidth, kAckleyHalfWidth);
            t.y_max_box = 0.0;
            // Ackley <= 20 + e - 20 exp(-0.2 * halfwidth) - exp(-1) on the box.
            t.y_min_box = -(20.0 + kE - 20.0 * std::exp(-0.2 * kAckleyHalfWidth) - std::exp(-1.0));
            t.known_argmax = std::vector<double>(t.dim, 0.0);
            break;
        }
        case OracleKind::neg_rastrigin: {
            t.dim = dim.value_or(8);
            t.bounds = Box::uniform(t.dim, -kRastriginHalfWidth, kRastriginHalfWidth);
            t.y_max_box = 0.0;
            t.y_min_box = -static_cast<double>(t.dim) * rastrigin_term_max(kRastriginHalfWidth);
            t.known_argmax = std::vector<double>(t.dim, 0.0);
            break;
        }
        case OracleKind::neg_branin: {
            t.dim = 2;
            t.bounds = Box{{-5.0, 0.0}, {10.0, 15.0}};
            t.y_max_box = -10.0 * kBraninT;
            t.y_min_box = -branin(-5.0, 0.0);
            t.known_argmax = std::vector<double>{kPi, 2.275};
            break;
        }
    }
    if (t.dim == 0) throw ParameterError("task dimension must be positive");
    t.name = std::string(to_string(kind)) + "-" + std::to_string(t.dim);
    return t;
}

SyntheticTask make_task(std::string_view name, std::optional<std::size_t> dim) {
    // accept both "neg_ackley" and "neg_ackley-8"
    const auto dash = name.rfind('-');
    if (dash != std::string_view::npos && !dim) {
        const std::string suffix(name.substr(dash + 1));
        if (!suffix.empty() && suffix.find_first_not_of("0123456789") == std::string::npos) {
            return make_task(parse_oracle_kind(name.substr(0, dash)), std::stoul(suffix));
        }
    }
    return make_task(parse_oracle_kind(name), dim);
}

std::vector<SyntheticTask> standard_suite() {
    return {make_task(OracleKind::quad_bowl), make_task(OracleKind::neg_ackley),
            make_task(OracleKind::neg_rastrigin), make_task(OracleKind::neg_branin)};
}

double oracle_eval(const SyntheticTask& t, std::span<const double> x) {
    if (x.size() != t.dim) {
        throw ShapeError("oracle: design has dimension " + std::to_string(x.size()) + ", task " +
                         t.name + " expects " + std::to_string(t.dim));
    }
    if (!t.bounds.contains(x)) throw DomainError("oracle: design outside the box of " + t.name);
    return oracle_value(t.oracle, x);
}

Vector oracle_eval_batch(const SyntheticTask& t, const Matrix& X) {
    Vector y(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        y[i] = oracle_eval(t, std::span<const double>(X.row(i).data(), static_cast<std::size_t>(X.cols())));
    }
    return y;
}

double normalize_score(const SyntheticTask& t, double y_raw) noexcept {
    return (y_raw - t.y_min_box) / (t.y_max_box - t.y_min_box);
}

MetadataCheck check_task_metadata(const SyntheticTask& t, std::size_t samples, std::uint64_t seed) {
    const double tol = 1e-6 * (t.y_max_box - t.y_min_box);
    MetadataCheck out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0};
    Rng rng(seed);
    std::vector<double> x(t.dim);
    for (std::size_t k = 0; k < samples; ++k) {
        for (std::size_t i = 0; i < t.dim; ++i) {
            x[i] = std::uniform_real_distribution<double>(t.bounds.lo[i], t.bounds.hi[i])(rng);
        }
        const double y = oracle_value(t.oracle, x);
        out.observed_min = std::min(out.observed_min, y);
        out.observed_max = std::max(out.observed_max, y);
        if (y < t.y_min_box - tol || y > t.y_max_box + tol) ++out.escapes;
    }
    return out;
}

void OfflineDataset::validate() const {
    const auto n = X.rows();
    if (n < 1) throw EmptyInputError("dataset is empty");
    if (z_raw.size() != n || z_norm.size() != n) throw ShapeError("dataset: score lengths differ from row count");
    if (!(y_min_box < y_max_box)) throw ParameterError("dataset: y_min_box must be < y_max_box");
    const double range = y_max_box - y_min_box;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double expected = (z_raw[i] - y_min_box) / range;
        if (std::abs(z_norm[i] - expected) > 1e-12) throw ParameterError("dataset: z_norm inconsistent with z_raw");
        if (z_norm[i] < 0.0 || z_norm[i] > 1.0) throw ParameterError("dataset: z_norm outside [0, 1]");
        if (z_raw[i] > pool_quantile) throw ParameterError("dataset: retained score above the pool quantile");
    }
    if (!X.allFinite()) throw ParameterError("dataset: non-finite design");
}

OfflineDataset generate_offline_dataset(const SyntheticTask& t, std::size_t n_pool, double q,
                                        std::uint64_t seed) {
    if (n_pool < 10) throw ParameterError("generate_offline_dataset: n_pool must be >= 10");
    if (!(q <= 1.0) || std::isnan(q)) throw ParameterError("generate_offline_dataset: keep_quantile must be in (0, 1]");
    if (!(q > 0.0)) throw EmptyInputError("generate_offline_dataset: keep_quantile <= 0 retains no points");

    Rng rng(seed);
    const auto rows = static_cast<Eigen::Index>(n_pool);
    const auto cols = static_cast<Eigen::Index>(t.dim);
    Matrix pool(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            const auto k = static_cast<std::size_t>(j);
            pool(i, j) = std::uniform_real_distribution<double>(t.bounds.lo[k], t.bounds.hi[k])(rng);
        }
    }
    Vector values(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        values[i] = oracle_value(t.oracle, std::span<const double>(pool.row(i).data(), t.dim));
    }
    std::vector<double> sorted(values.data(), values.data() + rows);
    std::sort(sorted.begin(), sorted.end());
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n_pool)));
    const double threshold = sorted[std::clamp<std::size_t>(rank, 1, n_pool) - 1];

    std::vector<std::size_t> keep;
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (values[i] <= threshold) keep.push_back(static_cast<std::size_t>(i));
    }
    if (keep.empty()) throw EmptyInputError("generate_offline_dataset: empty retained set");

    OfflineDataset d;
    d.task_name = t.name;
    d.X = gather_rows(pool, keep);
    d.z_raw.resize(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) d.z_raw[static_cast<Eigen::Index>(i)] = values[static_cast<Eigen::Index>(keep[i])];
    d.y_min_box = t.y_min_box;
    d.y_max_box = t.y_max_box;
    d.z_norm = (d.z_raw.array() - t.y_min_box) / (t.y_max_box - t.y_min_box);
    d.gen = {n_pool, q, seed};
    d.pool_quantile = threshold;
    return d;
}

Matrix to_unit_box(const SyntheticTask& t, const Matrix& X) {
    if (static_cast<std::size_t>(X.cols()) != t.dim) throw ShapeError("to_unit_box: dimension mismatch");
    Matrix U(X.rows(), X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const auto k = static_cast<std::size_t>(j);
        U.col(j) = (X.col(j).array() - t.bounds.lo[k]) / (t.bounds.hi[k] - t.bounds.lo[k]);
    }
    return U;
}

Matrix from_unit_box(const SyntheticTask& t, const Matrix& U) {
    if (static_cast<std::size_t>(U.cols()) != t.dim) throw ShapeError("from_unit_box: dimension mismatch");
    Matrix X(U.rows(), U.cols());
    for (Eigen::Index j = 0; j < U.cols(); ++j) {
        const auto k = static_cast<std::size_t>(j);
        X.col(j) = U.col(j).array() * (t.bounds.hi[k] - t.bounds.lo[k]) + t.bounds.lo[k];
        // keep the image inside the box despite rounding
        X.col(j) = X.col(j).cwiseMax(t.bounds.lo[k]).cwiseMin(t.bounds.hi[k]);
    }
    return X;
}

OfflineDataset in_unit_box(const SyntheticTask& t, const OfflineDataset& data) {
    OfflineDataset out = data;
    out.X = to_unit_box(t, data.X);
    return out;
}

}  // namespace ignite
