#include "ignite/theory.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "ignite/errors.hpp"
#include "ignite/random.hpp"

namespace ignite {

QuadraticSurrogate QuadraticSurrogate::make(Vector a_diag, Vector mean_vec, double gamma, double tau) {
    if (a_diag.size() == 0) throw ParameterError("QuadraticSurrogate: dim must be positive");
    if (mean_vec.size() != a_diag.size()) {
        throw ShapeError("QuadraticSurrogate: mean_vec and a_diag lengths differ");
    }
    for (Eigen::Index i = 0; i < a_diag.size(); ++i) {
        if (!(a_diag[i] > 0.0 && a_diag[i] < 1.0)) {
            throw ParameterError("QuadraticSurrogate: A entries must lie in (0, 1)");
        }
    }
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ParameterError("QuadraticSurrogate: gamma must be >= 0");
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ParameterError("QuadraticSurrogate: tau must be > 0");

    QuadraticSurrogate q;
    q.dim = static_cast<std::size_t>(a_diag.size());
    q.omega_plus = ParamVector(Vector::Constant(a_diag.size(), 1.0 / static_cast<double>(q.dim)));
    q.gamma = gamma;
    q.a_diag = std::move(a_diag);
    q.mean_vec = std::move(mean_vec);
    q.tau = tau;
    return q;
}

namespace {

double quad_form(const QuadraticSurrogate& q, const ParamVector& omega) {
    if (omega.size() != q.dim) throw ShapeError("QuadraticSurrogate: parameter length mismatch");
    return (omega.vec().array().square() * q.a_diag.array()).sum();
}

}  // namespace

double base_value(const QuadraticSurrogate& q, const ParamVector& omega) {
    const double s = quad_form(q, omega);
    if (!(s > 0.0)) throw SingularityError("base function: w' A w must be positive");
    return omega.vec().dot(q.mean_vec) + 0.5 * q.gamma * std::sqrt(s);
}

HessianDiagonal reference_hessian_diagonal(const QuadraticSurrogate& q) {
    const double m = static_cast<double>(q.dim);
    const double total = q.a_diag.sum();
    const double scale = 0.5 * q.gamma * std::pow(total / (m * m), -1.5);
    HessianDiagonal h;
    h.entries = scale * q.a_diag.array() * ((total - q.a_diag.array()) / (m * m));
    h.degenerate = q.dim < 2;
    return h;
}

BaseDerivatives base_value_and_derivs(const QuadraticSurrogate& q, const ParamVector& omega) {
    const double s = quad_form(q, omega);
    if (!(s > 0.0)) throw SingularityError("base function: w' A w must be positive");
    const double root = std::sqrt(s);
    BaseDerivatives d;
    d.value = omega.vec().dot(q.mean_vec) + 0.5 * q.gamma * root;
    d.gradient = ParamVector(Vector(q.mean_vec + (0.5 * q.gamma / root) * (q.a_diag.array() * omega.vec().array()).matrix()));
    d.hessian_diag = reference_hessian_diagonal(q).entries;
    return d;
}

double QuadraticExpansion::value(const ParamVector& omega) const {
    const Vector& w = omega.vec();
    return constant + linear.dot(w) + 0.5 * (hessian_diag.array() * w.array().square()).sum();
}

ParamVector QuadraticExpansion::gradient(const ParamVector& omega) const {
    return ParamVector(Vector(linear + (hessian_diag.array() * omega.vec().array()).matrix()));
}

QuadraticExpansion expand_at_reference(const QuadraticSurrogate& q) {
    // g(w) = r+ + (w - w+)' grad+ + 0.5 (w - w+)' H (w - w+), regrouped by
    // powers of w.
    const BaseDerivatives d = base_value_and_derivs(q, q.omega_plus);
    const Vector& wp = q.omega_plus.vec();
    QuadraticExpansion e;
    e.hessian_diag = d.hessian_diag;
    const Vector h_wp = (d.hessian_diag.array() * wp.array()).matrix();
    e.linear = d.gradient.vec() - h_wp;
    e.constant = d.value - wp.dot(d.gradient.vec()) + 0.5 * wp.dot(h_wp);
    return e;
}

ConstructionReport verify_construction(const QuadraticSurrogate& q, std::size_t samples,
                                       std::uint64_t seed) {
    const QuadraticExpansion e = expand_at_reference(q);
    ConstructionReport rep;
    rep.hessian_degenerate = reference_hessian_diagonal(q).degenerate;
    rep.lambda_min = e.hessian_diag.minCoeff();
    rep.lambda_max = e.hessian_diag.maxCoeff();
    rep.linear_norm = e.linear.norm();
    rep.constant_abs = std::abs(e.constant);
    rep.bound = q.tau * rep.linear_norm + 0.5 * rep.lambda_max * q.tau * q.tau + rep.constant_abs;
    rep.samples = samples;

    Rng rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unit;
    ParamVector w(q.dim);
    for (std::size_t k = 0; k < samples; ++k) {
        for (std::size_t i = 0; i < q.dim; ++i) w[i] = normal(rng);
        const double n = norm2(w);
        if (n == 0.0) continue;
        // alternate between the sphere ||w|| = tau and the interior
        const double radius = (k % 2 == 0) ? q.tau : q.tau * std::pow(unit(rng), 1.0 / static_cast<double>(q.dim));
        w.vec() *= radius / n;
        const double v = std::abs(e.value(w));
        rep.max_abs_value = std::max(rep.max_abs_value, v);
        if (v > rep.bound) ++rep.violations;
    }
    return rep;
}

std::string format_report(const ConstructionReport& r) {
    std::ostringstream os;
    os.precision(10);
    os << "hessian lambda_min = " << r.lambda_min << "  lambda_max = " << r.lambda_max << '\n';
    os << "positive definite: " << (r.positive_definite() ? "PASS" : "FAIL")
       << (r.hessian_degenerate ? " (degenerate: dim < 2)" : "")
       << (!r.hessian_degenerate && r.lambda_min <= 0.0 ? " (degenerate: gamma = 0)" : "") << '\n';
    os << "bound = " << r.bound << " (linear " << r.linear_norm << ", constant " << r.constant_abs
       << ")  max |g| over " << r.samples << " samples = " << r.max_abs_value << '\n';
    os << "bounded: " << (r.bounded() ? "PASS" : "FAIL") << " (" << r.violations << " violations)\n";
    os << "overall: " << (r.passed() ? "PASS" : "FAIL") << '\n';
    return os.str();
}

Vector second_difference_diagonal(const QuadraticSurrogate& q, const ParamVector& omega, double h) {
    if (!(h > 0.0)) throw ParameterError("second_difference_diagonal: h must be positive");
    const double center = base_value(q, omega);
    Vector out(static_cast<Eigen::Index>(q.dim));
    for (std::size_t i = 0; i < q.dim; ++i) {
        ParamVector up = omega, down = omega;
        up[i] += h;
        down[i] -= h;
        out[static_cast<Eigen::Index>(i)] = (base_value(q, up) - 2.0 * center + base_value(q, down)) / (h * h);
    }
    return out;
}

QuadraticSurrogate random_quadratic_surrogate(Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> md(2, 16);
    const double a = 0.02 + 0.9 * u(rng);
    const double b = a + (0.99 - a) * u(rng);
    const int m = md(rng);
    const double gamma = 4.0 * (1.0 - u(rng));
    Vector av(m), mv(m);
    std::uniform_real_distribution<double> in(a, b), mean(-1.0, 1.0);
    for (int i = 0; i < m; ++i) {
        av[i] = in(rng);
        mv[i] = mean(rng);
    }
    return QuadraticSurrogate::make(av, mv, gamma, 0.5 + 2.0 * u(rng));
}

}  // namespace ignite
