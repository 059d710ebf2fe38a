#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>

#include <Eigen/Dense>

namespace ignite {

/// Row-major so that each row is one design.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Flattened parameter (or parameter-space gradient / perturbation) vector.
class ParamVector {
public:
    ParamVector() = default;
    explicit ParamVector(std::size_t n) : values_(Vector::Zero(static_cast<Eigen::Index>(n))) {}
    explicit ParamVector(Vector values) : values_(std::move(values)) {}
    ParamVector(std::initializer_list<double> init);

    std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
    bool empty() const noexcept { return values_.size() == 0; }

    double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
    double& operator[](std::size_t i) { return values_[static_cast<Eigen::Index>(i)]; }

    const Vector& vec() const noexcept { return values_; }
    Vector& vec() noexcept { return values_; }

    std::span<const double> span() const noexcept { return {values_.data(), size()}; }
    std::span<double> span() noexcept { return {values_.data(), size()}; }

    bool all_finite() const noexcept { return values_.allFinite(); }

private:
    Vector values_;
};

/// Elementwise p + a*d. Throws ShapeError on length mismatch.
ParamVector axpy(const ParamVector& p, const ParamVector& d, double a);

/// Euclidean norm; 0 for the empty vector.
double norm2(const ParamVector& p);

/// True when both vectors have the same length and identical bit patterns.
bool bitwise_equal(const ParamVector& a, const ParamVector& b) noexcept;
bool bitwise_equal(std::span<const double> a, std::span<const double> b) noexcept;

/// Copies `rows` of `source` (in order, repeats allowed) into a new matrix.
Matrix gather_rows(const Matrix& source, std::span<const std::size_t> rows);

}  // namespace ignite
