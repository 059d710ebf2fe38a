#include "ignite/linalg.hpp"

#include <cstring>
#include <string>

#include "ignite/errors.hpp"

namespace ignite {

ParamVector::ParamVector(std::initializer_list<double> init)
    : values_(static_cast<Eigen::Index>(init.size())) {
    Eigen::Index i = 0;
    for (double v : init) values_[i++] = v;
}

ParamVector axpy(const ParamVector& p, const ParamVector& d, double a) {
    if (p.size() != d.size()) {
        throw ShapeError("axpy: length mismatch (" + std::to_string(p.size()) + " vs " +
                         std::to_string(d.size()) + ")");
    }
    return ParamVector(Vector(p.vec() + a * d.vec()));
}

double norm2(const ParamVector& p) { return p.empty() ? 0.0 : p.vec().norm(); }

bool bitwise_equal(std::span<const double> a, std::span<const double> b) noexcept {
    return a.size() == b.size() &&
           (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

bool bitwise_equal(const ParamVector& a, const ParamVector& b) noexcept {
    return bitwise_equal(a.span(), b.span());
}

Matrix gather_rows(const Matrix& source, std::span<const std::size_t> rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), source.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = source.row(static_cast<Eigen::Index>(rows[i]));
    }
    return out;
}

}  // namespace ignite
