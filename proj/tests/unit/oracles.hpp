#pragma once

// Test-only oracles: central finite differences and a naive loop-based
// forward pass that shares no code with the library's batched implementation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "ignite/linalg.hpp"
#include "ignite/mlp.hpp"

namespace oracle {

inline std::vector<double> central_diff(const std::function<double(const std::vector<double>&)>& f,
                                        std::vector<double> x, double h) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double orig = x[i];
        x[i] = orig + h;
        const double up = f(x);
        x[i] = orig - h;
        const double down = f(x);
        x[i] = orig;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

/// |a - b| / max(|a|, |b|, floor). The floor keeps coordinates whose true
/// derivative is ~0 from dominating with pure round-off.
inline double rel_error(double a, double b, double floor = 1e-3) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline double max_rel_error(std::span<const double> a, std::span<const double> b,
                            double floor = 1e-3) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, rel_error(a[i], b[i], floor));
    return worst;
}

struct NaiveForward {
    double value = 0.0;
    double min_abs_hidden_preactivation = std::numeric_limits<double>::infinity();
};

/// Layer-by-layer scalar loops over the documented parameter layout.
inline NaiveForward naive_forward(const ignite::MlpSpec& spec, const std::vector<double>& params,
                                  const std::vector<double>& x) {
    NaiveForward out;
    std::vector<double> a = x;
    std::size_t off = 0;
    std::vector<std::size_t> widths = spec.hidden_widths;
    widths.push_back(1);
    for (std::size_t l = 0; l < widths.size(); ++l) {
        const std::size_t fan_in = a.size();
        const std::size_t fan_out = widths[l];
        std::vector<double> next(fan_out);
        for (std::size_t k = 0; k < fan_out; ++k) {
            double z = params[off + fan_in * fan_out + k];
            for (std::size_t j = 0; j < fan_in; ++j) z += params[off + k * fan_in + j] * a[j];
            const bool hidden = l + 1 < widths.size();
            if (hidden) {
                out.min_abs_hidden_preactivation = std::min(out.min_abs_hidden_preactivation, std::abs(z));
                next[k] = spec.hidden_activation == ignite::HiddenActivation::relu ? std::max(z, 0.0)
                                                                                   : std::tanh(z);
            } else {
                next[k] = spec.output_activation == ignite::OutputActivation::identity
                              ? z
                              : 1.0 / (1.0 + std::exp(-z));
            }
        }
        off += fan_in * fan_out + fan_out;
        a = std::move(next);
    }
    out.value = a[0];
    return out;
}

inline std::vector<double> to_std(std::span<const double> s) { return {s.begin(), s.end()}; }
inline std::vector<double> row(const ignite::Matrix& X, Eigen::Index i) {
    return {X.row(i).data(), X.row(i).data() + X.cols()};
}

inline ignite::Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                                    double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    ignite::Matrix X(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) X(i, j) = u(rng);
    return X;
}

}  // namespace oracle
