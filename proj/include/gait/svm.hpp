#pragma once

// Multi-class RBF-kernel SVM. Binary subproblems are trained one-vs-one
// with Platt-style sequential minimal optimization (error cache, second
// choice by max |E1-E2|, seeded random sweep fallback); prediction is
// majority vote with ties broken by summed decision values, then by the
// lower class id.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "gait/common.hpp"

namespace gait {

inline double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

struct SvmParams {
    double C = 10.0;
    double gamma = 0.0;  // <= 0 selects 1/D after standardization
    double tol = 1e-3;   // KKT tolerance
    int max_passes = 200;  // outer SMO sweeps per pair
    std::uint64_t seed = 1;
};

// Per-dimension affine map fitted on the training set.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> std_dev;

    static Standardizer fit(std::span<const double> x, int n, int dim) {
        Standardizer s;
        s.mean.assign(dim, 0.0);
        s.std_dev.assign(dim, 0.0);
        for (int i = 0; i < n; ++i)
            for (int d = 0; d < dim; ++d) s.mean[d] += x[static_cast<std::size_t>(i) * dim + d];
        for (double& m : s.mean) m /= n;
        for (int i = 0; i < n; ++i)
            for (int d = 0; d < dim; ++d) {
                const double v = x[static_cast<std::size_t>(i) * dim + d] - s.mean[d];
                s.std_dev[d] += v * v;
            }
        for (double& v : s.std_dev) v = n > 1 ? std::sqrt(v / (n - 1)) : 0.0;
        for (double& v : s.std_dev)
            if (v == 0.0) v = 1.0;  // constant columns pass through centered
        return s;
    }

    void apply(std::span<double> record) const {
        for (std::size_t d = 0; d < record.size(); ++d)
            record[d] = (record[d] - mean[d]) / std_dev[d];
    }
};

// One trained class pair; coef holds alpha_i * y_i of the support vectors.
struct PairModel {
    int class_a = 0;  // +1 side
    int class_b = 0;  // -1 side
    double bias = 0.0;
    double dual_objective = 0.0;
    bool converged = true;
    std::vector<double> coef;
    std::vector<std::vector<double>> support_vectors;  // standardized space

    double decision(std::span<const double> x, double gamma) const {
        double f = bias;
        for (std::size_t k = 0; k < coef.size(); ++k) f += coef[k] * rbf_kernel(support_vectors[k], x, gamma);
        return f;
    }
};

struct SvmModel {
    double gamma = 0.0;
    double C = 0.0;
    std::vector<int> classes;
    Standardizer standardizer;
    std::vector<PairModel> pairs;

    bool fully_converged() const {
        for (const auto& p : pairs)
            if (!p.converged) return false;
        return true;
    }
};

namespace detail {

// Binary SMO on standardized data; labels are +/-1.
struct SmoSolver {
    const std::vector<std::vector<double>>& x;
    const std::vector<int>& y;
    double C;
    double gamma;
    double tol;
    std::mt19937_64 rng;

    std::vector<double> alpha;
    std::vector<double> err;  // f(x_i) - y_i
    std::vector<double> kernel;  // dense n x n
    double b = 0.0;
    int n = 0;

    static constexpr double kEps = 1e-12;

    SmoSolver(const std::vector<std::vector<double>>& px, const std::vector<int>& py, double pc,
              double pgamma, double ptol, std::uint64_t seed)
        : x(px), y(py), C(pc), gamma(pgamma), tol(ptol), rng(seed) {
        n = static_cast<int>(x.size());
        alpha.assign(n, 0.0);
        err.resize(n);
        for (int i = 0; i < n; ++i) err[i] = -static_cast<double>(y[i]);
        kernel.resize(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const double k = rbf_kernel(x[i], x[j], gamma);
                kernel[static_cast<std::size_t>(i) * n + j] = k;
                kernel[static_cast<std::size_t>(j) * n + i] = k;
            }
    }

    double k(int i, int j) const { return kernel[static_cast<std::size_t>(i) * n + j]; }

    bool take_step(int i1, int i2) {
        if (i1 == i2) return false;
        const double a1 = alpha[i1], a2 = alpha[i2];
        const int y1 = y[i1], y2 = y[i2];
        const double e1 = err[i1], e2 = err[i2];
        const double s = y1 * y2;

        double lo, hi;
        if (y1 != y2) {
            lo = std::max(0.0, a2 - a1);
            hi = std::min(C, C + a2 - a1);
        } else {
            lo = std::max(0.0, a1 + a2 - C);
            hi = std::min(C, a1 + a2);
        }
        if (lo >= hi) return false;

        const double k11 = k(i1, i1), k12 = k(i1, i2), k22 = k(i2, i2);
        const double eta = k11 + k22 - 2.0 * k12;
        double a2_new;
        if (eta > 0.0) {
            a2_new = std::clamp(a2 + y2 * (e1 - e2) / eta, lo, hi);
        } else {
            // eta == 0 happens only for coincident points with an RBF
            // kernel; the dual is then linear in a2 along the constraint
            // line, so move to the bound in the gradient direction.
            const double slope = y2 * (e1 - e2);
            if (slope > kEps)
                a2_new = hi;
            else if (slope < -kEps)
                a2_new = lo;
            else
                return false;
        }
        if (std::abs(a2_new - a2) < kEps * (a2_new + a2 + kEps)) return false;
        const double a1_new = a1 + s * (a2 - a2_new);

        const double d1 = y1 * (a1_new - a1), d2 = y2 * (a2_new - a2);
        const double b1 = b - e1 - d1 * k11 - d2 * k12;
        const double b2 = b - e2 - d1 * k12 - d2 * k22;
        const double b_old = b;
        if (a1_new > 0.0 && a1_new < C)
            b = b1;
        else if (a2_new > 0.0 && a2_new < C)
            b = b2;
        else
            b = 0.5 * (b1 + b2);

        alpha[i1] = a1_new;
        alpha[i2] = a2_new;
        for (int i = 0; i < n; ++i) err[i] += d1 * k(i1, i) + d2 * k(i2, i) + (b - b_old);
        return true;
    }

    bool examine(int i2) {
        const double e2 = err[i2];
        const double r2 = e2 * y[i2];
        if (!((r2 < -tol && alpha[i2] < C) || (r2 > tol && alpha[i2] > 0.0))) return false;

        // second choice: largest |E1 - E2| among non-bound points
        int best = -1;
        double best_gap = 0.0;
        for (int i = 0; i < n; ++i) {
            if (alpha[i] <= 0.0 || alpha[i] >= C) continue;
            const double gap = std::abs(err[i] - e2);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best >= 0 && take_step(best, i2)) return true;

        const int start = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
        for (int off = 0; off < n; ++off) {
            const int i = (start + off) % n;
            if (alpha[i] > 0.0 && alpha[i] < C && take_step(i, i2)) return true;
        }
        for (int off = 0; off < n; ++off) {
            const int i = (start + off) % n;
            if (take_step(i, i2)) return true;
        }
        return false;
    }

    // Returns true when KKT conditions hold within tol for every point;
    // false when the sweep budget ran out first.
    bool solve(int max_passes) {
        int changed = 0;
        bool examine_all = true;
        int sweeps = 0;
        while (changed > 0 || examine_all) {
            if (sweeps++ >= max_passes) return false;
            changed = 0;
            if (examine_all) {
                for (int i = 0; i < n; ++i) changed += examine(i);
            } else {
                for (int i = 0; i < n; ++i)
                    if (alpha[i] > 0.0 && alpha[i] < C) changed += examine(i);
            }
            if (examine_all)
                examine_all = false;
            else if (changed == 0)
                examine_all = true;
        }
        return true;
    }

    double dual_objective() const {
        double obj = 0.0;
        for (int i = 0; i < n; ++i) obj += alpha[i];
        for (int i = 0; i < n; ++i) {
            if (alpha[i] == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                if (alpha[j] == 0.0) continue;
                obj -= 0.5 * alpha[i] * alpha[j] * y[i] * y[j] * k(i, j);
            }
        }
        return obj;
    }
};

}  // namespace detail

}  // namespace gait
