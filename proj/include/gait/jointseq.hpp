#pragma once

// Joint-coordinate time-series correction. A sequence of 13-joint
// skeletons becomes a 39 x F matrix (rows = joint/axis pairs) and each row
// runs through:
//
//   1. Tukey-fence outlier detection over the present samples,
//   2. replacement of each outlier by its nearest non-outlier neighbor
//      (equidistant ties broken by a seeded coin flip),
//   3. Fritsch-Carlson monotone piecewise-cubic Hermite interpolation of
//      the missing samples (constant extension outside the first/last
//      present sample),
//   4. robust LOWESS smoothing (degree-1 weighted least squares, tricube
//      distance weights, bisquare robustness weights scaled by 6*MAD).

#include <algorithm>
#include <cstdint>
#include <random>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "gait/common.hpp"
#include "gait/skeleton.hpp"
#include "gait/stats.hpp"

namespace gait {

struct JointMatrix {
    static constexpr int kRows = 3 * kJointCount;  // 39 coordinate rows

    int frames = 0;
    std::vector<double> values;  // kRows x frames, row-major, NaN = missing

    static JointMatrix zeros(int frame_count) {
        JointMatrix m;
        m.frames = frame_count;
        m.values.assign(static_cast<std::size_t>(kRows) * frame_count, 0.0);
        return m;
    }

    double& at(int row, int t) { return values[static_cast<std::size_t>(row) * frames + t]; }
    double at(int row, int t) const { return values[static_cast<std::size_t>(row) * frames + t]; }

    std::span<double> row(int r) {
        return {values.data() + static_cast<std::size_t>(r) * frames, static_cast<std::size_t>(frames)};
    }
    std::span<const double> row(int r) const {
        return {values.data() + static_cast<std::size_t>(r) * frames, static_cast<std::size_t>(frames)};
    }

    static int row_index(JointId joint, int axis) { return 3 * static_cast<int>(joint) + axis; }

    // (joint, axis) of a row; axis 0/1/2 = x/y/z.
    static std::pair<JointId, int> row_label(int r) { return {static_cast<JointId>(r / 3), r % 3}; }
};

// Outlier indices within one row, strictly increasing.
using OutlierIndexSet = std::vector<int>;

struct FilterConfig {
    double tukey_k = 1.5;
    double lowess_span = 0.1;   // fraction of the frame count
    int lowess_iterations = 3;  // robustness passes after the base fit
    QuantileMethod quantile_method = QuantileMethod::linear;
    std::uint64_t rng_seed = 1;

    void validate() const {
        if (!(tukey_k > 0.0)) fail(Errc::config, "filter: tukey_k must be > 0");
        if (!(lowess_span > 0.0 && lowess_span <= 1.0))
            fail(Errc::config, "filter: lowess_span must be in (0, 1]");
        if (lowess_iterations < 0) fail(Errc::config, "filter: lowess_iterations must be >= 0");
    }
};

// Rows at column t hold the axis coordinates of joint j at frame t;
// missing joints produce NaN in all three of their rows.
inline JointMatrix build_joint_matrix(const std::vector<Skeleton3D>& frames) {
    if (frames.empty()) fail(Errc::invalid_input, "build_joint_matrix: no frames");
    JointMatrix m;
    m.frames = static_cast<int>(frames.size());
    m.values.assign(static_cast<std::size_t>(JointMatrix::kRows) * m.frames, kMissing);
    for (int t = 0; t < m.frames; ++t) {
        for (int j = 0; j < kJointCount; ++j) {
            const Joint3D& joint = frames[t].joints[j];
            if (!joint.present) continue;
            m.at(3 * j + 0, t) = joint.x;
            m.at(3 * j + 1, t) = joint.y;
            m.at(3 * j + 2, t) = joint.z;
        }
    }
    return m;
}

// Column t of the matrix as a skeleton; a joint is present iff all three
// of its axis rows hold a value there.
inline Skeleton3D skeleton_at(const JointMatrix& m, int t) {
    Skeleton3D s;
    for (int j = 0; j < kJointCount; ++j) {
        const double x = m.at(3 * j + 0, t);
        const double y = m.at(3 * j + 1, t);
        const double z = m.at(3 * j + 2, t);
        if (is_missing(x) || is_missing(y) || is_missing(z)) continue;
        s.joints[j] = {x, y, z, true};
    }
    return s;
}

// Indices of present samples strictly outside the Tukey fences
// [q1 - k*IQR, q3 + k*IQR] of the row's present values. Rows with fewer
// than 4 present samples yield no outliers (quartiles are meaningless).
inline OutlierIndexSet tukey_outliers(std::span<const double> row, double k = 1.5,
                                      QuantileMethod method = QuantileMethod::linear) {
    std::vector<double> present;
    present.reserve(row.size());
    for (double v : row)
        if (!is_missing(v)) present.push_back(v);
    OutlierIndexSet out;
    if (present.size() < 4) return out;
    const Quartiles q = quartiles(std::move(present), method);
    const double lo = q.q_low - k * q.iqr();
    const double hi = q.q_up + k * q.iqr();
    for (int t = 0; t < static_cast<int>(row.size()); ++t) {
        const double v = row[t];
        if (!is_missing(v) && (v < lo || v > hi)) out.push_back(t);
    }
    return out;
}

// Overwrites each outlier with the value of the temporally nearest present
// non-outlier sample; two equidistant neighbors are resolved by rng.
// Missing entries are untouched.
template <typename Rng>
std::vector<double> replace_with_nearest_nonoutlier(std::span<const double> row,
                                                    const OutlierIndexSet& outliers, Rng& rng) {
    const int n = static_cast<int>(row.size());
    std::vector<bool> is_outlier(n, false);
    for (int o : outliers) is_outlier[o] = true;

    auto usable = [&](int i) { return i >= 0 && i < n && !is_outlier[i] && !is_missing(row[i]); };

    std::vector<double> out(row.begin(), row.end());
    for (int o : outliers) {
        double replacement = kMissing;
        for (int d = 1; d < n; ++d) {
            const bool left = usable(o - d);
            const bool right = usable(o + d);
            if (left && right) {
                replacement = (rng() & 1u) ? row[o + d] : row[o - d];
                break;
            }
            if (left) {
                replacement = row[o - d];
                break;
            }
            if (right) {
                replacement = row[o + d];
                break;
            }
        }
        if (is_missing(replacement))
            fail(Errc::unfixable_row, "replace_with_nearest_nonoutlier: no non-outlier value in row");
        out[o] = replacement;
    }
    return out;
}

namespace detail {

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Fritsch-Carlson knot slopes: weighted harmonic mean at interior knots
// (zero across local extrema), shape-preserving one-sided estimates at the
// ends.
inline std::vector<double> pchip_slopes(const std::vector<double>& t, const std::vector<double>& v) {
    const std::size_t n = t.size();
    std::vector<double> m(n, 0.0);
    if (n == 2) {
        m[0] = m[1] = (v[1] - v[0]) / (t[1] - t[0]);
        return m;
    }
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = t[i + 1] - t[i];
        delta[i] = (v[i + 1] - v[i]) / h[i];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            m[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (sign_of(s) != sign_of(d0))
            s = 0.0;
        else if (sign_of(d0) != sign_of(d1) && std::abs(s) > 3.0 * std::abs(d0))
            s = 3.0 * d0;
        return s;
    };
    m[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    m[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    return m;
}

}  // namespace detail

// Fills missing samples between the first and last present samples with
// the monotone cubic Hermite interpolant through the present knots;
// leading/trailing gaps are constant-extended.
inline std::vector<double> pchip_fill(std::span<const double> row) {
    const int n = static_cast<int>(row.size());
    std::vector<double> kt, kv;
    for (int i = 0; i < n; ++i) {
        if (!is_missing(row[i])) {
            kt.push_back(static_cast<double>(i));
            kv.push_back(row[i]);
        }
    }
    if (kt.size() < 2) fail(Errc::unfixable_row, "pchip_fill: fewer than 2 present values");

    const std::vector<double> slope = detail::pchip_slopes(kt, kv);
    std::vector<double> out(row.begin(), row.end());

    const int first = static_cast<int>(kt.front());
    const int last = static_cast<int>(kt.back());
    for (int i = 0; i < first; ++i) out[i] = kv.front();
    for (int i = last + 1; i < n; ++i) out[i] = kv.back();

    std::size_t seg = 0;
    for (int i = first + 1; i < last; ++i) {
        if (!is_missing(row[i])) continue;
        while (kt[seg + 1] < static_cast<double>(i)) ++seg;
        const double h = kt[seg + 1] - kt[seg];
        const double d = (kv[seg + 1] - kv[seg]) / h;
        const double c2 = (3.0 * d - 2.0 * slope[seg] - slope[seg + 1]) / h;
        const double c3 = (slope[seg] + slope[seg + 1] - 2.0 * d) / (h * h);
        const double s = static_cast<double>(i) - kt[seg];
        out[i] = kv[seg] + s * (slope[seg] + s * (c2 + s * c3));
    }
    return out;
}

namespace detail {

struct LowessWindow {
    int lo;
    int hi;  // inclusive
};

inline LowessWindow lowess_window(int t, int n, int w) {
    int lo = t - (w - 1) / 2;
    lo = std::clamp(lo, 0, n - w);
    return {lo, lo + w - 1};
}

// One weighted degree-1 fit evaluated at index t. Falls back to the
// weighted mean when the weighted x-variance vanishes (robustness weights
// can empty a window down to one point) and to `fallback` when every
// weight vanished. Frame indices are >= 1 apart, so a fit supported by
// two or more points has variance well above the threshold.
inline double lowess_fit_at(std::span<const double> y, int t, const LowessWindow& win,
                            const std::vector<double>& robust_w, double fallback) {
    const double dmax = std::max(t - win.lo, win.hi - t);
    double sw = 0.0, swx = 0.0, swy = 0.0, swxx = 0.0, swxy = 0.0;
    for (int i = win.lo; i <= win.hi; ++i) {
        const double u = std::abs(i - t) / dmax;
        double wt = 0.0;
        if (u < 1.0) {
            const double a = 1.0 - u * u * u;
            wt = a * a * a;
        }
        wt *= robust_w[i];
        if (wt <= 0.0) continue;
        const double dx = static_cast<double>(i - t);
        sw += wt;
        swx += wt * dx;
        swy += wt * y[i];
        swxx += wt * dx * dx;
        swxy += wt * dx * y[i];
    }
    if (sw <= 0.0) return fallback;
    const double varx = swxx - swx * swx / sw;
    if (varx <= 1e-9) return swy / sw;
    const double b = (swxy - swx * swy / sw) / varx;
    return (swy - b * swx) / sw;
}

}  // namespace detail

// Robust LOWESS over a fully present series. The window holds
// ceil(span * F) samples, clamped to [5, F]; `iterations` robustness
// passes follow the base tricube fit.
inline std::vector<double> rlowess_smooth(std::span<const double> y, double span, int iterations) {
    const int n = static_cast<int>(y.size());
    if (n < 3) fail(Errc::config, "rlowess_smooth: series shorter than the minimum window (3)");
    for (double v : y)
        if (is_missing(v)) fail(Errc::invalid_input, "rlowess_smooth: series has missing samples");
    if (!(span > 0.0 && span <= 1.0)) fail(Errc::config, "rlowess_smooth: span must be in (0, 1]");

    const int w = std::min(n, std::max(5, static_cast<int>(std::ceil(span * n))));

    std::vector<double> robust_w(n, 1.0);
    std::vector<double> fit(n, 0.0);
    for (int pass = 0; pass <= iterations; ++pass) {
        for (int t = 0; t < n; ++t) {
            const auto win = detail::lowess_window(t, n, w);
            fit[t] = detail::lowess_fit_at(y, t, win, robust_w, pass == 0 ? y[t] : fit[t]);
        }
        if (pass == iterations) break;
        std::vector<double> resid(n);
        for (int t = 0; t < n; ++t) resid[t] = y[t] - fit[t];
        const double scale = mad(resid);
        if (scale <= 0.0) {
            std::fill(robust_w.begin(), robust_w.end(), 1.0);
            continue;
        }
        for (int t = 0; t < n; ++t) {
            const double u = resid[t] / (6.0 * scale);
            robust_w[t] = std::abs(u) < 1.0 ? (1.0 - u * u) * (1.0 - u * u) : 0.0;
        }
    }
    return fit;
}

struct CorrectionReport {
    int rows_corrected = 0;
    int outliers_replaced = 0;
    int gaps_filled = 0;
    std::vector<int> all_missing_rows;
    std::vector<int> unfixable_rows;

    std::string to_text() const {
        std::ostringstream os;
        os << "rows corrected: " << rows_corrected << "\n"
           << "outliers replaced: " << outliers_replaced << "\n"
           << "gaps filled: " << gaps_filled << "\n";
        os << "all-missing rows (" << all_missing_rows.size() << "):";
        for (int r : all_missing_rows) os << ' ' << r;
        os << "\nunfixable rows (" << unfixable_rows.size() << "):";
        for (int r : unfixable_rows) os << ' ' << r;
        os << '\n';
        return os.str();
    }
};

// Full per-row pipeline; rows that cannot be fixed are reported and left
// as they came in.
inline JointMatrix correct_sequence(const JointMatrix& m, const FilterConfig& cfg,
                                    CorrectionReport* report = nullptr) {
    cfg.validate();
    CorrectionReport local;
    CorrectionReport& rep = report ? *report : local;
    rep = CorrectionReport{};

    JointMatrix out = m;
    for (int r = 0; r < JointMatrix::kRows; ++r) {
        auto row = out.row(r);
        int present = 0;
        for (double v : row) present += !is_missing(v);
        if (present == 0) {
            rep.all_missing_rows.push_back(r);
            continue;
        }
        try {
            std::vector<double> work(row.begin(), row.end());
            const OutlierIndexSet outliers = tukey_outliers(work, cfg.tukey_k, cfg.quantile_method);
            if (!outliers.empty()) {
                std::mt19937_64 rng(mix_seed(cfg.rng_seed, static_cast<std::uint64_t>(r)));
                work = replace_with_nearest_nonoutlier(work, outliers, rng);
            }
            work = pchip_fill(work);
            work = rlowess_smooth(work, cfg.lowess_span, cfg.lowess_iterations);
            std::copy(work.begin(), work.end(), row.begin());
            rep.rows_corrected += 1;
            rep.outliers_replaced += static_cast<int>(outliers.size());
            rep.gaps_filled += static_cast<int>(row.size()) - present;
        } catch (const Error& e) {
            if (e.code() != Errc::unfixable_row) throw;
            rep.unfixable_rows.push_back(r);
        }
    }
    return out;
}

}  // namespace gait
