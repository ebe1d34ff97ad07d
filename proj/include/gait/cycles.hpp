#pragma once

// Gait-cycle segmentation from the ankle-to-ankle distance signal and the
// per-cycle feature statistics (mean, std, max, median, lower/upper
// quartile). A full cycle spans two steps: one distance maximum to the
// second-next maximum.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gait/common.hpp"
#include "gait/features.hpp"
#include "gait/jointseq.hpp"
#include "gait/stats.hpp"

namespace gait {

struct CycleSpan {
    int start_frame = 0;
    int end_frame = 0;  // exclusive

    int length() const { return end_frame - start_frame; }
};

struct CycleConfig {
    int smooth_window = 5;
    double min_prominence_factor = 0.2;  // times the signal IQR
    int min_separation = 4;              // frames between kept peaks
    int min_cycle_frames = 8;            // at 15 fps
    bool half_cycle = false;             // peak-to-peak spans instead

    void validate() const {
        if (smooth_window < 1) fail(Errc::config, "cycles: smooth_window must be >= 1");
        if (min_separation < 1) fail(Errc::config, "cycles: min_separation must be >= 1");
        if (min_cycle_frames < 1) fail(Errc::config, "cycles: min_cycle_frames must be >= 1");
        if (!(min_prominence_factor >= 0.0))
            fail(Errc::config, "cycles: min_prominence_factor must be >= 0");
    }
};

// Per-frame Euclidean distance between the ankles; frames with either
// ankle missing yield missing samples.
inline std::vector<double> ankle_distance_signal(const JointMatrix& m) {
    const int rr = JointMatrix::row_index(JointId::RAnkle, 0);
    const int lr = JointMatrix::row_index(JointId::LAnkle, 0);
    std::vector<double> signal(m.frames, kMissing);
    bool any = false;
    for (int t = 0; t < m.frames; ++t) {
        double acc = 0.0;
        bool ok = true;
        for (int axis = 0; axis < 3; ++axis) {
            const double a = m.at(rr + axis, t);
            const double b = m.at(lr + axis, t);
            if (is_missing(a) || is_missing(b)) {
                ok = false;
                break;
            }
            acc += (a - b) * (a - b);
        }
        if (ok) {
            signal[t] = std::sqrt(acc);
            any = true;
        }
    }
    if (!any) fail(Errc::unavailable_signal, "ankle_distance_signal: ankle rows entirely missing");
    return signal;
}

namespace detail {

// Centered moving average; missing samples are skipped, all-missing
// windows stay missing.
inline std::vector<double> moving_average(const std::vector<double>& x, int window) {
    const int n = static_cast<int>(x.size());
    const int half = window / 2;
    std::vector<double> out(n, kMissing);
    for (int t = 0; t < n; ++t) {
        double acc = 0.0;
        int cnt = 0;
        for (int i = std::max(0, t - half); i <= std::min(n - 1, t + half); ++i) {
            if (is_missing(x[i])) continue;
            acc += x[i];
            ++cnt;
        }
        if (cnt > 0) out[t] = acc / cnt;
    }
    return out;
}

// Standard topographic prominence of a local maximum.
inline double prominence(const std::vector<double>& x, int peak) {
    const int n = static_cast<int>(x.size());
    const double h = x[peak];
    double base_left = h;
    for (int i = peak - 1; i >= 0; --i) {
        if (is_missing(x[i])) break;
        if (x[i] > h) break;
        base_left = std::min(base_left, x[i]);
    }
    double base_right = h;
    for (int i = peak + 1; i < n; ++i) {
        if (is_missing(x[i])) break;
        if (x[i] > h) break;
        base_right = std::min(base_right, x[i]);
    }
    return h - std::max(base_left, base_right);
}

}  // namespace detail

// Local maxima of the smoothed signal, filtered by prominence and by a
// greedy highest-first separation rule; returned in time order.
inline std::vector<int> detect_signal_peaks(const std::vector<double>& signal,
                                            const CycleConfig& cfg) {
    cfg.validate();
    const std::vector<double> s = detail::moving_average(signal, cfg.smooth_window);
    const int n = static_cast<int>(s.size());

    std::vector<double> present;
    for (double v : s)
        if (!is_missing(v)) present.push_back(v);
    if (present.size() < 4) return {};
    const Quartiles q = quartiles(std::move(present));
    if (q.iqr() <= 0.0) return {};  // flat signal, nothing prominent
    const double min_prom = cfg.min_prominence_factor * q.iqr();

    std::vector<int> candidates;
    for (int t = 1; t + 1 < n; ++t) {
        if (is_missing(s[t]) || is_missing(s[t - 1]) || is_missing(s[t + 1])) continue;
        if (s[t] > s[t - 1] && s[t] >= s[t + 1] && detail::prominence(s, t) >= min_prom)
            candidates.push_back(t);
    }

    std::sort(candidates.begin(), candidates.end(),
              [&](int a, int b) { return s[a] != s[b] ? s[a] > s[b] : a < b; });
    std::vector<int> kept;
    for (int c : candidates) {
        bool clear = true;
        for (int kpt : kept)
            if (std::abs(kpt - c) < cfg.min_separation) {
                clear = false;
                break;
            }
        if (clear) kept.push_back(c);
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

// Cycles span from one peak to the second-next (two steps); half-cycle
// mode spans adjacent peaks. Fewer than 3 peaks -> no cycles.
inline std::vector<CycleSpan> detect_gait_cycles(const std::vector<double>& signal,
                                                 const CycleConfig& cfg = {}) {
    cfg.validate();
    if (static_cast<int>(signal.size()) < 2 * cfg.min_cycle_frames) return {};
    const std::vector<int> peaks = detect_signal_peaks(signal, cfg);
    if (peaks.size() < 3) return {};
    const std::size_t stride = cfg.half_cycle ? 1 : 2;
    std::vector<CycleSpan> spans;
    for (std::size_t i = 0; i + stride < peaks.size(); i += stride) {
        CycleSpan span{peaks[i], peaks[i + stride]};
        if (span.length() >= cfg.min_cycle_frames) spans.push_back(span);
    }
    return spans;
}

enum class StatSet { three, six };

inline constexpr std::array<std::string_view, 6> kStatNames = {"mean", "std",   "max",
                                                               "median", "q_low", "q_up"};

inline int stat_count(StatSet set) { return set == StatSet::three ? 3 : 6; }

// Per-cycle statistics table: one row per span, columns ordered
// feature-major (every statistic of feature 0, then feature 1, ...).
struct CycleTable {
    StatSet stat_set = StatSet::six;
    int cols = 0;
    std::vector<double> data;
    std::vector<CycleSpan> spans;
    std::vector<int> skipped_spans;  // spans with < 2 records

    int rows() const { return static_cast<int>(spans.size()); }
    std::span<const double> record(int r) const {
        return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
    }
};

inline std::vector<std::string> cycle_column_names(const std::vector<std::string>& feature_names,
                                                   StatSet set) {
    std::vector<std::string> names;
    for (const auto& f : feature_names)
        for (int s = 0; s < stat_count(set); ++s) names.push_back(f + "_" + std::string(kStatNames[s]));
    return names;
}

inline CycleTable cycle_statistics(const FeatureTable& features,
                                   const std::vector<CycleSpan>& spans, StatSet set) {
    CycleTable table;
    table.stat_set = set;
    table.cols = features.cols * stat_count(set);

    for (std::size_t si = 0; si < spans.size(); ++si) {
        const CycleSpan& span = spans[si];
        std::vector<int> rows;
        for (int r = 0; r < features.rows(); ++r) {
            const int t = features.frame_index[r];
            if (t >= span.start_frame && t < span.end_frame) rows.push_back(r);
        }
        if (rows.size() < 2) {
            table.skipped_spans.push_back(static_cast<int>(si));
            continue;
        }
        table.spans.push_back(span);
        std::vector<double> col(rows.size());
        for (int c = 0; c < features.cols; ++c) {
            for (std::size_t i = 0; i < rows.size(); ++i) col[i] = features.record(rows[i])[c];
            const Quartiles q = quartiles(col);
            const double mx = *std::max_element(col.begin(), col.end());
            table.data.push_back(mean(col));
            table.data.push_back(sample_std(col));
            table.data.push_back(mx);
            if (set == StatSet::six) {
                table.data.push_back(q.median);
                table.data.push_back(q.q_low);
                table.data.push_back(q.q_up);
            }
        }
    }
    return table;
}

}  // namespace gait
