#pragma once

// Feature-space outlier removal. Two procedures:
//
//  * scalar records: an upper threshold read off the histogram of the
//    max-std feature, then per-column Tukey fences; a record survives only
//    if every column passes.
//  * vector records: cosine similarity of each slot against the marginal
//    median record, Tukey fences per similarity row; a record survives
//    only if no row flags its column.

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "gait/common.hpp"
#include "gait/features.hpp"
#include "gait/stats.hpp"

namespace gait {

struct OutlierParams {
    double alpha = 0.1;  // histogram frequency cutoff, Eq. 7's hyperparameter
    int bins = 50;
    double tukey_k = 1.5;

    void validate() const {
        if (!(alpha >= 0.0)) fail(Errc::config, "outliers: alpha must be >= 0");
        if (bins < 1) fail(Errc::config, "outliers: bins must be >= 1");
        if (!(tukey_k > 0.0)) fail(Errc::config, "outliers: tukey_k must be > 0");
    }
};

struct RemovalReport {
    std::vector<bool> kept_mask;
    int removed_count = 0;
    double t_upper = std::numeric_limits<double>::infinity();  // scalar path only
    double removal_fraction = 0.0;

    void finish() {
        removed_count = 0;
        for (bool k : kept_mask) removed_count += !k;
        removal_fraction =
            kept_mask.empty() ? 0.0 : static_cast<double>(removed_count) / kept_mask.size();
    }

    std::string to_text() const {
        std::ostringstream os;
        os << "records: " << kept_mask.size() << "\nremoved: " << removed_count
           << "\nremoval fraction: " << removal_fraction << "\n";
        if (std::isfinite(t_upper)) os << "upper threshold: " << t_upper << "\n";
        return os.str();
    }
};

struct SimilarityMatrix {
    int slots = 0;    // Q rows
    int records = 0;  // N columns
    std::vector<double> s;  // slots x records

    double at(int slot, int rec) const { return s[static_cast<std::size_t>(slot) * records + rec]; }
    double& at(int slot, int rec) { return s[static_cast<std::size_t>(slot) * records + rec]; }
};

namespace detail {

inline std::vector<double> column(const FeatureTable& f, int c) {
    std::vector<double> col(f.rows());
    for (int r = 0; r < f.rows(); ++r) col[r] = f.record(r)[c];
    return col;
}

}  // namespace detail

// Upper threshold from the histogram of the feature with the largest
// sample standard deviation: the highest upper edge among bins whose
// frequency is at most alpha times the mode's and that lie entirely above
// the mode bin. +inf when no bin qualifies.
inline double compute_upper_threshold(const FeatureTable& features, double alpha = 0.1,
                                      int bins = 50) {
    if (features.rows() < 2) fail(Errc::invalid_input, "compute_upper_threshold: need >= 2 records");
    if (bins < 1) fail(Errc::config, "compute_upper_threshold: bins must be >= 1");

    int best_col = 0;
    double best_std = -1.0;
    for (int c = 0; c < features.cols; ++c) {
        const double s = sample_std(detail::column(features, c));
        if (s > best_std) {
            best_std = s;
            best_col = c;
        }
    }
    const std::vector<double> col = detail::column(features, best_col);
    const double lo = *std::min_element(col.begin(), col.end());
    const double hi = *std::max_element(col.begin(), col.end());
    if (!(hi > lo)) return std::numeric_limits<double>::infinity();  // single occupied bin

    const double width = (hi - lo) / bins;
    std::vector<int> freq(bins, 0);
    for (double v : col) {
        int b = static_cast<int>((v - lo) / width);
        b = std::clamp(b, 0, bins - 1);  // the max lands in the closed top bin
        ++freq[b];
    }
    int mode = 0;
    for (int b = 1; b < bins; ++b)
        if (freq[b] > freq[mode]) mode = b;

    const double mode_upper = lo + (mode + 1) * width;
    double t_upper = std::numeric_limits<double>::infinity();
    bool found = false;
    for (int b = bins - 1; b > mode; --b) {
        const double bin_lower = lo + b * width;
        if (bin_lower < mode_upper) break;
        if (freq[b] <= alpha * freq[mode]) {
            t_upper = lo + (b + 1) * width;
            found = true;
            break;
        }
    }
    return found ? t_upper : std::numeric_limits<double>::infinity();
}

// A record survives iff every entry is <= t_upper.
inline RemovalReport threshold_filter(const FeatureTable& features, double t_upper) {
    RemovalReport rep;
    rep.t_upper = t_upper;
    rep.kept_mask.resize(features.rows());
    for (int r = 0; r < features.rows(); ++r) {
        bool keep = true;
        for (double v : features.record(r))
            if (v > t_upper) {
                keep = false;
                break;
            }
        rep.kept_mask[r] = keep;
    }
    rep.finish();
    return rep;
}

// Tukey fences per column; a record survives iff no column flags it.
inline RemovalReport tukey_scalar_removal(const FeatureTable& features, double k = 1.5) {
    if (features.rows() < 4) fail(Errc::invalid_input, "tukey_scalar_removal: need >= 4 records");
    RemovalReport rep;
    rep.kept_mask.assign(features.rows(), true);
    for (int c = 0; c < features.cols; ++c) {
        const std::vector<double> col = detail::column(features, c);
        const Quartiles q = quartiles(col);
        const double lo = q.q_low - k * q.iqr();
        const double hi = q.q_up + k * q.iqr();
        for (int r = 0; r < features.rows(); ++r)
            if (col[r] < lo || col[r] > hi) rep.kept_mask[r] = false;
    }
    rep.finish();
    return rep;
}

// Componentwise median over a set of vector-feature records.
inline VectorFeatures marginal_median(const std::vector<VectorFeatures>& records) {
    if (records.empty()) fail(Errc::invalid_input, "marginal_median: no records");
    VectorFeatures med;
    std::vector<double> comp(records.size());
    for (int slot = 0; slot < kVectorFeatureCount; ++slot) {
        double* out[3] = {&med[slot].x, &med[slot].y, &med[slot].z};
        for (int axis = 0; axis < 3; ++axis) {
            for (std::size_t r = 0; r < records.size(); ++r) {
                const Vec3& v = records[r][slot];
                comp[r] = axis == 0 ? v.x : axis == 1 ? v.y : v.z;
            }
            *out[axis] = median(comp);
        }
    }
    return med;
}

inline double cosine_similarity(const Vec3& a, const Vec3& b) {
    const double na = norm(a);
    const double nb = norm(b);
    if (na == 0.0 || nb == 0.0) fail(Errc::degenerate_vector, "cosine_similarity: zero-norm vector");
    return dot(a, b) / (na * nb);
}

// Slot-by-record cosine similarities against the marginal median.
inline SimilarityMatrix build_similarity_matrix(const std::vector<VectorFeatures>& records,
                                                const VectorFeatures& med) {
    SimilarityMatrix sim;
    sim.slots = kVectorFeatureCount;
    sim.records = static_cast<int>(records.size());
    sim.s.resize(static_cast<std::size_t>(sim.slots) * sim.records);
    for (int slot = 0; slot < sim.slots; ++slot)
        for (int r = 0; r < sim.records; ++r)
            sim.at(slot, r) = cosine_similarity(med[slot], records[r][slot]);
    return sim;
}

// The vector-feature Tukey test. Records containing a zero-norm slot are
// removed up front (their similarity is undefined); the marginal median
// and the fences are computed over the remaining records.
inline RemovalReport tukey_vector_removal(const std::vector<VectorFeatures>& records,
                                          double k = 1.5, SimilarityMatrix* sim_out = nullptr) {
    const int n = static_cast<int>(records.size());
    if (n < 4) fail(Errc::invalid_input, "tukey_vector_removal: need >= 4 records");

    RemovalReport rep;
    rep.t_upper = std::numeric_limits<double>::quiet_NaN();
    rep.kept_mask.assign(n, true);

    std::vector<int> usable;
    std::vector<VectorFeatures> clean;
    for (int r = 0; r < n; ++r) {
        bool degenerate = false;
        for (const Vec3& v : records[r])
            if (norm(v) == 0.0) {
                degenerate = true;
                break;
            }
        if (degenerate)
            rep.kept_mask[r] = false;
        else {
            usable.push_back(r);
            clean.push_back(records[r]);
        }
    }
    if (static_cast<int>(clean.size()) < 4)
        fail(Errc::invalid_input, "tukey_vector_removal: fewer than 4 non-degenerate records");

    const VectorFeatures med = marginal_median(clean);
    for (int slot = 0; slot < kVectorFeatureCount; ++slot)
        if (norm(med[slot]) == 0.0)
            fail(Errc::degenerate_vector, "tukey_vector_removal: marginal median slot has zero norm");

    const SimilarityMatrix sim = build_similarity_matrix(clean, med);
    if (sim_out) *sim_out = sim;

    std::vector<double> row(clean.size());
    for (int slot = 0; slot < sim.slots; ++slot) {
        for (int r = 0; r < sim.records; ++r) row[r] = sim.at(slot, r);
        const Quartiles q = quartiles(row);
        const double lo = q.q_low - k * q.iqr();
        const double hi = q.q_up + k * q.iqr();
        for (int r = 0; r < sim.records; ++r)
            if (row[r] < lo || row[r] > hi) rep.kept_mask[usable[r]] = false;
    }
    rep.finish();
    return rep;
}

}  // namespace gait
