#pragma once

// End-to-end orchestration: the multi-subject synthetic fixture, the
// three data treatments (none / outlier removal / correction), dataset
// assembly for per-frame and per-cycle classification, and the
// treatment x feature x granularity comparison grid.

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gait/classify.hpp"
#include "gait/cycles.hpp"
#include "gait/features.hpp"
#include "gait/jointseq.hpp"
#include "gait/outliers.hpp"
#include "gait/synth.hpp"

namespace gait {

enum class Treatment { none, remove, correct };

inline const char* treatment_name(Treatment t) {
    switch (t) {
        case Treatment::none: return "none";
        case Treatment::remove: return "remove";
        case Treatment::correct: return "correct";
    }
    return "?";
}

struct SplitParams {
    double train_fraction = 0.75;
    int max_train = 1000;  // stratified subsample caps; <= 0 disables
    int max_test = 500;
    std::uint64_t subsample_seed = 1;
};

struct PipelineSettings {
    CameraModel camera;
    FilterConfig filter;
    OutlierParams outlier;
    CycleConfig cycles;
    SvmParams svm;
    SplitParams split;
};

struct SequenceData {
    int sequence_id = 0;
    int subject = 0;
    std::string subject_name;
    std::string pattern;
    JointMatrix clean;      // ground truth (empty frames == 0 when unknown)
    JointMatrix corrupted;  // observed input
    CorruptionLabels labels;
};

struct FixtureParams {
    int frames_per_sequence = 150;
    double fps = 15.0;
    CorruptionSpec corruption{0.10, 5.0, 0.10, 0.10, 1};
    std::uint64_t seed = 7;
};

// 10 subjects x 4 sequences (fb twice, diamond, diamond with stick), each
// with its own corruption stream derived from the fixture seed.
inline std::vector<SequenceData> make_fixture(const FixtureParams& params) {
    std::vector<SequenceData> fixture;
    const auto subjects = default_subjects();
    int seq_id = 0;
    for (std::size_t si = 0; si < subjects.size(); ++si) {
        const SubjectSpec& subj = subjects[si];
        struct SeqSpec {
            const char* pattern;
            WalkPath path;
            double phase;
            double arm_factor;
        };
        const SeqSpec specs[4] = {
            {"fb", WalkPath::straight, 0.0, 1.0},
            {"fb", WalkPath::straight, 1.9, 1.0},
            {"diamond", WalkPath::diamond, 0.7, 1.0},
            {"diamond_stick", WalkPath::diamond, 2.6, 0.15},
        };
        for (const SeqSpec& ss : specs) {
            WalkParams walk;
            walk.step_frequency_hz = subj.step_frequency_hz;
            walk.step_length_m = subj.step_length_m;
            walk.arm_swing_rad = subj.arm_swing_rad;
            walk.frame_rate_fps = params.fps;
            walk.path = ss.path;
            walk.phase_offset = ss.phase;
            walk.right_arm_factor = ss.arm_factor;

            const std::vector<Skeleton3D> clean =
                generate_walk(subj.body, walk, params.frames_per_sequence);
            CorruptionSpec cspec = params.corruption;
            cspec.seed = mix_seed(params.seed, static_cast<std::uint64_t>(seq_id));
            auto [bad, labels] = corrupt(clean, cspec);

            SequenceData data;
            data.sequence_id = seq_id++;
            data.subject = static_cast<int>(si);
            data.subject_name = subj.name;
            data.pattern = ss.pattern;
            data.clean = build_joint_matrix(clean);
            data.corrupted = build_joint_matrix(bad);
            data.labels = std::move(labels);
            fixture.push_back(std::move(data));
        }
    }
    return fixture;
}

inline JointMatrix treated_matrix(const SequenceData& seq, Treatment treatment,
                                  const FilterConfig& filter, CorrectionReport* report = nullptr) {
    if (treatment == Treatment::correct) return correct_sequence(seq.corrupted, filter, report);
    return seq.corrupted;  // removal operates on features, not trajectories
}

struct RemovalStats {
    int total_records = 0;
    int removed_records = 0;

    double fraction() const {
        return total_records > 0 ? static_cast<double>(removed_records) / total_records : 0.0;
    }
};

// Eq. 6-10 per-sequence removal; returns the kept row indices of `table`.
// Sequences too small to fence (< 4 survivors) keep their records.
inline std::vector<int> removal_kept_rows(const FeatureTable& table, const OutlierParams& params) {
    std::vector<int> kept;
    if (table.rows() == 0) return kept;
    if (table.kind == FeatureKind::length) {
        const double t_upper =
            table.rows() >= 2 ? compute_upper_threshold(table, params.alpha, params.bins)
                              : std::numeric_limits<double>::infinity();
        const RemovalReport thr = threshold_filter(table, t_upper);
        std::vector<int> survivors;
        FeatureTable pruned;
        pruned.kind = table.kind;
        pruned.cols = table.cols;
        for (int r = 0; r < table.rows(); ++r) {
            if (!thr.kept_mask[r]) continue;
            survivors.push_back(r);
            auto rec = table.record(r);
            pruned.data.insert(pruned.data.end(), rec.begin(), rec.end());
            pruned.frame_index.push_back(table.frame_index[r]);
        }
        if (pruned.rows() < 4) return survivors;
        const RemovalReport tk = tukey_scalar_removal(pruned, params.tukey_k);
        for (int r = 0; r < pruned.rows(); ++r)
            if (tk.kept_mask[r]) kept.push_back(survivors[r]);
        return kept;
    }
    // vector features: marginal-median cosine test only
    if (table.rows() < 4) {
        for (int r = 0; r < table.rows(); ++r) kept.push_back(r);
        return kept;
    }
    std::vector<VectorFeatures> records(table.rows());
    for (int r = 0; r < table.rows(); ++r) records[r] = table.record_vectors(r);
    const RemovalReport rep = tukey_vector_removal(records, params.tukey_k);
    for (int r = 0; r < table.rows(); ++r)
        if (rep.kept_mask[r]) kept.push_back(r);
    return kept;
}

// Per-frame dataset over the whole fixture under one treatment.
inline Dataset build_frame_dataset(const std::vector<SequenceData>& fixture, FeatureKind kind,
                                   Treatment treatment, const PipelineSettings& settings,
                                   RemovalStats* removal = nullptr) {
    Dataset data;
    for (const SequenceData& seq : fixture) {
        const JointMatrix m = treated_matrix(seq, treatment, settings.filter);
        const FeatureTable table = feature_matrix(m, kind);
        std::vector<int> rows;
        if (treatment == Treatment::remove) {
            rows = removal_kept_rows(table, settings.outlier);
            if (removal) {
                removal->total_records += table.rows();
                removal->removed_records += table.rows() - static_cast<int>(rows.size());
            }
        } else {
            rows.resize(table.rows());
            std::iota(rows.begin(), rows.end(), 0);
        }
        for (int r : rows) data.add(table.record(r), seq.subject, seq.sequence_id, seq.pattern);
    }
    return data;
}

// Per-cycle dataset: spans come from the treated ankle signal, statistics
// from the (possibly removal-pruned) per-frame records inside each span.
inline Dataset build_cycle_dataset(const std::vector<SequenceData>& fixture, FeatureKind kind,
                                   Treatment treatment, StatSet stat_set,
                                   const PipelineSettings& settings,
                                   RemovalStats* removal = nullptr) {
    Dataset data;
    for (const SequenceData& seq : fixture) {
        const JointMatrix m = treated_matrix(seq, treatment, settings.filter);
        FeatureTable table = feature_matrix(m, kind);
        if (treatment == Treatment::remove) {
            const std::vector<int> rows = removal_kept_rows(table, settings.outlier);
            if (removal) {
                removal->total_records += table.rows();
                removal->removed_records += table.rows() - static_cast<int>(rows.size());
            }
            FeatureTable pruned;
            pruned.kind = table.kind;
            pruned.cols = table.cols;
            for (int r : rows) {
                auto rec = table.record(r);
                pruned.data.insert(pruned.data.end(), rec.begin(), rec.end());
                pruned.frame_index.push_back(table.frame_index[r]);
            }
            table = std::move(pruned);
        }
        std::vector<double> signal;
        try {
            signal = ankle_distance_signal(m);
        } catch (const Error& e) {
            if (e.code() == Errc::unavailable_signal) continue;  // nothing to segment
            throw;
        }
        const std::vector<CycleSpan> spans = detect_gait_cycles(signal, settings.cycles);
        const CycleTable cycles = cycle_statistics(table, spans, stat_set);
        for (int r = 0; r < cycles.rows(); ++r)
            data.add(cycles.record(r), seq.subject, seq.sequence_id, seq.pattern);
    }
    return data;
}

// Deterministic stratified subsample of `idx` down to at most `cap`.
inline std::vector<int> stratified_subsample(const Dataset& data, std::vector<int> idx, int cap,
                                             std::uint64_t seed) {
    if (cap <= 0 || static_cast<int>(idx.size()) <= cap) return idx;
    std::map<int, std::vector<int>> by_class;
    for (int i : idx) by_class[data.y[i]].push_back(i);
    std::mt19937_64 rng(seed);
    for (auto& [label, members] : by_class) std::shuffle(members.begin(), members.end(), rng);

    std::vector<int> out;
    std::size_t round = 0;
    while (static_cast<int>(out.size()) < cap) {
        bool any = false;
        for (auto& [label, members] : by_class) {
            if (round < members.size()) {
                out.push_back(members[round]);
                any = true;
                if (static_cast<int>(out.size()) == cap) break;
            }
        }
        if (!any) break;
        ++round;
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct IdentificationResult {
    EvalReport report;
    int train_records = 0;
    int test_records = 0;
    int train_sequences = 0;
    int test_sequences = 0;
};

inline IdentificationResult run_identification(const Dataset& data,
                                               const PipelineSettings& settings) {
    if (data.size() == 0) fail(Errc::invalid_dataset, "run_identification: empty dataset");
    const SplitResult split = split_by_pattern(data, settings.split.train_fraction);
    const std::vector<int> train_idx = stratified_subsample(
        data, split.train_indices, settings.split.max_train, settings.split.subsample_seed);
    const std::vector<int> test_idx = stratified_subsample(
        data, split.test_indices, settings.split.max_test, settings.split.subsample_seed + 1);

    const Dataset train = data.subset(train_idx);
    const Dataset test = data.subset(test_idx);
    const SvmModel model = train_svm(train, settings.svm);

    IdentificationResult result;
    result.report = evaluate(predict(model, test), test.y);
    result.train_records = train.size();
    result.test_records = test.size();
    result.train_sequences = static_cast<int>(split.train_sequences.size());
    result.test_sequences = static_cast<int>(split.test_sequences.size());
    return result;
}

struct GridRow {
    Treatment treatment = Treatment::none;
    FeatureKind features = FeatureKind::length;
    std::string granularity;  // per_frame / stats3 / stats6
    double accuracy = 0.0;
    double macro_f = 0.0;
    double removal_fraction = -1.0;  // < 0 when not applicable
    int train_records = 0;
    int test_records = 0;
};

// The full comparison grid: treatments x feature kinds x granularities.
inline std::vector<GridRow> run_comparison_grid(const std::vector<SequenceData>& fixture,
                                                const PipelineSettings& settings,
                                                const std::vector<Treatment>& treatments = {
                                                    Treatment::none, Treatment::remove,
                                                    Treatment::correct}) {
    std::vector<GridRow> grid;
    for (Treatment treatment : treatments) {
        for (FeatureKind kind : {FeatureKind::length, FeatureKind::vector}) {
            for (const std::string& granularity : {std::string("per_frame"), std::string("stats3"),
                                                   std::string("stats6")}) {
                RemovalStats removal;
                Dataset data;
                if (granularity == "per_frame")
                    data = build_frame_dataset(fixture, kind, treatment, settings, &removal);
                else
                    data = build_cycle_dataset(fixture, kind, treatment,
                                               granularity == "stats3" ? StatSet::three : StatSet::six,
                                               settings, &removal);
                GridRow row;
                row.treatment = treatment;
                row.features = kind;
                row.granularity = granularity;
                if (treatment == Treatment::remove) row.removal_fraction = removal.fraction();
                const IdentificationResult res = run_identification(data, settings);
                row.accuracy = res.report.accuracy;
                row.macro_f = res.report.macro_f;
                row.train_records = res.train_records;
                row.test_records = res.test_records;
                grid.push_back(row);
            }
        }
    }
    return grid;
}

}  // namespace gait
