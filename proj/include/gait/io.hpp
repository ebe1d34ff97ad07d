#pragma once

// File formats and configuration. Skeleton data travels as JSONL (one
// header object, then one object per frame); feature/statistics tables
// and evaluation grids are CSV. All writers are deterministic: fixed key
// order, fixed float formatting, no clocks.

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gait/camera.hpp"
#include "gait/classify.hpp"
#include "gait/common.hpp"
#include "gait/cycles.hpp"
#include "gait/features.hpp"
#include "gait/pipeline.hpp"
#include "gait/skeleton.hpp"
#include "gait/synth.hpp"

namespace gait {

using nlohmann::json;

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kFrames2DFormat = "gait.frames2d";
inline constexpr const char* kFrames3DFormat = "gait.frames3d";
inline constexpr const char* kSvmFormat = "gait.svm";

inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

struct FrameMeta {
    std::string seq;
    std::string subject;
    std::string pattern;
    int frame = 0;
};

struct Frame2DRecord {
    FrameMeta meta;
    Skeleton2D skel;
};

struct Frame3DRecord {
    FrameMeta meta;
    Skeleton3D skel;
};

namespace detail {

inline json meta_to_json(const FrameMeta& meta) {
    return json{{"frame", meta.frame}, {"pattern", meta.pattern}, {"seq", meta.seq},
                {"subject", meta.subject}};
}

inline FrameMeta meta_from_json(const json& j) {
    return {j.at("seq").get<std::string>(), j.at("subject").get<std::string>(),
            j.at("pattern").get<std::string>(), j.at("frame").get<int>()};
}

}  // namespace detail

inline json frame2d_to_json(const Frame2DRecord& rec) {
    json j = detail::meta_to_json(rec.meta);
    json joints = json::array();
    json present = json::array();
    for (const Joint2D& joint : rec.skel.joints) {
        joints.push_back({joint.x, joint.y, joint.depth});
        present.push_back(joint.present ? 1 : 0);
    }
    j["joints"] = std::move(joints);
    j["present"] = std::move(present);
    return j;
}

inline json frame3d_to_json(const Frame3DRecord& rec) {
    json j = detail::meta_to_json(rec.meta);
    json joints = json::array();
    json present = json::array();
    for (const Joint3D& joint : rec.skel.joints) {
        joints.push_back({joint.x, joint.y, joint.z});
        present.push_back(joint.present ? 1 : 0);
    }
    j["joints"] = std::move(joints);
    j["present"] = std::move(present);
    return j;
}

inline Frame2DRecord frame2d_from_json(const json& j) {
    Frame2DRecord rec;
    rec.meta = detail::meta_from_json(j);
    const json& joints = j.at("joints");
    const json& present = j.at("present");
    if (joints.size() != kJointCount || present.size() != kJointCount)
        fail(Errc::io, "frame2d: expected 13 joints");
    for (int k = 0; k < kJointCount; ++k) {
        rec.skel.joints[k].x = joints[k].at(0).get<double>();
        rec.skel.joints[k].y = joints[k].at(1).get<double>();
        rec.skel.joints[k].depth = joints[k].size() > 2 ? joints[k].at(2).get<double>() : 0.0;
        rec.skel.joints[k].present = present[k].get<int>() != 0;
    }
    return rec;
}

inline Frame3DRecord frame3d_from_json(const json& j) {
    Frame3DRecord rec;
    rec.meta = detail::meta_from_json(j);
    const json& joints = j.at("joints");
    const json& present = j.at("present");
    if (joints.size() != kJointCount || present.size() != kJointCount)
        fail(Errc::io, "frame3d: expected 13 joints");
    for (int k = 0; k < kJointCount; ++k) {
        rec.skel.joints[k].x = joints[k].at(0).get<double>();
        rec.skel.joints[k].y = joints[k].at(1).get<double>();
        rec.skel.joints[k].z = joints[k].at(2).get<double>();
        rec.skel.joints[k].present = present[k].get<int>() != 0;
    }
    return rec;
}

inline json jsonl_header(const char* format) {
    return json{{"format", format}, {"version", kFormatVersion}};
}

inline void expect_jsonl_header(const json& j, const char* format) {
    if (!j.contains("format") || j.at("format") != format)
        fail(Errc::io, std::string("expected header with format '") + format + "'");
    if (j.at("version").get<int>() != kFormatVersion) fail(Errc::io, "unsupported format version");
}

template <typename Record, typename ToJson>
void write_jsonl(const std::string& path, const char* format, const std::vector<Record>& records,
                 ToJson&& to_json_fn) {
    std::ofstream out(path);
    if (!out) fail(Errc::io, "cannot open for writing: " + path);
    out << jsonl_header(format).dump() << '\n';
    for (const Record& rec : records) out << to_json_fn(rec).dump() << '\n';
}

inline void write_frames2d(const std::string& path, const std::vector<Frame2DRecord>& records) {
    write_jsonl(path, kFrames2DFormat, records, frame2d_to_json);
}

inline void write_frames3d(const std::string& path, const std::vector<Frame3DRecord>& records) {
    write_jsonl(path, kFrames3DFormat, records, frame3d_to_json);
}

template <typename Record, typename FromJson>
std::vector<Record> read_jsonl(const std::string& path, const char* format, FromJson&& from_json_fn) {
    std::ifstream in(path);
    if (!in) fail(Errc::io, "cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) fail(Errc::io, "empty file (missing header): " + path);
    json header = json::parse(line, nullptr, false);
    if (header.is_discarded()) fail(Errc::io, path + ":1: malformed header");
    expect_jsonl_header(header, format);

    std::vector<Record> records;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            fail(Errc::io, path + ":" + std::to_string(line_no) + ": malformed JSON");
        try {
            records.push_back(from_json_fn(j));
        } catch (const json::exception& e) {
            fail(Errc::io, path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

inline std::vector<Frame2DRecord> read_frames2d(const std::string& path) {
    return read_jsonl<Frame2DRecord>(path, kFrames2DFormat, frame2d_from_json);
}

inline std::vector<Frame3DRecord> read_frames3d(const std::string& path) {
    return read_jsonl<Frame3DRecord>(path, kFrames3DFormat, frame3d_from_json);
}

// Frames of one sequence in file order.
struct SequenceRecords {
    std::string seq;
    std::string subject;
    std::string pattern;
    std::vector<Skeleton3D> frames;
};

// Groups frame records by sequence id and checks the contiguity invariant.
inline std::vector<SequenceRecords> group_sequences(const std::vector<Frame3DRecord>& records) {
    std::vector<SequenceRecords> out;
    std::map<std::string, std::size_t> index;
    for (const Frame3DRecord& rec : records) {
        auto [it, inserted] = index.try_emplace(rec.meta.seq, out.size());
        if (inserted) out.push_back({rec.meta.seq, rec.meta.subject, rec.meta.pattern, {}});
        SequenceRecords& seq = out[it->second];
        if (rec.meta.frame != static_cast<int>(seq.frames.size()))
            fail(Errc::io, "sequence '" + rec.meta.seq + "': frame indices not contiguous (got " +
                               std::to_string(rec.meta.frame) + ", expected " +
                               std::to_string(seq.frames.size()) + ")");
        if (rec.meta.subject != seq.subject || rec.meta.pattern != seq.pattern)
            fail(Errc::io, "sequence '" + rec.meta.seq + "': inconsistent subject/pattern");
        seq.frames.push_back(rec.skel);
    }
    return out;
}

// --- CSV ---------------------------------------------------------------

inline void write_csv_line(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out << ',';
        out << cells[i];
    }
    out << '\n';
}

// Feature table CSV: metadata columns then one column per feature.
inline void write_feature_csv(const std::string& path, const std::vector<SequenceRecords>& seqs,
                              const std::vector<FeatureTable>& tables, FeatureKind kind) {
    std::ofstream out(path);
    if (!out) fail(Errc::io, "cannot open for writing: " + path);
    out << "# gait.features v" << kFormatVersion << "\n";
    std::vector<std::string> header = {"seq", "subject", "pattern", "frame"};
    for (const std::string& n : feature_column_names(kind)) header.push_back(n);
    write_csv_line(out, header);
    for (std::size_t s = 0; s < seqs.size(); ++s) {
        const FeatureTable& table = tables[s];
        for (int r = 0; r < table.rows(); ++r) {
            std::vector<std::string> cells = {seqs[s].seq, seqs[s].subject, seqs[s].pattern,
                                              std::to_string(table.frame_index[r])};
            for (double v : table.record(r)) cells.push_back(format_double(v));
            write_csv_line(out, cells);
        }
    }
}

struct FeatureCsv {
    FeatureKind kind = FeatureKind::length;
    std::vector<std::string> seq;
    std::vector<std::string> subject;
    std::vector<std::string> pattern;
    std::vector<int> frame;
    int cols = 0;
    std::vector<double> data;

    int rows() const { return static_cast<int>(frame.size()); }
    std::span<const double> record(int r) const {
        return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
    }

    // Dataset with subject labels mapped to sorted-name indices.
    Dataset to_dataset() const {
        std::map<std::string, int> subj_ids;
        for (const auto& s : subject) subj_ids.emplace(s, 0);
        int next = 0;
        for (auto& [name, id] : subj_ids) id = next++;
        std::map<std::string, int> seq_ids;
        for (const auto& s : seq) seq_ids.emplace(s, 0);
        next = 0;
        for (auto& [name, id] : seq_ids) id = next++;

        Dataset d;
        for (int r = 0; r < rows(); ++r)
            d.add(record(r), subj_ids.at(subject[r]), seq_ids.at(seq[r]), pattern[r]);
        return d;
    }
};

inline FeatureCsv read_feature_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io, "cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("# gait.", 0) != 0)
        fail(Errc::io, path + ": missing format comment line");
    if (!std::getline(in, line)) fail(Errc::io, path + ": missing CSV header");

    FeatureCsv csv;
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    if (header.size() < 5) fail(Errc::io, path + ": too few columns");
    csv.cols = static_cast<int>(header.size()) - 4;
    const auto vec_cols = 3 * kVectorFeatureCount;
    if (csv.cols == vec_cols)
        csv.kind = FeatureKind::vector;
    else if (csv.cols == kLengthFeatureCount)
        csv.kind = FeatureKind::length;
    else
        fail(Errc::io, path + ": unrecognized feature column count " + std::to_string(csv.cols));

    int line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (static_cast<int>(cells.size()) != csv.cols + 4)
            fail(Errc::io, path + ":" + std::to_string(line_no) + ": wrong column count");
        csv.seq.push_back(cells[0]);
        csv.subject.push_back(cells[1]);
        csv.pattern.push_back(cells[2]);
        csv.frame.push_back(std::stoi(cells[3]));
        for (int c = 0; c < csv.cols; ++c) csv.data.push_back(std::stod(cells[4 + c]));
    }
    return csv;
}

// --- SVM model container -------------------------------------------------

inline json svm_to_json(const SvmModel& model) {
    json pairs = json::array();
    for (const PairModel& p : model.pairs) {
        json sv = json::array();
        for (const auto& v : p.support_vectors) sv.push_back(v);
        pairs.push_back({{"class_a", p.class_a},
                         {"class_b", p.class_b},
                         {"bias", p.bias},
                         {"dual_objective", p.dual_objective},
                         {"converged", p.converged},
                         {"coef", p.coef},
                         {"support_vectors", std::move(sv)}});
    }
    return json{{"format", kSvmFormat},
                {"version", kFormatVersion},
                {"gamma", model.gamma},
                {"C", model.C},
                {"classes", model.classes},
                {"standardizer", {{"mean", model.standardizer.mean}, {"std", model.standardizer.std_dev}}},
                {"pairs", std::move(pairs)}};
}

inline SvmModel svm_from_json(const json& j) {
    if (j.at("format") != kSvmFormat || j.at("version").get<int>() != kFormatVersion)
        fail(Errc::io, "svm model: unknown container format");
    SvmModel model;
    model.gamma = j.at("gamma").get<double>();
    model.C = j.at("C").get<double>();
    model.classes = j.at("classes").get<std::vector<int>>();
    model.standardizer.mean = j.at("standardizer").at("mean").get<std::vector<double>>();
    model.standardizer.std_dev = j.at("standardizer").at("std").get<std::vector<double>>();
    for (const json& jp : j.at("pairs")) {
        PairModel p;
        p.class_a = jp.at("class_a").get<int>();
        p.class_b = jp.at("class_b").get<int>();
        p.bias = jp.at("bias").get<double>();
        p.dual_objective = jp.at("dual_objective").get<double>();
        p.converged = jp.at("converged").get<bool>();
        p.coef = jp.at("coef").get<std::vector<double>>();
        p.support_vectors = jp.at("support_vectors").get<std::vector<std::vector<double>>>();
        model.pairs.push_back(std::move(p));
    }
    return model;
}

inline void save_svm(const std::string& path, const SvmModel& model) {
    std::ofstream out(path);
    if (!out) fail(Errc::io, "cannot open for writing: " + path);
    out << svm_to_json(model).dump(2) << '\n';
}

inline SvmModel load_svm(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io, "cannot open: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(Errc::io, path + ": " + e.what());
    }
    return svm_from_json(j);
}

// --- Pipeline configuration ---------------------------------------------

struct PipelineConfig {
    PipelineSettings settings;
    FixtureParams fixture;
};

namespace detail {

inline void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                                const std::string& section) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) {
                ok = true;
                break;
            }
        if (!ok) fail(Errc::config, "config: unknown key '" + key + "' in " + section);
    }
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

inline PipelineConfig parse_pipeline_config(const json& j) {
    PipelineConfig cfg;
    detail::reject_unknown_keys(
        j, {"camera", "filter", "outliers", "cycles", "svm", "split", "synth"}, "config root");

    if (j.contains("camera")) {
        const json& c = j.at("camera");
        detail::reject_unknown_keys(c, {"pixels_x", "pixels_y", "aov_x", "aov_y"}, "camera");
        detail::maybe(c, "pixels_x", cfg.settings.camera.pixels_x);
        detail::maybe(c, "pixels_y", cfg.settings.camera.pixels_y);
        detail::maybe(c, "aov_x", cfg.settings.camera.aov_x);
        detail::maybe(c, "aov_y", cfg.settings.camera.aov_y);
        cfg.settings.camera.validate();
    }
    if (j.contains("filter")) {
        const json& f = j.at("filter");
        detail::reject_unknown_keys(
            f, {"tukey_k", "lowess_span", "lowess_iterations", "quantile_method", "rng_seed"},
            "filter");
        detail::maybe(f, "tukey_k", cfg.settings.filter.tukey_k);
        detail::maybe(f, "lowess_span", cfg.settings.filter.lowess_span);
        detail::maybe(f, "lowess_iterations", cfg.settings.filter.lowess_iterations);
        detail::maybe(f, "rng_seed", cfg.settings.filter.rng_seed);
        if (f.contains("quantile_method") && f.at("quantile_method") != "linear")
            fail(Errc::config, "config: unknown quantile_method");
        cfg.settings.filter.validate();
    }
    if (j.contains("outliers")) {
        const json& o = j.at("outliers");
        detail::reject_unknown_keys(o, {"alpha", "bins", "tukey_k"}, "outliers");
        detail::maybe(o, "alpha", cfg.settings.outlier.alpha);
        detail::maybe(o, "bins", cfg.settings.outlier.bins);
        detail::maybe(o, "tukey_k", cfg.settings.outlier.tukey_k);
        cfg.settings.outlier.validate();
    }
    if (j.contains("cycles")) {
        const json& c = j.at("cycles");
        detail::reject_unknown_keys(c,
                                    {"smooth_window", "min_prominence_factor", "min_separation",
                                     "min_cycle_frames", "half_cycle"},
                                    "cycles");
        detail::maybe(c, "smooth_window", cfg.settings.cycles.smooth_window);
        detail::maybe(c, "min_prominence_factor", cfg.settings.cycles.min_prominence_factor);
        detail::maybe(c, "min_separation", cfg.settings.cycles.min_separation);
        detail::maybe(c, "min_cycle_frames", cfg.settings.cycles.min_cycle_frames);
        detail::maybe(c, "half_cycle", cfg.settings.cycles.half_cycle);
        cfg.settings.cycles.validate();
    }
    if (j.contains("svm")) {
        const json& s = j.at("svm");
        detail::reject_unknown_keys(s, {"C", "gamma", "tol", "max_passes", "seed"}, "svm");
        detail::maybe(s, "C", cfg.settings.svm.C);
        detail::maybe(s, "gamma", cfg.settings.svm.gamma);
        detail::maybe(s, "tol", cfg.settings.svm.tol);
        detail::maybe(s, "max_passes", cfg.settings.svm.max_passes);
        detail::maybe(s, "seed", cfg.settings.svm.seed);
        if (!(cfg.settings.svm.C > 0.0)) fail(Errc::config, "config: svm.C must be > 0");
        if (!(cfg.settings.svm.tol > 0.0)) fail(Errc::config, "config: svm.tol must be > 0");
        if (cfg.settings.svm.max_passes < 1) fail(Errc::config, "config: svm.max_passes must be >= 1");
    }
    if (j.contains("split")) {
        const json& s = j.at("split");
        detail::reject_unknown_keys(s, {"train_fraction", "max_train", "max_test", "subsample_seed"},
                                    "split");
        detail::maybe(s, "train_fraction", cfg.settings.split.train_fraction);
        detail::maybe(s, "max_train", cfg.settings.split.max_train);
        detail::maybe(s, "max_test", cfg.settings.split.max_test);
        detail::maybe(s, "subsample_seed", cfg.settings.split.subsample_seed);
        if (!(cfg.settings.split.train_fraction > 0.0 && cfg.settings.split.train_fraction < 1.0))
            fail(Errc::config, "config: split.train_fraction must be in (0, 1)");
    }
    if (j.contains("synth")) {
        const json& s = j.at("synth");
        detail::reject_unknown_keys(s, {"frames_per_sequence", "fps", "seed", "corruption"}, "synth");
        detail::maybe(s, "frames_per_sequence", cfg.fixture.frames_per_sequence);
        detail::maybe(s, "fps", cfg.fixture.fps);
        detail::maybe(s, "seed", cfg.fixture.seed);
        if (s.contains("corruption")) {
            const json& c = s.at("corruption");
            detail::reject_unknown_keys(
                c, {"spike_prob", "spike_scale", "missing_joint_prob", "missing_frame_prob"},
                "synth.corruption");
            detail::maybe(c, "spike_prob", cfg.fixture.corruption.spike_prob);
            detail::maybe(c, "spike_scale", cfg.fixture.corruption.spike_scale);
            detail::maybe(c, "missing_joint_prob", cfg.fixture.corruption.missing_joint_prob);
            detail::maybe(c, "missing_frame_prob", cfg.fixture.corruption.missing_frame_prob);
            cfg.fixture.corruption.validate();
        }
        if (cfg.fixture.frames_per_sequence < 2)
            fail(Errc::config, "config: synth.frames_per_sequence must be >= 2");
        if (!(cfg.fixture.fps > 0.0)) fail(Errc::config, "config: synth.fps must be > 0");
    }
    return cfg;
}

inline PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::config, "cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(Errc::config, path + ": " + e.what());
    }
    return parse_pipeline_config(j);
}

}  // namespace gait
