#pragma once

// Per-frame biometric features: 19 inter-joint distances (length-based)
// and 12 oriented source->destination limb vectors (vector-based).

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "gait/common.hpp"
#include "gait/jointseq.hpp"
#include "gait/skeleton.hpp"

namespace gait {

inline constexpr int kLengthFeatureCount = 19;
inline constexpr int kVectorFeatureCount = 12;

inline constexpr std::array<std::string_view, kLengthFeatureCount> kLengthFeatureNames = {
    "r_shoulder",        "l_shoulder",        "r_upper_arm", "l_upper_arm",    "r_lower_arm",
    "l_lower_arm",       "spine",             "r_upper_leg", "l_upper_leg",    "r_lower_leg",
    "l_lower_leg",       "shoulder_shoulder", "elbow_elbow", "wrist_wrist",    "hip_hip",
    "knee_knee",         "ankle_ankle",       "rshoulder_lankle", "lshoulder_rankle",
};

// (source, destination) joints of the 12 vector features, proximal first.
inline constexpr std::array<std::pair<JointId, JointId>, kVectorFeatureCount> kVectorFeaturePairs = {{
    {JointId::Neck, JointId::RShoulder},
    {JointId::Neck, JointId::LShoulder},
    {JointId::Neck, JointId::RHip},
    {JointId::Neck, JointId::LHip},
    {JointId::RShoulder, JointId::RElbow},
    {JointId::LShoulder, JointId::LElbow},
    {JointId::RHip, JointId::RKnee},
    {JointId::LHip, JointId::LKnee},
    {JointId::RElbow, JointId::RWrist},
    {JointId::LElbow, JointId::LWrist},
    {JointId::RKnee, JointId::RAnkle},
    {JointId::LKnee, JointId::LAnkle},
}};

inline std::string vector_feature_name(int slot) {
    const auto& [src, dst] = kVectorFeaturePairs[slot];
    return std::string(joint_name(src)) + "_to_" + std::string(joint_name(dst));
}

using LengthFeatures = std::array<double, kLengthFeatureCount>;
using VectorFeatures = std::array<Vec3, kVectorFeatureCount>;

namespace detail {

inline void require_all_joints(const Skeleton3D& s, const char* who) {
    for (int j = 0; j < kJointCount; ++j) {
        if (!s.joints[j].present)
            fail(Errc::missing_joint, std::string(who) + ": joint '" +
                                          std::string(joint_name(static_cast<JointId>(j))) +
                                          "' is missing");
    }
}

}  // namespace detail

inline LengthFeatures length_features(const Skeleton3D& s) {
    detail::require_all_joints(s, "length_features");
    auto d = [&](JointId a, JointId b) { return distance(s.at(a), s.at(b)); };
    const Vec3 hip_mid = 0.5 * (s.at(JointId::RHip) + s.at(JointId::LHip));
    return {
        d(JointId::Neck, JointId::RShoulder),
        d(JointId::Neck, JointId::LShoulder),
        d(JointId::RShoulder, JointId::RElbow),
        d(JointId::LShoulder, JointId::LElbow),
        d(JointId::RElbow, JointId::RWrist),
        d(JointId::LElbow, JointId::LWrist),
        distance(s.at(JointId::Neck), hip_mid),
        d(JointId::RHip, JointId::RKnee),
        d(JointId::LHip, JointId::LKnee),
        d(JointId::RKnee, JointId::RAnkle),
        d(JointId::LKnee, JointId::LAnkle),
        d(JointId::RShoulder, JointId::LShoulder),
        d(JointId::RElbow, JointId::LElbow),
        d(JointId::RWrist, JointId::LWrist),
        d(JointId::RHip, JointId::LHip),
        d(JointId::RKnee, JointId::LKnee),
        d(JointId::RAnkle, JointId::LAnkle),
        d(JointId::RShoulder, JointId::LAnkle),
        d(JointId::LShoulder, JointId::RAnkle),
    };
}

inline VectorFeatures vector_features(const Skeleton3D& s) {
    detail::require_all_joints(s, "vector_features");
    VectorFeatures out;
    for (int i = 0; i < kVectorFeatureCount; ++i) {
        const auto& [src, dst] = kVectorFeaturePairs[i];
        out[i] = s.at(dst) - s.at(src);
    }
    return out;
}

enum class FeatureKind { length, vector };

inline int feature_dimension(FeatureKind kind) {
    return kind == FeatureKind::length ? kLengthFeatureCount : 3 * kVectorFeatureCount;
}

inline std::vector<std::string> feature_column_names(FeatureKind kind) {
    std::vector<std::string> names;
    if (kind == FeatureKind::length) {
        for (auto n : kLengthFeatureNames) names.emplace_back(n);
    } else {
        for (int i = 0; i < kVectorFeatureCount; ++i)
            for (const char* axis : {"_x", "_y", "_z"}) names.push_back(vector_feature_name(i) + axis);
    }
    return names;
}

// One feature record per frame; rows are frame-aligned via frame_index.
struct FeatureTable {
    FeatureKind kind = FeatureKind::length;
    int cols = 0;
    std::vector<double> data;      // rows x cols
    std::vector<int> frame_index;  // source frame per row
    std::vector<int> skipped;      // frames dropped for missing joints

    int rows() const { return static_cast<int>(frame_index.size()); }
    std::span<const double> record(int r) const {
        return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
    }
    std::span<double> record(int r) {
        return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
    }

    // The 12 slot vectors of a vector-based record.
    VectorFeatures record_vectors(int r) const {
        VectorFeatures v;
        auto rec = record(r);
        for (int i = 0; i < kVectorFeatureCount; ++i)
            v[i] = {rec[3 * i + 0], rec[3 * i + 1], rec[3 * i + 2]};
        return v;
    }
};

// Frames whose 13 joints are all present become records; the rest are
// reported in `skipped`.
inline FeatureTable feature_matrix(const JointMatrix& m, FeatureKind kind) {
    FeatureTable table;
    table.kind = kind;
    table.cols = feature_dimension(kind);
    for (int t = 0; t < m.frames; ++t) {
        const Skeleton3D s = skeleton_at(m, t);
        if (!s.all_present()) {
            table.skipped.push_back(t);
            continue;
        }
        table.frame_index.push_back(t);
        if (kind == FeatureKind::length) {
            const LengthFeatures f = length_features(s);
            table.data.insert(table.data.end(), f.begin(), f.end());
        } else {
            const VectorFeatures f = vector_features(s);
            for (const Vec3& v : f) {
                table.data.push_back(v.x);
                table.data.push_back(v.y);
                table.data.push_back(v.z);
            }
        }
    }
    return table;
}

}  // namespace gait
