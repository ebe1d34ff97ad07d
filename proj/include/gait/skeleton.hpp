#pragma once

// The 13-joint skeleton model: neck, shoulders, elbows, wrists, hips,
// knees and ankles. Face joints of the upstream pose detector are not part
// of this model.

#include <array>
#include <cstddef>
#include <string_view>

#include "gait/common.hpp"

namespace gait {

inline constexpr int kJointCount = 13;

enum class JointId : int {
    Neck = 0,
    RShoulder,
    RElbow,
    RWrist,
    LShoulder,
    LElbow,
    LWrist,
    RHip,
    RKnee,
    RAnkle,
    LHip,
    LKnee,
    LAnkle,
};

inline constexpr std::array<std::string_view, kJointCount> kJointNames = {
    "neck",  "r_shoulder", "r_elbow", "r_wrist", "l_shoulder", "l_elbow", "l_wrist",
    "r_hip", "r_knee",     "r_ankle", "l_hip",   "l_knee",     "l_ankle",
};

inline std::string_view joint_name(JointId id) { return kJointNames[static_cast<int>(id)]; }

// Detected 2-D joint in pixel coordinates. `depth` carries the per-joint
// range sample when the wire format supplies one; 0 means "no depth yet"
// and is filled from a range frame at projection time.
struct Joint2D {
    double x = 0.0;
    double y = 0.0;
    bool present = false;
    double depth = 0.0;
};

struct Joint3D {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    bool present = false;

    Vec3 pos() const { return {x, y, z}; }
};

struct Skeleton2D {
    std::array<Joint2D, kJointCount> joints{};

    Joint2D& operator[](JointId id) { return joints[static_cast<int>(id)]; }
    const Joint2D& operator[](JointId id) const { return joints[static_cast<int>(id)]; }
};

struct Skeleton3D {
    std::array<Joint3D, kJointCount> joints{};

    Joint3D& operator[](JointId id) { return joints[static_cast<int>(id)]; }
    const Joint3D& operator[](JointId id) const { return joints[static_cast<int>(id)]; }

    bool all_present() const {
        for (const auto& j : joints)
            if (!j.present) return false;
        return true;
    }

    bool any_present() const {
        for (const auto& j : joints)
            if (j.present) return true;
        return false;
    }

    Vec3 at(JointId id) const { return (*this)[id].pos(); }
};

}  // namespace gait
