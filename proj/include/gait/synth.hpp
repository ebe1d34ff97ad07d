#pragma once

// Synthetic ground truth: parametric walking skeletons with exactly
// preserved segment lengths, camera projection to 2-D pixel + range data,
// and labeled corruption (spikes, joint dropouts, missing frames).
//
// The kinematic model is intentionally plain - rigid segments rotated by
// phase-coupled sinusoids, legs in anti-phase, arms counter-swinging -
// because its only job is to provide known limb lengths and a periodic
// ankle-to-ankle signal for the pipeline under test.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gait/camera.hpp"
#include "gait/common.hpp"
#include "gait/jointseq.hpp"
#include "gait/skeleton.hpp"

namespace gait {

struct BodyParams {
    double shoulder_width = 0.38;
    double hip_width = 0.32;
    double torso = 0.55;      // neck to hip midpoint
    double upper_arm = 0.30;
    double lower_arm = 0.26;
    double upper_leg = 0.45;
    double lower_leg = 0.42;
    double left_asymmetry = 0.0;  // scales left-side limb lengths by (1 + value)

    void validate() const {
        for (double v : {shoulder_width, hip_width, torso, upper_arm, lower_arm, upper_leg, lower_leg})
            if (!(v > 0.0)) fail(Errc::config, "body: segment lengths must be > 0");
        if (left_asymmetry <= -1.0) fail(Errc::config, "body: left_asymmetry must be > -1");
    }

    double leg_length() const { return upper_leg + lower_leg; }
};

enum class WalkPath { straight, diamond };

struct WalkParams {
    double step_frequency_hz = 1.8;
    double step_length_m = 0.5;
    WalkPath path = WalkPath::straight;
    double speed_mps = 0.0;  // <= 0 derives step_length * step_frequency
    double frame_rate_fps = 15.0;
    double arm_swing_rad = 0.5;
    double right_arm_factor = 1.0;  // < 1 suppresses the right arm (stick carry)
    double phase_offset = 0.0;
    double camera_height = 0.9;  // sensor axis height above the floor
    double start_z = 7.0;        // straight path: far turnaround depth
    double near_z = 4.0;         // straight path: near turnaround depth
    double diamond_center_z = 5.5;
    double diamond_radius = 1.8;

    void validate() const {
        if (!(step_frequency_hz > 0.0)) fail(Errc::config, "walk: step frequency must be > 0");
        if (!(frame_rate_fps > 0.0)) fail(Errc::config, "walk: frame rate must be > 0");
        if (step_length_m < 0.0) fail(Errc::config, "walk: step length must be >= 0");
        if (path == WalkPath::straight && !(start_z > near_z && near_z > 0.0))
            fail(Errc::config, "walk: straight path needs start_z > near_z > 0");
        if (path == WalkPath::diamond && !(diamond_radius > 0.0 && diamond_center_z > diamond_radius))
            fail(Errc::config, "walk: diamond path needs 0 < radius < center depth");
    }

    double speed() const { return speed_mps > 0.0 ? speed_mps : step_length_m * step_frequency_hz; }
};

namespace detail {

struct PathState {
    Vec3 position;   // ground-plane anchor (y = 0)
    double heading;  // forward = (sin h, 0, cos h)
};

inline PathState path_at(const WalkParams& walk, double distance) {
    if (walk.path == WalkPath::straight) {
        // ping-pong between start_z (far) and near_z, x fixed at 0
        const double leg = walk.start_z - walk.near_z;
        const double cycle = std::fmod(distance, 2.0 * leg);
        if (cycle < leg) return {{0.0, 0.0, walk.start_z - cycle}, M_PI};  // toward the camera
        return {{0.0, 0.0, walk.near_z + (cycle - leg)}, 0.0};            // away
    }
    // diamond: four edges between axis vertices around (0, center_z)
    const double r = walk.diamond_radius;
    const double edge = r * std::sqrt(2.0);
    const double perimeter = 4.0 * edge;
    double s = std::fmod(distance, perimeter);
    const Vec3 verts[4] = {{0.0, 0.0, walk.diamond_center_z - r},
                           {r, 0.0, walk.diamond_center_z},
                           {0.0, 0.0, walk.diamond_center_z + r},
                           {-r, 0.0, walk.diamond_center_z}};
    const int side = std::min(3, static_cast<int>(s / edge));
    s -= side * edge;
    const Vec3 a = verts[side];
    const Vec3 b = verts[(side + 1) % 4];
    const Vec3 dir = (b - a) * (1.0 / edge);
    return {a + s * dir, std::atan2(dir.x, dir.z)};
}

// Unit vector at angle theta from straight-down within the sagittal
// (forward, vertical) plane.
inline Vec3 limb_direction(double theta, const Vec3& forward) {
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    return {s * forward.x, -c, s * forward.z};
}

}  // namespace detail

// One skeleton at walking phase `phi` placed on the path at `dist`.
inline Skeleton3D walk_pose(const BodyParams& body, const WalkParams& walk, double phi,
                            double dist) {
    const auto [anchor, heading] = detail::path_at(walk, dist);
    const Vec3 forward{std::sin(heading), 0.0, std::cos(heading)};
    const Vec3 lateral{std::cos(heading), 0.0, -std::sin(heading)};

    const double lscale = 1.0 + body.left_asymmetry;
    const double leg_swing =
        std::asin(std::clamp(walk.step_length_m / (2.0 * body.leg_length()), 0.0, 0.95));
    const double knee_amp = 0.8 * leg_swing;
    const double elbow_bend = 0.35;

    // floor sits at -camera_height so the subject straddles the optical axis
    const Vec3 hip_mid = anchor + Vec3{0.0, body.leg_length() - walk.camera_height, 0.0};
    const Vec3 neck = hip_mid + Vec3{0.0, body.torso, 0.0};

    const double theta_r = leg_swing * std::sin(phi);
    const double theta_l = leg_swing * std::sin(phi + M_PI);
    const double knee_r = knee_amp * 0.5 * (1.0 - std::cos(phi));
    const double knee_l = knee_amp * 0.5 * (1.0 - std::cos(phi + M_PI));
    const double arm_r = walk.arm_swing_rad * walk.right_arm_factor * std::sin(phi + M_PI);
    const double arm_l = walk.arm_swing_rad * std::sin(phi);

    Skeleton3D s;
    auto set = [&](JointId id, const Vec3& p) { s[id] = {p.x, p.y, p.z, true}; };

    set(JointId::Neck, neck);
    const Vec3 r_shoulder = neck + (body.shoulder_width / 2.0) * lateral;
    const Vec3 l_shoulder = neck - (body.shoulder_width / 2.0) * lateral;
    set(JointId::RShoulder, r_shoulder);
    set(JointId::LShoulder, l_shoulder);

    const Vec3 r_elbow = r_shoulder + body.upper_arm * detail::limb_direction(arm_r, forward);
    const Vec3 l_elbow = l_shoulder + lscale * body.upper_arm * detail::limb_direction(arm_l, forward);
    set(JointId::RElbow, r_elbow);
    set(JointId::LElbow, l_elbow);
    set(JointId::RWrist, r_elbow + body.lower_arm * detail::limb_direction(arm_r + elbow_bend, forward));
    set(JointId::LWrist,
        l_elbow + lscale * body.lower_arm * detail::limb_direction(arm_l + elbow_bend, forward));

    const Vec3 r_hip = hip_mid + (body.hip_width / 2.0) * lateral;
    const Vec3 l_hip = hip_mid - (body.hip_width / 2.0) * lateral;
    set(JointId::RHip, r_hip);
    set(JointId::LHip, l_hip);

    const Vec3 r_knee = r_hip + body.upper_leg * detail::limb_direction(theta_r, forward);
    const Vec3 l_knee = l_hip + lscale * body.upper_leg * detail::limb_direction(theta_l, forward);
    set(JointId::RKnee, r_knee);
    set(JointId::LKnee, l_knee);
    set(JointId::RAnkle, r_knee + body.lower_leg * detail::limb_direction(theta_r - knee_r, forward));
    set(JointId::LAnkle,
        l_knee + lscale * body.lower_leg * detail::limb_direction(theta_l - knee_l, forward));
    return s;
}

// Clean walking sequence; segment lengths hold exactly on every frame and
// the ankle-to-ankle distance peaks once per step.
inline std::vector<Skeleton3D> generate_walk(const BodyParams& body, const WalkParams& walk,
                                             int n_frames) {
    body.validate();
    walk.validate();
    if (n_frames < 2) fail(Errc::config, "generate_walk: need at least 2 frames");

    const double stride_hz = walk.step_frequency_hz / 2.0;  // full left-right cycle
    std::vector<Skeleton3D> frames;
    frames.reserve(n_frames);
    for (int t = 0; t < n_frames; ++t) {
        const double time = static_cast<double>(t) / walk.frame_rate_fps;
        const double phi = 2.0 * M_PI * stride_hz * time + walk.phase_offset;
        frames.push_back(walk_pose(body, walk, phi, walk.speed() * time));
    }
    return frames;
}

struct SensorSequence {
    std::vector<Skeleton2D> frames;          // pixel joints with per-joint depth
    std::vector<RangeFrame> range;           // filled when emit_range is set
    std::vector<std::vector<int>> out_of_view;  // joint indices per frame
};

struct SensorOptions {
    bool quantize = false;
    bool emit_range = false;
};

// Inverse projection onto the sensor. Joints behind the camera or outside
// the pixel grid are reported out of view and come out missing.
inline SensorSequence project_to_sensor(const std::vector<Skeleton3D>& frames,
                                        const CameraModel& cam, const SensorOptions& opts = {}) {
    cam.validate();
    SensorSequence out;
    out.frames.resize(frames.size());
    out.out_of_view.resize(frames.size());
    if (opts.emit_range) out.range.assign(frames.size(), RangeFrame::uniform(cam.pixels_x, cam.pixels_y, 0.0));

    for (std::size_t t = 0; t < frames.size(); ++t) {
        for (int j = 0; j < kJointCount; ++j) {
            const Joint3D& joint = frames[t].joints[j];
            if (!joint.present) continue;
            if (joint.z <= 0.0) {
                out.out_of_view[t].push_back(j);
                continue;
            }
            double px = cam.center_x() + world_to_pixel_offset(joint.x, joint.z, cam.pixels_x, cam.aov_x);
            double py = cam.center_y() + world_to_pixel_offset(joint.y, joint.z, cam.pixels_y, cam.aov_y);
            if (px < 0.0 || px >= cam.pixels_x || py < 0.0 || py >= cam.pixels_y) {
                out.out_of_view[t].push_back(j);
                continue;
            }
            if (opts.quantize) {
                px = std::min(std::lround(px), static_cast<long>(cam.pixels_x - 1));
                py = std::min(std::lround(py), static_cast<long>(cam.pixels_y - 1));
            }
            out.frames[t].joints[j] = {px, py, true, joint.z};
            if (opts.emit_range)
                out.range[t].at(static_cast<int>(std::lround(px)), static_cast<int>(std::lround(py))) =
                    joint.z;
        }
    }
    return out;
}

struct CorruptionSpec {
    double spike_prob = 0.0;        // per joint-frame
    double spike_scale = 5.0;       // multiples of the per-row std
    double missing_joint_prob = 0.0;  // per joint-frame
    double missing_frame_prob = 0.0;  // per frame
    std::uint64_t seed = 1;

    void validate() const {
        for (double p : {spike_prob, missing_joint_prob, missing_frame_prob})
            if (!(p >= 0.0 && p <= 1.0)) fail(Errc::config, "corruption: probabilities must be in [0, 1]");
        if (spike_scale < 0.0) fail(Errc::config, "corruption: spike_scale must be >= 0");
    }
};

enum class CorruptionLabel : std::uint8_t { clean = 0, spiked = 1, dropped = 2 };

struct CorruptionLabels {
    int frames = 0;
    std::vector<CorruptionLabel> label;  // frames x joints

    CorruptionLabel at(int t, int joint) const {
        return label[static_cast<std::size_t>(t) * kJointCount + joint];
    }
    CorruptionLabel& at(int t, int joint) {
        return label[static_cast<std::size_t>(t) * kJointCount + joint];
    }

    int count(CorruptionLabel kind) const {
        int c = 0;
        for (auto l : label) c += l == kind;
        return c;
    }
};

namespace detail {

inline double canonical_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Per-axis std of each joint over the present frames, floored at 5 cm so
// spikes displace even perfectly static axes.
inline std::array<std::array<double, 3>, kJointCount> joint_axis_std(
    const std::vector<Skeleton3D>& frames) {
    std::array<std::array<double, 3>, kJointCount> out{};
    for (int j = 0; j < kJointCount; ++j) {
        for (int axis = 0; axis < 3; ++axis) {
            double sum = 0.0, sum2 = 0.0;
            int n = 0;
            for (const auto& f : frames) {
                if (!f.joints[j].present) continue;
                const double v = axis == 0 ? f.joints[j].x : axis == 1 ? f.joints[j].y : f.joints[j].z;
                sum += v;
                sum2 += v * v;
                ++n;
            }
            double sd = 0.0;
            if (n > 1) {
                const double m = sum / n;
                sd = std::sqrt(std::max(0.0, (sum2 - n * m * m) / (n - 1)));
            }
            out[j][axis] = std::max(sd, 0.05);
        }
    }
    return out;
}

}  // namespace detail

// Applies frame drops, joint dropouts and coordinate spikes in a fixed
// draw order (frame, then joint, then spike axes), deterministic given the
// seed. Labels record exactly what happened to every joint-frame.
inline std::pair<std::vector<Skeleton3D>, CorruptionLabels> corrupt(
    const std::vector<Skeleton3D>& frames, const CorruptionSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    const auto sigma = detail::joint_axis_std(frames);

    std::vector<Skeleton3D> out = frames;
    CorruptionLabels labels;
    labels.frames = static_cast<int>(frames.size());
    labels.label.assign(static_cast<std::size_t>(labels.frames) * kJointCount,
                        CorruptionLabel::clean);

    for (int t = 0; t < labels.frames; ++t) {
        const bool drop_frame = detail::canonical_double(rng) < spec.missing_frame_prob;
        for (int j = 0; j < kJointCount; ++j) {
            Joint3D& joint = out[t].joints[j];
            if (drop_frame) {
                joint = Joint3D{};
                labels.at(t, j) = CorruptionLabel::dropped;
                continue;
            }
            if (detail::canonical_double(rng) < spec.missing_joint_prob) {
                joint = Joint3D{};
                labels.at(t, j) = CorruptionLabel::dropped;
                continue;
            }
            if (detail::canonical_double(rng) < spec.spike_prob && joint.present) {
                joint.x += (rng() & 1u ? 1.0 : -1.0) * spec.spike_scale * sigma[j][0];
                joint.y += (rng() & 1u ? 1.0 : -1.0) * spec.spike_scale * sigma[j][1];
                joint.z += (rng() & 1u ? 1.0 : -1.0) * spec.spike_scale * sigma[j][2];
                labels.at(t, j) = CorruptionLabel::spiked;
            }
        }
    }
    return {std::move(out), labels};
}

// Ten synthetic subjects with distinct geometry and gait dynamics; these
// are the fixture bodies used across the test and evaluation suites.
struct SubjectSpec {
    std::string name;
    BodyParams body;
    double step_frequency_hz;
    double arm_swing_rad;
    double step_length_m;
};

inline std::vector<SubjectSpec> default_subjects() {
    //                      shoulders hips  torso  u.arm  l.arm  u.leg  l.leg  asym
    return {
        {"s01", {0.345, 0.290, 0.500, 0.270, 0.235, 0.410, 0.385, 0.000}, 1.95, 0.42, 0.44},
        {"s02", {0.370, 0.305, 0.525, 0.285, 0.245, 0.430, 0.400, 0.010}, 1.80, 0.55, 0.50},
        {"s03", {0.395, 0.320, 0.550, 0.300, 0.255, 0.450, 0.415, 0.000}, 2.10, 0.35, 0.47},
        {"s04", {0.420, 0.335, 0.575, 0.315, 0.270, 0.470, 0.435, -0.010}, 1.70, 0.60, 0.55},
        {"s05", {0.355, 0.340, 0.540, 0.280, 0.240, 0.495, 0.455, 0.000}, 1.60, 0.48, 0.58},
        {"s06", {0.410, 0.300, 0.590, 0.320, 0.275, 0.440, 0.405, 0.015}, 2.00, 0.40, 0.46},
        {"s07", {0.380, 0.315, 0.510, 0.295, 0.250, 0.480, 0.445, 0.000}, 1.85, 0.52, 0.53},
        {"s08", {0.430, 0.350, 0.600, 0.330, 0.285, 0.500, 0.465, 0.000}, 1.65, 0.45, 0.60},
        {"s09", {0.340, 0.280, 0.560, 0.265, 0.225, 0.420, 0.390, -0.015}, 2.20, 0.38, 0.42},
        {"s10", {0.400, 0.325, 0.535, 0.305, 0.260, 0.460, 0.425, 0.005}, 1.75, 0.58, 0.52},
    };
}

}  // namespace gait
