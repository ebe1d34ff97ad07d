#pragma once

// Pinhole projection of 2-D joint detections plus range data into
// real-world coordinates:
//
//   world = (2 / n_pixels) * tan(aov / 2) * pixel_offset * depth
//
// Pixel offsets are measured from the image center (pixels/2, pixels/2);
// depth is the range sample at the joint. The z coordinate of a projected
// joint is the depth itself.

#include <cmath>
#include <vector>

#include "gait/common.hpp"
#include "gait/skeleton.hpp"

namespace gait {

struct CameraModel {
    int pixels_x = 128;
    int pixels_y = 128;
    double aov_x = 0.5236;  // radians
    double aov_y = 0.5236;

    void validate() const {
        if (pixels_x < 1 || pixels_y < 1) fail(Errc::config, "camera: pixel counts must be >= 1");
        if (!(aov_x > 0.0 && aov_x < M_PI) || !(aov_y > 0.0 && aov_y < M_PI))
            fail(Errc::config, "camera: angle of view must be in (0, pi)");
    }

    double center_x() const { return static_cast<double>(pixels_x) / 2.0; }
    double center_y() const { return static_cast<double>(pixels_y) / 2.0; }
};

// Range image; depth in meters, 0 encodes no return.
struct RangeFrame {
    int width = 0;
    int height = 0;
    std::vector<double> depth;  // row-major, height*width

    static RangeFrame uniform(int w, int h, double d) {
        RangeFrame r{w, h, std::vector<double>(static_cast<std::size_t>(w) * h, d)};
        return r;
    }

    double at(int x, int y) const { return depth[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return depth[static_cast<std::size_t>(y) * width + x]; }

    // Nearest-pixel sample, clamped to the grid. No bilinear interpolation:
    // depth is discontinuous at silhouette edges.
    double sample(double px, double py) const {
        int x = static_cast<int>(std::lround(px));
        int y = static_cast<int>(std::lround(py));
        x = std::clamp(x, 0, width - 1);
        y = std::clamp(y, 0, height - 1);
        return at(x, y);
    }
};

// One world coordinate from a signed pixel offset and a depth sample.
inline double project_coordinate(double pixel_offset, double depth, int n_pixels, double aov) {
    if (!std::isfinite(pixel_offset) || !std::isfinite(depth) || !std::isfinite(aov))
        fail(Errc::invalid_input, "project_coordinate: non-finite input");
    if (n_pixels < 1) fail(Errc::invalid_input, "project_coordinate: n_pixels must be >= 1");
    if (!(aov > 0.0 && aov < M_PI)) fail(Errc::invalid_input, "project_coordinate: aov out of (0, pi)");
    if (depth <= 0.0) fail(Errc::invalid_depth, "project_coordinate: depth must be > 0");
    return (2.0 / static_cast<double>(n_pixels)) * std::tan(aov / 2.0) * pixel_offset * depth;
}

// Inverse of project_coordinate; used when synthesizing sensor data.
inline double world_to_pixel_offset(double world, double depth, int n_pixels, double aov) {
    if (depth <= 0.0) fail(Errc::invalid_depth, "world_to_pixel_offset: depth must be > 0");
    return world / ((2.0 / static_cast<double>(n_pixels)) * std::tan(aov / 2.0) * depth);
}

namespace detail {

inline Joint3D project_joint(const Joint2D& j, double depth, const CameraModel& cam) {
    Joint3D out;
    if (!j.present || depth <= 0.0) return out;  // no detection or no lidar return
    out.x = project_coordinate(j.x - cam.center_x(), depth, cam.pixels_x, cam.aov_x);
    out.y = project_coordinate(j.y - cam.center_y(), depth, cam.pixels_y, cam.aov_y);
    out.z = depth;
    out.present = true;
    return out;
}

}  // namespace detail

// Projects every present joint using the range frame sampled at the
// joint's nearest pixel. Joints whose range sample is 0 come out missing.
// Present joints outside the sensor grid are treated as out of view.
inline Skeleton3D project_skeleton(const Skeleton2D& frame, const RangeFrame& range,
                                   const CameraModel& cam) {
    cam.validate();
    if (range.width != cam.pixels_x || range.height != cam.pixels_y)
        fail(Errc::config, "project_skeleton: range frame dimensions do not match the camera");
    Skeleton3D out;
    for (int k = 0; k < kJointCount; ++k) {
        const Joint2D& j = frame.joints[k];
        if (!j.present) continue;
        if (j.x < 0.0 || j.x >= cam.pixels_x || j.y < 0.0 || j.y >= cam.pixels_y) continue;
        out.joints[k] = detail::project_joint(j, range.sample(j.x, j.y), cam);
    }
    return out;
}

// Per-joint-depth variant for wire records that carry a depth next to each
// joint instead of referencing a range frame.
inline Skeleton3D project_skeleton(const Skeleton2D& frame, const CameraModel& cam) {
    cam.validate();
    Skeleton3D out;
    for (int k = 0; k < kJointCount; ++k) {
        const Joint2D& j = frame.joints[k];
        if (!j.present) continue;
        out.joints[k] = detail::project_joint(j, j.depth, cam);
    }
    return out;
}

}  // namespace gait
