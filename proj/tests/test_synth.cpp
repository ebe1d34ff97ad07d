#include <cmath>
#include <set>

#include <catch2/catch_amalgamated.hpp>

#include "gait/features.hpp"
#include "gait/synth.hpp"

using namespace gait;

TEST_CASE("zero swing and step produce a static skeleton") {
    WalkParams walk;
    walk.step_length_m = 0.0;
    walk.arm_swing_rad = 0.0;
    const auto frames = generate_walk(BodyParams{}, walk, 25);
    const LengthFeatures first = length_features(frames.front());
    for (const Skeleton3D& f : frames) {
        const LengthFeatures cur = length_features(f);
        for (int i = 0; i < kLengthFeatureCount; ++i) CHECK(cur[i] == first[i]);
        for (int j = 0; j < kJointCount; ++j) {
            CHECK(f.joints[j].x == frames.front().joints[j].x);
            CHECK(f.joints[j].z == frames.front().joints[j].z);
        }
    }
}

TEST_CASE("segment lengths hold exactly on every frame") {
    BodyParams body;
    body.left_asymmetry = 0.02;
    WalkParams walk;
    walk.path = WalkPath::diamond;
    const auto frames = generate_walk(body, walk, 60);
    const double lscale = 1.0 + body.left_asymmetry;
    for (const Skeleton3D& s : frames) {
        CHECK(distance(s.at(JointId::RHip), s.at(JointId::RKnee)) ==
              Catch::Approx(body.upper_leg).margin(1e-9));
        CHECK(distance(s.at(JointId::LHip), s.at(JointId::LKnee)) ==
              Catch::Approx(lscale * body.upper_leg).margin(1e-9));
        CHECK(distance(s.at(JointId::RKnee), s.at(JointId::RAnkle)) ==
              Catch::Approx(body.lower_leg).margin(1e-9));
        CHECK(distance(s.at(JointId::RShoulder), s.at(JointId::RElbow)) ==
              Catch::Approx(body.upper_arm).margin(1e-9));
        CHECK(distance(s.at(JointId::RElbow), s.at(JointId::RWrist)) ==
              Catch::Approx(body.lower_arm).margin(1e-9));
        CHECK(distance(s.at(JointId::RHip), s.at(JointId::LHip)) ==
              Catch::Approx(body.hip_width).margin(1e-9));
        CHECK(distance(s.at(JointId::RShoulder), s.at(JointId::LShoulder)) ==
              Catch::Approx(body.shoulder_width).margin(1e-9));
    }
}

TEST_CASE("ankle distance peaks once per step period") {
    WalkParams walk;
    walk.step_frequency_hz = 2.0;
    walk.frame_rate_fps = 40.0;
    walk.phase_offset = 0.0;
    const int frames_per_step = 20;  // fps / step frequency
    const auto frames = generate_walk(BodyParams{}, walk, 4 * frames_per_step + 1);

    std::vector<double> dist;
    for (const auto& f : frames) dist.push_back(distance(f.at(JointId::RAnkle), f.at(JointId::LAnkle)));
    int peaks = 0;
    for (std::size_t t = 1; t + 1 < dist.size(); ++t)
        if (dist[t] > dist[t - 1] && dist[t] >= dist[t + 1]) ++peaks;
    CHECK(peaks == 4);
}

TEST_CASE("sensor round trip is exact without quantization") {
    CameraModel cam{128, 128, 0.5236, 0.5236};
    const auto frames = generate_walk(BodyParams{}, WalkParams{}, 40);
    const SensorSequence sensor = project_to_sensor(frames, cam);
    for (std::size_t t = 0; t < frames.size(); ++t) {
        REQUIRE(sensor.out_of_view[t].empty());
        const Skeleton3D back = project_skeleton(sensor.frames[t], cam);
        for (int j = 0; j < kJointCount; ++j) {
            REQUIRE(back.joints[j].present);
            CHECK(std::abs(back.joints[j].x - frames[t].joints[j].x) < 1e-6);
            CHECK(std::abs(back.joints[j].y - frames[t].joints[j].y) < 1e-6);
            CHECK(std::abs(back.joints[j].z - frames[t].joints[j].z) < 1e-6);
        }
    }
}

TEST_CASE("quantized round trip stays within one pixel footprint") {
    CameraModel cam{128, 128, 0.5236, 0.5236};
    const auto frames = generate_walk(BodyParams{}, WalkParams{}, 40);
    SensorOptions opts;
    opts.quantize = true;
    const SensorSequence sensor = project_to_sensor(frames, cam, opts);
    for (std::size_t t = 0; t < frames.size(); ++t) {
        const Skeleton3D back = project_skeleton(sensor.frames[t], cam);
        for (int j = 0; j < kJointCount; ++j) {
            if (!back.joints[j].present) continue;
            const double depth = frames[t].joints[j].z;
            const double foot_x = (2.0 / cam.pixels_x) * std::tan(cam.aov_x / 2.0) * depth;
            const double foot_y = (2.0 / cam.pixels_y) * std::tan(cam.aov_y / 2.0) * depth;
            CHECK(std::abs(back.joints[j].x - frames[t].joints[j].x) <= foot_x);
            CHECK(std::abs(back.joints[j].y - frames[t].joints[j].y) <= foot_y);
        }
    }
}

TEST_CASE("range-frame emission supports grid projection") {
    CameraModel cam{128, 128, 0.5236, 0.5236};
    const auto frames = generate_walk(BodyParams{}, WalkParams{}, 10);
    SensorOptions opts;
    opts.quantize = true;
    opts.emit_range = true;
    const SensorSequence sensor = project_to_sensor(frames, cam, opts);
    REQUIRE(sensor.range.size() == frames.size());
    for (std::size_t t = 0; t < frames.size(); ++t) {
        const Skeleton3D back = project_skeleton(sensor.frames[t], sensor.range[t], cam);
        for (int j = 0; j < kJointCount; ++j)
            if (sensor.frames[t].joints[j].present) CHECK(back.joints[j].present);
    }
}

TEST_CASE("subjects outside the frustum are reported out of view") {
    CameraModel cam{64, 64, 0.4, 0.4};
    std::vector<Skeleton3D> frames = generate_walk(BodyParams{}, WalkParams{}, 5);
    for (auto& f : frames)
        for (auto& j : f.joints) j.x += 100.0;  // way off axis
    const SensorSequence sensor = project_to_sensor(frames, cam);
    for (std::size_t t = 0; t < frames.size(); ++t) {
        CHECK(sensor.out_of_view[t].size() == kJointCount);
        for (int j = 0; j < kJointCount; ++j) CHECK_FALSE(sensor.frames[t].joints[j].present);
    }
}

TEST_CASE("zero-probability corruption is the identity") {
    const auto frames = generate_walk(BodyParams{}, WalkParams{}, 30);
    CorruptionSpec spec;
    const auto [out, labels] = corrupt(frames, spec);
    CHECK(labels.count(CorruptionLabel::spiked) == 0);
    CHECK(labels.count(CorruptionLabel::dropped) == 0);
    for (std::size_t t = 0; t < frames.size(); ++t)
        for (int j = 0; j < kJointCount; ++j) {
            CHECK(out[t].joints[j].x == frames[t].joints[j].x);
            CHECK(out[t].joints[j].present == frames[t].joints[j].present);
        }
}

TEST_CASE("certain frame drops empty every frame") {
    const auto frames = generate_walk(BodyParams{}, WalkParams{}, 20);
    CorruptionSpec spec;
    spec.missing_frame_prob = 1.0;
    const auto [out, labels] = corrupt(frames, spec);
    for (const auto& f : out)
        for (const auto& j : f.joints) CHECK_FALSE(j.present);
    CHECK(labels.count(CorruptionLabel::dropped) == 20 * kJointCount);
}

TEST_CASE("spike counts stay within binomial bounds") {
    const auto frames = generate_walk(BodyParams{}, WalkParams{}, 500);
    CorruptionSpec spec;
    spec.spike_prob = 0.1;
    spec.seed = 123;
    const auto [out, labels] = corrupt(frames, spec);
    const double n = 500.0 * kJointCount;
    const double mean = n * 0.1;
    const double sigma = std::sqrt(n * 0.1 * 0.9);
    const int spiked = labels.count(CorruptionLabel::spiked);
    CHECK(spiked > mean - 3.0 * sigma);
    CHECK(spiked < mean + 3.0 * sigma);
}

TEST_CASE("labels partition joint-frames") {
    const auto frames = generate_walk(BodyParams{}, WalkParams{}, 100);
    CorruptionSpec spec;
    spec.spike_prob = 0.2;
    spec.missing_joint_prob = 0.15;
    spec.missing_frame_prob = 0.1;
    spec.seed = 9;
    const auto [out, labels] = corrupt(frames, spec);
    const int total = labels.count(CorruptionLabel::clean) + labels.count(CorruptionLabel::spiked) +
                      labels.count(CorruptionLabel::dropped);
    CHECK(total == 100 * kJointCount);
    // dropped joints are missing, spiked/clean joints are present
    for (int t = 0; t < labels.frames; ++t)
        for (int j = 0; j < kJointCount; ++j) {
            const bool present = out[t].joints[j].present;
            CHECK(present == (labels.at(t, j) != CorruptionLabel::dropped));
        }
}

TEST_CASE("corruption is deterministic per seed and varies across seeds") {
    const auto frames = generate_walk(BodyParams{}, WalkParams{}, 80);
    CorruptionSpec spec;
    spec.spike_prob = 0.1;
    spec.missing_joint_prob = 0.1;

    spec.seed = 42;
    const auto [a1, l1] = corrupt(frames, spec);
    const auto [a2, l2] = corrupt(frames, spec);
    CHECK(l1.label == l2.label);
    for (std::size_t t = 0; t < a1.size(); ++t)
        for (int j = 0; j < kJointCount; ++j) CHECK(a1[t].joints[j].x == a2[t].joints[j].x);

    int differing_pairs = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        CorruptionSpec sa = spec, sb = spec;
        sa.seed = 1000 + 2 * s;
        sb.seed = 1001 + 2 * s;
        const auto [xa, la] = corrupt(frames, sa);
        const auto [xb, lb] = corrupt(frames, sb);
        if (la.label != lb.label) ++differing_pairs;
    }
    CHECK(differing_pairs >= 99);
}

TEST_CASE("default subjects are distinct and valid") {
    const auto subjects = default_subjects();
    REQUIRE(subjects.size() == 10);
    std::set<std::string> names;
    for (const auto& s : subjects) {
        s.body.validate();
        names.insert(s.name);
        CHECK(s.step_frequency_hz > 0.0);
    }
    CHECK(names.size() == 10);
}
