#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "gait/cycles.hpp"
#include "gait/synth.hpp"

using namespace gait;

TEST_CASE("ankle distance of a static skeleton is constant") {
    WalkParams walk;
    walk.step_length_m = 0.0;
    walk.arm_swing_rad = 0.0;
    const JointMatrix m = build_joint_matrix(generate_walk(BodyParams{}, walk, 30));
    const std::vector<double> signal = ankle_distance_signal(m);
    for (double v : signal) CHECK(v == Catch::Approx(signal[0]).margin(1e-12));
}

TEST_CASE("coincident ankles give a zero signal") {
    Skeleton3D s;
    for (auto& j : s.joints) j = {1.0, 2.0, 3.0, true};
    const JointMatrix m = build_joint_matrix({s, s});
    for (double v : ankle_distance_signal(m)) CHECK(v == 0.0);
}

TEST_CASE("missing frames yield missing samples, missing rows an error") {
    std::vector<Skeleton3D> frames(10);
    for (auto& f : frames)
        for (auto& j : f.joints) j = {0.5, 0.5, 0.5, true};
    frames[3] = Skeleton3D{};
    const JointMatrix m = build_joint_matrix(frames);
    const std::vector<double> signal = ankle_distance_signal(m);
    CHECK(is_missing(signal[3]));
    CHECK_FALSE(is_missing(signal[4]));

    JointMatrix gone = m;
    for (int axis = 0; axis < 3; ++axis)
        for (int t = 0; t < gone.frames; ++t) {
            gone.at(JointMatrix::row_index(JointId::RAnkle, axis), t) = kMissing;
            gone.at(JointMatrix::row_index(JointId::LAnkle, axis), t) = kMissing;
        }
    try {
        ankle_distance_signal(gone);
        FAIL("expected unavailable_signal");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::unavailable_signal);
    }
}

TEST_CASE("five peaks make two full cycles") {
    // rectified sine: peaks every P frames starting at P/2
    const int period = 20;
    std::vector<double> signal(5 * period + period / 2);
    for (std::size_t t = 0; t < signal.size(); ++t)
        signal[t] = std::abs(std::sin(M_PI * static_cast<double>(t) / period));

    CycleConfig cfg;
    cfg.smooth_window = 3;
    const std::vector<int> peaks = detect_signal_peaks(signal, cfg);
    REQUIRE(peaks.size() == 5);
    const std::vector<CycleSpan> spans = detect_gait_cycles(signal, cfg);
    REQUIRE(spans.size() == 2);
    CHECK(spans[0].start_frame == peaks[0]);
    CHECK(spans[0].end_frame == peaks[2]);
    CHECK(spans[1].start_frame == peaks[2]);
    CHECK(spans[1].end_frame == peaks[4]);
}

TEST_CASE("constant signals yield no cycles") {
    CHECK(detect_gait_cycles(std::vector<double>(200, 1.0), CycleConfig{}).empty());
}

TEST_CASE("half-cycle mode spans adjacent peaks") {
    const int period = 20;
    std::vector<double> signal(5 * period);
    for (std::size_t t = 0; t < signal.size(); ++t)
        signal[t] = std::abs(std::sin(M_PI * static_cast<double>(t) / period));
    CycleConfig cfg;
    cfg.half_cycle = true;
    CHECK(detect_gait_cycles(signal, cfg).size() == 4);
}

TEST_CASE("cycle detection is shift invariant") {
    const int period = 18;
    std::vector<double> signal(220);
    for (std::size_t t = 0; t < signal.size(); ++t)
        signal[t] = std::abs(std::sin(M_PI * static_cast<double>(t) / period)) + 0.05;
    const int shift = 7;
    std::vector<double> shifted(signal.size() + shift, signal[0]);
    for (std::size_t t = 0; t < signal.size(); ++t) shifted[t + shift] = signal[t];

    const auto base = detect_gait_cycles(signal, CycleConfig{});
    const auto moved = detect_gait_cycles(shifted, CycleConfig{});
    REQUIRE(base.size() >= 2);
    REQUIRE(moved.size() == base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        CHECK(moved[i].start_frame == base[i].start_frame + shift);
        CHECK(moved[i].end_frame == base[i].end_frame + shift);
    }
}

TEST_CASE("synthetic walk over four step periods has one cycle per two steps") {
    WalkParams walk;
    walk.step_frequency_hz = 2.0;
    walk.frame_rate_fps = 30.0;
    const int frames = static_cast<int>(4.0 / walk.step_frequency_hz * walk.frame_rate_fps) + 1;
    const JointMatrix m = build_joint_matrix(generate_walk(BodyParams{}, walk, frames));
    const std::vector<double> signal = ankle_distance_signal(m);

    CycleConfig cfg;
    cfg.smooth_window = 3;
    cfg.min_cycle_frames = 8;
    const std::vector<CycleSpan> spans = detect_gait_cycles(signal, cfg);
    CHECK(spans.size() >= 1);
    CHECK(spans.size() <= 2);
}

namespace {

FeatureTable single_column_table(const std::vector<double>& values) {
    FeatureTable t;
    t.kind = FeatureKind::length;
    t.cols = 1;
    for (std::size_t i = 0; i < values.size(); ++i) {
        t.data.push_back(values[i]);
        t.frame_index.push_back(static_cast<int>(i));
    }
    return t;
}

}  // namespace

TEST_CASE("constant feature statistics collapse to the constant") {
    const FeatureTable t = single_column_table(std::vector<double>(12, 4.0));
    const CycleTable out = cycle_statistics(t, {{0, 12}}, StatSet::six);
    REQUIRE(out.rows() == 1);
    const auto rec = out.record(0);
    CHECK(rec[0] == 4.0);  // mean
    CHECK(rec[1] == 0.0);  // std
    CHECK(rec[2] == 4.0);  // max
    CHECK(rec[3] == 4.0);  // median
    CHECK(rec[4] == 4.0);  // q_low
    CHECK(rec[5] == 4.0);  // q_up
}

TEST_CASE("six statistics of 1..5") {
    const FeatureTable t = single_column_table({1, 2, 3, 4, 5});
    const CycleTable out = cycle_statistics(t, {{0, 5}}, StatSet::six);
    REQUIRE(out.rows() == 1);
    const auto rec = out.record(0);
    CHECK(rec[0] == Catch::Approx(3.0));
    CHECK(rec[1] == Catch::Approx(std::sqrt(2.5)));
    CHECK(rec[2] == 5.0);
    CHECK(rec[3] == 3.0);
    CHECK(rec[4] == 2.0);
    CHECK(rec[5] == 4.0);
}

TEST_CASE("three-stat output is an exact prefix slice of six-stat output") {
    std::vector<double> values(40);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::sin(0.3 * i) + 0.01 * i;
    const FeatureTable t = single_column_table(values);
    const std::vector<CycleSpan> spans = {{0, 15}, {15, 33}};
    const CycleTable three = cycle_statistics(t, spans, StatSet::three);
    const CycleTable six = cycle_statistics(t, spans, StatSet::six);
    REQUIRE(three.rows() == six.rows());
    for (int r = 0; r < three.rows(); ++r)
        for (int s = 0; s < 3; ++s) CHECK(three.record(r)[s] == six.record(r)[s]);
}

TEST_CASE("statistics ignore within-span ordering") {
    const FeatureTable fwd = single_column_table({5, 1, 4, 2, 3});
    const FeatureTable rev = single_column_table({3, 2, 4, 1, 5});
    const CycleTable a = cycle_statistics(fwd, {{0, 5}}, StatSet::six);
    const CycleTable b = cycle_statistics(rev, {{0, 5}}, StatSet::six);
    for (int s = 0; s < 6; ++s) CHECK(a.record(0)[s] == b.record(0)[s]);
}

TEST_CASE("spans with fewer than two records are skipped and reported") {
    FeatureTable t;
    t.kind = FeatureKind::length;
    t.cols = 1;
    t.data = {1.0, 2.0};
    t.frame_index = {0, 30};  // nothing inside [5, 20)
    const CycleTable out = cycle_statistics(t, {{5, 20}, {0, 31}}, StatSet::three);
    CHECK(out.rows() == 1);
    REQUIRE(out.skipped_spans.size() == 1);
    CHECK(out.skipped_spans[0] == 0);
}

TEST_CASE("quartile ordering holds within every emitted record") {
    std::vector<double> values(60);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::cos(0.4 * i) * (1.0 + 0.02 * i);
    const FeatureTable t = single_column_table(values);
    const CycleTable out = cycle_statistics(t, {{0, 20}, {20, 40}, {40, 60}}, StatSet::six);
    for (int r = 0; r < out.rows(); ++r) {
        const auto rec = out.record(r);
        CHECK(rec[4] <= rec[3]);
        CHECK(rec[3] <= rec[5]);
        CHECK(rec[5] <= rec[2]);
        CHECK(rec[1] >= 0.0);
    }
}
