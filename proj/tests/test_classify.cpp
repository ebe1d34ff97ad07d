#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "gait/classify.hpp"
#include "reference/qp_reference.hpp"

using namespace gait;

TEST_CASE("rbf kernel values") {
    const std::vector<double> a{1.0, 2.0, 3.0};
    CHECK(rbf_kernel(a, a, 0.7) == 1.0);

    const std::vector<double> b{1.0, 2.0, 4.0};  // distance^2 = 1
    CHECK(rbf_kernel(a, b, 1.0) == Catch::Approx(std::exp(-1.0)));
    CHECK(rbf_kernel(a, b, 500.0) < 1e-100);
}

TEST_CASE("rbf kernel is symmetric and in (0, 1]") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> d(0.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> a(6), b(6);
        for (auto& v : a) v = d(rng);
        for (auto& v : b) v = d(rng);
        const double kab = rbf_kernel(a, b, 0.3);
        CHECK(kab == rbf_kernel(b, a, 0.3));
        CHECK(kab > 0.0);
        CHECK(kab <= 1.0);
    }
}

namespace {

Dataset two_blob_dataset(int per_class, double separation, std::uint64_t seed, int classes = 2,
                         int dim = 4) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    Dataset data;
    std::vector<double> rec(dim);
    for (int c = 0; c < classes; ++c) {
        for (int i = 0; i < per_class; ++i) {
            for (int d = 0; d < dim; ++d)
                rec[d] = noise(rng) + separation * ((c >> (d % 3)) & 1 ? 1.0 : -1.0) + c * separation;
            data.add(rec, c, c * 1000 + i, i % 2 ? "a" : "b");
        }
    }
    return data;
}

}  // namespace

TEST_CASE("two separated points become support vectors and classify") {
    Dataset data;
    data.add(std::vector<double>{0.0, 0.0}, 0, 0, "a");
    data.add(std::vector<double>{0.1, 0.0}, 0, 1, "b");
    data.add(std::vector<double>{5.0, 5.0}, 1, 2, "a");
    data.add(std::vector<double>{5.1, 5.0}, 1, 3, "b");

    const SvmModel model = train_svm(data, SvmParams{});
    REQUIRE(model.pairs.size() == 1);
    CHECK(model.pairs[0].coef.size() >= 2);
    CHECK(predict(model, data) == data.y);
}

TEST_CASE("well-separated gaussian blobs train to perfect accuracy") {
    const Dataset data = two_blob_dataset(50, 10.0, 77, 10, 6);
    SvmParams params;
    const SvmModel model = train_svm(data, params);
    const std::vector<int> pred = predict(model, data);
    int correct = 0;
    for (int i = 0; i < data.size(); ++i) correct += pred[i] == data.y[i];
    CHECK(correct == data.size());
}

TEST_CASE("SMO satisfies the box and equality constraints") {
    const Dataset data = two_blob_dataset(20, 3.0, 13, 3, 4);
    const SvmModel model = train_svm(data, SvmParams{});
    for (const PairModel& p : model.pairs) {
        double sum = 0.0;
        for (double c : p.coef) {
            CHECK(std::abs(c) <= model.C + 1e-8);
            sum += c;
        }
        CHECK(std::abs(sum) < 1e-8);
        CHECK(p.converged);
    }
}

TEST_CASE("SMO dual objective matches the dense QP oracle") {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int trial = 0; trial < 8; ++trial) {
        // 12-point toy problem, 2 classes, slight overlap
        Dataset data;
        std::vector<double> rec(3);
        for (int i = 0; i < 12; ++i) {
            const int label = i < 6 ? 0 : 1;
            for (double& v : rec) v = noise(rng) + (label ? 1.2 : -1.2);
            data.add(rec, label, i, i % 2 ? "a" : "b");
        }
        SvmParams params;
        params.C = 2.0;
        params.tol = 1e-6;
        params.max_passes = 2000;
        params.seed = trial + 1;
        const SvmModel model = train_svm(data, params);
        REQUIRE(model.pairs.size() == 1);

        // rebuild the dual in standardized space for the oracle
        gait_test::QpProblem qp;
        qp.c = params.C;
        std::vector<std::vector<double>> z;
        for (int i = 0; i < 12; ++i) {
            std::vector<double> v(data.record(i).begin(), data.record(i).end());
            model.standardizer.apply(v);
            z.push_back(v);
            qp.y.push_back(i < 6 ? +1 : -1);
        }
        qp.q.assign(12, std::vector<double>(12));
        for (int i = 0; i < 12; ++i)
            for (int j = 0; j < 12; ++j)
                qp.q[i][j] = qp.y[i] * qp.y[j] * rbf_kernel(z[i], z[j], model.gamma);

        const std::vector<double> alpha = gait_test::qp_solve(qp);
        const double want = gait_test::qp_objective(qp, alpha);
        CHECK(model.pairs[0].dual_objective == Catch::Approx(want).margin(1e-4));
    }
}

TEST_CASE("prediction on a training support vector returns its own label") {
    Dataset data;
    data.add(std::vector<double>{0.0, 0.0}, 3, 0, "a");
    data.add(std::vector<double>{0.3, 0.1}, 3, 1, "b");
    data.add(std::vector<double>{7.0, 7.0}, 9, 2, "a");
    data.add(std::vector<double>{7.3, 7.1}, 9, 3, "b");
    const SvmModel model = train_svm(data, SvmParams{});
    CHECK(predict_one(model, data.record(0)) == 3);
    CHECK(predict_one(model, data.record(2)) == 9);
}

TEST_CASE("predict rejects dimension mismatches") {
    const Dataset data = two_blob_dataset(5, 8.0, 3);
    const SvmModel model = train_svm(data, SvmParams{});
    try {
        predict_one(model, std::vector<double>{1.0});
        FAIL("expected invalid_input");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::invalid_input);
    }
}

TEST_CASE("degenerate classes are rejected") {
    Dataset data;
    data.add(std::vector<double>{0.0}, 0, 0, "a");
    data.add(std::vector<double>{1.0}, 0, 1, "b");
    data.add(std::vector<double>{9.0}, 1, 2, "a");
    try {
        train_svm(data, SvmParams{});
        FAIL("expected invalid_dataset");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::invalid_dataset);
    }
}

TEST_CASE("standardizer centers and scales the training set") {
    const Dataset data = two_blob_dataset(40, 2.0, 8);
    const Standardizer st = Standardizer::fit(data.x, data.size(), data.dim);
    for (int d = 0; d < data.dim; ++d) {
        double sum = 0.0, sum2 = 0.0;
        for (int i = 0; i < data.size(); ++i) {
            std::vector<double> v(data.record(i).begin(), data.record(i).end());
            st.apply(v);
            sum += v[d];
            sum2 += v[d] * v[d];
        }
        const double m = sum / data.size();
        CHECK(std::abs(m) < 1e-9);
        CHECK(std::sqrt((sum2 - data.size() * m * m) / (data.size() - 1)) == Catch::Approx(1.0));
    }
}

namespace {

Dataset sequence_dataset(const std::vector<std::tuple<int, std::string, int>>& seqs) {
    // (subject, pattern, records per sequence)
    Dataset data;
    int seq_id = 0;
    for (const auto& [subject, pattern, count] : seqs) {
        for (int r = 0; r < count; ++r)
            data.add(std::vector<double>{static_cast<double>(subject), static_cast<double>(r)},
                     subject, seq_id, pattern);
        ++seq_id;
    }
    return data;
}

}  // namespace

TEST_CASE("split holds out one pattern per subject") {
    std::vector<std::tuple<int, std::string, int>> seqs;
    for (int s = 0; s < 4; ++s) {
        seqs.emplace_back(s, "fb", 5);
        seqs.emplace_back(s, "diamond", 5);
        seqs.emplace_back(s, "diamond_stick", 5);
        seqs.emplace_back(s, "fb", 5);
    }
    const Dataset data = sequence_dataset(seqs);
    const SplitResult split = split_by_pattern(data, 0.75);

    for (int i : split.test_indices) {
        const int subject = data.y[i];
        REQUIRE(split.held_out_pattern.count(subject));
        const std::string& held = split.held_out_pattern.at(subject);
        CHECK(data.pattern[i] == held);
    }
    for (int i : split.train_indices) {
        const int subject = data.y[i];
        if (split.held_out_pattern.count(subject))
            CHECK(data.pattern[i] != split.held_out_pattern.at(subject));
    }
}

TEST_CASE("split of 34 sequences at 75% trains on 25 or 26") {
    std::vector<std::tuple<int, std::string, int>> seqs;
    for (int s = 0; s < 10; ++s) {
        seqs.emplace_back(s, "fb", 2);
        seqs.emplace_back(s, "d", 2);
        seqs.emplace_back(s, "ds", 2);
        if (s >= 6) seqs.emplace_back(s, "fb", 2);  // 4 subjects have an extra sequence
    }
    REQUIRE(seqs.size() == 34);
    const Dataset data = sequence_dataset(seqs);
    const SplitResult split = split_by_pattern(data, 0.75);
    const int train_seqs = static_cast<int>(split.train_sequences.size());
    CHECK((train_seqs == 25 || train_seqs == 26));
}

TEST_CASE("split rejects single-pattern subjects") {
    std::vector<std::tuple<int, std::string, int>> seqs = {
        {0, "fb", 3}, {0, "fb", 3}, {1, "fb", 3}, {1, "d", 3}};
    const Dataset data = sequence_dataset(seqs);
    try {
        split_by_pattern(data, 0.75);
        FAIL("expected config error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::config);
    }
}

TEST_CASE("evaluate on perfect predictions") {
    const EvalReport rep = evaluate({1, 2, 3, 1}, {1, 2, 3, 1});
    CHECK(rep.accuracy == 1.0);
    CHECK(rep.macro_f == 1.0);
}

TEST_CASE("evaluate computes per-class f-scores") {
    // binary, everything predicted as class 0, half the truth is class 1
    const EvalReport rep = evaluate({0, 0, 0, 0}, {0, 0, 1, 1});
    CHECK(rep.accuracy == 0.5);
    REQUIRE(rep.per_class.size() == 2);
    CHECK(rep.per_class[0].f_score == Catch::Approx(2.0 / 3.0));
    CHECK(rep.per_class[1].f_score == 0.0);
    CHECK(rep.macro_f == Catch::Approx(1.0 / 3.0));
}

TEST_CASE("evaluate reports classes absent from the truth") {
    const EvalReport rep = evaluate({0, 5}, {0, 0});
    REQUIRE(rep.excluded_classes.size() == 1);
    CHECK(rep.excluded_classes[0] == 5);
}

TEST_CASE("evaluate is invariant under consistent relabeling") {
    std::mt19937_64 rng(6);
    std::vector<int> pred(60), truth(60);
    for (int i = 0; i < 60; ++i) {
        pred[i] = static_cast<int>(rng() % 4);
        truth[i] = static_cast<int>(rng() % 4);
    }
    const EvalReport base = evaluate(pred, truth);
    const int perm[4] = {2, 0, 3, 1};
    std::vector<int> pred2(60), truth2(60);
    for (int i = 0; i < 60; ++i) {
        pred2[i] = perm[pred[i]];
        truth2[i] = perm[truth[i]];
    }
    const EvalReport mapped = evaluate(pred2, truth2);
    CHECK(mapped.accuracy == base.accuracy);
    CHECK(mapped.macro_f == Catch::Approx(base.macro_f));
}

TEST_CASE("evaluate rejects mismatched lengths") {
    try {
        evaluate({1}, {1, 2});
        FAIL("expected invalid_input");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::invalid_input);
    }
}
