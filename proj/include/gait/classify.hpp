#pragma once

// Identification protocol: dataset container, one-vs-one training on top
// of the SMO solver, sequence-level train/test splitting with held-out
// walking patterns, and the accuracy / F-score report.

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "gait/common.hpp"
#include "gait/svm.hpp"

namespace gait {

struct Dataset {
    int dim = 0;
    std::vector<double> x;  // n x dim
    std::vector<int> y;     // class label per record (subject id)
    std::vector<int> sequence;        // sequence id per record
    std::vector<std::string> pattern;  // walking-pattern tag per record

    int size() const { return static_cast<int>(y.size()); }

    std::span<const double> record(int i) const {
        return {x.data() + static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim)};
    }

    void add(std::span<const double> rec, int label, int seq, const std::string& pat) {
        if (dim == 0) dim = static_cast<int>(rec.size());
        if (static_cast<int>(rec.size()) != dim) fail(Errc::invalid_input, "dataset: inconsistent dim");
        x.insert(x.end(), rec.begin(), rec.end());
        y.push_back(label);
        sequence.push_back(seq);
        pattern.push_back(pat);
    }

    Dataset subset(const std::vector<int>& idx) const {
        Dataset out;
        out.dim = dim;
        for (int i : idx) out.add(record(i), y[i], sequence[i], pattern[i]);
        return out;
    }
};

struct TrainWarnings {
    std::vector<std::pair<int, int>> unconverged_pairs;
};

inline SvmModel train_svm(const Dataset& data, const SvmParams& params,
                          TrainWarnings* warnings = nullptr) {
    const int n = data.size();
    if (n == 0) fail(Errc::invalid_dataset, "train_svm: empty dataset");

    std::map<int, std::vector<int>> by_class;
    for (int i = 0; i < n; ++i) by_class[data.y[i]].push_back(i);
    if (by_class.size() < 2) fail(Errc::invalid_dataset, "train_svm: need >= 2 classes");
    for (const auto& [label, idx] : by_class)
        if (idx.size() < 2)
            fail(Errc::invalid_dataset,
                 "train_svm: class " + std::to_string(label) + " has fewer than 2 records");

    SvmModel model;
    model.C = params.C;
    model.gamma = params.gamma > 0.0 ? params.gamma : 1.0 / data.dim;
    model.standardizer = Standardizer::fit(data.x, n, data.dim);
    for (const auto& [label, idx] : by_class) model.classes.push_back(label);

    std::vector<std::vector<double>> zx(n, std::vector<double>(data.dim));
    for (int i = 0; i < n; ++i) {
        auto rec = data.record(i);
        std::copy(rec.begin(), rec.end(), zx[i].begin());
        model.standardizer.apply(zx[i]);
    }

    for (std::size_t a = 0; a < model.classes.size(); ++a) {
        for (std::size_t bcls = a + 1; bcls < model.classes.size(); ++bcls) {
            const int ca = model.classes[a];
            const int cb = model.classes[bcls];
            std::vector<std::vector<double>> px;
            std::vector<int> py;
            for (int i : by_class[ca]) {
                px.push_back(zx[i]);
                py.push_back(+1);
            }
            for (int i : by_class[cb]) {
                px.push_back(zx[i]);
                py.push_back(-1);
            }
            detail::SmoSolver solver(px, py, params.C, model.gamma, params.tol,
                                     mix_seed(params.seed, a * 1000 + bcls));
            const bool converged = solver.solve(params.max_passes);

            PairModel pair;
            pair.class_a = ca;
            pair.class_b = cb;
            pair.bias = solver.b;  // decision f(x) = sum coef*k + bias
            pair.converged = converged;
            pair.dual_objective = solver.dual_objective();
            for (int i = 0; i < static_cast<int>(px.size()); ++i) {
                if (solver.alpha[i] <= 0.0) continue;
                pair.coef.push_back(solver.alpha[i] * py[i]);
                pair.support_vectors.push_back(px[i]);
            }
            if (!converged && warnings) warnings->unconverged_pairs.emplace_back(ca, cb);
            model.pairs.push_back(std::move(pair));
        }
    }
    return model;
}

// One-vs-one majority vote; ties resolved by summed decision values, then
// by the lower class id.
inline int predict_one(const SvmModel& model, std::span<const double> record) {
    if (static_cast<int>(record.size()) != static_cast<int>(model.standardizer.mean.size()))
        fail(Errc::invalid_input, "predict: record dimension does not match the model");
    std::vector<double> z(record.begin(), record.end());
    model.standardizer.apply(z);

    std::map<int, int> votes;
    std::map<int, double> score;
    for (int c : model.classes) {
        votes[c] = 0;
        score[c] = 0.0;
    }
    for (const PairModel& p : model.pairs) {
        const double f = p.decision(z, model.gamma);
        votes[f > 0.0 ? p.class_a : p.class_b] += 1;
        score[p.class_a] += f;
        score[p.class_b] -= f;
    }
    int best = model.classes.front();
    for (int c : model.classes) {
        if (votes[c] > votes[best]) best = c;
        else if (votes[c] == votes[best] && c != best) {
            if (score[c] > score[best]) best = c;
            // equal scores keep the lower id (classes iterate ascending)
        }
    }
    return best;
}

inline std::vector<int> predict(const SvmModel& model, const Dataset& data) {
    std::vector<int> out(data.size());
    for (int i = 0; i < data.size(); ++i) out[i] = predict_one(model, data.record(i));
    return out;
}

struct SequenceInfo {
    int sequence = 0;
    int subject = 0;
    std::string pattern;
};

struct SplitResult {
    std::vector<int> train_indices;  // record indices
    std::vector<int> test_indices;
    std::vector<int> train_sequences;
    std::vector<int> test_sequences;
    std::map<int, std::string> held_out_pattern;  // per subject that contributes tests
};

// Sequence-level split: subjects (in sorted order) hold out one full
// (subject, pattern) group each while the global test budget
// round((1 - train_fraction) * #sequences) is unmet; each picks the
// pattern whose sequence count is closest to its fair share of the
// remaining budget, so the held-out data spreads over subjects. Test
// sequences therefore carry walking patterns their subject never shows at
// training time.
inline SplitResult split_by_pattern(const Dataset& data, double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        fail(Errc::config, "split_by_pattern: train_fraction must be in (0, 1)");

    std::map<int, SequenceInfo> sequences;
    for (int i = 0; i < data.size(); ++i) {
        auto it = sequences.find(data.sequence[i]);
        if (it == sequences.end()) {
            sequences[data.sequence[i]] = {data.sequence[i], data.y[i], data.pattern[i]};
        } else if (it->second.subject != data.y[i] || it->second.pattern != data.pattern[i]) {
            fail(Errc::invalid_dataset, "split_by_pattern: sequence with inconsistent metadata");
        }
    }

    // subject -> pattern -> sequence ids
    std::map<int, std::map<std::string, std::vector<int>>> groups;
    for (const auto& [sid, info] : sequences) groups[info.subject][info.pattern].push_back(sid);
    for (const auto& [subject, pats] : groups)
        if (pats.size() < 2)
            fail(Errc::config, "split_by_pattern: subject " + std::to_string(subject) +
                                   " has fewer than 2 walking patterns");

    const int total = static_cast<int>(sequences.size());
    const int budget = std::max(1, static_cast<int>(std::lround((1.0 - train_fraction) * total)));

    SplitResult split;
    std::set<int> test_seq;
    int taken = 0;
    int subjects_left = static_cast<int>(groups.size());
    for (const auto& [subject, pats] : groups) {
        const int remaining = budget - taken;
        const double fair = static_cast<double>(remaining) / subjects_left;
        --subjects_left;
        if (remaining <= 0) break;

        const std::string* chosen = nullptr;
        int chosen_count = 0;
        for (const auto& [pat, ids] : pats) {
            const int cnt = static_cast<int>(ids.size());
            if (chosen == nullptr || std::abs(cnt - fair) < std::abs(chosen_count - fair) ||
                (std::abs(cnt - fair) == std::abs(chosen_count - fair) && cnt < chosen_count)) {
                chosen = &pat;
                chosen_count = cnt;
            }
        }
        for (int sid : pats.at(*chosen)) test_seq.insert(sid);
        split.held_out_pattern[subject] = *chosen;
        taken += chosen_count;
    }

    for (const auto& [sid, info] : sequences)
        (test_seq.count(sid) ? split.test_sequences : split.train_sequences).push_back(sid);
    for (int i = 0; i < data.size(); ++i)
        (test_seq.count(data.sequence[i]) ? split.test_indices : split.train_indices).push_back(i);
    return split;
}

struct ClassScore {
    int label = 0;
    double accuracy = 0.0;  // recall within the class
    double f_score = 0.0;
};

struct EvalReport {
    double accuracy = 0.0;
    double macro_f = 0.0;
    std::vector<ClassScore> per_class;
    std::vector<int> excluded_classes;  // predicted but absent from truth
};

inline EvalReport evaluate(const std::vector<int>& pred, const std::vector<int>& truth) {
    if (pred.size() != truth.size()) fail(Errc::invalid_input, "evaluate: length mismatch");
    if (pred.empty()) fail(Errc::invalid_input, "evaluate: empty inputs");

    EvalReport rep;
    int correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == truth[i];
    rep.accuracy = static_cast<double>(correct) / pred.size();

    std::set<int> truth_classes(truth.begin(), truth.end());
    std::set<int> all_classes = truth_classes;
    all_classes.insert(pred.begin(), pred.end());
    for (int c : all_classes)
        if (!truth_classes.count(c)) rep.excluded_classes.push_back(c);

    double f_sum = 0.0;
    for (int c : truth_classes) {
        int tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            if (truth[i] == c && pred[i] == c) ++tp;
            if (truth[i] != c && pred[i] == c) ++fp;
            if (truth[i] == c && pred[i] != c) ++fn;
        }
        const double precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
        const double recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
        const double f =
            precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
        rep.per_class.push_back({c, recall, f});
        f_sum += f;
    }
    rep.macro_f = f_sum / static_cast<double>(truth_classes.size());
    return rep;
}

}  // namespace gait
