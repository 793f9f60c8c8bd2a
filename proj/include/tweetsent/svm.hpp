#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "tweetsent/features.hpp"
#include "tweetsent/text.hpp"

namespace tweetsent {

struct TrainOptions {
    double c = 0.5;
    double tol = 1e-3;
    int max_epochs = 1000;
    uint64_t seed = 42;
};

struct TrainInfo {
    int epochs = 0;
    bool converged = false;
    double max_violation = 0.0;          // last epoch's max projected-gradient violation
    double dual_objective = 0.0;         // sum(alpha) - 0.5*||w_aug||^2
    std::vector<double> epoch_objectives;
    std::vector<double> alphas;          // final dual variables
};

struct BinarySvm {
    std::vector<double> weights;  // length D (feature space dimension)
    double bias = 0.0;
    double c = 0.5;

    double decision(const SparseVector& x) const {
        if (x.dim != weights.size())
            throw std::invalid_argument("decision: vector dim " + std::to_string(x.dim) +
                                        " does not match model dim " + std::to_string(weights.size()));
        return x.dot(weights) + bias;
    }
};

// Dual coordinate descent for the L1-loss (hinge) L2-regularized SVM:
//
//   min_alpha  0.5 alpha^T Q alpha - e^T alpha,  0 <= alpha_i <= C,
//   Q_ij = y_i y_j x_i . x_j
//
// over bias-augmented vectors (a constant 1 appended to every x, so the bias
// is regularized together with the weights). Coordinates are visited in a
// freshly shuffled order each epoch from a seeded generator; training stops
// when the largest projected-gradient violation of an epoch drops below tol.
// The primal weights are recovered as w = sum_i alpha_i y_i x_i.
inline BinarySvm train_binary(std::span<const SparseVector> xs, std::span<const int> ys,
                              const TrainOptions& opts, TrainInfo* info = nullptr) {
    if (xs.empty()) throw std::invalid_argument("train_binary: empty training set");
    if (xs.size() != ys.size())
        throw std::invalid_argument("train_binary: " + std::to_string(xs.size()) + " vectors vs " +
                                    std::to_string(ys.size()) + " labels");
    if (!(opts.c > 0.0)) throw std::invalid_argument("train_binary: C must be positive");
    const size_t n = xs.size();
    const uint32_t dim = xs[0].dim;
    bool has_pos = false, has_neg = false;
    for (size_t i = 0; i < n; ++i) {
        if (xs[i].dim != dim)
            throw std::invalid_argument("train_binary: vector dim " + std::to_string(xs[i].dim) +
                                        " does not match " + std::to_string(dim));
        if (ys[i] == 1) has_pos = true;
        else if (ys[i] == -1) has_neg = true;
        else throw std::invalid_argument("train_binary: labels must be +1 or -1");
    }
    if (!has_pos || !has_neg)
        throw std::invalid_argument("train_binary: training labels contain a single class");

    // Diagonal of Q for the augmented vectors: ||x_i||^2 + 1.
    std::vector<double> qd(n);
    for (size_t i = 0; i < n; ++i) {
        double s = 1.0;
        for (const auto& [col, val] : xs[i].entries) s += val * val;
        qd[i] = s;
    }

    std::vector<double> w(dim + 1, 0.0);  // w[dim] is the bias coordinate
    std::vector<double> alpha(n, 0.0);
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::mt19937_64 rng(opts.seed);

    TrainInfo local;
    TrainInfo& ti = info ? *info : local;
    ti = TrainInfo{};

    int epoch = 0;
    for (; epoch < opts.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double max_violation = 0.0;
        for (size_t s = 0; s < n; ++s) {
            const size_t i = order[s];
            const double yi = ys[i];
            const SparseVector& xi = xs[i];

            double g = w[dim];
            for (const auto& [col, val] : xi.entries) g += w[col] * val;
            g = yi * g - 1.0;

            double pg = g;
            if (alpha[i] <= 0.0 && g >= 0.0) pg = 0.0;
            else if (alpha[i] >= opts.c && g <= 0.0) pg = 0.0;
            max_violation = std::max(max_violation, std::fabs(pg));

            if (std::fabs(pg) > 1e-12) {
                const double old = alpha[i];
                alpha[i] = std::min(std::max(old - g / qd[i], 0.0), opts.c);
                const double delta = (alpha[i] - old) * yi;
                for (const auto& [col, val] : xi.entries) w[col] += delta * val;
                w[dim] += delta;
            }
        }
        double wnorm2 = 0.0;
        for (double v : w) wnorm2 += v * v;
        double asum = 0.0;
        for (double a : alpha) asum += a;
        ti.epoch_objectives.push_back(asum - 0.5 * wnorm2);
        ti.max_violation = max_violation;
        if (max_violation < opts.tol) {
            ti.converged = true;
            ++epoch;
            break;
        }
    }
    ti.epochs = epoch;
    ti.dual_objective = ti.epoch_objectives.empty() ? 0.0 : ti.epoch_objectives.back();
    ti.alphas = alpha;

    BinarySvm svm;
    svm.bias = w[dim];
    w.pop_back();
    svm.weights = std::move(w);
    svm.c = opts.c;
    return svm;
}

// One-vs-rest multiclass wrapper. Classes are kept sorted by label name
// (negative < neutral < positive); even with two classes two machines are
// trained so the model shape stays uniform.
struct OvrModel {
    std::vector<Sentiment> classes;
    std::vector<BinarySvm> machines;

    uint32_t dim() const { return machines.empty() ? 0 : static_cast<uint32_t>(machines[0].weights.size()); }

    std::vector<double> decision_values(const SparseVector& x) const {
        std::vector<double> scores(machines.size());
        for (size_t k = 0; k < machines.size(); ++k) scores[k] = machines[k].decision(x);
        return scores;
    }

    // Argmax of the decision values; exact ties go to the first class in
    // sorted label order.
    Sentiment predict(const SparseVector& x) const {
        const auto scores = decision_values(x);
        size_t best = 0;
        for (size_t k = 1; k < scores.size(); ++k)
            if (scores[k] > scores[best]) best = k;
        return classes[best];
    }
};

inline OvrModel train_ovr(std::span<const SparseVector> xs, std::span<const Sentiment> labels,
                          const TrainOptions& opts, std::vector<TrainInfo>* infos = nullptr) {
    if (xs.size() != labels.size())
        throw std::invalid_argument("train_ovr: " + std::to_string(xs.size()) + " vectors vs " +
                                    std::to_string(labels.size()) + " labels");
    OvrModel model;
    for (Sentiment c : kAllClasses)
        if (std::find(labels.begin(), labels.end(), c) != labels.end()) model.classes.push_back(c);
    if (model.classes.size() < 2)
        throw std::invalid_argument("train_ovr: need at least 2 distinct classes, got " +
                                    std::to_string(model.classes.size()));

    model.machines.resize(model.classes.size());
    if (infos) infos->assign(model.classes.size(), TrainInfo{});

    // Per-class problems are independent; train them concurrently.
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(model.classes.size());
    for (size_t k = 0; k < model.classes.size(); ++k) {
        workers.emplace_back([&, k] {
            try {
                std::vector<int> y(labels.size());
                for (size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] == model.classes[k] ? 1 : -1;
                model.machines[k] = train_binary(xs, y, opts, infos ? &(*infos)[k] : nullptr);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        });
    }
    for (auto& t : workers) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return model;
}

}  // namespace tweetsent
