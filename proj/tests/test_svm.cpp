#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "svm_oracle.hpp"
#include "tweetsent/svm.hpp"

using namespace tweetsent;

namespace {

SparseVector sparse(std::vector<double> dense, uint32_t dim) {
    SparseVector v;
    v.dim = dim;
    for (uint32_t i = 0; i < dense.size(); ++i)
        if (dense[i] != 0.0) v.entries.emplace_back(i, dense[i]);
    return v;
}

struct RandomInstance {
    std::vector<SparseVector> xs;
    std::vector<int> ys;
    svm_oracle::Problem dense;
};

RandomInstance random_instance(std::mt19937& rng, double c) {
    std::uniform_int_distribution<int> n_d(2, 20), f_d(1, 3);
    std::uniform_real_distribution<double> comp(-2.0, 2.0);
    RandomInstance inst;
    const int n = n_d(rng);
    const int nfeat = f_d(rng);
    inst.dense.c = c;
    for (int i = 0; i < n; ++i) {
        std::vector<double> row(nfeat);
        for (auto& v : row) v = comp(rng);
        const int y = (i % 2 == 0) ? 1 : -1;  // both classes always present
        inst.xs.push_back(sparse(row, static_cast<uint32_t>(nfeat)));
        inst.ys.push_back(y);
        inst.dense.xs.push_back(std::move(row));
        inst.dense.ys.push_back(y);
    }
    return inst;
}

}  // namespace

TEST_CASE("separable points are classified with correct margins") {
    const std::vector<SparseVector> xs = {sparse({0, 0}, 2), sparse({2, 2}, 2)};
    const std::vector<int> ys = {-1, 1};
    TrainOptions opts;
    opts.c = 0.5;
    const BinarySvm svm = train_binary(xs, ys, opts);
    CHECK(svm.decision(xs[0]) < 0.0);
    CHECK(svm.decision(xs[1]) > 0.0);
}

TEST_CASE("identical inputs with mixed labels fall to the majority") {
    std::vector<SparseVector> xs(5, sparse({1.0, 1.0}, 2));
    const std::vector<int> ys = {1, 1, 1, -1, -1};
    const BinarySvm svm = train_binary(xs, ys, TrainOptions{});
    CHECK(svm.decision(xs[0]) > 0.0);

    const std::vector<int> flipped = {-1, -1, -1, 1, 1};
    const BinarySvm svm2 = train_binary(xs, flipped, TrainOptions{});
    CHECK(svm2.decision(xs[0]) < 0.0);
}

TEST_CASE("train_binary validates its inputs") {
    const std::vector<SparseVector> xs = {sparse({1}, 1), sparse({2}, 1)};
    CHECK_THROWS_AS(train_binary(xs, std::vector<int>{1, 1}, TrainOptions{}), std::invalid_argument);
    CHECK_THROWS_AS(train_binary({}, {}, TrainOptions{}), std::invalid_argument);
    CHECK_THROWS_AS(train_binary(xs, std::vector<int>{1}, TrainOptions{}), std::invalid_argument);
    CHECK_THROWS_AS(train_binary(xs, std::vector<int>{1, 2}, TrainOptions{}), std::invalid_argument);

    TrainOptions bad;
    bad.c = 0.0;
    CHECK_THROWS_AS(train_binary(xs, std::vector<int>{1, -1}, bad), std::invalid_argument);

    const std::vector<SparseVector> mixed = {sparse({1}, 1), sparse({1, 2}, 2)};
    CHECK_THROWS_AS(train_binary(mixed, std::vector<int>{1, -1}, TrainOptions{}), std::invalid_argument);
}

TEST_CASE("dual objective never decreases across epochs") {
    std::mt19937 rng(123);
    for (int iter = 0; iter < 50; ++iter) {
        const auto inst = random_instance(rng, 0.5);
        TrainOptions opts;
        opts.tol = 1e-8;  // force many epochs
        opts.max_epochs = 200;
        TrainInfo info;
        train_binary(inst.xs, inst.ys, opts, &info);
        REQUIRE(!info.epoch_objectives.empty());
        for (size_t e = 1; e < info.epoch_objectives.size(); ++e)
            REQUIRE(info.epoch_objectives[e] >= info.epoch_objectives[e - 1] - 1e-9);
    }
}

TEST_CASE("training is deterministic under a fixed seed") {
    std::mt19937 rng(7);
    const auto inst = random_instance(rng, 0.5);
    TrainOptions opts;
    opts.seed = 4242;
    const BinarySvm a = train_binary(inst.xs, inst.ys, opts);
    const BinarySvm b = train_binary(inst.xs, inst.ys, opts);
    REQUIRE(a.weights == b.weights);  // bit-identical
    REQUIRE(a.bias == b.bias);
}

TEST_CASE("margins satisfy the KKT bounds at convergence") {
    std::mt19937 rng(99);
    for (int iter = 0; iter < 30; ++iter) {
        const auto inst = random_instance(rng, 0.5);
        TrainOptions opts;
        opts.tol = 1e-6;
        opts.max_epochs = 50000;
        TrainInfo info;
        const BinarySvm svm = train_binary(inst.xs, inst.ys, opts, &info);
        REQUIRE(info.converged);
        REQUIRE(info.max_violation < opts.tol);
        // gradients are sampled mid-sweep while w keeps moving, so allow a
        // few tol of drift on the final margins
        const double slack = 5.0 * opts.tol + 1e-12;
        for (size_t i = 0; i < inst.xs.size(); ++i) {
            const double margin = inst.ys[i] * svm.decision(inst.xs[i]);
            const double a = info.alphas[i];
            if (a <= 0.0) REQUIRE(margin >= 1.0 - slack);
            else if (a >= opts.c) REQUIRE(margin <= 1.0 + slack);
            else REQUIRE(std::fabs(margin - 1.0) <= slack);
        }
    }
}

TEST_CASE("solver matches the grid oracle on random instances") {
    std::mt19937 rng(31337);
    for (double c : {0.1, 0.5, 2.0}) {
        for (int iter = 0; iter < 12; ++iter) {
            const auto inst = random_instance(rng, c);
            TrainOptions opts;
            opts.c = c;
            opts.tol = 1e-6;
            opts.max_epochs = 50000;
            const BinarySvm svm = train_binary(inst.xs, inst.ys, opts);
            const double primal = svm_oracle::primal_objective(inst.dense, svm.weights, svm.bias);
            const auto ref = svm_oracle::grid_minimize(inst.dense);
            INFO("C=" << c << " solver=" << primal << " oracle=" << ref.objective);
            REQUIRE(std::fabs(primal - ref.objective) <= 1e-4 * std::max(1.0, ref.objective));
        }
    }
}

TEST_CASE("decision values follow the linear form") {
    OvrModel model;
    model.classes = {Sentiment::negative, Sentiment::neutral, Sentiment::positive};
    for (double bias : {-1.0, 0.25, 2.0}) {
        BinarySvm m;
        m.weights = {1.0, -1.0};
        m.bias = bias;
        model.machines.push_back(m);
    }
    const SparseVector zero = sparse({0, 0}, 2);
    CHECK(model.decision_values(zero) == std::vector<double>{-1.0, 0.25, 2.0});

    // hand-set weights w=[1,-1], b=0.5, x with value 3 at column 0 -> 3.5
    BinarySvm hand;
    hand.weights = {1.0, -1.0};
    hand.bias = 0.5;
    CHECK(hand.decision(sparse({3, 0}, 2)) == 3.5);

    // doubling x doubles score - bias
    const SparseVector x = sparse({1.5, -2.0}, 2);
    const SparseVector x2 = sparse({3.0, -4.0}, 2);
    CHECK(hand.decision(x2) - hand.bias == Catch::Approx(2.0 * (hand.decision(x) - hand.bias)));

    CHECK_THROWS_AS(hand.decision(sparse({1}, 1)), std::invalid_argument);
}

TEST_CASE("predict takes the argmax and breaks ties by class order") {
    OvrModel model;
    model.classes = {Sentiment::negative, Sentiment::neutral, Sentiment::positive};
    auto with_biases = [&](double bn, double bu, double bp) {
        model.machines.clear();
        for (double b : {bn, bu, bp}) {
            BinarySvm m;
            m.weights = {0.0};
            m.bias = b;
            model.machines.push_back(m);
        }
    };
    const SparseVector x = sparse({0}, 1);
    with_biases(-1, 0, 2);
    CHECK(model.predict(x) == Sentiment::positive);
    with_biases(0.5, -1, 0.5);
    CHECK(model.predict(x) == Sentiment::negative);  // exact tie -> sorted order
}

TEST_CASE("predict is invariant under positive rescaling of scores") {
    OvrModel model;
    model.classes = {Sentiment::negative, Sentiment::neutral, Sentiment::positive};
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> b_d(-2.0, 2.0);
    for (int iter = 0; iter < 200; ++iter) {
        model.machines.clear();
        OvrModel scaled = model;
        const double factor = std::uniform_real_distribution<double>(0.1, 9.0)(rng);
        for (int k = 0; k < 3; ++k) {
            BinarySvm m;
            m.weights = {b_d(rng)};
            m.bias = b_d(rng);
            BinarySvm s = m;
            s.weights[0] *= factor;
            s.bias *= factor;
            model.machines.push_back(m);
            scaled.machines.push_back(s);
        }
        const SparseVector x = sparse({1.0}, 1);
        REQUIRE(model.predict(x) == scaled.predict(x));
    }
}

TEST_CASE("one-vs-rest trains one machine per class") {
    // class-pure disjoint features: trivially separable
    std::vector<SparseVector> xs;
    std::vector<Sentiment> labels;
    for (int i = 0; i < 6; ++i) {
        std::vector<double> row(3, 0.0);
        row[i % 3] = 1.0;
        xs.push_back(sparse(row, 3));
        labels.push_back(static_cast<Sentiment>(i % 3));
    }
    const OvrModel model = train_ovr(xs, labels, TrainOptions{});
    REQUIRE(model.classes.size() == 3);
    REQUIRE(model.machines.size() == 3);
    for (size_t i = 0; i < xs.size(); ++i) CHECK(model.predict(xs[i]) == labels[i]);
}

TEST_CASE("two classes still give two machines") {
    const std::vector<SparseVector> xs = {sparse({1, 0}, 2), sparse({0, 1}, 2)};
    const std::vector<Sentiment> labels = {Sentiment::negative, Sentiment::positive};
    const OvrModel model = train_ovr(xs, labels, TrainOptions{});
    CHECK(model.classes == std::vector<Sentiment>{Sentiment::negative, Sentiment::positive});
    CHECK(model.machines.size() == 2);
}

TEST_CASE("one class is rejected") {
    const std::vector<SparseVector> xs = {sparse({1}, 1), sparse({2}, 1)};
    const std::vector<Sentiment> labels = {Sentiment::positive, Sentiment::positive};
    CHECK_THROWS_AS(train_ovr(xs, labels, TrainOptions{}), std::invalid_argument);
}
