#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "tweetsent/eval.hpp"

using namespace tweetsent;

namespace {

constexpr Sentiment kNeg = Sentiment::negative;
constexpr Sentiment kNeu = Sentiment::neutral;
constexpr Sentiment kPos = Sentiment::positive;

ConfusionMatrix random_matrix(std::mt19937& rng, long max_count = 30) {
    std::uniform_int_distribution<long> d(0, max_count);
    ConfusionMatrix m;
    for (auto& row : m.counts)
        for (auto& c : row) c = d(rng);
    return m;
}

}  // namespace

TEST_CASE("confusion matrix tallies gold/pred pairs") {
    ConfusionMatrix m = confusion_matrix(std::vector<Sentiment>{kPos}, std::vector<Sentiment>{kPos});
    CHECK(m.counts[2][2] == 1);
    CHECK(m.total() == 1);

    m = confusion_matrix(std::vector<Sentiment>{kPos, kNeg}, std::vector<Sentiment>{kNeg, kNeg});
    CHECK(m.counts[2][0] == 1);
    CHECK(m.counts[0][0] == 1);
    CHECK(m.total() == 2);

    CHECK(confusion_matrix({}, {}).total() == 0);
    CHECK_THROWS_AS(confusion_matrix(std::vector<Sentiment>{kPos}, std::vector<Sentiment>{}),
                    std::invalid_argument);
}

TEST_CASE("macro recall basics") {
    ConfusionMatrix perfect;
    perfect.counts = {{{3, 0, 0}, {0, 5, 0}, {0, 0, 2}}};
    CHECK(macro_recall(perfect) == 1.0);

    // all predicted neutral with every class present: 1/3 exactly
    ConfusionMatrix all_neu;
    all_neu.counts = {{{0, 4, 0}, {0, 7, 0}, {0, 9, 0}}};
    CHECK(macro_recall(all_neu) == Catch::Approx(1.0 / 3.0).margin(1e-15));

    // recalls {1, 0.5, 0} average to 0.5
    ConfusionMatrix mixed;
    mixed.counts = {{{2, 0, 0}, {1, 1, 0}, {3, 0, 0}}};
    CHECK(macro_recall(mixed) == 0.5);
}

TEST_CASE("f1_pn averages the positive and negative F1") {
    ConfusionMatrix all_neu;
    all_neu.counts = {{{0, 4, 0}, {0, 7, 0}, {0, 9, 0}}};
    CHECK(f1_pn(all_neu) == 0.0);

    ConfusionMatrix perfect;
    perfect.counts = {{{3, 0, 0}, {0, 5, 0}, {0, 0, 2}}};
    CHECK(f1_pn(perfect) == 1.0);

    // pos: P=0.5, R=1 and neg: P=1, R=0.5 -> both F1 = 2/3
    ConfusionMatrix m;
    m.counts = {{{2, 0, 2}, {0, 0, 0}, {0, 0, 2}}};
    CHECK(f1_pn(m) == Catch::Approx(2.0 / 3.0));
}

TEST_CASE("accuracy is trace over total") {
    ConfusionMatrix perfect;
    perfect.counts = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    CHECK(accuracy(perfect) == 1.0);

    ConfusionMatrix quarter;
    quarter.counts = {{{1, 3, 0}, {0, 0, 0}, {0, 0, 0}}};
    CHECK(accuracy(quarter) == 0.25);

    CHECK_THROWS_AS(accuracy(ConfusionMatrix{}), std::invalid_argument);
}

TEST_CASE("baselines reproduce the constant-predictor numbers") {
    // gold with all three classes present
    std::vector<Sentiment> gold;
    for (int i = 0; i < 6; ++i) gold.push_back(kPos);
    for (int i = 0; i < 3; ++i) gold.push_back(kNeg);
    for (int i = 0; i < 9; ++i) gold.push_back(kNeu);

    const auto reports = baseline_report(gold);
    for (const auto& r : reports) CHECK(std::fabs(r.rho - 1.0 / 3.0) < 1e-12);
    CHECK(reports[2].f1pn == 0.0);  // baseline 3: all neutral

    CHECK_THROWS_AS(baseline_report({}), std::invalid_argument);
}

TEST_CASE("baseline accuracy equals the class share") {
    // 48.3% neutral gold: baseline 3 accuracy is exactly 0.483
    std::vector<Sentiment> gold;
    for (int i = 0; i < 483; ++i) gold.push_back(kNeu);
    for (int i = 0; i < 300; ++i) gold.push_back(kPos);
    for (int i = 0; i < 217; ++i) gold.push_back(kNeg);
    const auto reports = baseline_report(gold);
    CHECK(reports[2].acc == 0.483);
    CHECK(reports[0].acc == 0.3);
    CHECK(reports[1].acc == 0.217);
}

TEST_CASE("accuracy equals the support-weighted mean of recalls") {
    std::mt19937 rng(17);
    for (int iter = 0; iter < 500; ++iter) {
        ConfusionMatrix m = random_matrix(rng);
        if (m.total() == 0) continue;
        const auto r = make_report(m);
        double weighted = 0.0;
        for (int c = 0; c < kNumClasses; ++c)
            weighted += static_cast<double>(m.row_sum(c)) / static_cast<double>(m.total()) *
                        r.per_class[c].recall;
        REQUIRE(r.acc == Catch::Approx(weighted).margin(1e-12));
    }
}

TEST_CASE("macro recall is scale invariant") {
    std::mt19937 rng(23);
    for (int iter = 0; iter < 200; ++iter) {
        ConfusionMatrix m = random_matrix(rng);
        for (long k : {2L, 5L, 17L}) {
            ConfusionMatrix scaled = m;
            for (auto& row : scaled.counts)
                for (auto& c : row) c *= k;
            REQUIRE(macro_recall(scaled) == Catch::Approx(macro_recall(m)).margin(1e-12));
        }
    }
}

TEST_CASE("constant predictors on 3-class gold always hit rho 1/3") {
    std::mt19937 rng(29);
    std::uniform_int_distribution<long> d(1, 40);
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<Sentiment> gold;
        for (int c = 0; c < 3; ++c) {
            const long n = d(rng);
            for (long i = 0; i < n; ++i) gold.push_back(static_cast<Sentiment>(c));
        }
        for (const auto& r : baseline_report(gold)) REQUIRE(std::fabs(r.rho - 1.0 / 3.0) < 1e-12);
    }
}

TEST_CASE("f1_pn stays in range and is 1 only for clean pos/neg") {
    std::mt19937 rng(37);
    for (int iter = 0; iter < 1000; ++iter) {
        const ConfusionMatrix m = random_matrix(rng, 6);
        const double v = f1_pn(m);
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
        const bool pos_clean = m.row_sum(2) > 0 && m.counts[2][2] == m.row_sum(2) &&
                               m.counts[2][2] == m.col_sum(2);
        const bool neg_clean = m.row_sum(0) > 0 && m.counts[0][0] == m.row_sum(0) &&
                               m.counts[0][0] == m.col_sum(0);
        REQUIRE((v == 1.0) == (pos_clean && neg_clean));
    }
}

TEST_CASE("missing gold classes are flagged") {
    const std::vector<Sentiment> gold = {kNeu, kNeu, kPos};
    const std::vector<Sentiment> pred = {kNeu, kPos, kPos};
    const EvalReport r = evaluate(gold, pred);
    REQUIRE(r.absent_gold == std::vector<Sentiment>{kNeg});
    CHECK(r.per_class[0].recall == 0.0);
}

TEST_CASE("reports render both table and key-value forms") {
    const std::vector<Sentiment> gold = {kNeg, kNeu, kPos, kPos};
    const std::vector<Sentiment> pred = {kNeg, kNeu, kPos, kNeu};
    const EvalReport r = evaluate(gold, pred);
    const auto baselines = baseline_report(gold);

    const std::string table = render_report_table(r, baselines);
    CHECK(table.find("baseline-3") != std::string::npos);
    CHECK(table.find("negative") != std::string::npos);

    const std::string kv = render_kv(r);
    CHECK(kv.find("rho\t") != std::string::npos);
    CHECK(kv.find("f1_pn\t") != std::string::npos);
    CHECK(kv.find("recall_positive\t") != std::string::npos);
    CHECK(kv.find("n\t4") != std::string::npos);
}
