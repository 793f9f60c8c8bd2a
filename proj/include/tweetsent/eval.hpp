#pragma once

#include <array>
#include <iomanip>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tweetsent/text.hpp"
#include "tweetsent/util.hpp"

namespace tweetsent {

// 3x3 counts indexed [gold][pred] in fixed class order
// (negative, neutral, positive).
struct ConfusionMatrix {
    std::array<std::array<long, 3>, 3> counts{};

    void add(Sentiment gold, Sentiment pred) {
        ++counts[static_cast<int>(gold)][static_cast<int>(pred)];
    }
    long total() const {
        long t = 0;
        for (const auto& row : counts)
            for (long c : row) t += c;
        return t;
    }
    long row_sum(int g) const { return counts[g][0] + counts[g][1] + counts[g][2]; }
    long col_sum(int p) const { return counts[0][p] + counts[1][p] + counts[2][p]; }
};

inline ConfusionMatrix confusion_matrix(std::span<const Sentiment> gold, std::span<const Sentiment> pred) {
    if (gold.size() != pred.size())
        throw std::invalid_argument("confusion_matrix: " + std::to_string(gold.size()) + " gold vs " +
                                    std::to_string(pred.size()) + " predicted labels");
    ConfusionMatrix m;
    for (size_t i = 0; i < gold.size(); ++i) m.add(gold[i], pred[i]);
    return m;
}

// Macro-averaged recall; a class absent from the gold contributes recall 0
// (callers can detect this through EvalReport::absent_gold).
inline double macro_recall(const ConfusionMatrix& m) {
    double sum = 0.0;
    for (int c = 0; c < kNumClasses; ++c) {
        const long rs = m.row_sum(c);
        if (rs > 0) sum += static_cast<double>(m.counts[c][c]) / static_cast<double>(rs);
    }
    return sum / kNumClasses;
}

namespace detail {

inline double class_recall(const ConfusionMatrix& m, int c) {
    const long rs = m.row_sum(c);
    return rs > 0 ? static_cast<double>(m.counts[c][c]) / static_cast<double>(rs) : 0.0;
}

inline double class_precision(const ConfusionMatrix& m, int c) {
    const long cs = m.col_sum(c);
    return cs > 0 ? static_cast<double>(m.counts[c][c]) / static_cast<double>(cs) : 0.0;
}

inline double class_f1(const ConfusionMatrix& m, int c) {
    const double p = class_precision(m, c);
    const double r = class_recall(m, c);
    return p + r > 0 ? 2.0 * p * r / (p + r) : 0.0;
}

}  // namespace detail

// F1 averaged over the positive and negative classes only.
inline double f1_pn(const ConfusionMatrix& m) {
    return 0.5 * (detail::class_f1(m, static_cast<int>(Sentiment::positive)) +
                  detail::class_f1(m, static_cast<int>(Sentiment::negative)));
}

inline double accuracy(const ConfusionMatrix& m) {
    const long total = m.total();
    if (total == 0) throw std::invalid_argument("accuracy: empty confusion matrix");
    long diag = 0;
    for (int c = 0; c < kNumClasses; ++c) diag += m.counts[c][c];
    return static_cast<double>(diag) / static_cast<double>(total);
}

struct ClassScores {
    double recall = 0, precision = 0, f1 = 0;
    long support = 0;
};

struct EvalReport {
    double rho = 0;    // macro-averaged recall
    double f1pn = 0;   // mean F1 of positive and negative
    double acc = 0;
    std::array<ClassScores, 3> per_class{};
    long n = 0;
    std::vector<Sentiment> absent_gold;  // classes with no gold examples
};

inline EvalReport make_report(const ConfusionMatrix& m) {
    EvalReport r;
    r.n = m.total();
    r.rho = macro_recall(m);
    r.f1pn = f1_pn(m);
    r.acc = accuracy(m);
    for (int c = 0; c < kNumClasses; ++c) {
        r.per_class[c] = ClassScores{detail::class_recall(m, c), detail::class_precision(m, c),
                                     detail::class_f1(m, c), m.row_sum(c)};
        if (m.row_sum(c) == 0) r.absent_gold.push_back(static_cast<Sentiment>(c));
    }
    return r;
}

inline EvalReport evaluate(std::span<const Sentiment> gold, std::span<const Sentiment> pred) {
    return make_report(confusion_matrix(gold, pred));
}

// Constant predictors: baseline 1 = all positive, 2 = all negative,
// 3 = all neutral.
inline std::array<EvalReport, 3> baseline_report(std::span<const Sentiment> gold) {
    if (gold.empty()) throw std::invalid_argument("baseline_report: empty gold set");
    const std::array<Sentiment, 3> constants = {Sentiment::positive, Sentiment::negative,
                                                Sentiment::neutral};
    std::array<EvalReport, 3> out;
    for (int b = 0; b < 3; ++b) {
        ConfusionMatrix m;
        for (Sentiment g : gold) m.add(g, constants[b]);
        out[b] = make_report(m);
    }
    return out;
}

inline std::string render_kv(const EvalReport& r) {
    std::ostringstream os;
    os << "rho\t" << format_double(r.rho) << '\n';
    os << "f1_pn\t" << format_double(r.f1pn) << '\n';
    os << "acc\t" << format_double(r.acc) << '\n';
    os << "n\t" << r.n << '\n';
    for (int c = 0; c < kNumClasses; ++c) {
        const auto cls = to_string(static_cast<Sentiment>(c));
        os << "recall_" << cls << '\t' << format_double(r.per_class[c].recall) << '\n';
        os << "precision_" << cls << '\t' << format_double(r.per_class[c].precision) << '\n';
        os << "f1_" << cls << '\t' << format_double(r.per_class[c].f1) << '\n';
        os << "support_" << cls << '\t' << r.per_class[c].support << '\n';
    }
    return os.str();
}

// Text table in the shape of the shared-task result tables: the system row
// followed by the three constant baselines.
inline std::string render_report_table(const EvalReport& system, const std::array<EvalReport, 3>& baselines) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3);
    os << "system                rho    f1_pn  acc\n";
    auto row = [&os](std::string_view label, const EvalReport& r) {
        os << std::left << std::setw(22) << label << std::setw(7) << r.rho << std::setw(7) << r.f1pn
           << std::setw(7) << r.acc << '\n';
    };
    row("model", system);
    row("baseline-1 (positive)", baselines[0]);
    row("baseline-2 (negative)", baselines[1]);
    row("baseline-3 (neutral)", baselines[2]);
    os << "\nclass      recall precision f1     support\n";
    for (int c = 0; c < kNumClasses; ++c) {
        os << std::left << std::setw(11) << to_string(static_cast<Sentiment>(c)) << std::setw(7)
           << system.per_class[c].recall << std::setw(10) << system.per_class[c].precision << std::setw(7)
           << system.per_class[c].f1 << system.per_class[c].support << '\n';
    }
    os << "n = " << system.n << '\n';
    return os.str();
}

}  // namespace tweetsent
