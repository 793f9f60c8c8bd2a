#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tweetsent/resources.hpp"
#include "tweetsent/text.hpp"

namespace tweetsent {

// Feature names are namespaced "family:payload"; binary features carry 1.0.
using FeatureSet = std::map<std::string, double>;

struct SparseVector {
    std::vector<std::pair<uint32_t, double>> entries;  // strictly increasing ids, no zeros
    uint32_t dim = 0;

    double dot(std::span<const double> w) const {
        double s = 0.0;
        for (const auto& [col, val] : entries) s += w[col] * val;
        return s;
    }
};

namespace detail {

// Feature-time surface: the negation suffix is applied here, never stored.
inline std::string feature_surface(const Token& t, std::string_view suffix) {
    if (!t.negated) return t.surface;
    std::string s = t.surface;
    s += suffix;
    return s;
}

inline void add_ngrams(FeatureSet& out, std::span<const std::string> words, std::string_view family) {
    for (size_t n = 1; n <= 4; ++n) {
        if (words.size() < n) break;
        for (size_t i = 0; i + n <= words.size(); ++i) {
            std::string name(family);
            name += static_cast<char>('0' + n);
            name += ':';
            for (size_t k = 0; k < n; ++k) {
                if (k > 0) name += '_';
                name += words[i + k];
            }
            out[std::move(name)] = 1.0;
        }
    }
}

}  // namespace detail

// Presence of 1..4-grams over negation-suffixed surfaces.
inline FeatureSet extract_bow(std::span<const Token> tokens, std::string_view negation_suffix) {
    std::vector<std::string> words;
    words.reserve(tokens.size());
    for (const Token& t : tokens) words.push_back(detail::feature_surface(t, negation_suffix));
    FeatureSet out;
    detail::add_ngrams(out, words, "bow");
    return out;
}

// Presence of 1..4-grams inside maximal negated runs, unsuffixed. N-grams do
// not cross run boundaries.
inline FeatureSet extract_bonw(std::span<const Token> tokens) {
    FeatureSet out;
    std::vector<std::string> run;
    auto flush = [&] {
        if (!run.empty()) {
            detail::add_ngrams(out, run, "bonw");
            run.clear();
        }
    };
    for (const Token& t : tokens) {
        if (t.negated)
            run.push_back(t.surface);
        else
            flush();
    }
    flush();
    return out;
}

// Occurrence count per POS tag; untagged tokens contribute nothing.
inline FeatureSet extract_pos_counts(std::span<const Token> tokens) {
    FeatureSet out;
    for (const Token& t : tokens)
        if (t.tagged()) out["pos:" + t.pos] += 1.0;
    return out;
}

// Adjacent token bigrams fused with their POS tags ("bt:feel_VBP__good_JJ").
// Pairs with an untagged member are skipped.
inline FeatureSet extract_bitagged(std::span<const Token> tokens, std::string_view negation_suffix) {
    FeatureSet out;
    for (size_t i = 0; i + 1 < tokens.size(); ++i) {
        const Token& a = tokens[i];
        const Token& b = tokens[i + 1];
        if (!a.tagged() || !b.tagged()) continue;
        std::string name = "bt:";
        name += detail::feature_surface(a, negation_suffix);
        name += '_';
        name += a.pos;
        name += "__";
        name += detail::feature_surface(b, negation_suffix);
        name += '_';
        name += b.pos;
        out[std::move(name)] = 1.0;
    }
    return out;
}

// Signed polarity ratio from lexicon hit counts:
//   1 - N/P  if P > N,   0  if P == N,   P/N - 1  if P < N.
// Always in [-1, 1]; P = N = 0 falls in the middle branch.
inline double lexicon_polarity(std::span<const Token> tokens, const Lexicon& lexicon) {
    long pos = 0, neg = 0;
    for (const Token& t : tokens) {
        if (auto s = lexicon.score(t.surface)) {
            if (*s > 0) ++pos;
            else ++neg;
        }
    }
    if (pos > neg) return 1.0 - static_cast<double>(neg) / static_cast<double>(pos);
    if (pos < neg) return static_cast<double>(pos) / static_cast<double>(neg) - 1.0;
    return 0.0;
}

// Seven real-valued features per lexicon. Features whose defining set is
// empty are 0. All seven names are always emitted so the trained feature
// space does not depend on which tweets happened to hit the lexicon.
inline FeatureSet lexicon_features(std::span<const Token> tokens, const Lexicon& lexicon) {
    double sum_pos = 0, sum_neg = 0;
    long n_pos = 0, n_neg = 0;
    double last_pos = 0, last_neg = 0;
    double max_pos = 0, min_neg = 0;
    for (const Token& t : tokens) {
        auto s = lexicon.score(t.surface);
        if (!s) continue;
        if (*s > 0) {
            ++n_pos;
            sum_pos += *s;
            last_pos = *s;
            max_pos = std::max(max_pos, *s);
        } else {
            ++n_neg;
            sum_neg += *s;
            last_neg = *s;
            min_neg = std::min(min_neg, *s);
        }
    }
    const std::string base = "lex:" + lexicon.name + ":";
    FeatureSet out;
    out[base + "polarity"] = lexicon_polarity(tokens, lexicon);
    out[base + "avg_pos"] = n_pos ? sum_pos / static_cast<double>(n_pos) : 0.0;
    out[base + "avg_neg"] = n_neg ? sum_neg / static_cast<double>(n_neg) : 0.0;
    out[base + "last_pos"] = last_pos;
    out[base + "last_neg"] = last_neg;
    out[base + "max_pos"] = max_pos;
    out[base + "min_neg"] = min_neg;
    return out;
}

// Presence per distinct cluster hit; unknown words are skipped.
inline FeatureSet cluster_features(std::span<const Token> tokens, const ClusterMap& clusters) {
    FeatureSet out;
    for (const Token& t : tokens) {
        if (auto id = clusters.cluster(t.surface)) {
            std::string name = "clu:" + clusters.name + ":";
            name += *id;
            out[std::move(name)] = 1.0;
        }
    }
    return out;
}

// Element-wise pooling of the tweet's embedding matrix, concatenated in the
// fixed order [max | min | sum | std]. std is the population standard
// deviation, so a single word yields an exactly-zero std block; no
// in-vocabulary word yields an all-zero 4d vector.
inline std::vector<double> embed_pool(std::span<const Token> tokens, const EmbeddingModel& model) {
    const size_t d = model.dim;
    std::vector<double> out(4 * d, 0.0);
    std::vector<const std::vector<double>*> found;
    for (const Token& t : tokens)
        if (const auto* v = model.vector(t.surface)) found.push_back(v);
    const size_t n = found.size();
    if (n == 0) return out;

    for (size_t j = 0; j < d; ++j) {
        double mx = (*found[0])[j], mn = (*found[0])[j], sum = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double v = (*found[i])[j];
            mx = std::max(mx, v);
            mn = std::min(mn, v);
            sum += v;
        }
        const double mean = sum / static_cast<double>(n);
        double sq = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double dev = (*found[i])[j] - mean;
            sq += dev * dev;
        }
        out[0 * d + j] = mx;
        out[1 * d + j] = mn;
        out[2 * d + j] = sum;
        out[3 * d + j] = std::sqrt(sq / static_cast<double>(n));
    }
    return out;
}

struct EmbedBlock {
    std::string source;
    uint32_t offset = 0;
    uint32_t size = 0;  // 4*d
};

// Frozen bijection between feature names and dense column ids. Symbolic
// names seen at training time come first, sorted lexicographically; pooled
// embedding blocks follow, one per source, sorted by source name. Lookups of
// unknown names return nullopt and never extend the space.
class FeatureSpace {
public:
    FeatureSpace() = default;

    static FeatureSpace build(std::span<const FeatureSet> corpus,
                              std::span<const std::pair<std::string, uint32_t>> embed_dims) {
        if (corpus.empty()) throw std::invalid_argument("FeatureSpace: empty training corpus");
        std::map<std::string, uint32_t> names;  // sorted
        for (const FeatureSet& fs : corpus)
            for (const auto& [name, value] : fs) names.emplace(name, 0);

        FeatureSpace space;
        uint32_t next = 0;
        for (auto& [name, id] : names) {
            space.index_.emplace(name, next);
            space.names_.push_back(name);
            ++next;
        }
        std::vector<std::pair<std::string, uint32_t>> blocks(embed_dims.begin(), embed_dims.end());
        std::sort(blocks.begin(), blocks.end());
        for (const auto& [source, block_size] : blocks) {
            EmbedBlock b{source, next, block_size};
            for (uint32_t k = 0; k < block_size; ++k) {
                std::string name = "emb:" + source + ":" + std::to_string(k);
                space.index_.emplace(name, next + k);
                space.names_.push_back(std::move(name));
            }
            next += block_size;
            space.blocks_.push_back(std::move(b));
        }
        space.dim_ = next;
        return space;
    }

    // Rebuilds a persisted space; names are in column order, blocks describe
    // the trailing embedding columns.
    static FeatureSpace from_parts(std::vector<std::string> names, std::vector<EmbedBlock> blocks) {
        FeatureSpace space;
        space.names_ = std::move(names);
        space.blocks_ = std::move(blocks);
        space.dim_ = static_cast<uint32_t>(space.names_.size());
        for (uint32_t i = 0; i < space.dim_; ++i) {
            if (!space.index_.emplace(space.names_[i], i).second)
                throw std::runtime_error("FeatureSpace: duplicate feature name '" + space.names_[i] + "'");
        }
        for (const EmbedBlock& b : space.blocks_)
            if (static_cast<size_t>(b.offset) + b.size > space.dim_)
                throw std::runtime_error("FeatureSpace: embedding block out of range");
        return space;
    }

    std::optional<uint32_t> lookup(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    uint32_t dim() const { return dim_; }
    const std::vector<std::string>& names() const { return names_; }  // column order
    const std::vector<EmbedBlock>& blocks() const { return blocks_; }

private:
    std::unordered_map<std::string, uint32_t> index_;
    std::vector<std::string> names_;
    std::vector<EmbedBlock> blocks_;
    uint32_t dim_ = 0;
};

inline FeatureSpace build_vocabulary(std::span<const FeatureSet> corpus,
                                     std::span<const std::pair<std::string, uint32_t>> embed_dims) {
    return FeatureSpace::build(corpus, embed_dims);
}

// Maps named features plus pooled embedding vectors onto the frozen space.
// Symbolic names unseen at training time are dropped; zero values are not
// stored; entries come out sorted by column id.
inline SparseVector vectorize(const FeatureSet& symbolic,
                              const std::map<std::string, std::vector<double>>& pooled,
                              const FeatureSpace& space) {
    SparseVector vec;
    vec.dim = space.dim();
    for (const auto& [name, value] : symbolic) {
        if (value == 0.0) continue;
        if (auto col = space.lookup(name)) vec.entries.emplace_back(*col, value);
    }
    for (const EmbedBlock& block : space.blocks()) {
        auto it = pooled.find(block.source);
        if (it == pooled.end()) continue;  // treated as all-zero
        const auto& values = it->second;
        if (values.size() != block.size)
            throw std::invalid_argument("vectorize: pooled vector for '" + block.source + "' has " +
                                        std::to_string(values.size()) + " components, block expects " +
                                        std::to_string(block.size));
        for (uint32_t k = 0; k < block.size; ++k)
            if (values[k] != 0.0) vec.entries.emplace_back(block.offset + k, values[k]);
    }
    std::sort(vec.entries.begin(), vec.entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return vec;
}

}  // namespace tweetsent
