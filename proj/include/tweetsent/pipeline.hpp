#pragma once

#include <istream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tweetsent/eval.hpp"
#include "tweetsent/features.hpp"
#include "tweetsent/model.hpp"
#include "tweetsent/resources.hpp"
#include "tweetsent/svm.hpp"
#include "tweetsent/text.hpp"
#include "tweetsent/util.hpp"

namespace tweetsent {

// Tweet TSV: id<TAB>label<TAB>text, with "-" for an absent label. Mirrors the
// shared-task distribution files.
inline std::vector<Tweet> read_tweets_tsv(std::istream& in, std::string_view source,
                                          bool skip_bad = false, std::vector<std::string>* warnings = nullptr) {
    std::vector<Tweet> tweets;
    std::string line;
    size_t lineno = 0;
    auto fail = [&](const std::string& msg) {
        std::string full = std::string(source) + ": line " + std::to_string(lineno) + ": " + msg;
        if (skip_bad) {
            if (warnings) warnings->push_back(full);
            return;
        }
        throw std::runtime_error(full);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cols = split(line, '\t');
        if (cols.size() != 3) {
            fail("expected 3 tab-separated columns (id, label, text), got " + std::to_string(cols.size()));
            continue;
        }
        Tweet t;
        t.id = std::string(cols[0]);
        if (cols[1] != "-") {
            auto label = parse_sentiment(cols[1]);
            if (!label) {
                fail("unknown label '" + std::string(cols[1]) + "'");
                continue;
            }
            t.label = *label;
        }
        t.text = std::string(cols[2]);
        tweets.push_back(std::move(t));
    }
    return tweets;
}

// Pre-tagged input: one token per line as surface<TAB>pos, blank line
// between tweets. A block may open with a 3-column id<TAB>label<TAB>text
// header (text is informational); blocks without one get ordinal ids and no
// label.
inline std::vector<Tweet> read_tweets_tagged(std::istream& in, std::string_view source,
                                             bool skip_bad = false,
                                             std::vector<std::string>* warnings = nullptr) {
    std::vector<Tweet> tweets;
    std::string line;
    size_t lineno = 0;
    Tweet current;
    bool in_block = false;
    bool block_bad = false;
    size_t ordinal = 0;

    auto fail = [&](const std::string& msg) {
        std::string full = std::string(source) + ": line " + std::to_string(lineno) + ": " + msg;
        if (skip_bad) {
            if (warnings) warnings->push_back(full);
            block_bad = true;
            return;
        }
        throw std::runtime_error(full);
    };
    auto flush = [&] {
        if (in_block && !block_bad) {
            if (current.id.empty()) current.id = std::to_string(++ordinal);
            else ++ordinal;
            tweets.push_back(std::move(current));
        } else if (in_block) {
            ++ordinal;
        }
        current = Tweet{};
        in_block = false;
        block_bad = false;
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush();
            continue;
        }
        auto cols = split(line, '\t');
        if (!in_block && cols.size() == 3) {
            in_block = true;
            current.id = std::string(cols[0]);
            if (cols[1] != "-") {
                auto label = parse_sentiment(cols[1]);
                if (!label) {
                    fail("unknown label '" + std::string(cols[1]) + "'");
                    continue;
                }
                current.label = *label;
            }
            current.text = std::string(cols[2]);
            continue;
        }
        in_block = true;
        if (cols.size() != 2) {
            fail("expected surface<TAB>pos, got " + std::to_string(cols.size()) + " columns");
            continue;
        }
        if (cols[0].empty()) {
            fail("empty token surface");
            continue;
        }
        current.tokens.push_back(Token{std::string(cols[0]), std::string(cols[1]), false});
    }
    flush();
    return tweets;
}

struct LoadedResources {
    std::vector<Lexicon> lexicons;
    std::vector<ClusterMap> clusters;
    std::vector<EmbeddingModel> embeddings;
};

struct ExtractedFeatures {
    FeatureSet symbolic;
    std::map<std::string, std::vector<double>> pooled;  // per embedding source
};

// Front end shared by training and prediction: applies the text pipeline and
// turns one tweet into feature sets over the configured families.
class TweetFeaturizer {
public:
    TweetFeaturizer(PipelineSettings settings, const LoadedResources* resources)
        : settings_(std::move(settings)), resources_(resources) {}

    const PipelineSettings& settings() const { return settings_; }

    // Raw tweets get the full text pipeline; pre-tokenized (tagged) tweets
    // only get negation marking.
    void prepare(Tweet& t) const {
        if (t.tokens.empty())
            t.tokens = run_pipeline(t.text, settings_.profile);
        else
            t.tokens = mark_negation(std::move(t.tokens), settings_.profile);
    }

    ExtractedFeatures extract(const Tweet& t) const {
        const auto& toggles = settings_.features;
        const std::string& suffix = settings_.profile.negation_suffix;
        ExtractedFeatures out;
        auto merge = [&out](FeatureSet fs) { out.symbolic.merge(fs); };
        if (toggles.bow) merge(extract_bow(t.tokens, suffix));
        if (toggles.bonw) merge(extract_bonw(t.tokens));
        if (toggles.pos) merge(extract_pos_counts(t.tokens));
        if (toggles.bitagged) merge(extract_bitagged(t.tokens, suffix));
        if (resources_) {
            if (toggles.lexicons)
                for (const Lexicon& lex : resources_->lexicons) merge(lexicon_features(t.tokens, lex));
            if (toggles.clusters)
                for (const ClusterMap& cm : resources_->clusters) merge(cluster_features(t.tokens, cm));
            if (toggles.embeddings)
                for (const EmbeddingModel& em : resources_->embeddings)
                    out.pooled[em.name] = embed_pool(t.tokens, em);
        }
        return out;
    }

    // One (source, 4d) block per configured embedding model.
    std::vector<std::pair<std::string, uint32_t>> embed_dims() const {
        std::vector<std::pair<std::string, uint32_t>> dims;
        if (resources_ && settings_.features.embeddings)
            for (const EmbeddingModel& em : resources_->embeddings)
                dims.emplace_back(em.name, static_cast<uint32_t>(4 * em.dim));
        return dims;
    }

private:
    PipelineSettings settings_;
    const LoadedResources* resources_;
};

struct TrainSummary {
    uint32_t dim = 0;
    std::array<long, 3> support{};  // per class, canonical order
    std::vector<TrainInfo> infos;   // per trained machine
};

// Full training path: pipeline -> feature extraction -> frozen feature
// space -> one-vs-rest SVM. The corpus must be labeled.
inline SvmModel train_model(std::vector<Tweet> corpus, const PipelineSettings& settings,
                            const LoadedResources& resources, const TrainOptions& opts,
                            TrainSummary* summary = nullptr) {
    if (corpus.empty()) throw std::invalid_argument("train_model: empty corpus");
    if (!settings.features.any()) throw std::invalid_argument("train_model: no feature family enabled");
    TweetFeaturizer featurizer(settings, &resources);

    std::vector<Sentiment> labels;
    labels.reserve(corpus.size());
    for (Tweet& t : corpus) {
        if (!t.label)
            throw std::invalid_argument("train_model: tweet '" + t.id + "' has no label");
        labels.push_back(*t.label);
        featurizer.prepare(t);
    }

    auto extracted = parallel_map<ExtractedFeatures>(
        corpus.size(), [&](size_t i) { return featurizer.extract(corpus[i]); });

    std::vector<FeatureSet> symbolic;
    symbolic.reserve(extracted.size());
    for (auto& e : extracted) symbolic.push_back(e.symbolic);
    const auto embed_dims = featurizer.embed_dims();
    FeatureSpace space = build_vocabulary(symbolic, embed_dims);

    auto vectors = parallel_map<SparseVector>(
        extracted.size(), [&](size_t i) { return vectorize(extracted[i].symbolic, extracted[i].pooled, space); });

    std::vector<TrainInfo> infos;
    OvrModel ovr = train_ovr(vectors, labels, opts, &infos);

    if (summary) {
        summary->dim = space.dim();
        summary->support = {};
        for (Sentiment l : labels) ++summary->support[static_cast<int>(l)];
        summary->infos = infos;
    }

    SvmModel model;
    model.ovr = std::move(ovr);
    model.space = std::move(space);
    model.settings = settings;
    model.train_options = opts;
    return model;
}

struct Prediction {
    Sentiment label = Sentiment::neutral;
    // Decision values in canonical class order; absent when the model was
    // trained without that class.
    std::array<std::optional<double>, 3> scores;
};

inline Prediction predict_tweet(const SvmModel& model, const TweetFeaturizer& featurizer, Tweet tweet) {
    featurizer.prepare(tweet);
    const auto extracted = featurizer.extract(tweet);
    const SparseVector vec = vectorize(extracted.symbolic, extracted.pooled, model.space);
    const auto values = model.ovr.decision_values(vec);

    Prediction p;
    size_t best = 0;
    for (size_t k = 0; k < values.size(); ++k) {
        p.scores[static_cast<int>(model.ovr.classes[k])] = values[k];
        if (values[k] > values[best]) best = k;
    }
    p.label = model.ovr.classes[best];
    return p;
}

inline std::vector<Prediction> predict_tweets(const SvmModel& model, const TweetFeaturizer& featurizer,
                                              std::span<const Tweet> tweets) {
    return parallel_map<Prediction>(tweets.size(),
                                    [&](size_t i) { return predict_tweet(model, featurizer, tweets[i]); });
}

}  // namespace tweetsent
