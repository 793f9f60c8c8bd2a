// Command-line front end: train, predict, evaluate, inspect-resources.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tweetsent/tweetsent.hpp"

namespace ts = tweetsent;
namespace fs = std::filesystem;

namespace {

struct Options {
    std::string lang = "en";
    std::string config_path;
    std::vector<std::string> lexicon_paths;
    std::vector<std::string> cluster_paths;
    std::vector<std::string> embedding_paths;
    std::string features_list;
    double c = 0.5;
    double tol = 1e-3;
    int max_epochs = 1000;
    uint64_t seed = 42;
    bool tagged = false;
    bool skip_bad = false;
    std::string dev_path;
    std::string negation_words_csv;
    std::string negation_suffix;
};

struct OptionRefs {
    CLI::Option* lang = nullptr;
    CLI::Option* features = nullptr;
    CLI::Option* lexicon = nullptr;
    CLI::Option* clusters = nullptr;
    CLI::Option* embeddings = nullptr;
    CLI::Option* c = nullptr;
    CLI::Option* tol = nullptr;
    CLI::Option* max_epochs = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* tagged = nullptr;
    CLI::Option* skip_bad = nullptr;
    CLI::Option* negation_words = nullptr;
    CLI::Option* negation_suffix = nullptr;
};

OptionRefs add_common_options(CLI::App& cmd, Options& o) {
    OptionRefs refs;
    refs.lang = cmd.add_option("--lang", o.lang, "Language profile: en or ar")
                    ->check(CLI::IsMember({"en", "ar"}));
    cmd.add_option("--config", o.config_path, "Key-value config file ('key = value' lines)");
    refs.lexicon = cmd.add_option("--lexicon", o.lexicon_paths, "Sentiment lexicon TSV (repeatable)");
    refs.clusters = cmd.add_option("--clusters", o.cluster_paths, "Word-cluster map (repeatable)");
    refs.embeddings = cmd.add_option("--embeddings", o.embedding_paths, "Embedding text file (repeatable)");
    refs.features = cmd.add_option("--features", o.features_list,
                                   "Comma list from: bow,bonw,pos,bitagged,lexicons,clusters,embeddings");
    refs.c = cmd.add_option("--c", o.c, "SVM cost parameter C");
    refs.tol = cmd.add_option("--tol", o.tol, "Solver stopping tolerance");
    refs.max_epochs = cmd.add_option("--max-epochs", o.max_epochs, "Solver epoch cap");
    refs.seed = cmd.add_option("--seed", o.seed, "Permutation seed");
    refs.tagged = cmd.add_flag("--tagged", o.tagged, "Input is pre-tagged (surface<TAB>pos blocks)");
    refs.skip_bad = cmd.add_flag("--skip-bad", o.skip_bad, "Skip malformed input lines with a warning");
    refs.negation_words =
        cmd.add_option("--negation-words", o.negation_words_csv, "Override negation trigger words (comma list)");
    refs.negation_suffix =
        cmd.add_option("--negation-suffix", o.negation_suffix, "Override negation suffix");
    return refs;
}

// Config file: 'key = value' lines, '#' comments. Explicit command-line
// flags win over config values.
void merge_config_file(Options& o, const OptionRefs& refs) {
    if (o.config_path.empty()) return;
    std::ifstream in(o.config_path);
    if (!in) throw std::runtime_error("cannot open config " + o.config_path);
    std::vector<std::string> cfg_lex, cfg_clu, cfg_emb;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string_view sv = ts::trim(line);
        if (sv.empty() || sv[0] == '#') continue;
        size_t eq = sv.find('=');
        if (eq == std::string_view::npos)
            throw std::runtime_error(o.config_path + ": line " + std::to_string(lineno) +
                                     ": expected 'key = value'");
        std::string key(ts::trim(sv.substr(0, eq)));
        std::string value(ts::trim(sv.substr(eq + 1)));
        auto scalar = [&](CLI::Option* opt, auto& field, auto parse) {
            if (opt->count() == 0) field = parse(value);
        };
        auto as_string = [](const std::string& v) { return v; };
        if (key == "lang") {
            if (value != "en" && value != "ar")
                throw std::runtime_error(o.config_path + ": line " + std::to_string(lineno) +
                                         ": lang must be en or ar");
            scalar(refs.lang, o.lang, as_string);
        } else if (key == "features") {
            scalar(refs.features, o.features_list, as_string);
        } else if (key == "lexicon") {
            cfg_lex.push_back(value);
        } else if (key == "clusters") {
            cfg_clu.push_back(value);
        } else if (key == "embeddings") {
            cfg_emb.push_back(value);
        } else if (key == "c" || key == "tol") {
            double d;
            if (!ts::parse_double(value, d))
                throw std::runtime_error(o.config_path + ": line " + std::to_string(lineno) +
                                         ": non-numeric value for " + key);
            if (key == "c") scalar(refs.c, o.c, [&](const std::string&) { return d; });
            else scalar(refs.tol, o.tol, [&](const std::string&) { return d; });
        } else if (key == "max_epochs" || key == "seed") {
            long n;
            if (!ts::parse_long(value, n) || n < 0)
                throw std::runtime_error(o.config_path + ": line " + std::to_string(lineno) +
                                         ": bad value for " + key);
            if (key == "max_epochs") scalar(refs.max_epochs, o.max_epochs, [&](const std::string&) { return static_cast<int>(n); });
            else scalar(refs.seed, o.seed, [&](const std::string&) { return static_cast<uint64_t>(n); });
        } else if (key == "negation_words") {
            scalar(refs.negation_words, o.negation_words_csv, as_string);
        } else if (key == "negation_suffix") {
            scalar(refs.negation_suffix, o.negation_suffix, as_string);
        } else if (key == "tagged" || key == "skip_bad") {
            bool b = value == "1" || value == "true" || value == "yes";
            if (key == "tagged") { if (refs.tagged->count() == 0) o.tagged = b; }
            else { if (refs.skip_bad->count() == 0) o.skip_bad = b; }
        } else {
            throw std::runtime_error(o.config_path + ": line " + std::to_string(lineno) +
                                     ": unknown key '" + key + "'");
        }
    }
    if (refs.lexicon->count() == 0 && !cfg_lex.empty()) o.lexicon_paths = cfg_lex;
    if (refs.clusters->count() == 0 && !cfg_clu.empty()) o.cluster_paths = cfg_clu;
    if (refs.embeddings->count() == 0 && !cfg_emb.empty()) o.embedding_paths = cfg_emb;
}

ts::LanguageProfile make_profile(const Options& o) {
    ts::LanguageProfile p =
        o.lang == "ar" ? ts::LanguageProfile::arabic() : ts::LanguageProfile::english();
    if (!o.negation_words_csv.empty()) {
        std::unordered_set<std::string> words;
        for (std::string_view w : ts::split(o.negation_words_csv, ',')) {
            w = ts::trim(w);
            if (w.empty()) continue;
            if (w.find(' ') != std::string_view::npos || w.find('\t') != std::string_view::npos)
                throw std::runtime_error("negation word '" + std::string(w) + "' contains whitespace");
            words.insert(std::string(w));
        }
        if (words.empty()) throw std::runtime_error("negation word list must not be empty");
        p.negation_words = std::move(words);
    }
    if (!o.negation_suffix.empty()) p.negation_suffix = o.negation_suffix;
    return p;
}

ts::FeatureToggles make_toggles(const Options& o) {
    ts::FeatureToggles t;
    if (o.features_list.empty()) {
        t.bow = t.bonw = t.pos = t.bitagged = true;
        t.lexicons = !o.lexicon_paths.empty();
        t.clusters = !o.cluster_paths.empty();
        t.embeddings = !o.embedding_paths.empty();
    } else {
        t = ts::FeatureToggles::from_list(o.features_list);
    }
    if (!t.any()) throw std::runtime_error("at least one feature family must be enabled");
    if (t.lexicons && o.lexicon_paths.empty())
        throw std::runtime_error("features enable lexicons but no --lexicon path was given");
    if (t.clusters && o.cluster_paths.empty())
        throw std::runtime_error("features enable clusters but no --clusters path was given");
    if (t.embeddings && o.embedding_paths.empty())
        throw std::runtime_error("features enable embeddings but no --embeddings path was given");
    return t;
}

void require_readable(const std::vector<std::string>& paths) {
    for (const auto& p : paths)
        if (!fs::exists(p)) throw std::runtime_error("resource path does not exist: " + p);
}

// Loads resources and records their fingerprints in the order loaded.
ts::LoadedResources load_resources(const Options& o, const ts::FeatureToggles& toggles,
                                   std::vector<ts::ResourceInfo>* fingerprints) {
    ts::LoadedResources res;
    auto check_dup = [](const auto& items, const std::string& name, const char* kind) {
        for (const auto& it : items)
            if (it.name == name)
                throw std::runtime_error(std::string("duplicate ") + kind + " name '" + name +
                                         "' (rename one of the files)");
    };
    if (toggles.lexicons) {
        require_readable(o.lexicon_paths);
        for (const auto& path : o.lexicon_paths) {
            auto lex = ts::load_lexicon_file(path);
            check_dup(res.lexicons, lex.name, "lexicon");
            if (fingerprints) fingerprints->push_back(ts::fingerprint_file("lexicon", lex.name, path));
            res.lexicons.push_back(std::move(lex));
        }
    }
    if (toggles.clusters) {
        require_readable(o.cluster_paths);
        for (const auto& path : o.cluster_paths) {
            auto cm = ts::load_clusters_file(path);
            check_dup(res.clusters, cm.name, "cluster map");
            if (fingerprints) fingerprints->push_back(ts::fingerprint_file("clusters", cm.name, path));
            res.clusters.push_back(std::move(cm));
        }
    }
    if (toggles.embeddings) {
        require_readable(o.embedding_paths);
        for (const auto& path : o.embedding_paths) {
            auto em = ts::load_embeddings_file(path);
            check_dup(res.embeddings, em.name, "embedding model");
            if (fingerprints) fingerprints->push_back(ts::fingerprint_file("embeddings", em.name, path));
            res.embeddings.push_back(std::move(em));
        }
    }
    return res;
}

std::vector<ts::Tweet> read_corpus(const std::string& path, bool tagged, bool skip_bad) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::string> warnings;
    auto tweets = tagged ? ts::read_tweets_tagged(in, path, skip_bad, &warnings)
                         : ts::read_tweets_tsv(in, path, skip_bad, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << " (skipped)\n";
    return tweets;
}

// Prediction-time resource resolution: explicit flags win, otherwise the
// paths recorded in the model are tried. Missing or changed resources warn
// and leave their feature families inactive rather than failing.
ts::LoadedResources resolve_predict_resources(const ts::SvmModel& model, const Options& o) {
    ts::LoadedResources res;
    std::map<std::string, std::string> supplied;  // kind:stem -> path
    auto note = [&supplied](const std::vector<std::string>& paths, const char* kind) {
        for (const auto& p : paths) supplied[std::string(kind) + ":" + ts::detail::file_stem(p)] = p;
    };
    note(o.lexicon_paths, "lexicon");
    note(o.cluster_paths, "clusters");
    note(o.embedding_paths, "embeddings");

    std::set<std::string> used;
    for (const auto& rec : model.settings.resources) {
        const std::string key = rec.kind + ":" + rec.name;
        std::string path;
        if (auto it = supplied.find(key); it != supplied.end()) {
            path = it->second;
            used.insert(key);
        } else if (fs::exists(rec.path)) {
            path = rec.path;
        } else {
            std::cerr << "warning: " << rec.kind << " '" << rec.name << "' (" << rec.path
                      << ") is not available; its features will be inactive\n";
            continue;
        }
        try {
            auto fp = ts::fingerprint_file(rec.kind, rec.name, path);
            if (fp.bytes != rec.bytes || fp.hash != rec.hash)
                std::cerr << "warning: " << rec.kind << " '" << rec.name << "' (" << path
                          << ") differs from the training-time fingerprint\n";
            if (rec.kind == "lexicon") res.lexicons.push_back(ts::load_lexicon_file(path));
            else if (rec.kind == "clusters") res.clusters.push_back(ts::load_clusters_file(path));
            else if (rec.kind == "embeddings") res.embeddings.push_back(ts::load_embeddings_file(path));
        } catch (const std::exception& e) {
            std::cerr << "warning: failed to load " << rec.kind << " '" << rec.name << "': " << e.what()
                      << "; its features will be inactive\n";
        }
    }
    for (const auto& [key, path] : supplied)
        if (!used.count(key) && !std::any_of(model.settings.resources.begin(), model.settings.resources.end(),
                                             [&](const ts::ResourceInfo& r) { return r.kind + ":" + r.name == key; }))
            std::cerr << "warning: " << path << " was not used at training time; ignored\n";
    return res;
}

std::string score_or_na(const std::optional<double>& s) {
    return s ? ts::format_double(*s) : "na";
}

int cmd_train(const Options& o, const std::string& train_path, const std::string& model_path) {
    ts::PipelineSettings settings;
    settings.profile = make_profile(o);
    settings.features = make_toggles(o);

    ts::LoadedResources resources = load_resources(o, settings.features, &settings.resources);
    std::vector<ts::Tweet> corpus = read_corpus(train_path, o.tagged, o.skip_bad);
    if (corpus.empty()) throw std::runtime_error(train_path + ": empty training corpus");

    ts::TrainOptions topts{o.c, o.tol, o.max_epochs, o.seed};
    ts::TrainSummary summary;
    ts::SvmModel model = ts::train_model(corpus, settings, resources, topts, &summary);
    ts::save_model_file(model, model_path);

    std::cout << "trained " << model.ovr.machines.size() << " machines on " << corpus.size() << " tweets\n";
    std::cout << "feature space dimension: " << summary.dim << "\n";
    std::cout << "support:";
    for (int c = 0; c < ts::kNumClasses; ++c)
        std::cout << ' ' << ts::to_string(static_cast<ts::Sentiment>(c)) << '=' << summary.support[c];
    std::cout << "\n";
    for (size_t k = 0; k < model.ovr.classes.size(); ++k) {
        const auto& info = summary.infos[k];
        std::cout << "machine " << ts::to_string(model.ovr.classes[k]) << ": epochs=" << info.epochs
                  << " converged=" << (info.converged ? "yes" : "no")
                  << " dual-objective=" << ts::format_double(info.dual_objective) << "\n";
    }
    std::cout << "model written to " << model_path << "\n";

    if (!o.dev_path.empty()) {
        std::vector<ts::Tweet> dev = read_corpus(o.dev_path, o.tagged, o.skip_bad);
        ts::TweetFeaturizer featurizer(model.settings, &resources);
        std::vector<ts::Sentiment> gold, pred;
        for (const auto& t : dev) {
            if (!t.label) throw std::runtime_error(o.dev_path + ": tweet '" + t.id + "' has no gold label");
            gold.push_back(*t.label);
        }
        for (const auto& p : ts::predict_tweets(model, featurizer, dev)) pred.push_back(p.label);
        const ts::EvalReport r = ts::evaluate(gold, pred);
        std::cout << "dev rho=" << ts::format_double(r.rho) << " f1_pn=" << ts::format_double(r.f1pn)
                  << " acc=" << ts::format_double(r.acc) << "\n";
    }
    return 0;
}

int cmd_predict(const Options& o, const std::string& model_path, const std::string& input_path,
                const std::string& out_path) {
    ts::SvmModel model = ts::load_model_file(model_path);
    ts::LoadedResources resources = resolve_predict_resources(model, o);
    ts::TweetFeaturizer featurizer(model.settings, &resources);

    std::vector<ts::Tweet> tweets = read_corpus(input_path, o.tagged, o.skip_bad);
    auto predictions = ts::predict_tweets(model, featurizer, tweets);

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!out_path.empty()) {
        file.open(out_path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot write " + out_path);
        out = &file;
    }
    for (size_t i = 0; i < tweets.size(); ++i) {
        const auto& p = predictions[i];
        *out << tweets[i].id << '\t' << ts::to_string(p.label) << '\t' << score_or_na(p.scores[0]) << '\t'
             << score_or_na(p.scores[1]) << '\t' << score_or_na(p.scores[2]) << '\n';
    }
    out->flush();
    return 0;
}

int cmd_evaluate(const Options& o, const std::string& model_path, const std::string& input_path,
                 const std::string& kv_path) {
    ts::SvmModel model = ts::load_model_file(model_path);
    ts::LoadedResources resources = resolve_predict_resources(model, o);
    ts::TweetFeaturizer featurizer(model.settings, &resources);

    std::vector<ts::Tweet> tweets = read_corpus(input_path, o.tagged, o.skip_bad);
    if (tweets.empty()) throw std::runtime_error(input_path + ": no tweets to evaluate");
    std::vector<ts::Sentiment> gold;
    for (const auto& t : tweets) {
        if (!t.label) throw std::runtime_error(input_path + ": tweet '" + t.id + "' has no gold label");
        gold.push_back(*t.label);
    }
    std::vector<ts::Sentiment> pred;
    for (const auto& p : ts::predict_tweets(model, featurizer, tweets)) pred.push_back(p.label);

    const ts::EvalReport system = ts::evaluate(gold, pred);
    const auto baselines = ts::baseline_report(gold);
    for (ts::Sentiment c : system.absent_gold)
        std::cerr << "warning: gold set contains no '" << ts::to_string(c) << "' tweets; its recall counts as 0\n";
    std::cout << ts::render_report_table(system, baselines);
    if (!kv_path.empty()) {
        std::ofstream kv(kv_path, std::ios::binary);
        if (!kv) throw std::runtime_error("cannot write " + kv_path);
        kv << ts::render_kv(system);
    }
    return 0;
}

int cmd_inspect(const Options& o) {
    if (o.lexicon_paths.empty() && o.cluster_paths.empty() && o.embedding_paths.empty())
        throw std::runtime_error("nothing to inspect: pass --lexicon/--clusters/--embeddings paths");
    for (const auto& path : o.lexicon_paths) {
        auto lex = ts::load_lexicon_file(path);
        long pos = 0, neg = 0;
        for (const auto& [term, score] : lex.scores) (score > 0 ? pos : neg)++;
        auto fp = ts::fingerprint_file("lexicon", lex.name, path);
        std::cout << "lexicon " << lex.name << ": " << lex.scores.size() << " terms (" << pos
                  << " positive, " << neg << " negative), " << fp.bytes << " bytes, hash "
                  << ts::detail::hash_hex(fp.hash) << "\n";
    }
    for (const auto& path : o.cluster_paths) {
        auto cm = ts::load_clusters_file(path);
        std::set<std::string> ids;
        for (const auto& [word, id] : cm.assignment) ids.insert(id);
        auto fp = ts::fingerprint_file("clusters", cm.name, path);
        std::cout << "clusters " << cm.name << ": " << cm.assignment.size() << " words, " << ids.size()
                  << " clusters, " << fp.bytes << " bytes, hash " << ts::detail::hash_hex(fp.hash) << "\n";
    }
    for (const auto& path : o.embedding_paths) {
        auto em = ts::load_embeddings_file(path);
        auto fp = ts::fingerprint_file("embeddings", em.name, path);
        std::cout << "embeddings " << em.name << ": " << em.vectors.size() << " words, dim " << em.dim
                  << ", " << fp.bytes << " bytes, hash " << ts::detail::hash_hex(fp.hash) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tweet sentiment classification pipeline"};
    app.require_subcommand(1);

    Options opt;
    std::string train_path, model_path, input_path, out_path, kv_path;

    CLI::App* train = app.add_subcommand("train", "Train a model from a labeled tweet file");
    train->add_option("train_file", train_path, "Labeled tweet TSV (or --tagged blocks)")->required();
    train->add_option("model_out", model_path, "Output model path")->required();
    auto train_refs = add_common_options(*train, opt);
    train->add_option("--dev", opt.dev_path, "Report metrics on this labeled file after training");

    CLI::App* predict = app.add_subcommand("predict", "Predict labels for a tweet file");
    predict->add_option("model_file", model_path, "Trained model")->required();
    predict->add_option("input_file", input_path, "Tweet TSV (label column optional) or --tagged blocks")
        ->required();
    predict->add_option("-o,--out", out_path, "Write predictions here instead of stdout");
    auto predict_refs = add_common_options(*predict, opt);

    CLI::App* evaluate = app.add_subcommand("evaluate", "Score a model against a labeled file");
    evaluate->add_option("model_file", model_path, "Trained model")->required();
    evaluate->add_option("input_file", input_path, "Labeled tweet TSV or --tagged blocks")->required();
    evaluate->add_option("--kv", kv_path, "Also write a machine-readable key-value report");
    auto eval_refs = add_common_options(*evaluate, opt);

    CLI::App* inspect = app.add_subcommand("inspect-resources", "Validate and summarize resource files");
    auto inspect_refs = add_common_options(*inspect, opt);

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) {
            merge_config_file(opt, train_refs);
            return cmd_train(opt, train_path, model_path);
        }
        if (predict->parsed()) {
            merge_config_file(opt, predict_refs);
            return cmd_predict(opt, model_path, input_path, out_path);
        }
        if (evaluate->parsed()) {
            merge_config_file(opt, eval_refs);
            return cmd_evaluate(opt, model_path, input_path, kv_path);
        }
        if (inspect->parsed()) {
            merge_config_file(opt, inspect_refs);
            return cmd_inspect(opt);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
