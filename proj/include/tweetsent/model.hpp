#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tweetsent/features.hpp"
#include "tweetsent/svm.hpp"
#include "tweetsent/text.hpp"
#include "tweetsent/util.hpp"

namespace tweetsent {

struct FeatureToggles {
    bool bow = true;
    bool bonw = true;
    bool pos = true;
    bool bitagged = true;
    bool lexicons = false;
    bool clusters = false;
    bool embeddings = false;

    bool any() const { return bow || bonw || pos || bitagged || lexicons || clusters || embeddings; }

    std::string to_list() const {
        std::string out;
        auto add = [&out](bool on, std::string_view name) {
            if (!on) return;
            if (!out.empty()) out += ',';
            out += name;
        };
        add(bow, "bow");
        add(bonw, "bonw");
        add(pos, "pos");
        add(bitagged, "bitagged");
        add(lexicons, "lexicons");
        add(clusters, "clusters");
        add(embeddings, "embeddings");
        return out;
    }

    static FeatureToggles from_list(std::string_view list) {
        FeatureToggles t;
        t.bow = t.bonw = t.pos = t.bitagged = false;
        for (std::string_view item : split(list, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            if (item == "bow") t.bow = true;
            else if (item == "bonw") t.bonw = true;
            else if (item == "pos") t.pos = true;
            else if (item == "bitagged") t.bitagged = true;
            else if (item == "lexicons") t.lexicons = true;
            else if (item == "clusters") t.clusters = true;
            else if (item == "embeddings") t.embeddings = true;
            else throw std::invalid_argument("unknown feature family '" + std::string(item) + "'");
        }
        return t;
    }
};

// Fingerprint of a resource file used at training time. Prediction warns
// (but does not fail) when a fingerprinted resource is missing or changed.
struct ResourceInfo {
    std::string kind;  // "lexicon" | "clusters" | "embeddings"
    std::string name;
    std::string path;
    uint64_t bytes = 0;
    uint64_t hash = 0;  // fnv1a64 of the file contents
};

inline ResourceInfo fingerprint_file(const std::string& kind, const std::string& name,
                                     const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    ResourceInfo info{kind, name, path, 0, 0xcbf29ce484222325ull};
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        info.hash = fnv1a64(buf, static_cast<size_t>(in.gcount()), info.hash);
        info.bytes += static_cast<uint64_t>(in.gcount());
        if (!in) break;
    }
    return info;
}

struct PipelineSettings {
    LanguageProfile profile = LanguageProfile::english();
    FeatureToggles features;
    std::vector<ResourceInfo> resources;
};

// Everything needed to reproduce vectorization at predict time.
struct SvmModel {
    OvrModel ovr;
    FeatureSpace space;
    PipelineSettings settings;
    TrainOptions train_options;
};

inline constexpr std::string_view kModelMagic = "tweetsent-model";
inline constexpr int kModelVersion = 1;

namespace detail {

inline std::string hash_hex(uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

inline uint64_t parse_hash_hex(std::string_view s, size_t lineno) {
    uint64_t h = 0;
    if (s.empty() || s.size() > 16) throw std::runtime_error("model: line " + std::to_string(lineno) + ": bad hash");
    for (char c : s) {
        h <<= 4;
        if (c >= '0' && c <= '9') h |= static_cast<uint64_t>(c - '0');
        else if (c >= 'a' && c <= 'f') h |= static_cast<uint64_t>(c - 'a' + 10);
        else throw std::runtime_error("model: line " + std::to_string(lineno) + ": bad hash");
    }
    return h;
}

class ModelReader {
public:
    explicit ModelReader(std::istream& in) : in_(in) {}

    // Reads the next line and checks its first tab-separated field.
    std::vector<std::string> expect(std::string_view key) {
        std::string line;
        if (!std::getline(in_, line))
            throw std::runtime_error("model: unexpected end of file, expected '" + std::string(key) + "'");
        ++lineno_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto views = split(line, '\t');
        if (views.empty() || views[0] != key)
            throw std::runtime_error("model: line " + std::to_string(lineno_) + ": expected '" +
                                     std::string(key) + "', got '" + std::string(views.empty() ? "" : views[0]) +
                                     "'");
        return {views.begin() + 1, views.end()};
    }

    std::string field(std::string_view key) {
        auto f = expect(key);
        if (f.size() != 1)
            throw std::runtime_error("model: line " + std::to_string(lineno_) + ": '" + std::string(key) +
                                     "' takes exactly one value");
        return f[0];
    }

    long count(std::string_view key) {
        long v;
        if (!parse_long(field(key), v) || v < 0) bad(std::string(key) + " count");
        return v;
    }

    double number(std::string_view key) {
        double v;
        if (!parse_double(field(key), v)) bad(std::string(key) + " value");
        return v;
    }

    [[noreturn]] void bad(std::string_view what) const {
        throw std::runtime_error("model: line " + std::to_string(lineno_) + ": malformed " + std::string(what));
    }

    size_t lineno() const { return lineno_; }

private:
    std::istream& in_;
    size_t lineno_ = 0;
};

}  // namespace detail

inline void save_model(const SvmModel& model, std::ostream& out) {
    const auto& s = model.settings;
    out << kModelMagic << '\t' << kModelVersion << '\n';
    out << "language\t" << (s.profile.language == Language::english ? "en" : "ar") << '\n';
    out << "lowercase\t" << (s.profile.lowercase ? 1 : 0) << '\n';
    out << "strip_non_native\t" << (s.profile.strip_non_native_letters ? 1 : 0) << '\n';
    out << "negation_suffix\t" << s.profile.negation_suffix << '\n';
    std::set<std::string> words(s.profile.negation_words.begin(), s.profile.negation_words.end());
    out << "negation_words\t" << words.size() << '\n';
    for (const auto& w : words) out << "nw\t" << w << '\n';
    out << "features\t" << s.features.to_list() << '\n';
    out << "train_c\t" << format_double(model.train_options.c) << '\n';
    out << "train_tol\t" << format_double(model.train_options.tol) << '\n';
    out << "train_max_epochs\t" << model.train_options.max_epochs << '\n';
    out << "train_seed\t" << model.train_options.seed << '\n';
    out << "resources\t" << s.resources.size() << '\n';
    for (const auto& r : s.resources)
        out << "res\t" << r.kind << '\t' << r.name << '\t' << r.bytes << '\t' << detail::hash_hex(r.hash)
            << '\t' << r.path << '\n';
    out << "space_dim\t" << model.space.dim() << '\n';
    out << "embed_blocks\t" << model.space.blocks().size() << '\n';
    for (const auto& b : model.space.blocks())
        out << "block\t" << b.source << '\t' << b.offset << '\t' << b.size << '\n';
    out << "feature_names\t" << model.space.names().size() << '\n';
    for (const auto& n : model.space.names()) out << "f\t" << n << '\n';
    out << "classes\t" << model.ovr.classes.size();
    for (Sentiment c : model.ovr.classes) out << '\t' << to_string(c);
    out << '\n';
    for (size_t k = 0; k < model.ovr.classes.size(); ++k) {
        const BinarySvm& m = model.ovr.machines[k];
        size_t nnz = 0;
        for (double w : m.weights)
            if (w != 0.0) ++nnz;
        out << "machine\t" << to_string(model.ovr.classes[k]) << '\t' << format_double(m.bias) << '\t' << nnz
            << '\n';
        out << "weights\t";
        bool first = true;
        for (size_t col = 0; col < m.weights.size(); ++col) {
            if (m.weights[col] == 0.0) continue;
            if (!first) out << ' ';
            first = false;
            out << col << ':' << format_double(m.weights[col]);
        }
        out << '\n';
    }
    out << "end\n";
}

inline SvmModel load_model(std::istream& in) {
    detail::ModelReader r(in);

    auto header = r.expect(kModelMagic);
    long version;
    if (header.size() != 1 || !parse_long(header[0], version))
        throw std::runtime_error("model: not a " + std::string(kModelMagic) + " file");
    if (version != kModelVersion)
        throw std::runtime_error("model: unsupported format version " + std::to_string(version) +
                                 " (this build reads version " + std::to_string(kModelVersion) + ")");

    SvmModel model;
    auto& s = model.settings;
    const std::string lang = r.field("language");
    if (lang == "en") s.profile = LanguageProfile::english();
    else if (lang == "ar") s.profile = LanguageProfile::arabic();
    else throw std::runtime_error("model: unknown language '" + lang + "'");
    s.profile.lowercase = r.field("lowercase") == "1";
    s.profile.strip_non_native_letters = r.field("strip_non_native") == "1";
    s.profile.negation_suffix = r.field("negation_suffix");
    const long n_words = r.count("negation_words");
    s.profile.negation_words.clear();
    for (long i = 0; i < n_words; ++i) s.profile.negation_words.insert(r.field("nw"));
    s.features = FeatureToggles::from_list(r.field("features"));
    model.train_options.c = r.number("train_c");
    model.train_options.tol = r.number("train_tol");
    model.train_options.max_epochs = static_cast<int>(r.count("train_max_epochs"));
    model.train_options.seed = static_cast<uint64_t>(r.count("train_seed"));

    const long n_res = r.count("resources");
    for (long i = 0; i < n_res; ++i) {
        auto f = r.expect("res");
        if (f.size() != 5) r.bad("resource record");
        ResourceInfo info;
        info.kind = f[0];
        info.name = f[1];
        long bytes;
        if (!parse_long(f[2], bytes) || bytes < 0) r.bad("resource size");
        info.bytes = static_cast<uint64_t>(bytes);
        info.hash = detail::parse_hash_hex(f[3], r.lineno());
        info.path = f[4];
        s.resources.push_back(std::move(info));
    }

    const long dim = r.count("space_dim");
    const long n_blocks = r.count("embed_blocks");
    std::vector<EmbedBlock> blocks;
    for (long i = 0; i < n_blocks; ++i) {
        auto f = r.expect("block");
        long offset, size;
        if (f.size() != 3 || !parse_long(f[1], offset) || !parse_long(f[2], size)) r.bad("block record");
        blocks.push_back(EmbedBlock{f[0], static_cast<uint32_t>(offset), static_cast<uint32_t>(size)});
    }
    const long n_names = r.count("feature_names");
    if (n_names != dim) throw std::runtime_error("model: feature_names count does not match space_dim");
    std::vector<std::string> names;
    names.reserve(static_cast<size_t>(n_names));
    for (long i = 0; i < n_names; ++i) names.push_back(r.field("f"));
    model.space = FeatureSpace::from_parts(std::move(names), std::move(blocks));

    auto class_fields = r.expect("classes");
    long n_classes;
    if (class_fields.empty() || !parse_long(class_fields[0], n_classes) ||
        static_cast<long>(class_fields.size()) != n_classes + 1)
        r.bad("classes record");
    for (long i = 0; i < n_classes; ++i) {
        auto c = parse_sentiment(class_fields[static_cast<size_t>(i) + 1]);
        if (!c) throw std::runtime_error("model: unknown class '" + class_fields[static_cast<size_t>(i) + 1] + "'");
        model.ovr.classes.push_back(*c);
    }

    for (long k = 0; k < n_classes; ++k) {
        auto mf = r.expect("machine");
        if (mf.size() != 3) r.bad("machine record");
        auto cls = parse_sentiment(mf[0]);
        if (!cls || *cls != model.ovr.classes[static_cast<size_t>(k)])
            throw std::runtime_error("model: machine order does not match class list");
        BinarySvm machine;
        machine.c = model.train_options.c;
        if (!parse_double(mf[1], machine.bias)) r.bad("machine bias");
        long nnz;
        if (!parse_long(mf[2], nnz) || nnz < 0) r.bad("machine nnz");
        auto wf = r.expect("weights");
        if (wf.size() != 1) r.bad("weights record");
        machine.weights.assign(static_cast<size_t>(dim), 0.0);
        auto entries = split_whitespace(wf[0]);
        if (static_cast<long>(entries.size()) != nnz) r.bad("weights entry count");
        for (std::string_view e : entries) {
            size_t colon = e.find(':');
            long col;
            double val;
            if (colon == std::string_view::npos || !parse_long(e.substr(0, colon), col) ||
                !parse_double(e.substr(colon + 1), val) || col < 0 || col >= dim)
                r.bad("weight entry");
            machine.weights[static_cast<size_t>(col)] = val;
        }
        model.ovr.machines.push_back(std::move(machine));
    }
    r.expect("end");
    return model;
}

inline void save_model_file(const SvmModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    save_model(model, out);
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + path);
}

inline SvmModel load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return load_model(in);
}

}  // namespace tweetsent
