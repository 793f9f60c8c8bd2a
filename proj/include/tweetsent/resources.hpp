#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tweetsent/util.hpp"

namespace tweetsent {

// Signed-score sentiment lexicon. Positive terms score > 0, negative < 0;
// zero and non-finite scores are rejected at load.
struct Lexicon {
    std::string name;
    std::unordered_map<std::string, double> scores;

    std::optional<double> score(std::string_view term) const {
        auto it = scores.find(std::string(term));
        if (it == scores.end()) return std::nullopt;
        return it->second;
    }
};

struct EmbeddingModel {
    std::string name;
    size_t dim = 0;
    std::unordered_map<std::string, std::vector<double>> vectors;

    const std::vector<double>* vector(std::string_view word) const {
        auto it = vectors.find(std::string(word));
        return it == vectors.end() ? nullptr : &it->second;
    }
};

struct ClusterMap {
    std::string name;
    std::unordered_map<std::string, std::string> assignment;

    std::optional<std::string_view> cluster(std::string_view word) const {
        auto it = assignment.find(std::string(word));
        if (it == assignment.end()) return std::nullopt;
        return std::string_view(it->second);
    }
};

namespace detail {

[[noreturn]] inline void resource_error(std::string_view name, size_t line, std::string_view msg) {
    std::ostringstream os;
    os << name << ": line " << line << ": " << msg;
    throw std::runtime_error(os.str());
}

inline bool next_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

inline bool skippable(const std::string& line) {
    return line.empty() || line[0] == '#';
}

}  // namespace detail

// One entry per line: term<TAB>score. '#' lines are comments, duplicate
// terms keep the last occurrence.
inline Lexicon load_lexicon(std::istream& in, std::string name) {
    Lexicon lex;
    lex.name = std::move(name);
    std::string line;
    size_t lineno = 0;
    while (detail::next_line(in, line)) {
        ++lineno;
        if (detail::skippable(line)) continue;
        auto cols = split(line, '\t');
        if (cols.size() != 2)
            detail::resource_error(lex.name, lineno,
                                   "expected 2 tab-separated columns, got " + std::to_string(cols.size()));
        if (cols[0].empty()) detail::resource_error(lex.name, lineno, "empty term");
        double score;
        if (!parse_double(cols[1], score))
            detail::resource_error(lex.name, lineno, "non-numeric score '" + std::string(cols[1]) + "'");
        if (!std::isfinite(score)) detail::resource_error(lex.name, lineno, "non-finite score");
        if (score == 0.0) detail::resource_error(lex.name, lineno, "zero score (terms must be signed)");
        lex.scores[std::string(cols[0])] = score;
    }
    return lex;
}

inline void write_lexicon(const Lexicon& lex, std::ostream& out) {
    std::map<std::string, double> sorted(lex.scores.begin(), lex.scores.end());
    for (const auto& [term, score] : sorted) out << term << '\t' << format_double(score) << '\n';
}

// word2vec text format: optional "count dim" header, then one
// "word v1 .. vd" line per word. The dimension is inferred from the first
// vector when no header is present.
inline EmbeddingModel load_embeddings(std::istream& in, std::string name) {
    EmbeddingModel model;
    model.name = std::move(name);
    std::string line;
    size_t lineno = 0;
    bool first_data_line = true;
    while (detail::next_line(in, line)) {
        ++lineno;
        if (detail::skippable(line)) continue;
        auto cols = split_whitespace(line);
        if (first_data_line) {
            first_data_line = false;
            long count, dim;
            if (cols.size() == 2 && parse_long(cols[0], count) && parse_long(cols[1], dim)) {
                if (dim <= 0) detail::resource_error(model.name, lineno, "header dimension must be positive");
                model.dim = static_cast<size_t>(dim);
                continue;
            }
        }
        if (cols.size() < 2)
            detail::resource_error(model.name, lineno, "expected a word followed by vector components");
        const size_t d = cols.size() - 1;
        if (model.dim == 0) {
            model.dim = d;
        } else if (d != model.dim) {
            detail::resource_error(model.name, lineno,
                                   "dimension mismatch: got " + std::to_string(d) + " components, expected " +
                                       std::to_string(model.dim));
        }
        std::vector<double> vec(d);
        for (size_t k = 0; k < d; ++k) {
            if (!parse_double(cols[k + 1], vec[k]))
                detail::resource_error(model.name, lineno,
                                       "non-numeric component '" + std::string(cols[k + 1]) + "'");
            if (!std::isfinite(vec[k])) detail::resource_error(model.name, lineno, "non-finite component");
        }
        model.vectors[std::string(cols[0])] = std::move(vec);
    }
    if (model.vectors.empty())
        throw std::runtime_error(model.name + ": empty embedding model");
    return model;
}

inline void write_embeddings(const EmbeddingModel& model, std::ostream& out) {
    out << model.vectors.size() << ' ' << model.dim << '\n';
    std::map<std::string, const std::vector<double>*> sorted;
    for (const auto& [word, vec] : model.vectors) sorted.emplace(word, &vec);
    for (const auto& [word, vec] : sorted) {
        out << word;
        for (double v : *vec) out << ' ' << format_double(v);
        out << '\n';
    }
}

// 2-column word<TAB>cluster-id, or 3-column Brown paths
// (cluster-path<TAB>word<TAB>count). Layout is auto-detected from the first
// non-comment line and must stay consistent.
inline ClusterMap load_clusters(std::istream& in, std::string name) {
    ClusterMap map;
    map.name = std::move(name);
    std::string line;
    size_t lineno = 0;
    size_t ncols = 0;
    while (detail::next_line(in, line)) {
        ++lineno;
        if (detail::skippable(line)) continue;
        auto cols = split(line, '\t');
        if (cols.size() != 2 && cols.size() != 3)
            detail::resource_error(map.name, lineno,
                                   "expected 2 or 3 tab-separated columns, got " + std::to_string(cols.size()));
        if (ncols == 0) ncols = cols.size();
        if (cols.size() != ncols)
            detail::resource_error(map.name, lineno,
                                   "inconsistent column count: got " + std::to_string(cols.size()) +
                                       ", file started with " + std::to_string(ncols));
        std::string_view word = ncols == 2 ? cols[0] : cols[1];
        std::string_view id = ncols == 2 ? cols[1] : cols[0];
        if (word.empty()) detail::resource_error(map.name, lineno, "empty word");
        if (id.empty()) detail::resource_error(map.name, lineno, "empty cluster id");
        map.assignment[std::string(word)] = std::string(id);
    }
    return map;
}

inline void write_clusters(const ClusterMap& map, std::ostream& out) {
    std::map<std::string, std::string> sorted(map.assignment.begin(), map.assignment.end());
    for (const auto& [word, id] : sorted) out << word << '\t' << id << '\n';
}

namespace detail {

inline std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return in;
}

inline std::string file_stem(std::string_view path) {
    size_t slash = path.find_last_of("/\\");
    std::string_view base = slash == std::string_view::npos ? path : path.substr(slash + 1);
    size_t dot = base.find_last_of('.');
    if (dot != std::string_view::npos && dot > 0) base = base.substr(0, dot);
    return std::string(base);
}

}  // namespace detail

inline Lexicon load_lexicon_file(const std::string& path) {
    auto in = detail::open_or_throw(path);
    return load_lexicon(in, detail::file_stem(path));
}

inline EmbeddingModel load_embeddings_file(const std::string& path) {
    auto in = detail::open_or_throw(path);
    return load_embeddings(in, detail::file_stem(path));
}

inline ClusterMap load_clusters_file(const std::string& path) {
    auto in = detail::open_or_throw(path);
    return load_clusters(in, detail::file_stem(path));
}

}  // namespace tweetsent
