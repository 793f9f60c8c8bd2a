#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tweetsent/unicode.hpp"
#include "tweetsent/util.hpp"

namespace tweetsent {

// Class order is fixed (negative < neutral < positive) and used everywhere:
// confusion matrices, model files, argmax tie-breaking.
enum class Sentiment : int { negative = 0, neutral = 1, positive = 2 };

inline constexpr int kNumClasses = 3;
inline constexpr std::array<Sentiment, 3> kAllClasses = {
    Sentiment::negative, Sentiment::neutral, Sentiment::positive};

inline std::string_view to_string(Sentiment s) {
    switch (s) {
        case Sentiment::negative: return "negative";
        case Sentiment::neutral: return "neutral";
        case Sentiment::positive: return "positive";
    }
    return "?";
}

inline std::optional<Sentiment> parse_sentiment(std::string_view s) {
    if (s == "negative") return Sentiment::negative;
    if (s == "neutral") return Sentiment::neutral;
    if (s == "positive") return Sentiment::positive;
    return std::nullopt;
}

enum class Language { english, arabic };

struct LanguageProfile {
    Language language = Language::english;
    std::unordered_set<std::string> negation_words;
    std::string negation_suffix;
    bool lowercase = true;
    bool strip_non_native_letters = false;

    static LanguageProfile english() {
        LanguageProfile p;
        p.language = Language::english;
        p.negation_suffix = "_NEG";
        p.lowercase = true;
        p.strip_non_native_letters = false;
        p.negation_words = {
            "no", "not", "never", "cannot", "don't", "doesn't", "didn't",
            "won't", "wouldn't", "can't", "couldn't", "isn't", "aren't",
            "wasn't", "weren't", "shouldn't", "haven't", "hasn't", "hadn't",
            "n't", "neither", "nor"};
        return p;
    }

    //  لا and ليس only; ما is ambiguous (question word / relative pronoun)
    //  and deliberately not a trigger.
    static LanguageProfile arabic() {
        LanguageProfile p;
        p.language = Language::arabic;
        p.negation_suffix = "_منفي";
        p.lowercase = false;
        p.strip_non_native_letters = true;
        p.negation_words = {"لا", "ليس"};
        return p;
    }
};

struct Token {
    std::string surface;
    std::string pos;  // empty = untagged
    bool negated = false;

    bool tagged() const { return !pos.empty(); }
};

struct Tweet {
    std::string id;
    std::string text;
    std::vector<Token> tokens;
    std::optional<Sentiment> label;
};

namespace detail {

inline bool is_sentence_punct(char32_t cp) {
    switch (cp) {
        case U'.': case U',': case U';': case U':': case U'!': case U'?':
        case U'،':  // ،
        case U'؛':  // ؛
        case U'؟':  // ؟
            return true;
        default:
            return false;
    }
}

inline bool is_edge_punct(char32_t cp) {
    return is_sentence_punct(cp) || cp == U'(' || cp == U')' || cp == U'"' || cp == U'\'';
}

inline std::string ascii_fold(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c += 'a' - 'A';
    return out;
}

inline bool looks_like_url(std::string_view chunk) {
    auto ieq = [](char a, char b) {
        if (a >= 'A' && a <= 'Z') a += 'a' - 'A';
        return a == b;
    };
    if (chunk.size() >= 4 && ieq(chunk[0], 'w') && ieq(chunk[1], 'w') && ieq(chunk[2], 'w') &&
        chunk[3] == '.')
        return true;
    // scheme:// with scheme = letter (letter | digit | + | . | -)*
    if (chunk.empty() || !is_latin_letter(static_cast<unsigned char>(chunk[0]))) return false;
    size_t i = 1;
    while (i < chunk.size()) {
        char c = chunk[i];
        if (is_latin_letter(static_cast<unsigned char>(c)) || (c >= '0' && c <= '9') ||
            c == '+' || c == '.' || c == '-') {
            ++i;
            continue;
        }
        break;
    }
    return chunk.compare(i, 3, "://") == 0;
}

inline bool is_username(std::string_view chunk) {
    return !chunk.empty() && chunk[0] == '@';
}

// Full-chunk emoticon matcher, ASCII only. Covers the usual forward faces
// (:-) ;P =D x/ ...), reversed faces ((: D8 ...) and hearts (<3 </3).
inline bool is_emoticon(std::string_view s) {
    auto is_eyes = [](char c) { return c == ':' || c == ';' || c == '=' || c == '8' || c == 'x' || c == 'X'; };
    auto is_nose = [](char c) { return c == '-' || c == '^' || c == 'o' || c == '\'' || c == '*'; };
    auto is_mouth = [](char c) {
        switch (c) {
            case ')': case '(': case ']': case '[': case 'D': case 'd':
            case 'P': case 'p': case 'O': case 'o': case '/': case '\\':
            case '|': case '{': case '}': case '3': case '*': case '@':
                return true;
            default:
                return false;
        }
    };
    if (s.size() < 2) return false;
    // <3 <33 </3
    if (s[0] == '<') {
        size_t i = 1;
        if (i < s.size() && s[i] == '/') ++i;
        if (i >= s.size() || s[i] != '3') return false;
        while (i < s.size() && s[i] == '3') ++i;
        return i == s.size();
    }
    // forward: eyes [nose] mouth+
    if (is_eyes(s[0])) {
        size_t i = 1;
        if (i < s.size() && is_nose(s[i]) && i + 1 < s.size() && is_mouth(s[i + 1])) ++i;
        size_t mouth_start = i;
        while (i < s.size() && is_mouth(s[i])) ++i;
        if (i == s.size() && i > mouth_start) return true;
    }
    // reversed: mouth+ [nose] eyes
    size_t i = 0;
    while (i < s.size() && is_mouth(s[i])) ++i;
    if (i > 0 && i < s.size()) {
        if (is_nose(s[i]) && i + 1 < s.size()) ++i;
        if (i + 1 == s.size() && is_eyes(s[i])) return true;
    }
    return false;
}

// Runs of >= 3 identical codepoints are reduced to exactly 2.
inline std::string cap_elongation(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    size_t i = 0;
    char32_t prev = 0;
    int run = 0;
    while (i < s.size()) {
        size_t start = i;
        char32_t cp = utf8_next(s, i);
        if (cp == prev) {
            ++run;
        } else {
            prev = cp;
            run = 1;
        }
        if (run <= 2) out.append(s.substr(start, i - start));
    }
    return out;
}

inline std::string strip_latin(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) {
        size_t start = i;
        char32_t cp = utf8_next(s, i);
        if (!is_latin_letter(cp)) out.append(s.substr(start, i - start));
    }
    return out;
}

}  // namespace detail

// Normalization order is fixed: URL/username removal, case fold, Latin-letter
// strip, elongation capping, whitespace collapse. The URL/username check runs
// again on the transformed chunk because letter stripping can expose an
// @-prefixed remnant ("x@1" -> "@1"); without the re-check normalize would
// not be idempotent.
inline std::string normalize(std::string_view raw, const LanguageProfile& profile) {
    std::string out;
    for (std::string_view chunk : split_whitespace(raw)) {
        if (detail::looks_like_url(chunk) || detail::is_username(chunk)) continue;
        std::string s(chunk);
        if (profile.lowercase) s = detail::ascii_fold(s);
        if (profile.strip_non_native_letters) s = detail::strip_latin(s);
        s = detail::cap_elongation(s);
        if (s.empty()) continue;
        if (detail::looks_like_url(s) || detail::is_username(s)) continue;
        if (!out.empty()) out.push_back(' ');
        out += s;
    }
    return out;
}

// Whitespace split, then per chunk: emoticons pass through whole; edge
// punctuation (. , ; : ! ? ( ) " ' ، ؛ ؟) is peeled into standalone tokens;
// a core that is a hashtag or emoticon stays intact; otherwise the core is
// split at internal sentence punctuation. Apostrophes and quotes inside a
// word ("don't") are kept.
inline std::vector<Token> tokenize(std::string_view normalized) {
    std::vector<Token> tokens;
    auto emit = [&tokens](std::string s) { tokens.push_back(Token{std::move(s), "", false}); };

    for (std::string_view chunk : split_whitespace(normalized)) {
        if (detail::is_emoticon(chunk)) {
            emit(std::string(chunk));
            continue;
        }
        std::vector<char32_t> cps = utf8_decode(chunk);
        size_t lo = 0, hi = cps.size();
        auto window = [&cps](size_t a, size_t b) {
            return utf8_encode(std::vector<char32_t>(cps.begin() + a, cps.begin() + b));
        };
        // Peel edge punctuation, preferring whichever end uncovers an
        // emoticon ("':)'" -> ' :) ').
        while (lo < hi) {
            if (detail::is_emoticon(window(lo, hi))) break;
            const bool front = detail::is_edge_punct(cps[lo]);
            const bool back = detail::is_edge_punct(cps[hi - 1]);
            if (!front && !back) break;
            if (front && lo + 1 < hi && detail::is_emoticon(window(lo + 1, hi))) { ++lo; continue; }
            if (back && lo < hi - 1 && detail::is_emoticon(window(lo, hi - 1))) { --hi; continue; }
            if (front) ++lo;
            else --hi;
        }

        for (size_t k = 0; k < lo; ++k) emit(utf8_encode({cps[k]}));

        if (lo < hi) {
            std::string core = window(lo, hi);
            if (core[0] == '#' || detail::is_emoticon(core)) {
                emit(std::move(core));
            } else {
                std::string word;
                for (size_t k = lo; k < hi; ++k) {
                    if (detail::is_sentence_punct(cps[k])) {
                        if (!word.empty()) emit(std::exchange(word, {}));
                        emit(utf8_encode({cps[k]}));
                    } else {
                        utf8_append(word, cps[k]);
                    }
                }
                if (!word.empty()) emit(std::move(word));
            }
        }

        for (size_t k = hi; k < cps.size(); ++k) emit(utf8_encode({cps[k]}));
    }
    return tokens;
}

namespace detail {

inline bool is_sentence_punct_token(const Token& t) {
    size_t i = 0;
    if (t.surface.empty()) return false;
    char32_t cp = utf8_next(t.surface, i);
    return i == t.surface.size() && is_sentence_punct(cp);
}

}  // namespace detail

// A negated context starts after a negation word and runs to the next
// sentence punctuation token (exclusive) or the end of the tweet. The trigger
// and the terminator keep negated=false. A trigger inside an active span is
// negated like any other token and does not move the span end.
inline std::vector<Token> mark_negation(std::vector<Token> tokens, const LanguageProfile& profile) {
    std::unordered_set<std::string> triggers;
    const bool fold = profile.language == Language::english;
    for (const auto& w : profile.negation_words)
        triggers.insert(fold ? detail::ascii_fold(w) : w);

    bool active = false;
    for (Token& t : tokens) {
        t.negated = false;
        if (detail::is_sentence_punct_token(t)) {
            active = false;
        } else if (active) {
            t.negated = true;
        } else {
            const std::string key = fold ? detail::ascii_fold(t.surface) : t.surface;
            if (triggers.count(key)) active = true;
        }
    }
    return tokens;
}

inline std::vector<Token> attach_tags(std::vector<Token> tokens, std::span<const std::string> tags) {
    if (tags.size() != tokens.size())
        throw std::invalid_argument("attach_tags: " + std::to_string(tags.size()) + " tags for " +
                                    std::to_string(tokens.size()) + " tokens");
    for (size_t i = 0; i < tokens.size(); ++i) tokens[i].pos = tags[i];
    return tokens;
}

inline std::vector<Token> run_pipeline(std::string_view raw, const LanguageProfile& profile) {
    return mark_negation(tokenize(normalize(raw, profile)), profile);
}

}  // namespace tweetsent
