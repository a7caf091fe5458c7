#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reflex/common.hpp"

namespace reflex::harness {

// Lines of nested <x>...</x> elements over a small tag alphabet.
struct TagGrammar {
    std::string tags = "abcd";
    int max_depth = 3;
    int max_children = 2;
};

namespace tag_detail {

inline void element(const TagGrammar& g, SplitMix& rng, int depth, std::string& out) {
    const char tag = g.tags[static_cast<std::size_t>(rng.below(g.tags.size()))];
    out += '<';
    out += tag;
    out += '>';
    if (depth < g.max_depth) {
        const auto kids = static_cast<int>(rng.below(static_cast<std::uint64_t>(g.max_children) + 1));
        for (int i = 0; i < kids; ++i) element(g, rng, depth + 1, out);
    }
    out += "</";
    out += tag;
    out += '>';
}

}  // namespace tag_detail

inline std::string tag_line(const TagGrammar& g, SplitMix& rng) {
    std::string s;
    tag_detail::element(g, rng, 1, s);
    s += '\n';
    return s;
}

inline std::string tag_corpus(std::uint64_t seed, std::size_t lines, const TagGrammar& g = {}) {
    SplitMix rng(seed);
    std::string s;
    for (std::size_t i = 0; i < lines; ++i) s += tag_line(g, rng);
    return s;
}

// Every complete line must be a balanced sequence of <x> / </x> tags over
// the alphabet; the trailing unterminated line must be a valid prefix of one.
// Empty lines are rejected and at least one complete line is required.
inline bool tag_balance_ok(const std::string& snippet, const std::string& tags = "abcd") {
    std::vector<char> stack;
    int complete = 0;
    std::size_t line_start = 0;
    std::size_t i = 0;
    const std::size_t n = snippet.size();
    auto is_tag = [&](char ch) { return tags.find(ch) != std::string::npos; };
    while (i < n) {
        const char ch = snippet[i];
        if (ch == '\n') {
            if (!stack.empty() || i == line_start) return false;
            ++complete;
            line_start = ++i;
            continue;
        }
        if (ch != '<') return false;
        // Truncated trailing token: accept if consistent so far.
        if (i + 1 >= n) break;
        if (snippet[i + 1] == '/') {
            if (i + 2 >= n) { if (stack.empty()) return false; break; }
            const char t = snippet[i + 2];
            if (!is_tag(t) || stack.empty() || stack.back() != t) return false;
            if (i + 3 >= n) break;
            if (snippet[i + 3] != '>') return false;
            stack.pop_back();
            i += 4;
        } else {
            const char t = snippet[i + 1];
            if (!is_tag(t)) return false;
            if (i + 2 >= n) break;
            if (snippet[i + 2] != '>') return false;
            stack.push_back(t);
            i += 3;
        }
    }
    return complete >= 1;
}

}  // namespace reflex::harness
