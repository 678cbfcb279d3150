// Independent reference implementations used only by the test suites.
// Each oracle deliberately avoids the library's algorithmic path: brute
// force, plain recursion, or a direct transcription of a definition.
#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "wafboost/core.hpp"
#include "wafboost/ingest.hpp"
#include "wafboost/signature.hpp"

namespace oracles {

/// Levenshtein straight from the recursive definition. Exponential; only
/// for short strings.
inline std::size_t lev_recursive(const std::string& a, const std::string& b) {
    if (a.empty()) return b.size();
    if (b.empty()) return a.size();
    std::size_t del = lev_recursive(a.substr(1), b) + 1;
    std::size_t ins = lev_recursive(a, b.substr(1)) + 1;
    std::size_t sub = lev_recursive(a.substr(1), b.substr(1)) + (a[0] == b[0] ? 0 : 1);
    return std::min({del, ins, sub});
}

/// Exhaustive enumeration of all common-subsequence match chains,
/// maximizing matches - gap_penalty * gap_regions. Plain recursion over
/// every chain extension; no sharing with the DP under test.
inline double best_chain_score(const std::string& a, const std::string& b, std::size_t from_a,
                               std::size_t from_b, bool has_prev, std::size_t prev_a,
                               std::size_t prev_b, double gp) {
    double best = 0.0;  // stopping here adds nothing
    for (std::size_t i = from_a; i < a.size(); ++i) {
        for (std::size_t j = from_b; j < b.size(); ++j) {
            if (a[i] != b[j]) continue;
            double penalty = 0.0;
            if (has_prev && (i > prev_a + 1 || j > prev_b + 1)) penalty = gp;
            double rest = best_chain_score(a, b, i + 1, j + 1, true, i, j, gp);
            best = std::max(best, 1.0 - penalty + rest);
        }
    }
    return best;
}

inline double align_score_bruteforce(const std::string& a, const std::string& b, double gp) {
    return best_chain_score(a, b, 0, 0, false, 0, 0, gp);
}

/// Best score achievable by a specific subsequence embedded in both
/// strings (all embeddings enumerated). Returns negative infinity when
/// the string is not a common subsequence.
inline double best_embedding_score(const std::string& a, const std::string& b,
                                   const std::string& sub, double gp) {
    struct Rec {
        static double go(const std::string& a, const std::string& b, const std::string& sub,
                         std::size_t k, std::size_t from_a, std::size_t from_b, bool has_prev,
                         std::size_t prev_a, std::size_t prev_b, double gp) {
            if (k == sub.size()) return 0.0;
            double best = -1e300;
            for (std::size_t i = from_a; i < a.size(); ++i) {
                if (a[i] != sub[k]) continue;
                for (std::size_t j = from_b; j < b.size(); ++j) {
                    if (b[j] != sub[k]) continue;
                    double penalty =
                        has_prev && (i > prev_a + 1 || j > prev_b + 1) ? gp : 0.0;
                    double rest = go(a, b, sub, k + 1, i + 1, j + 1, true, i, j, gp);
                    if (rest > -1e299) best = std::max(best, 1.0 - penalty + rest);
                }
            }
            return best;
        }
    };
    return Rec::go(a, b, sub, 0, 0, 0, false, 0, 0, gp);
}

/// Backtracking matcher: tries every placement of every segment.
inline bool match_backtrack(const std::vector<std::string>& segments, const std::string& s,
                            std::size_t seg, std::size_t pos) {
    if (seg == segments.size()) return true;
    for (std::size_t at = pos; at + segments[seg].size() <= s.size(); ++at) {
        if (s.compare(at, segments[seg].size(), segments[seg]) == 0 &&
            match_backtrack(segments, s, seg + 1, at + segments[seg].size()))
            return true;
    }
    return false;
}

inline bool match_signature_bruteforce(const wafboost::Signature& sig, const wafboost::Payload& p) {
    return match_backtrack(sig.segments, wafboost::normalize_for_match(p.raw), 0, 0);
}

/// Recursive-descent recognizer for the synthesis grammar, built from
/// the productions and dictionaries directly.
class SqlRecognizer {
public:
    explicit SqlRecognizer(const wafboost::SqlGrammar& g) : g_(g) {}

    bool accepts(const wafboost::Payload& p) const {
        const auto toks = p.token_texts();
        std::size_t pos = 0;
        bool ok = parse_q(toks, pos);
        return ok && pos == toks.size();
    }

private:
    const wafboost::SqlGrammar& g_;

    static bool in(const std::vector<std::string>& dict, const std::string& t) {
        return std::find(dict.begin(), dict.end(), t) != dict.end();
    }

    bool eat(const std::vector<std::string>& toks, std::size_t& pos, const std::string& w) const {
        if (pos < toks.size() && toks[pos] == w) {
            ++pos;
            return true;
        }
        return false;
    }

    bool comparison(const std::string& t) const {
        for (char op : {'=', '<', '>'}) {
            std::size_t at = t.find(op);
            if (at == std::string::npos || at == 0 || at + 1 >= t.size()) continue;
            if (in(g_.fields, t.substr(0, at)) && in(g_.values, t.substr(at + 1))) return true;
        }
        return false;
    }

    bool term(const std::vector<std::string>& toks, std::size_t& pos) const {
        if (pos < toks.size() && comparison(toks[pos])) {
            ++pos;
            return true;
        }
        if (pos + 2 < toks.size() + 1 && pos + 2 <= toks.size() && in(g_.fields, toks[pos]) &&
            toks[pos + 1] == "like" && in(g_.strings, toks[pos + 2])) {
            pos += 3;
            return true;
        }
        return false;
    }

    bool expr(const std::vector<std::string>& toks, std::size_t& pos) const {
        if (!term(toks, pos)) return false;
        while (pos < toks.size() && (toks[pos] == "and" || toks[pos] == "or")) {
            ++pos;
            if (!term(toks, pos)) return false;
        }
        return true;
    }

    bool opt_limit(const std::vector<std::string>& toks, std::size_t& pos) const {
        if (pos < toks.size() && toks[pos] == "limit") {
            ++pos;
            if (pos >= toks.size() || !in(g_.values, toks[pos])) return false;
            ++pos;
        }
        return true;
    }

    bool parse_q(const std::vector<std::string>& toks, std::size_t& pos) const {
        if (pos >= toks.size()) return false;
        if (toks[pos] == "select") return parse_s(toks, pos);
        if (toks[pos] == "update") return parse_u(toks, pos);
        if (toks[pos] == "delete") return parse_d(toks, pos);
        if (toks[pos] == "insert") return parse_i(toks, pos);
        return false;
    }

    bool parse_s(const std::vector<std::string>& toks, std::size_t& pos) const {
        if (!eat(toks, pos, "select")) return false;
        if (!eat(toks, pos, "*")) {
            if (pos >= toks.size() || !in(g_.fields, toks[pos])) return false;
            ++pos;
            while (pos < toks.size() && toks[pos] == ",") {
                ++pos;
                if (pos >= toks.size() || !in(g_.fields, toks[pos])) return false;
                ++pos;
            }
        }
        if (!eat(toks, pos, "from")) return false;
        if (pos >= toks.size() || !in(g_.tables, toks[pos])) return false;
        ++pos;
        if (!eat(toks, pos, "where")) return false;
        if (!expr(toks, pos)) return false;
        return opt_limit(toks, pos);
    }

    bool parse_u(const std::vector<std::string>& toks, std::size_t& pos) const {
        if (!eat(toks, pos, "update")) return false;
        if (pos >= toks.size() || !in(g_.tables, toks[pos])) return false;
        ++pos;
        if (!eat(toks, pos, "set")) return false;
        // assignment is an attached f=v with '=' only
        if (pos >= toks.size()) return false;
        {
            const std::string& t = toks[pos];
            std::size_t at = t.find('=');
            if (at == std::string::npos || at == 0 || at + 1 >= t.size()) return false;
            if (!in(g_.fields, t.substr(0, at)) || !in(g_.values, t.substr(at + 1))) return false;
            ++pos;
        }
        if (!eat(toks, pos, "where")) return false;
        if (!expr(toks, pos)) return false;
        return opt_limit(toks, pos);
    }

    bool parse_d(const std::vector<std::string>& toks, std::size_t& pos) const {
        if (!eat(toks, pos, "delete") || !eat(toks, pos, "from")) return false;
        if (pos >= toks.size() || !in(g_.tables, toks[pos])) return false;
        ++pos;
        if (!eat(toks, pos, "where")) return false;
        if (!expr(toks, pos)) return false;
        return opt_limit(toks, pos);
    }

    bool parse_i(const std::vector<std::string>& toks, std::size_t& pos) const {
        if (!eat(toks, pos, "insert") || !eat(toks, pos, "into")) return false;
        if (pos >= toks.size() || !in(g_.tables, toks[pos])) return false;
        ++pos;
        if (pos >= toks.size()) return false;
        {
            const std::string& t = toks[pos];
            if (t.size() < 3 || t.front() != '(' || t.back() != ')') return false;
            if (!in(g_.fields, t.substr(1, t.size() - 2))) return false;
            ++pos;
        }
        if (!eat(toks, pos, "values")) return false;
        if (pos >= toks.size()) return false;
        {
            const std::string& t = toks[pos];
            if (t.size() < 3 || t.front() != '(' || t.back() != ')') return false;
            if (!in(g_.values, t.substr(1, t.size() - 2))) return false;
            ++pos;
        }
        return true;
    }
};

/// Random lowercase-ish string over a small alphabet.
inline std::string random_string(wafboost::Rng& rng, std::size_t max_len, int alphabet = 6) {
    std::size_t len = rng.uniform(max_len + 1);
    std::string s;
    for (std::size_t i = 0; i < len; ++i)
        s += static_cast<char>('a' + rng.uniform(static_cast<std::size_t>(alphabet)));
    return s;
}

}  // namespace oracles
