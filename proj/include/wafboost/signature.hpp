#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wafboost/align.hpp"
#include "wafboost/core.hpp"
#include "wafboost/edit.hpp"

namespace wafboost {

/// Simplified regular expression: ordered literal segments separated by
/// the single qualifier `\S*` (a possibly-empty run of non-whitespace
/// characters). Renders as \S* + seg1 + \S* + seg2 + ... + \S*.
struct Signature {
    std::vector<std::string> segments;

    bool operator==(const Signature&) const = default;
    bool operator<(const Signature& o) const { return segments < o.segments; }

    std::string render() const {
        std::string out = "\\S*";
        for (const auto& s : segments) {
            out += s;
            out += "\\S*";
        }
        return out;
    }

    static Signature parse(const std::string& pattern) {
        static const std::string kGap = "\\S*";
        Signature sig;
        std::size_t pos = 0;
        if (pattern.compare(0, kGap.size(), kGap) != 0)
            throw std::invalid_argument("signature must start with \\S*: " + pattern);
        pos = kGap.size();
        while (pos < pattern.size()) {
            std::size_t next = pattern.find(kGap, pos);
            if (next == std::string::npos)
                throw std::invalid_argument("signature must end with \\S*: " + pattern);
            std::string seg = pattern.substr(pos, next - pos);
            if (seg.empty())
                throw std::invalid_argument("empty literal segment in: " + pattern);
            for (char c : seg)
                if (detail::is_space(c))
                    throw std::invalid_argument("whitespace in literal segment: " + pattern);
            sig.segments.push_back(std::move(seg));
            pos = next + kGap.size();
        }
        if (sig.segments.empty())
            throw std::invalid_argument("signature has no literal segments: " + pattern);
        return sig;
    }
};

/// Case-folds and strips all whitespace; the form signatures match on.
inline std::string normalize_for_match(const std::string& raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        if (detail::is_space(c)) continue;
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        out += c;
    }
    return out;
}

/// True iff the case-folded, whitespace-stripped payload contains every
/// literal segment of the signature in order, with non-overlapping
/// occurrences. Greedy leftmost placement is sufficient for this pattern
/// class: taking the earliest occurrence of each segment never blocks a
/// later one a different placement would have allowed.
inline bool match_signature(const Signature& sig, const Payload& p) {
    std::string s = normalize_for_match(p.raw);
    std::size_t pos = 0;
    for (const auto& seg : sig.segments) {
        std::size_t found = s.find(seg, pos);
        if (found == std::string::npos) return false;
        pos = found + seg.size();
    }
    return true;
}

/// Renders the aligned common subsequence as a simplified regex:
/// consecutive matched characters that stayed adjacent in every source
/// form one literal segment; `\S*` goes at the start, between segments,
/// and at the end. Segments are case-folded so the pattern lives in the
/// matcher's normalized domain. Throws on an empty alignment.
inline Signature emit_signature(const AlignResult& ar) {
    if (ar.subsequence.empty())
        throw std::invalid_argument("emit_signature: nothing to emit");
    Signature sig;
    std::size_t start = 0;
    for (std::size_t brk : ar.breaks) {
        sig.segments.push_back(fold_case(ar.subsequence.substr(start, brk - start)));
        start = brk;
    }
    sig.segments.push_back(fold_case(ar.subsequence.substr(start)));
    return sig;
}

/// Per-token decision-perturbation scores against a WAF decider.
/// Each component is 1 iff the perturbation flips the decision.
struct ScoreVector {
    Token token;
    int ds = 0;  // delete token
    int rs = 0;  // replace token by the literal "unknown"
    int hs = 0;  // head: prefix up to token vs prefix before it
    int ts = 0;  // tail: suffix from token vs suffix after it

    int total() const { return ds + rs + hs + ts; }
};

using Decider = std::function<Label(const Payload&)>;

/// Scores every token of `p` with the four perturbation functions.
/// Issues at most 4n+2 decider calls for an n-token payload: n+1 prefix
/// decisions, n+1 suffix decisions (the full payload memoized once and
/// the empty payload shared), plus one deletion and one replacement per
/// token.
inline std::vector<ScoreVector> score_tokens(const Decider& decide, const Payload& p) {
    if (p.tokens.empty())
        throw std::invalid_argument("score_tokens: empty payload");
    const std::vector<std::string> toks = p.token_texts();
    const std::size_t n = toks.size();

    auto decide_tokens = [&](const std::vector<std::string>& ts) {
        return decide(Payload::from_tokens(ts, p.origin));
    };

    // Prefix i holds tokens [0, i); suffix i holds tokens [i, n).
    std::vector<Label> prefix(n + 1), suffix(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        prefix[i] = decide_tokens({toks.begin(), toks.begin() + static_cast<std::ptrdiff_t>(i)});
    suffix[0] = prefix[n];  // full payload, already decided
    for (std::size_t i = 1; i <= n; ++i)
        suffix[i] = decide_tokens({toks.begin() + static_cast<std::ptrdiff_t>(i), toks.end()});
    const Label full = prefix[n];

    std::vector<ScoreVector> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ScoreVector sv;
        sv.token = p.tokens[i];
        std::vector<std::string> deleted = toks;
        deleted.erase(deleted.begin() + static_cast<std::ptrdiff_t>(i));
        sv.ds = decide_tokens(deleted) != full ? 1 : 0;
        std::vector<std::string> replaced = toks;
        replaced[i] = "unknown";
        sv.rs = decide_tokens(replaced) != full ? 1 : 0;
        sv.hs = prefix[i + 1] != prefix[i] ? 1 : 0;
        sv.ts = suffix[i] != suffix[i + 1] ? 1 : 0;
        out.push_back(sv);
    }
    return out;
}

/// Aggregates scored payloads and returns the token strings whose summed
/// score total reaches `min_total` and which score in at least
/// `min_freq` distinct payloads, ranked by (aggregate total, payload
/// frequency), lexicographic tie-break, truncated to `top_m`.
inline std::vector<std::string> select_important(
    const std::vector<std::vector<ScoreVector>>& scored_corpus,
    int min_total = 2, std::size_t min_freq = 3, std::size_t top_m = 50) {
    struct Agg {
        long total = 0;
        std::size_t payloads = 0;
    };
    std::map<std::string, Agg> agg;
    for (const auto& payload_scores : scored_corpus) {
        std::map<std::string, long> per_payload;
        for (const auto& sv : payload_scores)
            per_payload[sv.token.text] += sv.total();
        for (const auto& [text, tot] : per_payload) {
            auto& a = agg[text];
            a.total += tot;
            if (tot > 0) ++a.payloads;
        }
    }
    std::vector<std::pair<std::string, Agg>> qualified;
    for (const auto& [text, a] : agg)
        if (a.total >= min_total && a.payloads >= min_freq)
            qualified.emplace_back(text, a);
    std::sort(qualified.begin(), qualified.end(), [](const auto& x, const auto& y) {
        if (x.second.total != y.second.total) return x.second.total > y.second.total;
        if (x.second.payloads != y.second.payloads) return x.second.payloads > y.second.payloads;
        return x.first < y.first;
    });
    if (qualified.size() > top_m) qualified.resize(top_m);
    std::vector<std::string> out;
    out.reserve(qualified.size());
    for (auto& q : qualified) out.push_back(std::move(q.first));
    return out;
}

/// Single-linkage agglomerative clustering under Levenshtein distance:
/// two tokens share a group iff a chain of pairwise distances <= radius
/// connects them. Duplicate strings collapse into one member. Groups and
/// members come back lexicographically sorted.
inline std::vector<std::vector<std::string>> cluster(const std::vector<std::string>& tokens,
                                                     std::size_t radius = 3) {
    if (tokens.empty())
        throw std::invalid_argument("cluster: no tokens");
    std::vector<std::string> uniq = tokens;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());

    std::vector<std::size_t> parent(uniq.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < uniq.size(); ++i)
        for (std::size_t j = i + 1; j < uniq.size(); ++j)
            if (levenshtein(uniq[i], uniq[j]) <= radius) parent[find(i)] = find(j);

    std::map<std::size_t, std::vector<std::string>> groups;
    for (std::size_t i = 0; i < uniq.size(); ++i) groups[find(i)].push_back(uniq[i]);
    std::vector<std::vector<std::string>> out;
    out.reserve(groups.size());
    for (auto& [root, members] : groups) out.push_back(std::move(members));
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return out;
}

/// Verdict for one candidate signature against the validation corpora.
struct SignatureReport {
    Signature signature;
    bool accepted = false;
    std::size_t benign_hits = 0;
    std::size_t malicious_hits = 0;
    std::string first_benign_hit;  // cited offender when benign_hits > 0
};

struct ValidationResult {
    std::vector<Signature> accepted;
    std::vector<SignatureReport> reports;
};

/// A signature is accepted iff it matches zero benign payloads and at
/// least one bypassing malicious payload. Accepting only benign-clean
/// patterns is what keeps the hardened rule set at FRR 0 on the
/// validation corpus.
inline ValidationResult validate_signatures(const std::vector<Signature>& sigs,
                                            const std::vector<Payload>& benign,
                                            const std::vector<Payload>& malicious_bypass) {
    if (benign.empty())
        throw std::invalid_argument("validate_signatures: benign corpus is empty");
    ValidationResult result;
    for (const auto& sig : sigs) {
        SignatureReport rep;
        rep.signature = sig;
        for (const auto& b : benign) {
            if (match_signature(sig, b)) {
                if (rep.benign_hits == 0) rep.first_benign_hit = b.raw;
                ++rep.benign_hits;
            }
        }
        for (const auto& m : malicious_bypass)
            if (match_signature(sig, m)) ++rep.malicious_hits;
        rep.accepted = rep.benign_hits == 0 && rep.malicious_hits >= 1;
        if (rep.accepted) result.accepted.push_back(sig);
        result.reports.push_back(std::move(rep));
    }
    return result;
}

}  // namespace wafboost
