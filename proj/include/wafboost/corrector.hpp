#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "wafboost/core.hpp"
#include "wafboost/edit.hpp"
#include "wafboost/ingest.hpp"

namespace wafboost {

/// The top-k most frequent tokens of the malicious training corpus,
/// case-folded, with their counts. Ordered by (count desc, lexicographic).
struct KeywordSet {
    std::vector<std::pair<std::string, std::size_t>> entries;

    std::vector<std::string> words() const {
        std::vector<std::string> out;
        out.reserve(entries.size());
        for (const auto& [w, c] : entries) out.push_back(w);
        return out;
    }
};

/// Counts case-folded token frequencies and keeps the top k, breaking
/// count ties toward the lexicographically smaller token.
inline KeywordSet extract_keywords(const Dataset& corpus, std::size_t k = 5) {
    std::map<std::string, std::size_t> freq;
    for (const auto& [p, l] : corpus.payloads)
        for (const auto& t : p.tokens) ++freq[fold_case(t.text)];
    if (freq.size() < k)
        throw std::invalid_argument("extract_keywords: corpus has fewer than " +
                                    std::to_string(k) + " distinct tokens");
    std::vector<std::pair<std::string, std::size_t>> order(freq.begin(), freq.end());
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    KeywordSet ks;
    ks.entries.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    return ks;
}

struct CorrectorConfig {
    std::size_t lower_threshold = 4;  // LT
    std::size_t upper_threshold = 8;  // UT
    std::size_t min_tokens = 3;
};

enum class CorrectOutcome { Kept, Corrected, Discarded };

enum class DiscardReason { None, TooShort, NoKeywordLikeToken };

inline const char* to_string(DiscardReason r) {
    switch (r) {
        case DiscardReason::None: return "none";
        case DiscardReason::TooShort: return "too-short";
        case DiscardReason::NoKeywordLikeToken: return "no-keyword-like-token";
    }
    return "?";
}

struct CorrectResult {
    CorrectOutcome outcome = CorrectOutcome::Discarded;
    Payload payload;  // meaningful for Kept/Corrected
    DiscardReason reason = DiscardReason::None;
    std::size_t rewritten_tokens = 0;
};

namespace detail {

/// Nearest keyword by case-folded Levenshtein distance; ties go to the
/// higher-ranked (more frequent) keyword.
inline std::pair<std::size_t, std::size_t> nearest_keyword(const std::string& folded_token,
                                                           const KeywordSet& kw) {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < kw.entries.size(); ++i) {
        std::size_t d = levenshtein(folded_token, kw.entries[i].first);
        if (d < best) {
            best = d;
            best_idx = i;
        }
    }
    return {best, best_idx};
}

}  // namespace detail

/// Payload corrector. Token classification by the minimum case-folded
/// Levenshtein distance d to the keyword set:
///   d == 0                exact keyword, untouched
///   0 < d <= LT           near keyword, close enough, untouched
///   LT < d <= UT          near keyword, rewritten along the optimal
///                         edit script toward its nearest keyword until
///                         d < LT
///   d > UT                ordinary literal, untouched
/// A payload is discarded when it has fewer than min_tokens tokens or
/// when no token sits within UT of any keyword.
inline CorrectResult correct(const Payload& p, const KeywordSet& kw,
                             const CorrectorConfig& cfg = {}) {
    CorrectResult res;
    if (p.tokens.size() < cfg.min_tokens) {
        res.outcome = CorrectOutcome::Discarded;
        res.reason = DiscardReason::TooShort;
        return res;
    }
    std::vector<std::string> out_tokens;
    out_tokens.reserve(p.tokens.size());
    bool any_keyword_like = false;
    for (const auto& tok : p.tokens) {
        std::string folded = fold_case(tok.text);
        auto [d, idx] = detail::nearest_keyword(folded, kw);
        if (d <= cfg.upper_threshold) any_keyword_like = true;
        if (d > cfg.lower_threshold && d <= cfg.upper_threshold) {
            out_tokens.push_back(edit_toward(folded, kw.entries[idx].first, cfg.lower_threshold));
            ++res.rewritten_tokens;
        } else {
            out_tokens.push_back(tok.text);
        }
    }
    if (!any_keyword_like) {
        res.outcome = CorrectOutcome::Discarded;
        res.reason = DiscardReason::NoKeywordLikeToken;
        res.rewritten_tokens = 0;
        return res;
    }
    res.payload = Payload::from_tokens(
        out_tokens, res.rewritten_tokens > 0 ? Origin::Corrected : p.origin);
    res.outcome = res.rewritten_tokens > 0 ? CorrectOutcome::Corrected : CorrectOutcome::Kept;
    return res;
}

}  // namespace wafboost
