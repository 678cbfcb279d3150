#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

namespace wafboost {

/// Result of a gap-penalized common-subsequence alignment.
///
/// `breaks` holds the indices k (0 < k < subsequence.size()) where a gap
/// region sits between subsequence[k-1] and subsequence[k]; gaps ==
/// breaks.size() and score == matches - gap_penalty * gaps exactly.
struct AlignResult {
    std::string subsequence;
    std::size_t matches = 0;
    std::size_t gaps = 0;
    double score = 0.0;
    std::vector<std::size_t> breaks;

    bool empty() const { return subsequence.empty(); }
};

inline constexpr double kDefaultGapPenalty = 0.8;

namespace detail {

// Candidate ordering: higher score, then more matches, then
// lexicographically smallest subsequence, then smallest break layout.
// The last key only disambiguates equal-text alignments so results are
// byte-stable across runs.
struct AlignCandidate {
    double score = 0.0;
    std::size_t matches = 0;
    std::string subsequence;
    std::vector<std::size_t> breaks;

    bool better_than(const AlignCandidate& o) const {
        if (score != o.score) return score > o.score;
        if (matches != o.matches) return matches > o.matches;
        if (subsequence != o.subsequence) return subsequence < o.subsequence;
        return breaks < o.breaks;
    }
};

/// Core alignment of `a` against `b`, maximizing
///   matches - gap_penalty * gap_regions
/// over all common subsequences, where a gap region is a junction
/// between consecutive matches that is non-adjacent in either source.
/// `a_breaks` marks junctions of `a` that are already known to be
/// non-adjacent (used when `a` is itself a folded subsequence), so a
/// progressive group fold never claims contiguity its sources lack.
inline AlignResult align_core(const std::string& a, const std::string& b,
                              const std::vector<std::size_t>& a_breaks,
                              double gap_penalty) {
    struct Pair {
        std::size_t i, j;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            if (a[i] == b[j]) pairs.push_back({i, j});

    auto broken_in_a = [&](std::size_t idx) {
        return std::find(a_breaks.begin(), a_breaks.end(), idx) != a_breaks.end();
    };

    std::vector<AlignCandidate> best(pairs.size());
    AlignCandidate overall;  // empty alignment, score 0
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        AlignCandidate cand;  // start a fresh chain at this pair
        cand.score = 1.0;
        cand.matches = 1;
        cand.subsequence = std::string(1, a[pairs[p].i]);
        for (std::size_t q = 0; q < p; ++q) {
            if (pairs[q].i >= pairs[p].i || pairs[q].j >= pairs[p].j) continue;
            bool adjacent_a = pairs[p].i == pairs[q].i + 1 && !broken_in_a(pairs[p].i);
            bool adjacent_b = pairs[p].j == pairs[q].j + 1;
            bool gap = !(adjacent_a && adjacent_b);
            AlignCandidate ext;
            ext.score = best[q].score + 1.0 - (gap ? gap_penalty : 0.0);
            ext.matches = best[q].matches + 1;
            ext.subsequence = best[q].subsequence + a[pairs[p].i];
            ext.breaks = best[q].breaks;
            if (gap) ext.breaks.push_back(best[q].subsequence.size());
            if (ext.better_than(cand)) cand = std::move(ext);
        }
        best[p] = std::move(cand);
        if (best[p].better_than(overall)) overall = best[p];
    }

    AlignResult r;
    r.subsequence = overall.subsequence;
    r.matches = overall.matches;
    r.breaks = overall.breaks;
    r.gaps = r.breaks.size();
    r.score = static_cast<double>(r.matches) - gap_penalty * static_cast<double>(r.gaps);
    if (r.matches == 0) r.score = 0.0;
    return r;
}

}  // namespace detail

/// Best-scoring common subsequence of two strings under the matching
/// score matches - g_p * gap_regions. Exact dynamic programming; ties
/// prefer more matches, then the lexicographically smallest subsequence.
inline AlignResult align_pair(const std::string& a, const std::string& b,
                              double gap_penalty = kDefaultGapPenalty) {
    return detail::align_core(a, b, {}, gap_penalty);
}

/// Progressive fold over a group: aligns the first two members, then the
/// running subsequence against each remaining member in list order. The
/// result is a common subsequence of every member; a singleton group
/// returns the member itself with score |member|.
inline AlignResult align_group(const std::vector<std::string>& group,
                               double gap_penalty = kDefaultGapPenalty) {
    AlignResult r;
    if (group.empty()) return r;
    r.subsequence = group.front();
    r.matches = group.front().size();
    r.gaps = 0;
    r.score = static_cast<double>(r.matches);
    for (std::size_t k = 1; k < group.size(); ++k) {
        if (r.subsequence.empty()) break;
        r = detail::align_core(r.subsequence, group[k], r.breaks, gap_penalty);
    }
    return r;
}

}  // namespace wafboost
