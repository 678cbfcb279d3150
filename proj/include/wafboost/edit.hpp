#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

namespace wafboost {

/// Levenshtein distance: minimum number of single-character insertions,
/// deletions, and substitutions transforming a into b.
inline std::size_t levenshtein(const std::string& a, const std::string& b) {
    const std::size_t n = a.size(), m = b.size();
    if (n == 0) return m;
    if (m == 0) return n;
    std::vector<std::size_t> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= m; ++j) {
            std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

namespace detail {

enum class EditOp { Match, Substitute, Delete, Insert };

struct EditStep {
    EditOp op;
    std::size_t pos_a;  // position in the source string
    char ch;            // target character for Substitute/Insert
};

/// Optimal edit script a -> b from a full DP table, with a fixed
/// traceback preference (match, substitute, delete, insert) so the
/// script is deterministic.
inline std::vector<EditStep> edit_script(const std::string& a, const std::string& b) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<std::vector<std::size_t>> d(n + 1, std::vector<std::size_t>(m + 1));
    for (std::size_t i = 0; i <= n; ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= m; ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = 1; j <= m; ++j)
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                                d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});

    std::vector<EditStep> script;
    std::size_t i = n, j = m;
    while (i > 0 || j > 0) {
        if (i > 0 && j > 0 && a[i - 1] == b[j - 1] && d[i][j] == d[i - 1][j - 1]) {
            script.push_back({EditOp::Match, i - 1, a[i - 1]});
            --i, --j;
        } else if (i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + 1) {
            script.push_back({EditOp::Substitute, i - 1, b[j - 1]});
            --i, --j;
        } else if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
            script.push_back({EditOp::Delete, i - 1, 0});
            --i;
        } else {
            script.push_back({EditOp::Insert, i, b[j - 1]});
            --j;
        }
    }
    std::reverse(script.begin(), script.end());
    return script;
}

}  // namespace detail

/// Replays the optimal edit script from `from` toward `to`, stopping as
/// soon as the remaining distance drops below `stop_below`. Each applied
/// operation reduces the distance by exactly one, so the result sits at
/// distance max(stop_below - 1, ...) from `to` along the optimal path.
inline std::string edit_toward(const std::string& from, const std::string& to,
                               std::size_t stop_below) {
    std::size_t dist = levenshtein(from, to);
    if (dist < stop_below) return from;
    auto script = detail::edit_script(from, to);
    std::string cur = from;
    // Offset tracks how insertions/deletions already applied shift the
    // positions recorded against the original string.
    std::ptrdiff_t offset = 0;
    for (const auto& step : script) {
        if (dist < stop_below) break;
        switch (step.op) {
            case detail::EditOp::Match:
                continue;
            case detail::EditOp::Substitute:
                cur[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(step.pos_a) + offset)] = step.ch;
                break;
            case detail::EditOp::Delete:
                cur.erase(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(step.pos_a) + offset), 1);
                --offset;
                break;
            case detail::EditOp::Insert:
                cur.insert(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(step.pos_a) + offset), 1, step.ch);
                ++offset;
                break;
        }
        --dist;
    }
    return cur;
}

}  // namespace wafboost
