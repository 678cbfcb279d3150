#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wafboost {

/// Classifier verdict. Rejected means "classified malicious / blocked".
enum class Label { Accepted, Rejected };

/// Provenance of a payload string.
enum class Origin { Benign, Malicious, Generated, Corrected };

inline const char* to_string(Label l) {
    return l == Label::Rejected ? "Rejected" : "Accepted";
}

inline const char* to_string(Origin o) {
    switch (o) {
        case Origin::Benign: return "Benign";
        case Origin::Malicious: return "Malicious";
        case Origin::Generated: return "Generated";
        case Origin::Corrected: return "Corrected";
    }
    return "?";
}

/// One whitespace-delimited token of a payload.
struct Token {
    std::string text;   // non-empty, contains no whitespace
    std::size_t index;  // 0-based position within the payload

    bool operator==(const Token&) const = default;
};

namespace detail {

inline bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace detail

/// Splits a string into maximal runs of non-whitespace characters.
/// Consecutive separators collapse; an all-whitespace input yields an
/// empty list.
inline std::vector<Token> tokenize(const std::string& raw) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < raw.size()) {
        while (i < raw.size() && detail::is_space(raw[i])) ++i;
        std::size_t start = i;
        while (i < raw.size() && !detail::is_space(raw[i])) ++i;
        if (i > start) out.push_back(Token{raw.substr(start, i - start), out.size()});
    }
    return out;
}

/// Joins token texts with single spaces.
inline std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += tokens[i];
    }
    return out;
}

/// A decoded request string together with its whitespace tokenization.
///
/// Invariant: tokens == tokenize(raw). Construct through from_raw or
/// from_tokens so the invariant holds by construction.
struct Payload {
    std::string raw;
    std::vector<Token> tokens;
    Origin origin = Origin::Benign;

    static Payload from_raw(std::string raw, Origin origin) {
        Payload p;
        p.tokens = tokenize(raw);
        p.raw = std::move(raw);
        p.origin = origin;
        return p;
    }

    static Payload from_tokens(const std::vector<std::string>& tokens, Origin origin) {
        return from_raw(join_tokens(tokens), origin);
    }

    std::vector<std::string> token_texts() const {
        std::vector<std::string> out;
        out.reserve(tokens.size());
        for (const auto& t : tokens) out.push_back(t.text);
        return out;
    }
};

/// ASCII case fold; non-ASCII bytes pass through unchanged.
inline std::string fold_case(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

/// Deterministic 64-bit generator (SplitMix64). Identical seeds produce
/// identical streams on every platform; this is the one RNG used
/// repo-wide so that generation and sampling replay exactly.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, n). n must be positive.
    std::size_t uniform(std::size_t n) {
        if (n == 0) throw std::invalid_argument("Rng::uniform: empty range");
        // Widening multiply keeps the draw unbiased enough for corpus
        // synthesis and is branch-free and portable.
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform_real() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform_real(double lo, double hi) {
        return lo + (hi - lo) * uniform_real();
    }

    bool coin() { return (next_u64() & 1u) != 0; }

    /// Derives an independent stream; used to give pipeline stages
    /// their own reproducible substreams.
    Rng fork(std::uint64_t tag) {
        return Rng(next_u64() ^ (tag * 0x9E3779B97F4A7C15ULL));
    }

private:
    std::uint64_t state_;
};

/// Rejection/acceptance rates over a malicious and a benign corpus.
/// A rate whose class is empty is absent, never 0 or NaN.
struct Metrics {
    std::optional<double> trr;  // rejected_malicious / n_malicious
    std::optional<double> far;  // 1 - trr
    std::optional<double> tar;  // accepted_benign / n_benign
    std::optional<double> frr;  // 1 - tar
    std::size_t n_malicious = 0;
    std::size_t n_benign = 0;
    std::size_t rejected_malicious = 0;
    std::size_t accepted_benign = 0;

    bool operator==(const Metrics&) const = default;
};

/// Computes TRR/FAR over the malicious labels and TAR/FRR over the
/// benign labels. Throws if both lists are empty.
inline Metrics compute_metrics(const std::vector<Label>& labels_mal,
                               const std::vector<Label>& labels_ben) {
    if (labels_mal.empty() && labels_ben.empty())
        throw std::invalid_argument("compute_metrics: no observations");
    Metrics m;
    m.n_malicious = labels_mal.size();
    m.n_benign = labels_ben.size();
    for (Label l : labels_mal)
        if (l == Label::Rejected) ++m.rejected_malicious;
    for (Label l : labels_ben)
        if (l == Label::Accepted) ++m.accepted_benign;
    if (m.n_malicious > 0) {
        m.trr = static_cast<double>(m.rejected_malicious) / static_cast<double>(m.n_malicious);
        m.far = 1.0 - *m.trr;
    }
    if (m.n_benign > 0) {
        m.tar = static_cast<double>(m.accepted_benign) / static_cast<double>(m.n_benign);
        m.frr = 1.0 - *m.tar;
    }
    return m;
}

}  // namespace wafboost
