#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "wafboost/corrector.hpp"
#include "wafboost/edit.hpp"

using namespace wafboost;

namespace {

Dataset corpus_of(const std::vector<std::string>& raws) {
    Dataset ds;
    for (const auto& r : raws)
        ds.payloads.emplace_back(Payload::from_raw(r, Origin::Malicious), Label::Rejected);
    return ds;
}

KeywordSet kw_of(const std::vector<std::string>& words) {
    KeywordSet ks;
    std::size_t rank = words.size();
    for (const auto& w : words) ks.entries.emplace_back(w, rank--);
    return ks;
}

std::size_t min_dist(const std::string& token, const KeywordSet& ks) {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (const auto& [w, c] : ks.entries) best = std::min(best, levenshtein(fold_case(token), w));
    return best;
}

}  // namespace

TEST_CASE("levenshtein worked examples") {
    REQUIRE(levenshtein("salect", "select") == 1);
    REQUIRE(levenshtein("kitten", "sitting") == 3);
    REQUIRE(levenshtein("", "") == 0);
    REQUIRE(levenshtein("abc", "") == 3);
    for (const char* s : {"", "x", "from", "select"}) REQUIRE(levenshtein(s, s) == 0);
}

TEST_CASE("levenshtein agrees with the recursive definition on short strings") {
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        std::string a = oracles::random_string(rng, 6, 4);
        std::string b = oracles::random_string(rng, 6, 4);
        REQUIRE(levenshtein(a, b) == oracles::lev_recursive(a, b));
    }
}

TEST_CASE("levenshtein metric axioms") {
    Rng rng(19);
    for (int trial = 0; trial < 300; ++trial) {
        std::string a = oracles::random_string(rng, 8, 5);
        std::string b = oracles::random_string(rng, 8, 5);
        std::string c = oracles::random_string(rng, 8, 5);
        std::size_t dab = levenshtein(a, b);
        REQUIRE(dab == levenshtein(b, a));
        REQUIRE((dab == 0) == (a == b));
        REQUIRE(dab <= levenshtein(a, c) + levenshtein(c, b));
    }
}

TEST_CASE("edit_toward lands strictly below the stop threshold") {
    Rng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        std::string a = oracles::random_string(rng, 10, 6);
        std::string b = oracles::random_string(rng, 10, 6);
        std::size_t d = levenshtein(a, b);
        for (std::size_t stop : {std::size_t{1}, std::size_t{3}, std::size_t{4}}) {
            std::string moved = edit_toward(a, b, stop);
            std::size_t nd = levenshtein(moved, b);
            if (d < stop) {
                REQUIRE(moved == a);
            } else {
                REQUIRE(nd == stop - 1);
            }
        }
    }
}

TEST_CASE("extract_keywords frequency, ties, folding") {
    SECTION("top token ranks first") {
        Dataset ds = corpus_of({"aa aa aa bb cc dd ee"});
        KeywordSet ks = extract_keywords(ds, 5);
        REQUIRE(ks.entries[0].first == "aa");
        REQUIRE(ks.entries[0].second == 3);
    }
    SECTION("ties break lexicographically") {
        Dataset ds = corpus_of({"zz yy xx ww vv"});
        KeywordSet ks = extract_keywords(ds, 5);
        REQUIRE(ks.entries[0].first == "vv");
        REQUIRE(ks.entries[4].first == "zz");
    }
    SECTION("case-folded before counting") {
        Dataset ds = corpus_of({"SELECT select SeLeCt bb cc dd ee"});
        KeywordSet ks = extract_keywords(ds, 5);
        REQUIRE(ks.entries[0].first == "select");
        REQUIRE(ks.entries[0].second == 3);
    }
    SECTION("too few distinct tokens is an error") {
        Dataset ds = corpus_of({"a b c d"});
        REQUIRE_THROWS_AS(extract_keywords(ds, 5), std::invalid_argument);
    }
    SECTION("synthesized SQLi corpus yields select and from among keywords") {
        Rng rng(1);
        Dataset ds = synth_sql(default_sql_grammar(), 2000, rng);
        KeywordSet ks = extract_keywords(ds, 12);
        auto words = ks.words();
        REQUIRE(std::find(words.begin(), words.end(), "select") != words.end());
        REQUIRE(std::find(words.begin(), words.end(), "from") != words.end());
    }
}

TEST_CASE("correct: paper worked example stays untouched") {
    // Keyword set under which every token of the payload sits at or
    // below the lower threshold (the paper leaves users/abc untouched).
    KeywordSet ks = kw_of({"select", "from", "where", "username", "abc"});
    Payload p = Payload::from_raw("salect * from users where username = \"abc\"",
                                  Origin::Generated);
    for (const auto& t : p.tokens) {
        INFO(t.text);
        REQUIRE(min_dist(t.text, ks) <= 4);
    }
    REQUIRE(levenshtein("salect", "select") == 1);  // the payload's near-keyword distance
    CorrectResult r = correct(p, ks);
    REQUIRE(r.outcome == CorrectOutcome::Kept);
    REQUIRE(r.payload.raw == p.raw);
}

TEST_CASE("correct: discard conditions carry reasons") {
    KeywordSet ks = kw_of({"select", "from", "where", "update", "delete"});
    SECTION("every token beyond the upper threshold") {
        Payload p = Payload::from_raw("zzzzzzzzzzzzzzzzzz qqqqqqqqqqqqqqqqq xxxxxxxxxxxxxxxxxx",
                                      Origin::Generated);
        for (const auto& t : p.tokens) REQUIRE(min_dist(t.text, ks) > 8);
        CorrectResult r = correct(p, ks);
        REQUIRE(r.outcome == CorrectOutcome::Discarded);
        REQUIRE(r.reason == DiscardReason::NoKeywordLikeToken);
    }
    SECTION("too short") {
        Payload p = Payload::from_raw("select from", Origin::Generated);
        CorrectResult r = correct(p, ks);
        REQUIRE(r.outcome == CorrectOutcome::Discarded);
        REQUIRE(r.reason == DiscardReason::TooShort);
    }
}

TEST_CASE("correct: rewriting pulls near-keyword tokens under the lower threshold") {
    KeywordSet ks = kw_of({"select", "from", "where", "update", "delete"});
    // d("seleeeeeect","select") = 5: inside (LT, UT], must be rewritten to d < 4
    REQUIRE(levenshtein("seleeeeeect", "select") == 5);
    Payload p = Payload::from_raw("seleeeeeect * users", Origin::Generated);
    CorrectResult r = correct(p, ks);
    REQUIRE(r.outcome == CorrectOutcome::Corrected);
    REQUIRE(r.payload.origin == Origin::Corrected);
    REQUIRE(r.rewritten_tokens == 1);
    REQUIRE(r.payload.tokens.size() == p.tokens.size());
    std::size_t d = min_dist(r.payload.tokens[0].text, ks);
    REQUIRE(d < 4);
    // untouched tokens are preserved verbatim
    REQUIRE(r.payload.tokens[1].text == "*");
    REQUIRE(r.payload.tokens[2].text == "users");
}

TEST_CASE("correct: post-conditions over random generated payloads") {
    KeywordSet ks = kw_of({"select", "from", "where", "update", "values"});
    Rng rng(31);
    CorrectorConfig cfg;
    for (int trial = 0; trial < 400; ++trial) {
        std::vector<std::string> toks;
        std::size_t n = 1 + rng.uniform(8);
        for (std::size_t i = 0; i < n; ++i) {
            switch (rng.uniform(3)) {
                case 0: toks.push_back(ks.entries[rng.uniform(5)].first); break;
                case 1: toks.push_back(oracles::random_string(rng, 5, 6) + "x"); break;
                default: toks.push_back(oracles::random_string(rng, 14, 26) + "q"); break;
            }
        }
        Payload p = Payload::from_tokens(toks, Origin::Generated);
        CorrectResult r = correct(p, ks, cfg);
        if (r.outcome == CorrectOutcome::Discarded) {
            bool too_short = p.tokens.size() < cfg.min_tokens;
            bool none_close = true;
            for (const auto& t : p.tokens)
                if (min_dist(t.text, ks) <= cfg.upper_threshold) none_close = false;
            REQUIRE((too_short || none_close));
            continue;
        }
        REQUIRE(r.payload.tokens.size() == p.tokens.size());
        for (std::size_t i = 0; i < p.tokens.size(); ++i) {
            std::size_t d_before = min_dist(p.tokens[i].text, ks);
            std::size_t d_after = min_dist(r.payload.tokens[i].text, ks);
            if (d_before == 0 || d_before > cfg.upper_threshold) {
                // exact and literal tokens are never changed
                REQUIRE(r.payload.tokens[i].text == p.tokens[i].text);
            } else {
                // no near-keyword token may remain above LT
                REQUIRE(d_after <= cfg.lower_threshold);
            }
            // assert: nothing is left in (LT, UT]
            if (d_after > cfg.lower_threshold) REQUIRE(d_after > cfg.upper_threshold);
        }
    }
}
