#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "wafboost/ingest.hpp"
#include "wafboost/mockwaf.hpp"

using namespace wafboost;

namespace {

Payload mk(const std::string& raw) { return Payload::from_raw(raw, Origin::Malicious); }

RuleSet single_rule(const std::string& pattern) {
    RuleSet rs;
    Rule r;
    r.id = "t1";
    r.pattern = Signature::parse(pattern);
    rs.rules.push_back(r);
    return rs;
}

}  // namespace

TEST_CASE("classify basics") {
    SECTION("literal 1=1 rule rejects the tautology payload") {
        RuleSet rs = single_rule("\\S*1=1\\S*");
        REQUIRE(classify(rs, mk("admin' or 1=1 #qwer")) == Label::Rejected);
        REQUIRE(classify(rs, mk("admin' or 1 #qwer")) == Label::Accepted);
    }
    SECTION("empty rule set accepts everything") {
        RuleSet rs;
        REQUIRE(classify(rs, mk("anything at all")) == Label::Accepted);
        REQUIRE(classify(rs, mk("")) == Label::Accepted);
    }
    SECTION("wildcard gap matches a non-whitespace run") {
        RuleSet rs = single_rule("\\S*select\\S*from\\S*");
        REQUIRE(classify(rs, mk("selectXfrom")) == Label::Rejected);
        REQUIRE(classify(rs, mk("select name from users")) == Label::Rejected);
        REQUIRE(classify(rs, mk("SELECT name FROM users")) == Label::Rejected);  // case folded
        REQUIRE(classify(rs, mk("select name")) == Label::Accepted);
    }
    SECTION("verdict is invariant under rule order") {
        RuleSet fwd;
        fwd.rules.push_back(single_rule("\\S*union\\S*").rules[0]);
        fwd.rules.push_back(single_rule("\\S*drop\\S*").rules[0]);
        RuleSet rev;
        rev.rules.push_back(fwd.rules[1]);
        rev.rules.push_back(fwd.rules[0]);
        for (const char* s : {"union select", "drop it", "benign text", "drop union"}) {
            REQUIRE(classify(fwd, mk(s)) == classify(rev, mk(s)));
        }
    }
}

TEST_CASE("add_signatures versioning, dedup, monotonicity") {
    RuleSet rs = single_rule("\\S*aaa\\S*");
    rs.rules.push_back(single_rule("\\S*bbb\\S*").rules[0]);
    rs.rules.push_back(single_rule("\\S*ccc\\S*").rules[0]);
    rs.version = 1;

    SECTION("count arithmetic and version bump") {
        std::vector<Signature> sigs{Signature::parse("\\S*ddd\\S*"), Signature::parse("\\S*eee\\S*")};
        UpdateSummary s = add_signatures(rs, sigs);
        REQUIRE(s.rule_set.version == 2);
        REQUIRE(s.rule_set.rules.size() == 5);
        REQUIRE(s.added == 2);
        REQUIRE(s.duplicates == 0);
    }
    SECTION("exact duplicates are dropped and reported") {
        std::vector<Signature> sigs{Signature::parse("\\S*aaa\\S*")};
        UpdateSummary s = add_signatures(rs, sigs);
        REQUIRE(s.rule_set.rules.size() == rs.rules.size());
        REQUIRE(s.added == 0);
        REQUIRE(s.duplicates == 1);
        REQUIRE(s.rule_set.version == 2);  // update still versions
    }
    SECTION("rejected set never shrinks") {
        std::vector<Signature> sigs{Signature::parse("\\S*zz\\S*")};
        UpdateSummary s = add_signatures(rs, sigs);
        Rng rng(21);
        for (int trial = 0; trial < 300; ++trial) {
            std::string payload;
            std::size_t words = rng.uniform(6);
            for (std::size_t w = 0; w < words; ++w) {
                if (w) payload += ' ';
                payload += oracles::random_string(rng, 6, 4);
            }
            Payload p = mk(payload);
            if (classify(rs, p) == Label::Rejected)
                REQUIRE(classify(s.rule_set, p) == Label::Rejected);
        }
    }
}

TEST_CASE("seed_rules properties") {
    SECTION("deterministic") {
        RuleSet a = seed_rules(AttackType::SQLi);
        RuleSet b = seed_rules(AttackType::SQLi);
        REQUIRE(a.rules.size() == b.rules.size());
        for (std::size_t i = 0; i < a.rules.size(); ++i) {
            REQUIRE(a.rules[i].id == b.rules[i].id);
            REQUIRE(a.rules[i].pattern == b.rules[i].pattern);
        }
        REQUIRE_FALSE(seed_rules(AttackType::XSS).rules.empty());
        REQUIRE_FALSE(seed_rules(AttackType::CommandInjection).rules.empty());
    }
    SECTION("initial TRR on the synthesized corpus is in [0.6, 1.0]") {
        RuleSet rs = seed_rules(AttackType::SQLi);
        Rng rng(1);
        Dataset ds = synth_sql(default_sql_grammar(), 1000, rng);
        std::size_t rejected = 0;
        for (const auto& [p, l] : ds.payloads)
            if (classify(rs, p) == Label::Rejected) ++rejected;
        double trr = static_cast<double>(rejected) / static_cast<double>(ds.payloads.size());
        REQUIRE(trr >= 0.6);
        REQUIRE(trr <= 1.0);
    }
    SECTION("FRR is zero on the shipped benign fixture") {
        RuleSet rs = seed_rules(AttackType::SQLi);
        Dataset ben = load_corpus(std::string(WAFBOOST_SOURCE_DIR) + "/data/benign.txt",
                                  Label::Accepted, AttackType::SQLi, Origin::Benign);
        REQUIRE(ben.payloads.size() >= 2000);
        for (const auto& [p, l] : ben.payloads) {
            INFO(p.raw);
            REQUIRE(classify(rs, p) == Label::Accepted);
        }
    }
}

TEST_CASE("rule ids stay unique across repeated file-based updates") {
    namespace fs = std::filesystem;
    auto path = fs::temp_directory_path() / "wafboost_rules_cycle.rules";
    RuleSet rs = single_rule("\\S*aaa\\S*");
    save_rules(add_signatures(rs, {Signature::parse("\\S*bbb\\S*")}).rule_set, path.string());
    // reload (version counter resets) and update again
    RuleSet loaded = load_rules(path.string());
    RuleSet twice =
        add_signatures(loaded, {Signature::parse("\\S*ccc\\S*"), Signature::parse("\\S*ddd\\S*")})
            .rule_set;
    std::set<std::string> ids;
    for (const auto& r : twice.rules) REQUIRE(ids.insert(r.id).second);
    save_rules(twice, path.string());
    REQUIRE(load_rules(path.string()).rules.size() == 4);  // load enforces uniqueness
    fs::remove(path);

    // a file with duplicate ids is rejected outright
    auto bad = fs::temp_directory_path() / "wafboost_rules_dup.rules";
    {
        std::ofstream out(bad, std::ios::binary);
        out << "r1\t\\S*x\\S*\nr1\t\\S*y\\S*\n";
    }
    REQUIRE_THROWS(load_rules(bad.string()));
    fs::remove(bad);
}

TEST_CASE("rule file round-trip") {
    RuleSet rs = seed_rules(AttackType::SQLi);
    auto path = std::filesystem::temp_directory_path() / "wafboost_rules_test.rules";
    save_rules(rs, path.string());
    RuleSet back = load_rules(path.string());
    REQUIRE(back.rules.size() == rs.rules.size());
    for (std::size_t i = 0; i < rs.rules.size(); ++i) {
        REQUIRE(back.rules[i].id == rs.rules[i].id);
        REQUIRE(back.rules[i].pattern == rs.rules[i].pattern);
    }
    std::filesystem::remove(path);
}
