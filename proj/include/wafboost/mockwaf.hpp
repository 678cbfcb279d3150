#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wafboost/core.hpp"
#include "wafboost/signature.hpp"

namespace wafboost {

enum class AttackType { SQLi, XSS, CommandInjection };

inline const char* to_string(AttackType t) {
    switch (t) {
        case AttackType::SQLi: return "sqli";
        case AttackType::XSS: return "xss";
        case AttackType::CommandInjection: return "ci";
    }
    return "?";
}

inline AttackType attack_type_from_string(const std::string& s) {
    if (s == "sqli") return AttackType::SQLi;
    if (s == "xss") return AttackType::XSS;
    if (s == "ci") return AttackType::CommandInjection;
    throw std::invalid_argument("unknown attack type: " + s + " (expected sqli|xss|ci)");
}

/// One detection rule: an id, a simplified-regex pattern, and a note.
struct Rule {
    std::string id;
    Signature pattern;
    std::string description;
};

/// Ordered, versioned collection of rules. Values are immutable;
/// updates produce a new RuleSet with version+1.
struct RuleSet {
    std::vector<Rule> rules;
    std::uint64_t version = 1;
};

/// Rejected iff any rule pattern matches. First match short-circuits;
/// the verdict is independent of rule order because matching is a pure
/// per-rule predicate.
inline Label classify(const RuleSet& rs, const Payload& p) {
    for (const auto& rule : rs.rules)
        if (match_signature(rule.pattern, p)) return Label::Rejected;
    return Label::Accepted;
}

struct UpdateSummary {
    RuleSet rule_set;
    std::size_t added = 0;
    std::size_t duplicates = 0;  // exact-pattern duplicates silently dropped
};

/// Appends validated signatures as fresh rules. Existing rules are
/// preserved, so everything the old set rejected stays rejected. New ids
/// are checked against the ids already present (a loaded rule file does
/// not carry its version counter).
inline UpdateSummary add_signatures(const RuleSet& rs, const std::vector<Signature>& sigs) {
    UpdateSummary out;
    out.rule_set = rs;
    out.rule_set.version = rs.version + 1;
    std::set<Signature> present;
    std::set<std::string> ids;
    for (const auto& r : rs.rules) {
        present.insert(r.pattern);
        ids.insert(r.id);
    }
    std::size_t serial = 0;
    for (const auto& sig : sigs) {
        if (!present.insert(sig).second) {
            ++out.duplicates;
            continue;
        }
        Rule r;
        do {
            r.id = "mined-v" + std::to_string(out.rule_set.version) + "-" + std::to_string(serial++);
        } while (ids.count(r.id));
        ids.insert(r.id);
        r.pattern = sig;
        r.description = "mined signature";
        out.rule_set.rules.push_back(std::move(r));
        ++out.added;
    }
    return out;
}

namespace detail {

inline Rule make_rule(std::string id, const std::string& pattern, std::string description) {
    Rule r;
    r.id = std::move(id);
    r.pattern = Signature::parse(pattern);
    r.description = std::move(description);
    return r;
}

}  // namespace detail

/// Built-in rule set per attack type, standing in for a ModSecurity-class
/// deployment at desk scale. The SQLi set keys on SQL keyword
/// conjunctions (patterns match the case-folded, whitespace-stripped
/// payload, so token splitting does not evade them), plus comment
/// markers and classic tautologies.
inline RuleSet seed_rules(AttackType type) {
    RuleSet rs;
    rs.version = 1;
    using detail::make_rule;
    auto& r = rs.rules;
    switch (type) {
        case AttackType::SQLi:
            r.push_back(make_rule("sqli-001", "\\S*select\\S*from\\S*", "select ... from"));
            r.push_back(make_rule("sqli-002", "\\S*select\\S*where\\S*", "select ... where"));
            r.push_back(make_rule("sqli-003", "\\S*select\\S*limit\\S*", "select ... limit"));
            r.push_back(make_rule("sqli-004", "\\S*union\\S*select\\S*", "union ... select"));
            r.push_back(make_rule("sqli-005", "\\S*update\\S*set\\S*", "update ... set"));
            r.push_back(make_rule("sqli-006", "\\S*update\\S*where\\S*", "update ... where"));
            r.push_back(make_rule("sqli-007", "\\S*delete\\S*from\\S*", "delete ... from"));
            r.push_back(make_rule("sqli-008", "\\S*delete\\S*where\\S*", "delete ... where"));
            r.push_back(make_rule("sqli-009", "\\S*insert\\S*into\\S*", "insert ... into"));
            r.push_back(make_rule("sqli-010", "\\S*insert\\S*values\\S*", "insert ... values"));
            r.push_back(make_rule("sqli-011", "\\S*where\\S*from\\S*", "subquery shape: where ... from"));
            r.push_back(make_rule("sqli-012", "\\S*like\\S*limit\\S*", "like ... limit"));
            r.push_back(make_rule("sqli-013", "\\S*or\\S*=\\S*", "boolean or with comparison"));
            r.push_back(make_rule("sqli-014", "\\S*or\\S*<\\S*", "boolean or with comparison"));
            r.push_back(make_rule("sqli-015", "\\S*or\\S*>\\S*", "boolean or with comparison"));
            r.push_back(make_rule("sqli-016", "\\S*and\\S*=\\S*", "boolean and with comparison"));
            r.push_back(make_rule("sqli-017", "\\S*and\\S*<\\S*", "boolean and with comparison"));
            r.push_back(make_rule("sqli-018", "\\S*and\\S*>\\S*", "boolean and with comparison"));
            r.push_back(make_rule("sqli-019", "\\S*or\\S*1=1\\S*", "classic tautology"));
            r.push_back(make_rule("sqli-020", "\\S*drop\\S*table\\S*", "drop table"));
            r.push_back(make_rule("sqli-021", "\\S*--\\S*", "SQL line comment"));
            r.push_back(make_rule("sqli-022", "\\S*/*\\S*", "SQL block comment opener"));
            break;
        case AttackType::XSS:
            r.push_back(make_rule("xss-001", "\\S*<script\\S*", "script tag"));
            r.push_back(make_rule("xss-002", "\\S*</script>\\S*", "script close tag"));
            r.push_back(make_rule("xss-003", "\\S*javascript:\\S*", "javascript uri"));
            r.push_back(make_rule("xss-004", "\\S*onerror\\S*=\\S*", "onerror handler"));
            r.push_back(make_rule("xss-005", "\\S*onload\\S*=\\S*", "onload handler"));
            r.push_back(make_rule("xss-006", "\\S*alert(\\S*", "alert call"));
            r.push_back(make_rule("xss-007", "\\S*<iframe\\S*", "iframe tag"));
            r.push_back(make_rule("xss-008", "\\S*<img\\S*on\\S*", "img with handler"));
            r.push_back(make_rule("xss-009", "\\S*document.cookie\\S*", "cookie access"));
            r.push_back(make_rule("xss-010", "\\S*eval(\\S*", "eval call"));
            break;
        case AttackType::CommandInjection:
            r.push_back(make_rule("ci-001", "\\S*/etc/passwd\\S*", "password file"));
            r.push_back(make_rule("ci-002", "\\S*;\\S*cat\\S*", "chained cat"));
            r.push_back(make_rule("ci-003", "\\S*|\\S*sh\\S*", "piped shell"));
            r.push_back(make_rule("ci-004", "\\S*&&\\S*rm\\S*", "chained rm"));
            r.push_back(make_rule("ci-005", "\\S*wget\\S*http\\S*", "wget fetch"));
            r.push_back(make_rule("ci-006", "\\S*curl\\S*http\\S*", "curl fetch"));
            r.push_back(make_rule("ci-007", "\\S*$(\\S*)\\S*", "command substitution"));
            r.push_back(make_rule("ci-008", "\\S*`\\S*`\\S*", "backtick substitution"));
            r.push_back(make_rule("ci-009", "\\S*/bin/\\S*", "binary path"));
            r.push_back(make_rule("ci-010", "\\S*nc\\S*-e\\S*", "netcat exec"));
            break;
    }
    return rs;
}

/// Rule file: one rule per line as `id<TAB>pattern`. Blank lines and
/// lines starting with '#' are skipped.
inline RuleSet load_rules(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open rule file: " + path);
    RuleSet rs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected id<TAB>pattern");
        Rule r;
        r.id = line.substr(0, tab);
        r.pattern = Signature::parse(line.substr(tab + 1));
        rs.rules.push_back(std::move(r));
    }
    std::set<std::string> ids;
    for (const auto& r : rs.rules)
        if (!ids.insert(r.id).second)
            throw std::runtime_error(path + ": duplicate rule id '" + r.id + "'");
    return rs;
}

inline void save_rules(const RuleSet& rs, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write rule file: " + path);
    for (const auto& r : rs.rules) out << r.id << '\t' << r.pattern.render() << '\n';
}

}  // namespace wafboost
