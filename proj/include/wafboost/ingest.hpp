#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wafboost/core.hpp"
#include "wafboost/mockwaf.hpp"

namespace wafboost {

namespace detail {

inline int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace detail

/// One pass of percent-decoding: every %XX with valid hex digits becomes
/// its byte; malformed triplets pass through unchanged.
inline std::string percent_decode_once(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        if (s[i] == '%' && i + 2 < s.size()) {
            int hi = detail::hex_value(s[i + 1]);
            int lo = detail::hex_value(s[i + 2]);
            if (hi >= 0 && lo >= 0) {
                out += static_cast<char>(hi * 16 + lo);
                i += 3;
                continue;
            }
        }
        out += s[i++];
    }
    return out;
}

/// Fixed-point percent-decoding: repeats single passes until the string
/// stops changing, so double-encoded payloads ("%2541" -> "%41" -> "A")
/// come out fully decoded. Lenient: never fails.
inline std::string percent_decode(const std::string& s) {
    std::string cur = s;
    for (;;) {
        std::string next = percent_decode_once(cur);
        if (next == cur) return cur;
        cur = std::move(next);
    }
}

/// A labeled corpus of payloads of one attack type.
struct Dataset {
    std::vector<std::pair<Payload, Label>> payloads;
    AttackType attack_type = AttackType::SQLi;

    std::vector<Payload> payloads_only() const {
        std::vector<Payload> out;
        out.reserve(payloads.size());
        for (const auto& [p, l] : payloads) out.push_back(p);
        return out;
    }
};

/// Loads a corpus file: UTF-8 text, one payload per line, blank lines
/// skipped. Malicious and generated payloads are decoded to fixed point;
/// benign payloads get a single decode pass and are otherwise kept
/// verbatim.
inline Dataset load_corpus(const std::string& path, Label label, AttackType attack_type,
                           Origin origin) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path);
    Dataset ds;
    ds.attack_type = attack_type;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::string decoded =
            origin == Origin::Benign ? percent_decode_once(line) : percent_decode(line);
        ds.payloads.emplace_back(Payload::from_raw(std::move(decoded), origin), label);
    }
    return ds;
}

inline Dataset load_corpus(const std::string& path, Label label, AttackType attack_type) {
    Origin origin = label == Label::Rejected ? Origin::Malicious : Origin::Benign;
    return load_corpus(path, label, attack_type, origin);
}

/// Writes raw payload strings, one per line, LF endings.
inline void save_corpus(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write corpus file: " + path);
    for (const auto& [p, l] : ds.payloads) out << p.raw << '\n';
}

inline void save_payloads(const std::vector<Payload>& payloads, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write corpus file: " + path);
    for (const auto& p : payloads) out << p.raw << '\n';
}

/// Terminal dictionaries and production rules for desk-scale SQL payload
/// synthesis:
///   Q ::= S | U | D | I
///   S ::= select (fields | *) from t where e [limit v]
///   U ::= update t set f=v where e [limit v]
///   D ::= delete from t where e [limit v]
///   I ::= insert into t (f) values (v)
///   e ::= f op v | f like s | e and e | e or e      op in {=, <, >}
/// Comparisons and assignments render attached (user_id=1), the way the
/// source payloads write them; LIKE terminals stay spaced.
struct SqlGrammar {
    std::vector<std::string> tables;
    std::vector<std::string> fields;
    std::vector<std::string> values;
    std::vector<std::string> strings;  // quoted LIKE patterns

    void validate() const {
        if (tables.empty()) throw std::invalid_argument("grammar: tables dictionary is empty");
        if (fields.empty()) throw std::invalid_argument("grammar: fields dictionary is empty");
        if (values.empty()) throw std::invalid_argument("grammar: values dictionary is empty");
        if (strings.empty()) throw std::invalid_argument("grammar: strings dictionary is empty");
    }
};

inline SqlGrammar default_sql_grammar() {
    SqlGrammar g;
    g.tables = {"users", "orders", "accounts", "products", "sessions", "messages", "payments", "events"};
    g.fields = {"id", "name", "username", "password", "email", "user_id", "price",
                "total", "status", "created_at", "city", "phone"};
    g.values = {"0", "1", "2", "5", "7", "10", "25", "42", "100", "1000"};
    g.strings = {"'a%'", "'%admin%'", "'%test'", "'q%'", "'%x%'", "'%guest%'", "'m%'", "'%01%'"};
    return g;
}

/// Grammar file: one `key = v1, v2, ...` line per terminal class
/// (tables, fields, values, strings). '#' starts a comment line.
inline SqlGrammar load_grammar(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open grammar file: " + path);
    SqlGrammar g;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = values");
        auto trim = [](std::string s) {
            std::size_t b = s.find_first_not_of(" \t");
            std::size_t e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::vector<std::string> vals;
        std::stringstream ss(line.substr(eq + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) vals.push_back(item);
        }
        if (key == "tables") g.tables = vals;
        else if (key == "fields") g.fields = vals;
        else if (key == "values") g.values = vals;
        else if (key == "strings") g.strings = vals;
        else throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown terminal class '" + key + "'");
    }
    g.validate();
    return g;
}

inline void save_grammar(const SqlGrammar& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write grammar file: " + path);
    auto write = [&](const char* key, const std::vector<std::string>& vals) {
        out << key << " = ";
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (i) out << ", ";
            out << vals[i];
        }
        out << '\n';
    };
    write("tables", g.tables);
    write("fields", g.fields);
    write("values", g.values);
    write("strings", g.strings);
}

namespace detail {

inline constexpr std::size_t kMaxExprDepth = 3;

inline void expand_expr(const SqlGrammar& g, Rng& rng, std::size_t depth,
                        std::vector<std::string>& out) {
    static const char* kOps[] = {"=", "<", ">"};
    // At the depth cap only terminal alternatives remain.
    std::size_t choice = depth >= kMaxExprDepth ? rng.uniform(2) : rng.uniform(4);
    switch (choice) {
        case 0:  // f op v, attached
            out.push_back(g.fields[rng.uniform(g.fields.size())] + kOps[rng.uniform(3)] +
                          g.values[rng.uniform(g.values.size())]);
            break;
        case 1:  // f like s
            out.push_back(g.fields[rng.uniform(g.fields.size())]);
            out.push_back("like");
            out.push_back(g.strings[rng.uniform(g.strings.size())]);
            break;
        case 2:  // e and e'
            expand_expr(g, rng, depth + 1, out);
            out.push_back("and");
            expand_expr(g, rng, depth + 1, out);
            break;
        case 3:  // e or e'
            expand_expr(g, rng, depth + 1, out);
            out.push_back("or");
            expand_expr(g, rng, depth + 1, out);
            break;
    }
}

inline void maybe_limit(const SqlGrammar& g, Rng& rng, std::vector<std::string>& out) {
    if (rng.coin()) {
        out.push_back("limit");
        out.push_back(g.values[rng.uniform(g.values.size())]);
    }
}

}  // namespace detail

/// Derives one payload from Q with uniform rule choice and uniform
/// terminal draws.
inline Payload synth_sql_one(const SqlGrammar& g, Rng& rng) {
    std::vector<std::string> toks;
    switch (rng.uniform(4)) {
        case 0: {  // S
            toks.push_back("select");
            if (rng.coin()) {
                toks.push_back("*");
            } else {
                std::size_t nf = 1 + rng.uniform(3);
                for (std::size_t i = 0; i < nf; ++i) {
                    if (i) toks.push_back(",");
                    toks.push_back(g.fields[rng.uniform(g.fields.size())]);
                }
            }
            toks.push_back("from");
            toks.push_back(g.tables[rng.uniform(g.tables.size())]);
            toks.push_back("where");
            detail::expand_expr(g, rng, 1, toks);
            detail::maybe_limit(g, rng, toks);
            break;
        }
        case 1: {  // U
            toks.push_back("update");
            toks.push_back(g.tables[rng.uniform(g.tables.size())]);
            toks.push_back("set");
            toks.push_back(g.fields[rng.uniform(g.fields.size())] + "=" +
                           g.values[rng.uniform(g.values.size())]);
            toks.push_back("where");
            detail::expand_expr(g, rng, 1, toks);
            detail::maybe_limit(g, rng, toks);
            break;
        }
        case 2: {  // D
            toks.push_back("delete");
            toks.push_back("from");
            toks.push_back(g.tables[rng.uniform(g.tables.size())]);
            toks.push_back("where");
            detail::expand_expr(g, rng, 1, toks);
            detail::maybe_limit(g, rng, toks);
            break;
        }
        case 3: {  // I
            toks.push_back("insert");
            toks.push_back("into");
            toks.push_back(g.tables[rng.uniform(g.tables.size())]);
            toks.push_back("(" + g.fields[rng.uniform(g.fields.size())] + ")");
            toks.push_back("values");
            toks.push_back("(" + g.values[rng.uniform(g.values.size())] + ")");
            break;
        }
    }
    return Payload::from_tokens(toks, Origin::Malicious);
}

/// Synthesizes n malicious SQL payloads from the grammar. Deterministic
/// given the rng seed.
inline Dataset synth_sql(const SqlGrammar& g, std::size_t n, Rng& rng) {
    if (n == 0) throw std::invalid_argument("synth_sql: n must be >= 1");
    g.validate();
    Dataset ds;
    ds.attack_type = AttackType::SQLi;
    ds.payloads.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        ds.payloads.emplace_back(synth_sql_one(g, rng), Label::Rejected);
    return ds;
}

/// Deterministic shuffle + 70/15/15 split used for every model in the
/// repo.
struct SplitIndices {
    std::vector<std::size_t> train, val, test;
};

inline SplitIndices split_70_15_15(std::size_t n, Rng& rng) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.uniform(i)]);
    SplitIndices s;
    std::size_t n_train = n * 70 / 100;
    std::size_t n_val = n * 15 / 100;
    for (std::size_t i = 0; i < n; ++i) {
        if (i < n_train) s.train.push_back(idx[i]);
        else if (i < n_train + n_val) s.val.push_back(idx[i]);
        else s.test.push_back(idx[i]);
    }
    return s;
}

}  // namespace wafboost
