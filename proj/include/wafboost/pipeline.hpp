#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wafboost/core.hpp"
#include "wafboost/corrector.hpp"
#include "wafboost/generator.hpp"
#include "wafboost/ingest.hpp"
#include "wafboost/mockwaf.hpp"
#include "wafboost/shadow.hpp"
#include "wafboost/signature.hpp"

namespace wafboost {

/// Everything one end-to-end hardening run needs. The seed is mandatory;
/// there is no wall-clock fallback anywhere.
struct PipelineConfig {
    AttackType attack_type = AttackType::SQLi;
    std::string benign_path;
    std::string malicious_path;  // empty: synthesize via the grammar
    std::string grammar_path;    // empty: built-in default grammar
    std::string rules_path;      // empty: seed_rules(attack_type)
    std::string out_dir = "run";
    std::optional<std::uint64_t> seed;

    std::size_t n_malicious = 2000;

    // shadow
    std::size_t shadow_epochs = 50;
    double shadow_lr = 0.05;
    std::size_t shadow_batch = 32;
    double fidelity_threshold = 0.9;  // one retraining pass below this

    // generator
    std::size_t gen_epochs = 50;
    double gen_lr0 = 0.001;
    std::size_t gen_batch = 32;
    std::size_t gen_hidden = 64;
    std::size_t gen_emb = 32;
    double gen_dropout_keep = 0.7;

    // sampling
    std::size_t n_seeds = 5;  // top keywords used as seed tokens
    std::size_t samples_per_seed = 600;
    std::size_t sample_max_len = 16;
    double sample_temperature = 1.0;

    // corrector
    CorrectorConfig corrector;

    // signature mining
    int sig_min_total = 2;
    std::size_t sig_min_freq = 3;
    std::size_t sig_top_m = 50;
    std::size_t cluster_radius = 2;

    void validate() const {
        if (!seed) throw std::invalid_argument("config: seed is mandatory");
        if (benign_path.empty()) throw std::invalid_argument("config: benign corpus path is required");
        if (!std::filesystem::exists(benign_path))
            throw std::invalid_argument("config: benign corpus not found: " + benign_path);
        if (!malicious_path.empty() && !std::filesystem::exists(malicious_path))
            throw std::invalid_argument("config: malicious corpus not found: " + malicious_path);
        if (!grammar_path.empty() && !std::filesystem::exists(grammar_path))
            throw std::invalid_argument("config: grammar file not found: " + grammar_path);
        if (!rules_path.empty() && !std::filesystem::exists(rules_path))
            throw std::invalid_argument("config: rules file not found: " + rules_path);
    }
};

/// Funnel counts and before/after metrics for one run.
struct RunReport {
    std::size_t generated = 0;
    std::size_t corrected = 0;  // kept + rewritten, i.e. not discarded
    std::size_t discarded = 0;
    std::size_t shadow_bypassing = 0;
    std::size_t waf_bypassing = 0;
    std::size_t signatures_emitted = 0;
    std::size_t signatures_validated = 0;
    double shadow_fidelity = 0.0;
    std::size_t rules_before = 0;
    std::size_t rules_after = 0;
    Metrics pre;   // bypassing set + benign validation corpus, original rules
    Metrics post;  // same corpora, hardened rules

    bool operator==(const RunReport&) const = default;
};

struct PipelineError : std::runtime_error {
    std::string stage;
    PipelineError(const std::string& stage_, const std::string& what_)
        : std::runtime_error("stage '" + stage_ + "': " + what_), stage(stage_) {}
};

namespace detail {

inline std::string fmt_ratio(const std::optional<double>& v) {
    if (!v) return "undefined";
    std::ostringstream os;
    os << std::fixed << std::setprecision(6) << *v;
    return os.str();
}

inline std::string fmt_exact(const std::optional<double>& v) {
    if (!v) return "undefined";
    std::ostringstream os;
    os << std::setprecision(17) << *v;
    return os.str();
}

inline void render_metrics_kv(std::ostream& os, const char* prefix, const Metrics& m) {
    os << prefix << ".trr " << fmt_exact(m.trr) << '\n';
    os << prefix << ".far " << fmt_exact(m.far) << '\n';
    os << prefix << ".tar " << fmt_exact(m.tar) << '\n';
    os << prefix << ".frr " << fmt_exact(m.frr) << '\n';
    os << prefix << ".n_malicious " << m.n_malicious << '\n';
    os << prefix << ".n_benign " << m.n_benign << '\n';
    os << prefix << ".rejected_malicious " << m.rejected_malicious << '\n';
    os << prefix << ".accepted_benign " << m.accepted_benign << '\n';
}

}  // namespace detail

/// Machine-readable rendering: one `key value` pair per line. Parses
/// back to an equal RunReport.
inline std::string render_report_kv(const RunReport& r) {
    std::ostringstream os;
    os << "report.version 1\n";
    os << "funnel.generated " << r.generated << '\n';
    os << "funnel.corrected " << r.corrected << '\n';
    os << "funnel.discarded " << r.discarded << '\n';
    os << "funnel.shadow_bypassing " << r.shadow_bypassing << '\n';
    os << "funnel.waf_bypassing " << r.waf_bypassing << '\n';
    os << "signatures.emitted " << r.signatures_emitted << '\n';
    os << "signatures.validated " << r.signatures_validated << '\n';
    os << "shadow.fidelity " << detail::fmt_exact(r.shadow_fidelity) << '\n';
    os << "rules.before " << r.rules_before << '\n';
    os << "rules.after " << r.rules_after << '\n';
    detail::render_metrics_kv(os, "pre", r.pre);
    detail::render_metrics_kv(os, "post", r.post);
    return os.str();
}

/// Human-readable table with the same content as the kv rendering.
inline std::string render_report_table(const RunReport& r) {
    std::ostringstream os;
    os << "== wafboost run report ==\n";
    os << "pipeline funnel\n";
    os << "  generated            " << r.generated << '\n';
    os << "  corrected            " << r.corrected << '\n';
    os << "  discarded            " << r.discarded << '\n';
    os << "  shadow-bypassing     " << r.shadow_bypassing << '\n';
    os << "  waf-bypassing        " << r.waf_bypassing << '\n';
    os << "signatures\n";
    os << "  emitted              " << r.signatures_emitted << '\n';
    os << "  validated            " << r.signatures_validated << '\n';
    os << "shadow fidelity        " << detail::fmt_ratio(r.shadow_fidelity) << '\n';
    os << "rules                  " << r.rules_before << " -> " << r.rules_after << '\n';
    os << "metrics (bypassing set + benign validation corpus)\n";
    os << "            TRR        TAR        FRR        FAR\n";
    os << "  before    " << detail::fmt_ratio(r.pre.trr) << "   " << detail::fmt_ratio(r.pre.tar)
       << "   " << detail::fmt_ratio(r.pre.frr) << "   " << detail::fmt_ratio(r.pre.far) << '\n';
    os << "  after     " << detail::fmt_ratio(r.post.trr) << "   " << detail::fmt_ratio(r.post.tar)
       << "   " << detail::fmt_ratio(r.post.frr) << "   " << detail::fmt_ratio(r.post.far) << '\n';
    return os.str();
}

inline std::string render_report(const RunReport& r, const std::string& format) {
    if (format == "kv") return render_report_kv(r);
    if (format == "table") return render_report_table(r);
    throw std::invalid_argument("unknown report format: " + format + " (expected table|kv)");
}

/// Parses the kv rendering back into a RunReport.
inline RunReport parse_report_kv(const std::string& text) {
    RunReport r;
    std::istringstream in(text);
    std::string key, value;
    auto ratio = [](const std::string& v) -> std::optional<double> {
        if (v == "undefined") return std::nullopt;
        return std::stod(v);
    };
    auto metrics_field = [&](Metrics& m, const std::string& field, const std::string& v) {
        if (field == "trr") m.trr = ratio(v);
        else if (field == "far") m.far = ratio(v);
        else if (field == "tar") m.tar = ratio(v);
        else if (field == "frr") m.frr = ratio(v);
        else if (field == "n_malicious") m.n_malicious = std::stoull(v);
        else if (field == "n_benign") m.n_benign = std::stoull(v);
        else if (field == "rejected_malicious") m.rejected_malicious = std::stoull(v);
        else if (field == "accepted_benign") m.accepted_benign = std::stoull(v);
        else throw std::runtime_error("report: unknown metrics field " + field);
    };
    while (in >> key >> value) {
        if (key == "report.version") continue;
        else if (key == "funnel.generated") r.generated = std::stoull(value);
        else if (key == "funnel.corrected") r.corrected = std::stoull(value);
        else if (key == "funnel.discarded") r.discarded = std::stoull(value);
        else if (key == "funnel.shadow_bypassing") r.shadow_bypassing = std::stoull(value);
        else if (key == "funnel.waf_bypassing") r.waf_bypassing = std::stoull(value);
        else if (key == "signatures.emitted") r.signatures_emitted = std::stoull(value);
        else if (key == "signatures.validated") r.signatures_validated = std::stoull(value);
        else if (key == "shadow.fidelity") r.shadow_fidelity = std::stod(value);
        else if (key == "rules.before") r.rules_before = std::stoull(value);
        else if (key == "rules.after") r.rules_after = std::stoull(value);
        else if (key.rfind("pre.", 0) == 0) metrics_field(r.pre, key.substr(4), value);
        else if (key.rfind("post.", 0) == 0) metrics_field(r.post, key.substr(5), value);
        else throw std::runtime_error("report: unknown key " + key);
    }
    return r;
}

namespace detail {

inline Dataset subset(const Dataset& ds, const std::vector<std::size_t>& idx) {
    Dataset out;
    out.attack_type = ds.attack_type;
    out.payloads.reserve(idx.size());
    for (std::size_t i : idx) out.payloads.push_back(ds.payloads[i]);
    return out;
}

/// Replaces ground-truth labels with the rule-set verdicts.
inline Dataset waf_label(const RuleSet& rs, const Dataset& ds) {
    Dataset out;
    out.attack_type = ds.attack_type;
    out.payloads.reserve(ds.payloads.size());
    for (const auto& [p, l] : ds.payloads) out.payloads.emplace_back(p, classify(rs, p));
    return out;
}

inline Dataset concat(const Dataset& a, const Dataset& b) {
    Dataset out = a;
    for (const auto& pl : b.payloads) out.payloads.push_back(pl);
    return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

}  // namespace detail

/// Runs the full hardening pipeline:
///   label corpora with the mock WAF; train the shadow model and report
///   fidelity; train the generator on WAF-detected malicious payloads;
///   sample candidates from the top keyword seeds; correct them; keep
///   the ones that bypass the shadow model and then the WAF; mine and
///   validate signatures from decision-critical tokens; update the rule
///   set; re-measure on the bypassing set and the benign validation
///   corpus. Every intermediate artifact lands in cfg.out_dir under a
///   stable name. Deterministic for a fixed config.
inline RunReport run_pipeline(const PipelineConfig& cfg) {
    namespace fs = std::filesystem;
    cfg.validate();
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);

    auto stage = [](const char* name, auto&& fn) {
        try {
            return fn();
        } catch (const PipelineError&) {
            throw;
        } catch (const std::exception& e) {
            throw PipelineError(name, e.what());
        }
    };

    Rng master(*cfg.seed);
    Rng rng_synth = master.fork(1);
    Rng rng_split_mal = master.fork(2);
    Rng rng_split_ben = master.fork(3);
    std::uint64_t shadow_seed = master.next_u64();
    std::uint64_t shadow_retrain_seed = master.next_u64();
    std::uint64_t gen_seed = master.next_u64();
    Rng rng_sample = master.fork(4);

    RunReport report;

    // -------- corpora --------
    Dataset benign, malicious;
    stage("load-corpora", [&] {
        benign = load_corpus(cfg.benign_path, Label::Accepted, cfg.attack_type, Origin::Benign);
        if (!cfg.malicious_path.empty()) {
            malicious = load_corpus(cfg.malicious_path, Label::Rejected, cfg.attack_type,
                                    Origin::Malicious);
        } else {
            if (cfg.attack_type != AttackType::SQLi)
                throw std::runtime_error("only the SQLi grammar synthesizer is built in; "
                                         "provide a malicious corpus file");
            SqlGrammar g = cfg.grammar_path.empty() ? default_sql_grammar()
                                                    : load_grammar(cfg.grammar_path);
            malicious = synth_sql(g, cfg.n_malicious, rng_synth);
        }
        if (benign.payloads.empty()) throw std::runtime_error("benign corpus is empty");
        save_corpus(malicious, (dir / "malicious.txt").string());
        return 0;
    });

    SplitIndices mal_split = split_70_15_15(malicious.payloads.size(), rng_split_mal);
    SplitIndices ben_split = split_70_15_15(benign.payloads.size(), rng_split_ben);
    Dataset mal_train = detail::subset(malicious, mal_split.train);
    Dataset mal_val = detail::subset(malicious, mal_split.val);
    Dataset ben_train = detail::subset(benign, ben_split.train);
    Dataset ben_val = detail::subset(benign, ben_split.val);

    // -------- rules + labeling --------
    RuleSet rules = cfg.rules_path.empty() ? seed_rules(cfg.attack_type) : load_rules(cfg.rules_path);
    report.rules_before = rules.rules.size();
    save_rules(rules, (dir / "rules_before.rules").string());
    Dataset train_labeled = detail::waf_label(rules, detail::concat(mal_train, ben_train));
    Dataset val_labeled = detail::waf_label(rules, detail::concat(mal_val, ben_val));

    // -------- shadow model --------
    ShadowModel shadow;
    stage("shadow", [&] {
        TrainConfig tc;
        tc.epochs = cfg.shadow_epochs;
        tc.learning_rate = cfg.shadow_lr;
        tc.batch_size = cfg.shadow_batch;
        tc.rng_seed = shadow_seed;
        shadow = train_shadow(train_labeled, tc);
        report.shadow_fidelity = fidelity(shadow, rules, val_labeled);
        save_shadow(shadow, (dir / "shadow.model").string());
        return 0;
    });

    // -------- generator --------
    GruModel gen;
    std::vector<Payload> detected_train;
    stage("generator", [&] {
        for (const auto& [p, l] : mal_train.payloads)
            if (classify(rules, p) == Label::Rejected) detected_train.push_back(p);
        if (detected_train.empty())
            throw std::runtime_error("the rule set detects none of the malicious training corpus");
        GenTrainConfig gc;
        gc.epochs = cfg.gen_epochs;
        gc.lr0 = cfg.gen_lr0;
        gc.batch_size = cfg.gen_batch;
        gc.hidden = cfg.gen_hidden;
        gc.emb = cfg.gen_emb;
        gc.dropout_keep = cfg.gen_dropout_keep;
        gc.rng_seed = gen_seed;
        gen = train_generator(detected_train, gc);
        save_generator(gen, (dir / "generator.model").string());
        return 0;
    });

    // -------- keywords --------
    KeywordSet keywords;
    stage("keywords", [&] {
        keywords = extract_keywords(mal_train, cfg.n_seeds);
        std::ostringstream os;
        for (const auto& [w, c] : keywords.entries) os << w << '\t' << c << '\n';
        detail::write_text(dir / "keywords.txt", os.str());
        return 0;
    });

    // -------- sampling --------
    std::vector<Payload> candidates;
    stage("sample", [&] {
        for (const auto& [seed_tok, freq] : keywords.entries)
            for (std::size_t i = 0; i < cfg.samples_per_seed; ++i)
                candidates.push_back(
                    sample(gen, seed_tok, cfg.sample_max_len, cfg.sample_temperature, rng_sample)
                        .payload);
        report.generated = candidates.size();
        save_payloads(candidates, (dir / "candidates.txt").string());
        return 0;
    });

    // -------- correction --------
    std::vector<Payload> corrected;
    stage("correct", [&] {
        std::ostringstream discarded_log;
        for (const auto& c : candidates) {
            CorrectResult cr = correct(c, keywords, cfg.corrector);
            if (cr.outcome == CorrectOutcome::Discarded) {
                ++report.discarded;
                discarded_log << c.raw << '\t' << to_string(cr.reason) << '\n';
            } else {
                corrected.push_back(cr.payload);
            }
        }
        report.corrected = corrected.size();
        save_payloads(corrected, (dir / "corrected.txt").string());
        detail::write_text(dir / "discarded.tsv", discarded_log.str());
        return 0;
    });

    // -------- bypass filtering --------
    std::vector<Payload> shadow_bypass, waf_bypass;
    stage("filter", [&] {
        // Fidelity feedback: the corrected candidates are where the shadow
        // and the WAF can drift apart (the training corpora never cover
        // this distribution). One retraining pass over the combined,
        // WAF-labeled data when the discrepancy is too large.
        Dataset cand_labeled;
        cand_labeled.attack_type = cfg.attack_type;
        for (const auto& p : corrected)
            cand_labeled.payloads.emplace_back(p, classify(rules, p));
        if (!corrected.empty() &&
            fidelity(shadow, rules, cand_labeled) < cfg.fidelity_threshold) {
            TrainConfig tc;
            tc.epochs = cfg.shadow_epochs;
            tc.learning_rate = cfg.shadow_lr;
            tc.batch_size = cfg.shadow_batch;
            tc.rng_seed = shadow_retrain_seed;
            shadow = train_shadow(detail::concat(train_labeled, cand_labeled), tc);
            report.shadow_fidelity = fidelity(shadow, rules, val_labeled);
            save_shadow(shadow, (dir / "shadow.model").string());
        }
        for (const auto& p : corrected)
            if (predict(shadow, p).second == Label::Accepted) shadow_bypass.push_back(p);
        for (const auto& p : shadow_bypass)
            if (classify(rules, p) == Label::Accepted) waf_bypass.push_back(p);
        report.shadow_bypassing = shadow_bypass.size();
        report.waf_bypassing = waf_bypass.size();
        save_payloads(shadow_bypass, (dir / "shadow_bypass.txt").string());
        save_payloads(waf_bypass, (dir / "waf_bypass.txt").string());
        return 0;
    });

    // -------- signature mining --------
    // Importance scoring needs payloads the decider rejects: only there
    // can a perturbation flip the verdict and expose which tokens carry
    // the detection. The corrected candidates the WAF still catches are
    // exactly that population.
    std::vector<Signature> mined;
    stage("sig-mine", [&] {
        Decider decider = [&rules](const Payload& p) { return classify(rules, p); };
        std::vector<std::vector<ScoreVector>> scored;
        for (const auto& p : corrected) {
            if (p.tokens.empty()) continue;
            if (classify(rules, p) == Label::Rejected) scored.push_back(score_tokens(decider, p));
        }
        std::vector<std::string> important =
            select_important(scored, cfg.sig_min_total, cfg.sig_min_freq, cfg.sig_top_m);
        for (auto& t : important) t = fold_case(t);
        std::sort(important.begin(), important.end());
        important.erase(std::unique(important.begin(), important.end()), important.end());
        {
            std::ostringstream os;
            for (const auto& t : important) os << t << '\n';
            detail::write_text(dir / "important_tokens.txt", os.str());
        }
        if (!important.empty()) {
            auto groups = cluster(important, cfg.cluster_radius);
            std::ostringstream gos;
            for (const auto& g : groups) {
                for (std::size_t i = 0; i < g.size(); ++i) gos << (i ? " " : "") << g[i];
                gos << '\n';
                AlignResult ar = align_group(g);
                if (ar.empty()) continue;  // no common subsequence to emit
                mined.push_back(emit_signature(ar));
            }
            detail::write_text(dir / "groups.txt", gos.str());
            std::sort(mined.begin(), mined.end());
            mined.erase(std::unique(mined.begin(), mined.end()), mined.end());
        }
        report.signatures_emitted = mined.size();
        std::ostringstream os;
        for (const auto& s : mined) os << s.render() << '\n';
        detail::write_text(dir / "signatures_mined.txt", os.str());
        return 0;
    });

    // -------- validation + rule update --------
    RuleSet hardened;
    stage("sig-validate", [&] {
        std::vector<Signature> accepted;
        std::ostringstream rep;
        if (!mined.empty()) {
            ValidationResult vr = validate_signatures(mined, ben_val.payloads_only(), waf_bypass);
            accepted = vr.accepted;
            for (const auto& sr : vr.reports) {
                rep << sr.signature.render() << '\t' << (sr.accepted ? "accepted" : "rejected")
                    << '\t' << "benign_hits=" << sr.benign_hits
                    << '\t' << "malicious_hits=" << sr.malicious_hits;
                if (sr.benign_hits > 0) rep << '\t' << "first_benign=" << sr.first_benign_hit;
                rep << '\n';
            }
        }
        report.signatures_validated = accepted.size();
        detail::write_text(dir / "validation_report.tsv", rep.str());
        std::ostringstream os;
        for (const auto& s : accepted) os << s.render() << '\n';
        detail::write_text(dir / "signatures_validated.txt", os.str());
        hardened = add_signatures(rules, accepted).rule_set;
        report.rules_after = hardened.rules.size();
        save_rules(hardened, (dir / "rules_after.rules").string());
        return 0;
    });

    // -------- metrics --------
    stage("metrics", [&] {
        auto run_labels = [](const RuleSet& rs, const std::vector<Payload>& ps) {
            std::vector<Label> out;
            out.reserve(ps.size());
            for (const auto& p : ps) out.push_back(classify(rs, p));
            return out;
        };
        std::vector<Payload> ben_val_payloads = ben_val.payloads_only();
        if (!waf_bypass.empty() || !ben_val_payloads.empty()) {
            report.pre = compute_metrics(run_labels(rules, waf_bypass),
                                         run_labels(rules, ben_val_payloads));
            report.post = compute_metrics(run_labels(hardened, waf_bypass),
                                          run_labels(hardened, ben_val_payloads));
        }
        return 0;
    });

    detail::write_text(dir / "report.kv", render_report_kv(report));
    detail::write_text(dir / "report.txt", render_report_table(report));
    return report;
}

/// Pipeline config file: `key = value` lines, '#' comments. Every key
/// can also arrive as a CLI flag override through set_config_value.
inline void set_config_value(PipelineConfig& cfg, const std::string& key, const std::string& value) {
    auto to_u64 = [&](const std::string& v) { return std::stoull(v); };
    auto to_dbl = [&](const std::string& v) { return std::stod(v); };
    if (key == "attack_type") cfg.attack_type = attack_type_from_string(value);
    else if (key == "benign") cfg.benign_path = value;
    else if (key == "malicious") cfg.malicious_path = value;
    else if (key == "grammar") cfg.grammar_path = value;
    else if (key == "rules") cfg.rules_path = value;
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "seed") cfg.seed = to_u64(value);
    else if (key == "n_malicious") cfg.n_malicious = to_u64(value);
    else if (key == "shadow_epochs") cfg.shadow_epochs = to_u64(value);
    else if (key == "shadow_lr") cfg.shadow_lr = to_dbl(value);
    else if (key == "shadow_batch") cfg.shadow_batch = to_u64(value);
    else if (key == "fidelity_threshold") cfg.fidelity_threshold = to_dbl(value);
    else if (key == "gen_epochs") cfg.gen_epochs = to_u64(value);
    else if (key == "gen_lr0") cfg.gen_lr0 = to_dbl(value);
    else if (key == "gen_batch") cfg.gen_batch = to_u64(value);
    else if (key == "gen_hidden") cfg.gen_hidden = to_u64(value);
    else if (key == "gen_emb") cfg.gen_emb = to_u64(value);
    else if (key == "gen_dropout_keep") cfg.gen_dropout_keep = to_dbl(value);
    else if (key == "n_seeds") cfg.n_seeds = to_u64(value);
    else if (key == "samples_per_seed") cfg.samples_per_seed = to_u64(value);
    else if (key == "sample_max_len") cfg.sample_max_len = to_u64(value);
    else if (key == "sample_temperature") cfg.sample_temperature = to_dbl(value);
    else if (key == "lt") cfg.corrector.lower_threshold = to_u64(value);
    else if (key == "ut") cfg.corrector.upper_threshold = to_u64(value);
    else if (key == "min_tokens") cfg.corrector.min_tokens = to_u64(value);
    else if (key == "sig_min_total") cfg.sig_min_total = static_cast<int>(to_u64(value));
    else if (key == "sig_min_freq") cfg.sig_min_freq = to_u64(value);
    else if (key == "sig_top_m") cfg.sig_top_m = to_u64(value);
    else if (key == "cluster_radius") cfg.cluster_radius = to_u64(value);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

inline PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    PipelineConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t h = line.find('#');
        if (h != std::string::npos) line = line.substr(0, h);
        auto trim = [](std::string s) {
            std::size_t b = s.find_first_not_of(" \t");
            std::size_t e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
        try {
            set_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

}  // namespace wafboost
