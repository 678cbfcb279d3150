// wafboost - WAF hardening toolkit command line.
//
// Subcommands: data synth|decode, waf classify|update, shadow
// train|predict|fidelity, gen train|sample, correct, sig
// score|select|cluster|align|emit|mine|validate, pipeline run, report.
// Exit codes: 0 success, 1 stage failure, 2 configuration error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wafboost/core.hpp"
#include "wafboost/corrector.hpp"
#include "wafboost/generator.hpp"
#include "wafboost/ingest.hpp"
#include "wafboost/mockwaf.hpp"
#include "wafboost/pipeline.hpp"
#include "wafboost/shadow.hpp"
#include "wafboost/signature.hpp"

namespace {

using namespace wafboost;

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + path);
    return file;
}

std::vector<Signature> load_signature_file(const std::string& path) {
    std::vector<Signature> sigs;
    for (const auto& line : read_lines(path)) sigs.push_back(Signature::parse(line));
    return sigs;
}

KeywordSet load_keyword_file(const std::string& path) {
    KeywordSet ks;
    for (const auto& line : read_lines(path)) {
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            ks.entries.emplace_back(fold_case(line), 0);
        } else {
            ks.entries.emplace_back(fold_case(line.substr(0, tab)),
                                    std::stoull(line.substr(tab + 1)));
        }
    }
    if (ks.entries.empty()) throw std::runtime_error("keyword file is empty: " + path);
    return ks;
}

int run(int argc, char** argv) {
    CLI::App app{"wafboost: shadow-model driven WAF hardening toolkit"};
    app.require_subcommand(1);

    // ---------------- data ----------------
    auto* data = app.add_subcommand("data", "corpus synthesis and decoding");
    data->require_subcommand(1);

    auto* data_synth = data->add_subcommand("synth", "synthesize malicious SQL payloads");
    std::string ds_grammar, ds_out;
    std::size_t ds_n = 2000;
    std::uint64_t ds_seed = 0;
    data_synth->add_option("--grammar", ds_grammar, "grammar file (default: built-in)");
    data_synth->add_option("--n", ds_n, "number of payloads")->capture_default_str();
    data_synth->add_option("--seed", ds_seed, "rng seed")->required();
    data_synth->add_option("--out", ds_out, "output corpus file (default: stdout)");
    data_synth->callback([&] {
        SqlGrammar g = ds_grammar.empty() ? default_sql_grammar() : load_grammar(ds_grammar);
        Rng rng(ds_seed);
        Dataset ds = synth_sql(g, ds_n, rng);
        std::ofstream file;
        auto& out = open_out(file, ds_out);
        for (const auto& [p, l] : ds.payloads) out << p.raw << '\n';
    });

    auto* data_decode = data->add_subcommand("decode", "percent-decode payloads to fixed point");
    std::string dd_in, dd_out;
    data_decode->add_option("--in", dd_in, "input file, one payload per line")->required();
    data_decode->add_option("--out", dd_out, "output file (default: stdout)");
    data_decode->callback([&] {
        std::ofstream file;
        auto& out = open_out(file, dd_out);
        for (const auto& line : read_lines(dd_in)) out << percent_decode(line) << '\n';
    });

    // ---------------- waf ----------------
    auto* waf = app.add_subcommand("waf", "mock WAF rule engine");
    waf->require_subcommand(1);

    auto* waf_classify = waf->add_subcommand("classify", "classify payloads against a rule set");
    std::string wc_rules, wc_in, wc_attack = "sqli";
    bool wc_builtin = false;
    waf_classify->add_option("--rules", wc_rules, "rule file (id<TAB>pattern)");
    waf_classify->add_flag("--builtin", wc_builtin, "use the built-in seed rules");
    waf_classify->add_option("--attack-type", wc_attack, "sqli|xss|ci for --builtin")
        ->capture_default_str();
    waf_classify->add_option("--in", wc_in, "payload file")->required();
    waf_classify->callback([&] {
        if (wc_rules.empty() && !wc_builtin)
            throw CLI::ValidationError("--rules or --builtin is required");
        RuleSet rs = wc_rules.empty() ? seed_rules(attack_type_from_string(wc_attack))
                                      : load_rules(wc_rules);
        std::size_t rejected = 0, total = 0;
        for (const auto& line : read_lines(wc_in)) {
            Payload p = Payload::from_raw(percent_decode(line), Origin::Malicious);
            Label l = classify(rs, p);
            if (l == Label::Rejected) ++rejected;
            ++total;
            std::cout << to_string(l) << '\t' << line << '\n';
        }
        std::cerr << "rejected " << rejected << "/" << total << '\n';
    });

    auto* waf_update = waf->add_subcommand("update", "append validated signatures to a rule set");
    std::string wu_rules, wu_sigs, wu_out;
    waf_update->add_option("--rules", wu_rules, "rule file")->required();
    waf_update->add_option("--signatures", wu_sigs, "signature file, one pattern per line")->required();
    waf_update->add_option("--out", wu_out, "output rule file")->required();
    waf_update->callback([&] {
        RuleSet rs = load_rules(wu_rules);
        UpdateSummary s = add_signatures(rs, load_signature_file(wu_sigs));
        save_rules(s.rule_set, wu_out);
        std::cerr << "added " << s.added << " rules, " << s.duplicates << " duplicates dropped\n";
    });

    // ---------------- shadow ----------------
    auto* shadow_cmd = app.add_subcommand("shadow", "shadow classifier");
    shadow_cmd->require_subcommand(1);

    auto* sh_train = shadow_cmd->add_subcommand("train", "train on WAF-labeled corpora");
    std::string st_benign, st_malicious, st_rules, st_attack = "sqli", st_out;
    TrainConfig st_cfg;
    sh_train->add_option("--benign", st_benign, "benign corpus")->required();
    sh_train->add_option("--malicious", st_malicious, "malicious corpus")->required();
    sh_train->add_option("--rules", st_rules, "rule file (default: built-in seed rules)");
    sh_train->add_option("--attack-type", st_attack)->capture_default_str();
    sh_train->add_option("--out", st_out, "model file")->required();
    sh_train->add_option("--epochs", st_cfg.epochs)->capture_default_str();
    sh_train->add_option("--lr", st_cfg.learning_rate)->capture_default_str();
    sh_train->add_option("--batch", st_cfg.batch_size)->capture_default_str();
    sh_train->add_option("--seed", st_cfg.rng_seed, "rng seed")->required();
    sh_train->callback([&] {
        AttackType at = attack_type_from_string(st_attack);
        RuleSet rs = st_rules.empty() ? seed_rules(at) : load_rules(st_rules);
        Dataset ben = load_corpus(st_benign, Label::Accepted, at, Origin::Benign);
        Dataset mal = load_corpus(st_malicious, Label::Rejected, at, Origin::Malicious);
        Dataset all;
        all.attack_type = at;
        for (const auto& [p, l] : mal.payloads) all.payloads.emplace_back(p, classify(rs, p));
        for (const auto& [p, l] : ben.payloads) all.payloads.emplace_back(p, classify(rs, p));
        ShadowModel m = train_shadow(all, st_cfg);
        save_shadow(m, st_out);
        std::cerr << "trained on " << all.payloads.size() << " payloads\n";
    });

    auto* sh_predict = shadow_cmd->add_subcommand("predict", "score payloads with a trained model");
    std::string sp_model, sp_in;
    sh_predict->add_option("--model", sp_model)->required();
    sh_predict->add_option("--in", sp_in, "payload file")->required();
    sh_predict->callback([&] {
        ShadowModel m = load_shadow(sp_model);
        std::cout.precision(6);
        for (const auto& line : read_lines(sp_in)) {
            Payload p = Payload::from_raw(percent_decode(line), Origin::Malicious);
            auto [score, label] = predict(m, p);
            std::cout << std::fixed << score << '\t' << to_string(label) << '\t' << line << '\n';
        }
    });

    auto* sh_fid = shadow_cmd->add_subcommand("fidelity", "agreement between model and rule set");
    std::string sf_model, sf_rules, sf_attack = "sqli", sf_benign, sf_malicious;
    sh_fid->add_option("--model", sf_model)->required();
    sh_fid->add_option("--rules", sf_rules, "rule file (default: built-in seed rules)");
    sh_fid->add_option("--attack-type", sf_attack)->capture_default_str();
    sh_fid->add_option("--benign", sf_benign)->required();
    sh_fid->add_option("--malicious", sf_malicious)->required();
    sh_fid->callback([&] {
        AttackType at = attack_type_from_string(sf_attack);
        RuleSet rs = sf_rules.empty() ? seed_rules(at) : load_rules(sf_rules);
        ShadowModel m = load_shadow(sf_model);
        Dataset all = load_corpus(sf_malicious, Label::Rejected, at, Origin::Malicious);
        Dataset ben = load_corpus(sf_benign, Label::Accepted, at, Origin::Benign);
        for (const auto& pl : ben.payloads) all.payloads.push_back(pl);
        std::cout << "fidelity " << fidelity(m, rs, all) << '\n';
    });

    // ---------------- gen ----------------
    auto* gen = app.add_subcommand("gen", "payload generator");
    gen->require_subcommand(1);

    auto* gen_train = gen->add_subcommand("train", "train the token sequence model");
    std::string gt_in, gt_out;
    GenTrainConfig gt_cfg;
    bool gt_paper = false;
    gen_train->add_option("--in", gt_in, "detected-malicious corpus")->required();
    gen_train->add_option("--out", gt_out, "model file")->required();
    gen_train->add_option("--epochs", gt_cfg.epochs)->capture_default_str();
    gen_train->add_option("--lr0", gt_cfg.lr0)->capture_default_str();
    gen_train->add_option("--batch", gt_cfg.batch_size)->capture_default_str();
    gen_train->add_option("--hidden", gt_cfg.hidden)->capture_default_str();
    gen_train->add_option("--emb", gt_cfg.emb)->capture_default_str();
    gen_train->add_option("--dropout-keep", gt_cfg.dropout_keep)->capture_default_str();
    gen_train->add_flag("--paper-preset", gt_paper,
                        "hidden 256, batch 512 (original hyperparameters)");
    gen_train->add_option("--seed", gt_cfg.rng_seed, "rng seed")->required();
    gen_train->callback([&] {
        if (gt_paper) {
            auto seed = gt_cfg.rng_seed;
            auto epochs = gt_cfg.epochs;
            gt_cfg = GenTrainConfig::paper_preset();
            gt_cfg.rng_seed = seed;
            gt_cfg.epochs = epochs;
        }
        Dataset mal = load_corpus(gt_in, Label::Rejected, AttackType::SQLi, Origin::Malicious);
        TrainTraceGen trace;
        GruModel m = train_generator(mal.payloads_only(), gt_cfg, &trace);
        save_generator(m, gt_out);
        std::cerr << "epochs " << trace.epoch_loss.size() << ", first-epoch loss "
                  << trace.epoch_loss.front() << ", final-epoch loss " << trace.epoch_loss.back()
                  << '\n';
    });

    auto* gen_sample = gen->add_subcommand("sample", "sample candidate payloads");
    std::string gs_model, gs_seed_token = "select", gs_out;
    std::size_t gs_count = 100, gs_max_len = 16;
    double gs_temp = 1.0;
    std::uint64_t gs_seed = 0;
    gen_sample->add_option("--model", gs_model)->required();
    gen_sample->add_option("--seed-token", gs_seed_token)->capture_default_str();
    gen_sample->add_option("--count", gs_count)->capture_default_str();
    gen_sample->add_option("--max-len", gs_max_len)->capture_default_str();
    gen_sample->add_option("--temperature", gs_temp)->capture_default_str();
    gen_sample->add_option("--seed", gs_seed, "rng seed")->required();
    gen_sample->add_option("--out", gs_out, "output file (default: stdout)");
    gen_sample->callback([&] {
        GruModel m = load_generator(gs_model);
        Rng rng(gs_seed);
        std::ofstream file;
        auto& out = open_out(file, gs_out);
        bool warned = false;
        for (std::size_t i = 0; i < gs_count; ++i) {
            SampleResult r = sample(m, gs_seed_token, gs_max_len, gs_temp, rng);
            if (r.seed_was_unknown && !warned) {
                std::cerr << "warning: seed token '" << gs_seed_token
                          << "' is not in the vocabulary; mapped to <unk>\n";
                warned = true;
            }
            out << r.payload.raw << '\n';
        }
    });

    // ---------------- correct ----------------
    auto* corr = app.add_subcommand("correct", "payload corrector");
    std::string co_keywords, co_keywords_from, co_keywords_out, co_in, co_out, co_disc;
    CorrectorConfig co_cfg;
    corr->add_option("--keywords", co_keywords, "keyword file (token[<TAB>count] per line)");
    corr->add_option("--keywords-from", co_keywords_from,
                     "extract the top-5 keywords from this corpus instead");
    corr->add_option("--keywords-out", co_keywords_out, "persist the keyword set");
    corr->add_option("--lt", co_cfg.lower_threshold, "lower threshold")->capture_default_str();
    corr->add_option("--ut", co_cfg.upper_threshold, "upper threshold")->capture_default_str();
    corr->add_option("--min-tokens", co_cfg.min_tokens)->capture_default_str();
    corr->add_option("--in", co_in, "generated payloads")->required();
    corr->add_option("--out", co_out, "surviving payloads")->required();
    corr->add_option("--discarded", co_disc, "discarded payloads with reasons (TSV)");
    corr->callback([&] {
        if (co_keywords.empty() == co_keywords_from.empty())
            throw CLI::ValidationError("exactly one of --keywords / --keywords-from is required");
        KeywordSet ks;
        if (!co_keywords.empty()) {
            ks = load_keyword_file(co_keywords);
        } else {
            Dataset src = load_corpus(co_keywords_from, Label::Rejected, AttackType::SQLi,
                                      Origin::Malicious);
            ks = extract_keywords(src);
        }
        if (!co_keywords_out.empty()) {
            std::ofstream kf(co_keywords_out, std::ios::binary);
            for (const auto& [w, c] : ks.entries) kf << w << '\t' << c << '\n';
        }
        std::ofstream out(co_out, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + co_out);
        std::ofstream disc;
        if (!co_disc.empty()) disc.open(co_disc, std::ios::binary);
        std::size_t kept = 0, rewritten = 0, dropped = 0;
        for (const auto& line : read_lines(co_in)) {
            Payload p = Payload::from_raw(percent_decode(line), Origin::Generated);
            CorrectResult r = correct(p, ks, co_cfg);
            switch (r.outcome) {
                case CorrectOutcome::Kept:
                    ++kept;
                    out << r.payload.raw << '\n';
                    break;
                case CorrectOutcome::Corrected:
                    ++rewritten;
                    out << r.payload.raw << '\n';
                    break;
                case CorrectOutcome::Discarded:
                    ++dropped;
                    if (disc.is_open()) disc << line << '\t' << to_string(r.reason) << '\n';
                    break;
            }
        }
        std::cerr << "kept " << kept << ", corrected " << rewritten << ", discarded " << dropped
                  << '\n';
    });

    // ---------------- sig ----------------
    auto* sig = app.add_subcommand("sig", "signature mining");
    sig->require_subcommand(1);

    auto* sig_score = sig->add_subcommand("score", "token importance scores against a rule set");
    std::string ss_rules, ss_attack = "sqli", ss_in, ss_out;
    bool ss_builtin = false;
    sig_score->add_option("--rules", ss_rules);
    sig_score->add_flag("--builtin", ss_builtin, "use the built-in seed rules");
    sig_score->add_option("--attack-type", ss_attack)->capture_default_str();
    sig_score->add_option("--in", ss_in, "payload file")->required();
    sig_score->add_option("--out", ss_out, "TSV output (default: stdout)");
    sig_score->callback([&] {
        if (ss_rules.empty() && !ss_builtin)
            throw CLI::ValidationError("--rules or --builtin is required");
        RuleSet rs = ss_rules.empty() ? seed_rules(attack_type_from_string(ss_attack))
                                      : load_rules(ss_rules);
        Decider decider = [&rs](const Payload& p) { return classify(rs, p); };
        std::ofstream file;
        auto& out = open_out(file, ss_out);
        out << "payload\ttoken\tds\trs\ths\tts\n";
        std::size_t idx = 0;
        for (const auto& line : read_lines(ss_in)) {
            Payload p = Payload::from_raw(percent_decode(line), Origin::Malicious);
            if (p.tokens.empty()) continue;
            for (const auto& sv : score_tokens(decider, p))
                out << idx << '\t' << sv.token.text << '\t' << sv.ds << '\t' << sv.rs << '\t'
                    << sv.hs << '\t' << sv.ts << '\n';
            ++idx;
        }
    });

    auto* sig_select = sig->add_subcommand("select", "select important tokens from score TSV");
    std::string sl_in, sl_out;
    int sl_min_total = 2;
    std::size_t sl_min_freq = 3, sl_top_m = 50;
    sig_select->add_option("--in", sl_in, "score TSV from 'sig score'")->required();
    sig_select->add_option("--min-total", sl_min_total)->capture_default_str();
    sig_select->add_option("--min-freq", sl_min_freq)->capture_default_str();
    sig_select->add_option("--top-m", sl_top_m)->capture_default_str();
    sig_select->add_option("--out", sl_out, "token list output (default: stdout)");
    sig_select->callback([&] {
        std::map<std::size_t, std::vector<ScoreVector>> by_payload;
        auto lines = read_lines(sl_in);
        for (std::size_t i = 1; i < lines.size(); ++i) {  // skip header
            std::istringstream ls(lines[i]);
            std::size_t idx;
            ScoreVector sv;
            std::string tok;
            if (!(ls >> idx >> tok >> sv.ds >> sv.rs >> sv.hs >> sv.ts))
                throw std::runtime_error(sl_in + ": bad score line: " + lines[i]);
            sv.token = Token{tok, 0};
            by_payload[idx].push_back(sv);
        }
        std::vector<std::vector<ScoreVector>> scored;
        for (auto& [idx, svs] : by_payload) scored.push_back(std::move(svs));
        std::ofstream file;
        auto& out = open_out(file, sl_out);
        for (const auto& t : select_important(scored, sl_min_total, sl_min_freq, sl_top_m))
            out << t << '\n';
    });

    auto* sig_cluster = sig->add_subcommand("cluster", "cluster tokens by edit distance");
    std::string cl_in, cl_out;
    std::size_t cl_radius = 3;
    sig_cluster->add_option("--in", cl_in, "token list, one per line")->required();
    sig_cluster->add_option("--radius", cl_radius)->capture_default_str();
    sig_cluster->add_option("--out", cl_out, "groups output (default: stdout)");
    sig_cluster->callback([&] {
        std::ofstream file;
        auto& out = open_out(file, cl_out);
        for (const auto& g : cluster(read_lines(cl_in), cl_radius)) {
            for (std::size_t i = 0; i < g.size(); ++i) out << (i ? " " : "") << g[i];
            out << '\n';
        }
    });

    auto* sig_align = sig->add_subcommand("align", "align a group of strings");
    std::vector<std::string> al_members;
    double al_gp = kDefaultGapPenalty;
    sig_align->add_option("--member", al_members, "group member (repeatable)")->required();
    sig_align->add_option("--gap-penalty", al_gp)->capture_default_str();
    sig_align->callback([&] {
        AlignResult ar = align_group(al_members, al_gp);
        std::cout << "subsequence " << ar.subsequence << '\n'
                  << "matches " << ar.matches << '\n'
                  << "gaps " << ar.gaps << '\n'
                  << "score " << ar.score << '\n';
        if (!ar.empty()) std::cout << "signature " << emit_signature(ar).render() << '\n';
    });

    auto* sig_emit = sig->add_subcommand("emit", "emit the signature for a group");
    std::vector<std::string> em_members;
    sig_emit->add_option("--member", em_members, "group member (repeatable)")->required();
    sig_emit->callback([&] {
        std::cout << emit_signature(align_group(em_members)).render() << '\n';
    });

    auto* sig_mine = sig->add_subcommand("mine", "score + select + cluster + align + emit");
    std::string sm_rules, sm_attack = "sqli", sm_in, sm_out;
    bool sm_builtin = false;
    int sm_min_total = 2;
    std::size_t sm_min_freq = 3, sm_top_m = 50, sm_radius = 3;
    sig_mine->add_option("--rules", sm_rules);
    sig_mine->add_flag("--builtin", sm_builtin);
    sig_mine->add_option("--attack-type", sm_attack)->capture_default_str();
    sig_mine->add_option("--in", sm_in, "detected payloads to score")->required();
    sig_mine->add_option("--min-total", sm_min_total)->capture_default_str();
    sig_mine->add_option("--min-freq", sm_min_freq)->capture_default_str();
    sig_mine->add_option("--top-m", sm_top_m)->capture_default_str();
    sig_mine->add_option("--radius", sm_radius)->capture_default_str();
    sig_mine->add_option("--out", sm_out, "signature file output (default: stdout)");
    sig_mine->callback([&] {
        if (sm_rules.empty() && !sm_builtin)
            throw CLI::ValidationError("--rules or --builtin is required");
        RuleSet rs = sm_rules.empty() ? seed_rules(attack_type_from_string(sm_attack))
                                      : load_rules(sm_rules);
        Decider decider = [&rs](const Payload& p) { return classify(rs, p); };
        std::vector<std::vector<ScoreVector>> scored;
        for (const auto& line : read_lines(sm_in)) {
            Payload p = Payload::from_raw(percent_decode(line), Origin::Malicious);
            if (!p.tokens.empty()) scored.push_back(score_tokens(decider, p));
        }
        auto important = select_important(scored, sm_min_total, sm_min_freq, sm_top_m);
        for (auto& t : important) t = fold_case(t);
        std::sort(important.begin(), important.end());
        important.erase(std::unique(important.begin(), important.end()), important.end());
        std::ofstream file;
        auto& out = open_out(file, sm_out);
        if (important.empty()) {
            std::cerr << "no important tokens selected\n";
            return;
        }
        std::vector<Signature> sigs;
        for (const auto& g : cluster(important, sm_radius)) {
            AlignResult ar = align_group(g);
            if (!ar.empty()) sigs.push_back(emit_signature(ar));
        }
        std::sort(sigs.begin(), sigs.end());
        sigs.erase(std::unique(sigs.begin(), sigs.end()), sigs.end());
        for (const auto& s : sigs) out << s.render() << '\n';
    });

    auto* sig_validate = sig->add_subcommand("validate", "drop signatures that hit benign traffic");
    std::string sv_sigs, sv_benign, sv_bypass, sv_out, sv_report;
    sig_validate->add_option("--signatures", sv_sigs)->required();
    sig_validate->add_option("--benign", sv_benign)->required();
    sig_validate->add_option("--bypass", sv_bypass, "bypassing malicious payloads")->required();
    sig_validate->add_option("--out", sv_out, "accepted signatures (default: stdout)");
    sig_validate->add_option("--report", sv_report, "per-signature TSV report");
    sig_validate->callback([&] {
        auto sigs = load_signature_file(sv_sigs);
        Dataset ben = load_corpus(sv_benign, Label::Accepted, AttackType::SQLi, Origin::Benign);
        Dataset byp = load_corpus(sv_bypass, Label::Rejected, AttackType::SQLi, Origin::Corrected);
        ValidationResult vr = validate_signatures(sigs, ben.payloads_only(), byp.payloads_only());
        std::ofstream file;
        auto& out = open_out(file, sv_out);
        for (const auto& s : vr.accepted) out << s.render() << '\n';
        if (!sv_report.empty()) {
            std::ofstream rep(sv_report, std::ios::binary);
            for (const auto& sr : vr.reports) {
                rep << sr.signature.render() << '\t' << (sr.accepted ? "accepted" : "rejected")
                    << '\t' << sr.benign_hits << '\t' << sr.malicious_hits;
                if (sr.benign_hits > 0) rep << '\t' << sr.first_benign_hit;
                rep << '\n';
            }
        }
        std::cerr << "accepted " << vr.accepted.size() << "/" << sigs.size() << " signatures\n";
    });

    // ---------------- pipeline ----------------
    auto* pipe = app.add_subcommand("pipeline", "end-to-end hardening run");
    pipe->require_subcommand(1);
    auto* pipe_run = pipe->add_subcommand("run", "execute the full pipeline");
    std::string pr_config;
    std::vector<std::string> pr_sets;
    pipe_run->add_option("--config", pr_config, "config file (key = value lines)");
    pipe_run->add_option("--set", pr_sets, "override: key=value (repeatable)");
    pipe_run->callback([&] {
        PipelineConfig cfg;
        if (!pr_config.empty()) cfg = load_pipeline_config(pr_config);
        for (const auto& kv : pr_sets) {
            std::size_t eq = kv.find('=');
            if (eq == std::string::npos)
                throw CLI::ValidationError("--set expects key=value, got: " + kv);
            set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
        RunReport r = run_pipeline(cfg);
        std::cout << render_report_table(r);
    });

    // ---------------- report ----------------
    auto* rep = app.add_subcommand("report", "re-render a persisted run report");
    std::string rp_in, rp_format = "table";
    rep->add_option("--in", rp_in, "report.kv file")->required();
    rep->add_option("--format", rp_format, "table|kv")->capture_default_str();
    rep->callback([&] {
        std::ifstream in(rp_in, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open " + rp_in);
        std::stringstream buf;
        buf << in.rdbuf();
        std::cout << render_report(parse_report_kv(buf.str()), rp_format);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // bad flags are configuration errors
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const wafboost::PipelineError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
