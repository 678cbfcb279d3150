#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "wafboost/pipeline.hpp"

using namespace wafboost;

namespace {

const std::string kBenign = std::string(WAFBOOST_SOURCE_DIR) + "/data/benign.txt";

PipelineConfig small_config(const std::string& out_dir) {
    PipelineConfig cfg;
    cfg.benign_path = kBenign;
    cfg.out_dir = out_dir;
    cfg.seed = 1;
    cfg.n_malicious = 300;
    cfg.shadow_epochs = 8;
    cfg.gen_epochs = 6;
    cfg.gen_hidden = 24;
    cfg.gen_emb = 12;
    cfg.samples_per_seed = 60;
    return cfg;
}

RunReport sample_report() {
    RunReport r;
    r.generated = 3000;
    r.corrected = 2400;
    r.discarded = 600;
    r.shadow_bypassing = 700;
    r.waf_bypassing = 450;
    r.signatures_emitted = 12;
    r.signatures_validated = 9;
    r.shadow_fidelity = 0.9765625;
    r.rules_before = 22;
    r.rules_after = 31;
    r.pre = compute_metrics(std::vector<Label>(450, Label::Accepted),
                            std::vector<Label>(360, Label::Accepted));
    std::vector<Label> post_mal(450, Label::Rejected);
    post_mal[0] = Label::Accepted;
    r.post = compute_metrics(post_mal, std::vector<Label>(360, Label::Accepted));
    return r;
}

}  // namespace

TEST_CASE("report rendering is deterministic and round-trips") {
    RunReport r = sample_report();
    SECTION("same report renders byte-identically") {
        REQUIRE(render_report(r, "table") == render_report(r, "table"));
        REQUIRE(render_report(r, "kv") == render_report(r, "kv"));
    }
    SECTION("kv round-trips to an equal report") {
        RunReport back = parse_report_kv(render_report_kv(r));
        REQUIRE(back == r);
    }
    SECTION("undefined ratios survive the round trip") {
        RunReport r2 = r;
        r2.pre = compute_metrics({Label::Rejected}, {});
        RunReport back = parse_report_kv(render_report_kv(r2));
        REQUIRE(back == r2);
        REQUIRE_FALSE(back.pre.tar.has_value());
    }
    SECTION("funnel counts in the table equal the report fields") {
        std::string table = render_report_table(r);
        REQUIRE(table.find("generated            3000") != std::string::npos);
        REQUIRE(table.find("corrected            2400") != std::string::npos);
        REQUIRE(table.find("waf-bypassing        450") != std::string::npos);
    }
    SECTION("unknown format errors") {
        REQUIRE_THROWS_AS(render_report(r, "yaml"), std::invalid_argument);
    }
}

TEST_CASE("pipeline config parsing and overrides") {
    auto path = std::filesystem::temp_directory_path() / "wafboost_cfg_test.conf";
    {
        std::ofstream out(path);
        out << "# comment line\n";
        out << "attack_type = sqli\n";
        out << "benign = " << kBenign << "\n";
        out << "seed = 42\n";
        out << "n_malicious = 500\n";
        out << "samples_per_seed = 10\n";
        out << "cluster_radius = 2\n";
    }
    PipelineConfig cfg = load_pipeline_config(path.string());
    REQUIRE(cfg.seed == 42);
    REQUIRE(cfg.n_malicious == 500);
    REQUIRE(cfg.samples_per_seed == 10);
    REQUIRE(cfg.cluster_radius == 2);
    set_config_value(cfg, "seed", "7");
    REQUIRE(cfg.seed == 7);
    REQUIRE_THROWS_AS(set_config_value(cfg, "bogus_key", "1"), std::invalid_argument);
    std::filesystem::remove(path);

    SECTION("seed is mandatory") {
        PipelineConfig no_seed;
        no_seed.benign_path = kBenign;
        REQUIRE_THROWS_AS(no_seed.validate(), std::invalid_argument);
    }
    SECTION("missing paths fail validation") {
        PipelineConfig bad;
        bad.benign_path = "/nonexistent/benign.txt";
        bad.seed = 1;
        REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
    }
}

TEST_CASE("small pipeline run: funnel, artifacts, determinism") {
    namespace fs = std::filesystem;
    auto dir1 = fs::temp_directory_path() / "wafboost_run_a";
    auto dir2 = fs::temp_directory_path() / "wafboost_run_b";
    fs::remove_all(dir1);
    fs::remove_all(dir2);

    RunReport r1 = run_pipeline(small_config(dir1.string()));

    SECTION("funnel counts are monotone along the pipeline") {
        REQUIRE(r1.generated >= r1.corrected);
        REQUIRE(r1.corrected >= r1.shadow_bypassing);
        REQUIRE(r1.shadow_bypassing >= r1.waf_bypassing);
        REQUIRE(r1.generated == r1.corrected + r1.discarded);
    }
    SECTION("stable artifact names exist") {
        for (const char* name :
             {"malicious.txt", "rules_before.rules", "shadow.model", "generator.model",
              "keywords.txt", "candidates.txt", "corrected.txt", "discarded.tsv",
              "shadow_bypass.txt", "waf_bypass.txt", "important_tokens.txt",
              "signatures_mined.txt", "signatures_validated.txt", "validation_report.tsv",
              "rules_after.rules", "report.kv", "report.txt"}) {
            INFO(name);
            REQUIRE(fs::exists(dir1 / name));
        }
    }
    SECTION("persisted kv report parses back to the returned report") {
        std::ifstream in(dir1 / "report.kv", std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        REQUIRE(parse_report_kv(buf.str()) == r1);
    }
    SECTION("hardening is monotone and keeps validation FRR at zero") {
        REQUIRE(r1.rules_after >= r1.rules_before);
        if (r1.post.frr) REQUIRE(*r1.post.frr == 0.0);
        // the rejected set never shrinks
        RuleSet before = load_rules((dir1 / "rules_before.rules").string());
        RuleSet after = load_rules((dir1 / "rules_after.rules").string());
        Dataset mal = load_corpus((dir1 / "malicious.txt").string(), Label::Rejected,
                                  AttackType::SQLi);
        for (const auto& [p, l] : mal.payloads)
            if (classify(before, p) == Label::Rejected)
                REQUIRE(classify(after, p) == Label::Rejected);
    }
    SECTION("identical config produces byte-identical reports") {
        RunReport r2 = run_pipeline(small_config(dir2.string()));
        REQUIRE(render_report_kv(r1) == render_report_kv(r2));
        std::ifstream a(dir1 / "report.kv", std::ios::binary), b(dir2 / "report.kv", std::ios::binary);
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        REQUIRE(sa.str() == sb.str());
    }

    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("pipeline failures name the stage") {
    PipelineConfig cfg = small_config(
        (std::filesystem::temp_directory_path() / "wafboost_run_fail").string());
    cfg.attack_type = AttackType::XSS;  // no synthesizer and no corpus file
    try {
        run_pipeline(cfg);
        FAIL("expected a PipelineError");
    } catch (const PipelineError& e) {
        REQUIRE(e.stage == "load-corpora");
        REQUIRE(std::string(e.what()).find("load-corpora") != std::string::npos);
    }
    std::filesystem::remove_all(std::filesystem::temp_directory_path() / "wafboost_run_fail");
}
