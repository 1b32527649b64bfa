#include <doctest.h>

#include <algorithm>

#include "graftkit/config.hpp"
#include "support.hpp"

using namespace graftkit;
using nlohmann::json;

namespace {

const std::filesystem::path kSource = GRAFTKIT_SOURCE_DIR;

json base_config() {
    return json::parse(gk_test::read_file(kSource / "configs/graft.json"));
}

bool has_error(const ConfigResult& r, const std::string& prefix) {
    return std::any_of(r.errors.begin(), r.errors.end(), [&](const std::string& e) { return e.starts_with(prefix); });
}

}  // namespace

TEST_CASE("every shipped config validates") {
    for (const auto& entry : std::filesystem::directory_iterator(kSource / "configs")) {
        CAPTURE(entry.path().string());
        const auto r = load_run_config(entry.path());
        for (const auto& e : r.errors) MESSAGE(e);
        CHECK(r.config.has_value());
    }
}

TEST_CASE("invalid k_percent and a missing generation backend are both reported") {
    auto j = base_config();
    j["task"]["k_percent"] = 0;
    j.erase("generation_backend");
    const auto r = parse_run_config(j, kSource / "configs");
    CHECK_FALSE(r.config.has_value());
    CHECK(has_error(r, "task.k_percent"));
    CHECK(has_error(r, "generation_backend"));
    CHECK(r.errors.size() == 2);
}

TEST_CASE("field errors name the field") {
    const std::vector<std::pair<std::string, std::string>> cases = {
        {"/task/n_percent", "task.n_percent"},
        {"/method", "method"},
        {"/dataset/validation_fraction", "dataset.validation_fraction"},
        {"/synthesis/max_attempts", "synthesis.max_attempts"},
        {"/scoring_backend/kind", "scoring_backend.kind"},
    };
    const std::vector<json> bad = {150, "best", 1.5, 0, "gpu"};
    for (std::size_t i = 0; i < cases.size(); ++i) {
        auto j = base_config();
        j[json::json_pointer(cases[i].first)] = bad[i];
        const auto r = parse_run_config(j, kSource / "configs");
        CAPTURE(cases[i].second);
        CHECK_FALSE(r.config.has_value());
        CHECK(has_error(r, cases[i].second));
    }
}

TEST_CASE("unknown keys and a missing corpus file are rejected") {
    auto j = base_config();
    j["task"]["k_precent"] = 10;
    j["corpus"]["path"] = "nope.jsonl";
    const auto r = parse_run_config(j, kSource / "configs");
    CHECK(has_error(r, "task.k_precent"));
    CHECK(has_error(r, "corpus.path"));
}

TEST_CASE("ablations require the graft method; scoring methods require a scorer") {
    auto j = base_config();
    j["method"] = "zerogen";
    j["ablation"] = "no-mining";
    CHECK(has_error(parse_run_config(j, kSource / "configs"), "ablation"));
    j = base_config();
    j["method"] = "dcpmi-mine";
    j["scoring_backend"] = nullptr;
    CHECK(has_error(parse_run_config(j, kSource / "configs"), "scoring_backend"));
    j["generation_backend"] = nullptr;
    CHECK(parse_run_config(j, kSource / "configs").errors.size() == 1);
}

TEST_CASE("overrides set nested fields with JSON or string values") {
    json j = {{"task", {{"k_percent", 25}}}};
    apply_override(j, "task.k_percent=50");
    apply_override(j, "task.style=news article");
    apply_override(j, "dataset.ratio=0.5");
    apply_override(j, "generation_backend=null");
    CHECK(j["task"]["k_percent"] == 50);
    CHECK(j["task"]["style"] == "news article");
    CHECK(j["dataset"]["ratio"] == 0.5);
    CHECK(j["generation_backend"].is_null());
    CHECK_THROWS_AS(apply_override(j, "no_equals_sign"), ConfigError);
}

TEST_CASE("config hash ignores output locations and tracks substance") {
    const auto a = load_run_config_or_throw(kSource / "configs/graft.json");
    const auto b = load_run_config_or_throw(kSource / "configs/graft.json", {"output_dir=\"/tmp/elsewhere\""});
    const auto c = load_run_config_or_throw(kSource / "configs/graft.json", {"task.k_percent=30"});
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != c.hash());
    CHECK(b.output_dir == "/tmp/elsewhere");
    CHECK(a.cache_dir == a.output_dir / "cache");
}

TEST_CASE("defaults and derived settings") {
    const auto c = load_run_config_or_throw(kSource / "configs/graft.json");
    CHECK(c.method == Method::graft);
    CHECK(c.effective_negative_strategy() == NegativeStrategy::raw_sample);
    CHECK(c.fill.seed == c.seeds.generation);
    CHECK(c.task.k_percent() == 25.0);
    const auto z = load_run_config_or_throw(kSource / "configs/zerogen.json");
    CHECK(z.effective_negative_strategy() == NegativeStrategy::synthesized);
    const auto s = load_run_config_or_throw(kSource / "configs/sweep.json");
    CHECK(s.sweep_k_percent == std::vector<double>{50, 62.5, 75, 87.5, 100});
}

TEST_CASE("mask_ratio sweep entries become kept percentages") {
    auto j = base_config();
    j["sweep"] = {{"mask_ratio", {0.75, 0.5}}};
    const auto r = parse_run_config(j, kSource / "configs");
    REQUIRE(r.config.has_value());
    CHECK(r.config->sweep_k_percent == std::vector<double>{25.0, 50.0});
    j["sweep"] = {{"mask_ratio", {1.0}}};
    CHECK(has_error(parse_run_config(j, kSource / "configs"), "sweep.mask_ratio"));
}

TEST_CASE("backend factories honour the configured kind") {
    const auto c = load_run_config_or_throw(kSource / "configs/graft.json");
    auto scorer = make_scoring_backend(*c.scoring_backend);
    CHECK(scorer->model_name().starts_with("mock-scorer:seed=13"));
    gk_test::TempDir dir;
    auto cached = make_scoring_backend(*c.scoring_backend, std::make_shared<ScoringCache>(dir.path()));
    CHECK(dynamic_cast<CachedScoringBackend*>(cached.get()) != nullptr);
    auto gen = make_generation_backend(*c.generation_backend);
    CHECK(gen->model_name() == "mock-generator:seed=29");
}
