#include "graftkit/pipeline.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include <spdlog/spdlog.h>

#include "graftkit/artifacts.hpp"
#include "graftkit/baselines.hpp"
#include "graftkit/hash.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace graftkit {

StageCache::StageCache(fs::path output_dir) : dir_(std::move(output_dir) / ".stages") {}

fs::path StageCache::stamp_path(const std::string& stage) const { return dir_ / (stage + ".json"); }

std::string StageCache::key(const std::string& stage, const json& subtree, const std::vector<fs::path>& inputs) {
    std::string material = stage;
    material += '\x1f';
    material += subtree.dump();
    for (const auto& p : inputs) {
        material += '\x1f';
        material += sha256_file(p);
    }
    return sha256_hex(material);
}

bool StageCache::fresh(const std::string& stage, const std::string& key, const std::vector<fs::path>& outputs) const {
    const auto path = stamp_path(stage);
    if (!fs::exists(path)) return false;
    json stamp;
    try {
        stamp = read_json(path);
    } catch (const DataError&) {
        return false;
    }
    if (stamp.value("key", std::string()) != key) return false;
    const auto& recorded = stamp.value("outputs", json::object());
    for (const auto& out : outputs) {
        const auto rel = fs::relative(out, dir_.parent_path()).generic_string();
        if (!fs::exists(out) || !recorded.contains(rel)) return false;
        if (recorded[rel].get<std::string>() != sha256_file(out)) return false;
    }
    return true;
}

void StageCache::record(const std::string& stage, const std::string& key, const std::vector<fs::path>& outputs) {
    json hashes = json::object();
    for (const auto& out : outputs) hashes[fs::relative(out, dir_.parent_path()).generic_string()] = sha256_file(out);
    write_json(stamp_path(stage), {{"stage", stage}, {"key", key}, {"outputs", hashes}});
}

bool RunReport::all_cached() const {
    for (const auto& s : stages)
        if (!s.cached) return false;
    return !stages.empty();
}

namespace {

std::vector<json> records_of(const auto& items) {
    std::vector<json> out;
    for (const auto& i : items) out.push_back(to_json(i));
    return out;
}

std::vector<json> skipped_records(std::span<const SkippedDocument> skipped) {
    std::vector<json> out;
    for (const auto& s : skipped) out.push_back({{"id", s.id}, {"reason", s.reason}});
    return out;
}

std::vector<GraftedText> read_grafted(const fs::path& p) {
    std::vector<GraftedText> out;
    for (const auto& j : read_jsonl(p)) out.push_back(grafted_from_json(j));
    return out;
}

std::vector<Template> read_templates(const fs::path& p, const std::string& mask) {
    std::vector<Template> out;
    for (const auto& j : read_jsonl(p)) out.push_back(template_from_json(j, mask));
    return out;
}

std::vector<MinedText> read_mined(const fs::path& p) {
    std::vector<MinedText> out;
    for (const auto& j : read_jsonl(p)) out.push_back(mined_from_json(j));
    return out;
}

std::size_t line_count(const fs::path& p) { return fs::exists(p) ? read_jsonl(p).size() : 0; }

class Runner {
public:
    explicit Runner(const RunConfig& cfg) : cfg_(cfg), out_(cfg.output_dir), cache_(cfg.output_dir) {
        report_.output_dir = out_;
        report_.config_hash = cfg.hash();
    }

    RunReport run() {
        fs::create_directories(out_);
        switch (cfg_.method) {
        case Method::graft: run_graft(); break;
        case Method::dcpmi_mine:
            run_scores();
            run_dcpmi();
            positives_ = out_ / "mined.jsonl";
            break;
        case Method::prompt_mine:
            run_prompt_mine();
            positives_ = out_ / "mined.jsonl";
            break;
        case Method::zerogen:
        case Method::icg: run_synthesized(); break;
        }
        if (cfg_.effective_negative_strategy() == NegativeStrategy::synthesized) run_negatives();
        run_dataset();
        run_manifest();
        return std::move(report_);
    }

private:
    const json& e() const { return cfg_.effective; }

    void stage(const std::string& name, const json& subtree, const std::vector<fs::path>& inputs,
               const std::vector<fs::path>& outputs, const std::function<void()>& body) {
        const auto key = StageCache::key(name, subtree, inputs);
        if (cache_.fresh(name, key, outputs)) {
            spdlog::info("stage {}: cached", name);
            report_.stages.push_back({name, true});
            return;
        }
        spdlog::info("stage {}: running", name);
        try {
            body();
        } catch (const BackendError& ex) {
            throw BackendError("stage " + name + ": " + ex.what(), ex.retryable());
        } catch (const DataError& ex) {
            throw DataError("stage " + name + ": " + ex.what());
        }
        cache_.record(name, key, outputs);
        report_.stages.push_back({name, false});
    }

    const Corpus& corpus() {
        if (!corpus_) {
            auto c = ingest(cfg_.corpus_path, cfg_.corpus_format);
            if (cfg_.downsample) c = downsample(c, *cfg_.downsample, cfg_.seeds.sample);
            corpus_ = std::move(c);
        }
        return *corpus_;
    }

    ScoringBackend& scorer() {
        if (!scorer_) {
            auto cache = std::make_shared<ScoringCache>(cfg_.cache_dir / "scores");
            scorer_ = make_scoring_backend(*cfg_.scoring_backend, std::move(cache));
        }
        return *scorer_;
    }

    GenerationBackend& generator() {
        if (!generator_) generator_ = make_generation_backend(*cfg_.generation_backend);
        return *generator_;
    }

    GenerationPolicy generation_policy(std::string_view tag) const {
        return {cfg_.fill.max_attempts, cfg_.fill.max_tokens, cfg_.fill.temperature,
                derive_seed(cfg_.seeds.generation, tag)};
    }

    json corpus_subtree() const { return {{"corpus", e()["corpus"]}, {"sample_seed", cfg_.seeds.sample}}; }

    void run_scores() {
        const auto out = out_ / "scores.jsonl";
        json sub = corpus_subtree();
        sub["class_name"] = cfg_.task.class_name();
        sub["style"] = cfg_.task.style();
        sub["scoring_backend"] = e()["scoring_backend"];
        stage("scores", sub, {cfg_.corpus_path}, {out}, [&] {
            const auto scored = score_corpus(corpus(), cfg_.task, scorer(), scorer().parallelism());
            if (!scored.skipped.empty())
                spdlog::warn("{} of {} documents skipped during scoring", scored.skipped.size(), corpus().size());
            write_jsonl(out, scores_to_records(corpus(), scored));
        });
    }

    ScoredCorpus load_scores() { return scores_from_records(corpus(), read_jsonl(out_ / "scores.jsonl")); }

    void run_graft() {
        run_scores();

        const auto templates = out_ / "templates.jsonl";
        const auto skipped = out_ / "templates_skipped.jsonl";
        const bool random = cfg_.ablation == Ablation::random_masking;
        json tsub = {{"task", e()["task"]}, {"random_masking", random}};
        if (random) tsub["masking_seed"] = cfg_.seeds.masking;
        stage("templates", tsub, {cfg_.corpus_path, out_ / "scores.jsonl"}, {templates, skipped}, [&] {
            const auto build = build_templates(corpus(), load_scores(), cfg_.task,
                                               random ? Masking::random : Masking::potential, cfg_.seeds.masking, 0);
            if (build.templates.empty()) throw DataError("no templates could be built");
            write_jsonl(templates, records_of(build.templates));
            write_jsonl(skipped, skipped_records(build.skipped));
        });

        const auto selected = out_ / "selected.jsonl";
        const bool no_mining = cfg_.ablation == Ablation::no_mining;
        json ssub = {{"n_percent", cfg_.task.n_percent()}, {"template_count", e()["task"]["template_count"]},
                     {"no_mining", no_mining}};
        if (no_mining) ssub["selection_seed"] = cfg_.seeds.selection;
        stage("selected", ssub, {templates}, {selected}, [&] {
            auto all = read_templates(templates, cfg_.task.mask_token());
            const std::size_t count = cfg_.template_count ? std::min(*cfg_.template_count, all.size())
                                                          : top_count(all.size(), cfg_.task.n_percent());
            std::vector<Template> chosen;
            if (no_mining) {
                chosen = random_select(all, count, cfg_.seeds.selection);
                sort_by_potential(chosen);
            } else {
                chosen = select_top(std::move(all), count);
            }
            write_jsonl(selected, records_of(chosen));
        });

        const auto grafted = out_ / "grafted.jsonl";
        const auto dropped = out_ / "dropped.jsonl";
        const bool mf_icg = cfg_.ablation == Ablation::mf_icg;
        json gsub = {{"task", e()["task"]},
                     {"generation_backend", e()["generation_backend"]},
                     {"synthesis", e()["synthesis"]},
                     {"generation_seed", cfg_.seeds.generation},
                     {"mf_icg", mf_icg}};
        std::vector<fs::path> ginputs{selected};
        if (mf_icg) {
            gsub["examples_per_prompt"] = cfg_.examples_per_prompt;
            ginputs.push_back(cfg_.corpus_path);
        }
        stage("grafted", gsub, ginputs, {grafted, dropped}, [&] {
            const auto chosen = read_templates(selected, cfg_.task.mask_token());
            GraftResult result;
            if (mf_icg) {
                const auto pool = origin_documents(corpus(), chosen);
                result = icg_generate(cfg_.task, generator(), pool, chosen.size(), cfg_.examples_per_prompt,
                                      generation_policy("mf-icg"), Polarity::in_class, "mf-icg",
                                      generator().parallelism());
            } else {
                FillPolicy policy = cfg_.fill;
                policy.seed = cfg_.seeds.generation;
                result = graft_run(chosen, cfg_.task, generator(), policy, generator().parallelism());
            }
            if (result.texts.empty()) throw DataError("every template was dropped during filling");
            write_jsonl(grafted, records_of(result.texts));
            write_jsonl(dropped, records_of(result.dropped));
        });
        positives_ = grafted;
        positive_provenance_ = mf_icg ? Provenance::synthesized : Provenance::grafted;
    }

    void run_dcpmi() {
        const auto mined = out_ / "mined.jsonl";
        json sub = {{"mining_rate_percent", cfg_.mining_rate_percent}, {"method", "dcpmi"}};
        stage("mined", sub, {out_ / "scores.jsonl"}, {mined}, [&] {
            const auto result = dcpmi_mine(corpus(), load_scores(), cfg_.mining_rate_percent);
            write_jsonl(mined, records_of(result.selected));
        });
    }

    void run_prompt_mine() {
        const auto mined = out_ / "mined.jsonl";
        const auto skipped = out_ / "mined_skipped.jsonl";
        json sub = corpus_subtree();
        sub["class_name"] = cfg_.task.class_name();
        sub["style"] = cfg_.task.style();
        sub["scoring_backend"] = e()["scoring_backend"];
        sub["mining_rate_percent"] = cfg_.mining_rate_percent;
        stage("mined", sub, {cfg_.corpus_path}, {mined, skipped}, [&] {
            const auto result = prompt_confidence_mine(corpus(), cfg_.task, scorer(), cfg_.mining_rate_percent,
                                                       scorer().parallelism());
            write_jsonl(mined, records_of(result.selected));
            write_jsonl(skipped, skipped_records(result.skipped));
        });
    }

    void run_synthesized() {
        const auto positives = out_ / "positives.jsonl";
        const auto dropped = out_ / "dropped.jsonl";
        const bool icg = cfg_.method == Method::icg;
        json sub = {{"class_name", cfg_.task.class_name()},
                    {"style", cfg_.task.style()},
                    {"generation_backend", e()["generation_backend"]},
                    {"synthesis", e()["synthesis"]},
                    {"count", cfg_.synthesis_count},
                    {"generation_seed", cfg_.seeds.generation},
                    {"method", to_string(cfg_.method)}};
        std::vector<fs::path> inputs;
        if (icg) {
            sub["corpus"] = corpus_subtree();
            sub["examples_per_prompt"] = cfg_.examples_per_prompt;
            inputs.push_back(cfg_.corpus_path);
        }
        stage("synthesized", sub, inputs, {positives, dropped}, [&] {
            GraftResult result;
            if (icg)
                result = icg_generate(cfg_.task, generator(), corpus().documents, cfg_.synthesis_count,
                                      cfg_.examples_per_prompt, generation_policy("positives"), Polarity::in_class,
                                      "icg", generator().parallelism());
            else
                result = zerogen_generate(cfg_.task, generator(), cfg_.synthesis_count, Polarity::in_class,
                                          generation_policy("positives"), generator().parallelism());
            if (result.texts.empty()) throw DataError("no texts were synthesized");
            write_jsonl(positives, records_of(result.texts));
            write_jsonl(dropped, records_of(result.dropped));
        });
        positives_ = positives;
        positive_provenance_ = Provenance::synthesized;
    }

    void run_negatives() {
        const auto negatives = out_ / "negatives.jsonl";
        const auto dropped = out_ / "negatives_dropped.jsonl";
        const bool icg = cfg_.method == Method::icg;
        json sub = {{"class_name", cfg_.task.class_name()},
                    {"style", cfg_.task.style()},
                    {"generation_backend", e()["generation_backend"]},
                    {"synthesis", e()["synthesis"]},
                    {"ratio", cfg_.negative_ratio},
                    {"generation_seed", cfg_.seeds.generation},
                    {"icg", icg}};
        std::vector<fs::path> inputs{positives_};
        if (icg) {
            sub["corpus"] = corpus_subtree();
            sub["examples_per_prompt"] = cfg_.examples_per_prompt;
            inputs.push_back(cfg_.corpus_path);
        }
        stage("negatives", sub, inputs, {negatives, dropped}, [&] {
            const auto n_pos = line_count(positives_);
            const auto need =
                static_cast<std::size_t>(std::ceil(cfg_.negative_ratio * static_cast<double>(n_pos) - 1e-9));
            GraftResult result;
            if (icg)
                result = icg_generate(cfg_.task, generator(), corpus().documents, need, cfg_.examples_per_prompt,
                                      generation_policy("negatives"), Polarity::out_of_class, "icg",
                                      generator().parallelism());
            else
                result = zerogen_generate(cfg_.task, generator(), need, Polarity::out_of_class,
                                          generation_policy("negatives"), generator().parallelism());
            write_jsonl(negatives, records_of(result.texts));
            write_jsonl(dropped, records_of(result.dropped));
        });
        negatives_ = negatives;
    }

    std::vector<LabeledExample> load_positives() {
        if (cfg_.method == Method::dcpmi_mine || cfg_.method == Method::prompt_mine) {
            const auto mined = read_mined(positives_);
            return positives_from(mined);
        }
        const auto texts = read_grafted(positives_);
        return positives_from(texts, positive_provenance_);
    }

    void run_dataset() {
        const auto dir = out_ / "dataset";
        const std::vector<fs::path> outputs{dir / "train.jsonl", dir / "validation.jsonl", dir / "manifest.json"};
        json sub = {{"config_hash", report_.config_hash}, {"dataset", e()["dataset"]},
                    {"negatives_seed", cfg_.seeds.negatives}, {"split_seed", cfg_.seeds.split}};
        std::vector<fs::path> inputs{cfg_.corpus_path, positives_};
        if (negatives_) inputs.push_back(*negatives_);
        stage("dataset", sub, inputs, outputs, [&] {
            const auto positives = load_positives();
            std::vector<LabeledExample> synth_neg;
            if (negatives_) {
                const auto neg = read_grafted(*negatives_);
                synth_neg = negatives_from(neg);
            }
            const auto strategy = cfg_.effective_negative_strategy();
            const auto examples =
                assemble(positives, corpus(), strategy, cfg_.negative_ratio, cfg_.seeds.negatives, synth_neg);
            auto bundle = split(examples, cfg_.validation_fraction, cfg_.seeds.split);
            auto& m = bundle.manifest;
            m.config_hash = report_.config_hash;
            m.seeds = cfg_.seeds.to_json();
            m.extra = {{"method", to_string(cfg_.method)},
                       {"ablation", to_string(cfg_.ablation)},
                       {"negative_strategy", to_string(strategy)},
                       {"negative_ratio", cfg_.negative_ratio},
                       {"stage_counts", stage_counts()}};
            write_bundle(bundle, dir);
        });
    }

    json stage_counts() {
        json c = json::object();
        const auto scores = out_ / "scores.jsonl";
        if (fs::exists(scores)) {
            std::size_t scored = 0, skipped = 0;
            for (const auto& r : read_jsonl(scores)) (r.contains("skipped") ? skipped : scored)++;
            c["scored"] = scored;
            c["scoring_skipped"] = skipped;
        }
        for (const char* name : {"templates", "templates_skipped", "selected", "grafted", "dropped", "mined",
                                 "mined_skipped", "positives", "negatives", "negatives_dropped"}) {
            const auto p = out_ / (std::string(name) + ".jsonl");
            if (fs::exists(p)) c[name] = line_count(p);
        }
        return c;
    }

    void run_manifest() {
        const auto path = out_ / "manifest.json";
        std::vector<fs::path> artifacts;
        for (const char* name : {"scores.jsonl", "templates.jsonl", "templates_skipped.jsonl", "selected.jsonl",
                                 "grafted.jsonl", "dropped.jsonl", "mined.jsonl", "mined_skipped.jsonl",
                                 "positives.jsonl", "negatives.jsonl", "negatives_dropped.jsonl",
                                 "dataset/train.jsonl", "dataset/validation.jsonl", "dataset/manifest.json"})
            if (fs::exists(out_ / name)) artifacts.push_back(out_ / name);
        json sub = {{"config_hash", report_.config_hash}, {"config", e()}};
        stage("manifest", sub, artifacts, {path}, [&] {
            json m;
            m["config_hash"] = report_.config_hash;
            m["config"] = e();
            m["seeds"] = cfg_.seeds.to_json();
            m["method"] = to_string(cfg_.method);
            m["ablation"] = to_string(cfg_.ablation);
            m["corpus_sha256"] = sha256_file(cfg_.corpus_path);
            m["counts"] = stage_counts();

            json skipped = json::array();
            const auto scores = out_ / "scores.jsonl";
            if (fs::exists(scores))
                for (const auto& r : read_jsonl(scores))
                    if (r.contains("skipped"))
                        skipped.push_back({{"id", r["id"]}, {"reason", r["skipped"]}, {"stage", "scores"}});
            for (const char* name : {"templates_skipped", "mined_skipped"}) {
                const auto p = out_ / (std::string(name) + ".jsonl");
                if (!fs::exists(p)) continue;
                for (auto r : read_jsonl(p)) {
                    r["stage"] = std::string(name).substr(0, std::string(name).find('_'));
                    skipped.push_back(r);
                }
            }
            m["skipped_documents"] = skipped;

            json dropped = json::array();
            for (const char* name : {"dropped", "negatives_dropped"}) {
                const auto p = out_ / (std::string(name) + ".jsonl");
                if (fs::exists(p))
                    for (const auto& r : read_jsonl(p)) dropped.push_back(r);
            }
            m["dropped"] = dropped;

            json hashes = json::object();
            for (const auto& a : artifacts) hashes[fs::relative(a, out_).generic_string()] = sha256_file(a);
            m["artifacts"] = hashes;
            write_json(path, m);
            report_.manifest = m;
        });
        if (report_.manifest.is_null()) report_.manifest = read_json(path);
    }

    const RunConfig& cfg_;
    fs::path out_;
    StageCache cache_;
    RunReport report_;
    std::optional<Corpus> corpus_;
    std::shared_ptr<ScoringBackend> scorer_;
    std::shared_ptr<GenerationBackend> generator_;
    fs::path positives_;
    Provenance positive_provenance_ = Provenance::grafted;
    std::optional<fs::path> negatives_;
};

}  // namespace

RunReport run_pipeline(const RunConfig& cfg) { return Runner(cfg).run(); }

std::string sweep_dir_name(double k_percent, std::optional<std::size_t> template_count) {
    std::ostringstream s;
    s << "k" << k_percent;
    if (template_count) s << "_t" << *template_count;
    return s.str();
}

RunConfig sweep_variant(const RunConfig& cfg, double k_percent, std::optional<std::size_t> template_count,
                        const fs::path& output_dir) {
    RunConfig c = cfg;
    c.task = cfg.task.with_k_percent(k_percent);
    c.template_count = template_count;
    c.output_dir = output_dir;
    c.sweep_k_percent.clear();
    c.sweep_template_count.clear();
    c.effective = effective_json(c);
    return c;
}

std::vector<SweepPoint> run_sweep(const RunConfig& cfg) {
    auto ks = cfg.sweep_k_percent;
    if (ks.empty()) ks.push_back(cfg.task.k_percent());
    std::vector<std::optional<std::size_t>> counts;
    for (auto t : cfg.sweep_template_count) counts.emplace_back(t);
    if (counts.empty()) counts.push_back(cfg.template_count);

    std::vector<SweepPoint> out;
    for (double k : ks)
        for (const auto& t : counts) {
            const auto dir = cfg.output_dir / "sweep" / sweep_dir_name(k, t);
            auto variant = sweep_variant(cfg, k, t, dir);
            variant.cache_dir = cfg.cache_dir;
            spdlog::info("sweep point {}", dir.filename().string());
            out.push_back({k, t, run_pipeline(variant)});
        }
    return out;
}

namespace {

json summarize_templates(const std::vector<json>& records) {
    json j = {{"count", records.size()}};
    if (records.empty()) return j;
    double lo = records.front().at("potential").get<double>(), hi = lo, mask_ratio = 0;
    for (const auto& r : records) {
        const double p = r.at("potential").get<double>();
        lo = std::min(lo, p);
        hi = std::max(hi, p);
        const auto words = tokenize(r.at("rendered").get<std::string>()).size();
        const auto kept = r.at("kept_indices").size();
        if (words > 0) mask_ratio += 1.0 - static_cast<double>(kept) / static_cast<double>(words);
    }
    j["potential_min"] = lo;
    j["potential_max"] = hi;
    j["mean_mask_ratio"] = mask_ratio / static_cast<double>(records.size());
    return j;
}

json summarize_examples(const std::vector<json>& records) {
    std::map<std::string, std::size_t> labels, provenance;
    for (const auto& r : records) {
        const auto e = labeled_example_from_json(r);
        ++labels[std::string(to_string(e.label))];
        ++provenance[std::string(to_string(e.provenance))];
    }
    return {{"count", records.size()}, {"by_label", labels}, {"by_provenance", provenance}};
}

}  // namespace

json revalidate_grafted(const fs::path& run_dir) {
    const auto manifest = read_json(run_dir / "manifest.json");
    const auto& task = manifest.at("config").at("task");
    const auto& synth = manifest.at("config").at("synthesis");
    const auto mask = task.at("mask_token").get<std::string>();
    ValidationRules rules{synth.at("min_length_ratio").get<double>(), synth.at("max_length_ratio").get<double>()};

    std::map<std::string, Template> by_origin;
    for (auto& t : read_templates(run_dir / "selected.jsonl", mask)) by_origin.emplace(t.origin_id, std::move(t));

    std::size_t checked = 0;
    json failures = json::array();
    for (const auto& g : read_grafted(run_dir / "grafted.jsonl")) {
        if (g.method != "graft") continue;
        ++checked;
        const auto it = g.origin_id ? by_origin.find(*g.origin_id) : by_origin.end();
        if (it == by_origin.end()) {
            failures.push_back({{"origin_id", g.origin_id.value_or("")}, {"reason", "no selected template"}});
            continue;
        }
        const auto v = validate_filled(it->second, g.text, rules);
        if (!v.ok()) failures.push_back({{"origin_id", *g.origin_id}, {"reason", to_string(v.failure)}});
    }
    return {{"checked", checked}, {"failed", failures.size()}, {"failures", failures}};
}

json inspect(const fs::path& path) {
    if (!fs::exists(path)) throw DataError("no such artifact: " + path.string());
    if (fs::is_directory(path)) {
        if (fs::exists(path / "train.jsonl")) {
            const auto bundle = read_bundle(path);
            std::vector<json> all;
            for (const auto& e : bundle.train) all.push_back(to_json(e));
            for (const auto& e : bundle.validation) all.push_back(to_json(e));
            json j = {{"kind", "dataset"},
                      {"train", bundle.train.size()},
                      {"validation", bundle.validation.size()},
                      {"summary", summarize_examples(all)},
                      {"manifest", bundle.manifest.to_json()}};
            std::size_t prov = 0;
            for (const auto& [k, v] : bundle.manifest.provenance_counts) prov += v;
            j["manifest_consistent"] = prov == all.size() && bundle.manifest.train_count == bundle.train.size() &&
                                       bundle.manifest.validation_count == bundle.validation.size();
            return j;
        }
        if (fs::exists(path / "manifest.json")) {
            const auto m = read_json(path / "manifest.json");
            json verified = json::object();
            bool intact = true;
            const auto artifacts = m.value("artifacts", json::object());
            for (const auto& [rel, hash] : artifacts.items()) {
                const bool ok = fs::exists(path / rel) && sha256_file(path / rel) == hash.get<std::string>();
                verified[rel] = ok;
                intact = intact && ok;
            }
            json j = {{"kind", "run"},
                      {"method", m.value("method", "")},
                      {"ablation", m.value("ablation", "")},
                      {"config_hash", m.value("config_hash", "")},
                      {"counts", m.value("counts", json::object())},
                      {"artifacts_intact", intact},
                      {"artifacts", verified}};
            if (fs::exists(path / "grafted.jsonl") && fs::exists(path / "selected.jsonl"))
                j["revalidation"] = revalidate_grafted(path);
            return j;
        }
        throw DataError(path.string() + " is neither a run directory nor a dataset bundle");
    }

    const auto name = path.filename().string();
    if (name == "manifest.json") return {{"kind", "manifest"}, {"manifest", read_json(path)}};
    const auto records = read_jsonl(path);
    if (name == "scores.jsonl") {
        std::size_t scored = 0, skipped = 0, words = 0;
        double sum = 0;
        for (const auto& r : records) {
            if (r.contains("skipped")) {
                ++skipped;
                continue;
            }
            ++scored;
            for (const auto& v : r.at("delta_p")) {
                sum += v.get<double>();
                ++words;
            }
        }
        return {{"kind", "scores"},
                {"documents", scored},
                {"skipped", skipped},
                {"words", words},
                {"mean_delta_p", words ? sum / static_cast<double>(words) : 0.0}};
    }
    if (name == "templates.jsonl" || name == "selected.jsonl") {
        json j = summarize_templates(records);
        j["kind"] = name.substr(0, name.find('.'));
        return j;
    }
    if (name == "grafted.jsonl" || name == "positives.jsonl" || name == "negatives.jsonl") {
        std::map<std::string, std::size_t> methods;
        int max_attempts = 0;
        for (const auto& r : records) {
            const auto g = grafted_from_json(r);
            ++methods[g.method];
            max_attempts = std::max(max_attempts, g.attempts);
        }
        json j = {{"kind", name.substr(0, name.find('.'))},
                  {"count", records.size()},
                  {"by_method", methods},
                  {"max_attempts", max_attempts}};
        const auto dir = path.parent_path();
        if (name == "grafted.jsonl" && fs::exists(dir / "selected.jsonl") && fs::exists(dir / "manifest.json"))
            j["revalidation"] = revalidate_grafted(dir);
        return j;
    }
    if (name == "mined.jsonl") {
        json j = {{"kind", "mined"}, {"count", records.size()}};
        if (!records.empty()) {
            j["score_max"] = records.front().at("score");
            j["score_min"] = records.back().at("score");
        }
        return j;
    }
    if (name == "train.jsonl" || name == "validation.jsonl") {
        json j = summarize_examples(records);
        j["kind"] = name.substr(0, name.find('.'));
        return j;
    }
    return {{"kind", "jsonl"}, {"count", records.size()}};
}

}  // namespace graftkit
