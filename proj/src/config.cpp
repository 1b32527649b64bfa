#include "graftkit/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "graftkit/hash.hpp"
#include "graftkit/openai_backend.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace graftkit {

std::string_view to_string(Method m) {
    switch (m) {
    case Method::graft: return "graft";
    case Method::zerogen: return "zerogen";
    case Method::icg: return "icg";
    case Method::prompt_mine: return "prompt-mine";
    case Method::dcpmi_mine: return "dcpmi-mine";
    }
    return "unknown";
}

std::string_view to_string(Ablation a) {
    switch (a) {
    case Ablation::none: return "none";
    case Ablation::no_mining: return "no-mining";
    case Ablation::random_masking: return "random-masking";
    case Ablation::mf_icg: return "mf-icg";
    }
    return "unknown";
}

json Seeds::to_json() const {
    return {{"sample", sample},         {"masking", masking},     {"selection", selection},
            {"generation", generation}, {"negatives", negatives}, {"split", split}};
}

NegativeStrategy RunConfig::effective_negative_strategy() const {
    if (negative_strategy) return *negative_strategy;
    return (method == Method::zerogen || method == Method::icg) ? NegativeStrategy::synthesized
                                                                : NegativeStrategy::raw_sample;
}

std::string RunConfig::hash() const { return sha256_hex(effective.dump()); }

namespace {

// Typed field access that records "<path>: <problem>" instead of throwing.
class Reader {
public:
    explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

    void error(const std::string& path, const std::string& msg) { errors_.push_back(path + ": " + msg); }

    const json* object(const json& parent, const std::string& key, const std::string& path) {
        if (!parent.contains(key) || parent[key].is_null()) return nullptr;
        const auto& v = parent[key];
        if (!v.is_object()) {
            error(path, "must be an object");
            return nullptr;
        }
        return &v;
    }

    std::optional<std::string> str(const json* obj, const std::string& key, const std::string& path) {
        if (!obj || !obj->contains(key) || (*obj)[key].is_null()) return std::nullopt;
        if (!(*obj)[key].is_string()) {
            error(path, "must be a string");
            return std::nullopt;
        }
        return (*obj)[key].get<std::string>();
    }

    std::optional<double> num(const json* obj, const std::string& key, const std::string& path) {
        if (!obj || !obj->contains(key) || (*obj)[key].is_null()) return std::nullopt;
        if (!(*obj)[key].is_number()) {
            error(path, "must be a number");
            return std::nullopt;
        }
        return (*obj)[key].get<double>();
    }

    std::optional<std::uint64_t> uint(const json* obj, const std::string& key, const std::string& path) {
        if (!obj || !obj->contains(key) || (*obj)[key].is_null()) return std::nullopt;
        const auto& v = (*obj)[key];
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
            error(path, "must be a non-negative integer");
            return std::nullopt;
        }
        return v.get<std::uint64_t>();
    }

    std::optional<bool> boolean(const json* obj, const std::string& key, const std::string& path) {
        if (!obj || !obj->contains(key) || (*obj)[key].is_null()) return std::nullopt;
        if (!(*obj)[key].is_boolean()) {
            error(path, "must be true or false");
            return std::nullopt;
        }
        return (*obj)[key].get<bool>();
    }

    void unknown_keys(const json* obj, const std::set<std::string>& allowed, const std::string& prefix) {
        if (!obj) return;
        for (const auto& [k, v] : obj->items())
            if (!allowed.count(k)) error(prefix.empty() ? k : prefix + "." + k, "unknown field");
    }

private:
    std::vector<std::string>& errors_;
};

std::optional<BackendConfig> parse_backend(Reader& r, const json& root, const std::string& key) {
    const json* b = r.object(root, key, key);
    if (!b) return std::nullopt;
    BackendConfig cfg;
    const auto kind = r.str(b, "kind", key + ".kind");
    if (!kind) {
        r.error(key + ".kind", "required (mock or openai)");
        return std::nullopt;
    }
    cfg.kind = *kind;
    if (cfg.kind == "mock") {
        r.unknown_keys(b, {"kind", "seed", "shift", "affinity", "parallelism", "fill_word", "constant"}, key);
        const auto seed = r.uint(b, "seed", key + ".seed").value_or(0);
        const auto par = static_cast<int>(r.uint(b, "parallelism", key + ".parallelism").value_or(0));
        cfg.mock_scorer.seed = seed;
        cfg.mock_scorer.shift = r.num(b, "shift", key + ".shift").value_or(0.0);
        cfg.mock_scorer.parallelism = par;
        cfg.mock_generator.seed = seed;
        cfg.mock_generator.parallelism = par;
        cfg.mock_generator.fill_word = r.str(b, "fill_word", key + ".fill_word");
        cfg.mock_generator.constant = r.str(b, "constant", key + ".constant");
        if (b->contains("affinity")) {
            const auto& arr = (*b)["affinity"];
            if (!arr.is_array()) {
                r.error(key + ".affinity", "must be an array");
            } else {
                for (std::size_t i = 0; i < arr.size(); ++i) {
                    const std::string p = key + ".affinity[" + std::to_string(i) + "]";
                    if (!arr[i].is_object()) {
                        r.error(p, "must be an object");
                        continue;
                    }
                    MockAffinity a;
                    a.cue = r.str(&arr[i], "cue", p + ".cue").value_or("");
                    a.bonus = r.num(&arr[i], "bonus", p + ".bonus").value_or(4.0);
                    if (a.cue.empty()) r.error(p + ".cue", "required");
                    if (arr[i].contains("words") && arr[i]["words"].is_array()) {
                        for (const auto& w : arr[i]["words"])
                            if (w.is_string()) a.words.push_back(w.get<std::string>());
                            else r.error(p + ".words", "must be strings");
                    } else {
                        r.error(p + ".words", "required array of strings");
                    }
                    cfg.mock_scorer.affinities.push_back(std::move(a));
                }
            }
        }
    } else if (cfg.kind == "openai") {
        r.unknown_keys(b,
                       {"kind", "base_url", "model", "api_key_env", "requests_per_second", "parallelism",
                        "timeout_seconds", "retry"},
                       key);
        cfg.http.base_url = r.str(b, "base_url", key + ".base_url").value_or("");
        cfg.http.model = r.str(b, "model", key + ".model").value_or("");
        cfg.api_key_env = r.str(b, "api_key_env", key + ".api_key_env").value_or("OPENAI_API_KEY");
        cfg.http.requests_per_second = r.num(b, "requests_per_second", key + ".requests_per_second").value_or(0.0);
        cfg.http.parallelism = static_cast<int>(r.uint(b, "parallelism", key + ".parallelism").value_or(4));
        cfg.http.timeout_seconds = static_cast<int>(r.uint(b, "timeout_seconds", key + ".timeout_seconds").value_or(120));
        if (cfg.http.base_url.empty()) r.error(key + ".base_url", "required for openai backends");
        else if (cfg.http.base_url.find("://") == std::string::npos) r.error(key + ".base_url", "must include a scheme");
        if (cfg.http.model.empty()) r.error(key + ".model", "required for openai backends");
        if (cfg.http.parallelism < 1) r.error(key + ".parallelism", "must be ≥ 1");
        if (const json* retry = r.object(*b, "retry", key + ".retry")) {
            r.unknown_keys(retry, {"max_attempts", "base_delay_ms", "max_delay_ms"}, key + ".retry");
            cfg.http.retry.max_attempts =
                static_cast<int>(r.uint(retry, "max_attempts", key + ".retry.max_attempts").value_or(5));
            cfg.http.retry.base_delay = std::chrono::milliseconds(
                r.uint(retry, "base_delay_ms", key + ".retry.base_delay_ms").value_or(500));
            cfg.http.retry.max_delay = std::chrono::milliseconds(
                r.uint(retry, "max_delay_ms", key + ".retry.max_delay_ms").value_or(8000));
            if (cfg.http.retry.max_attempts < 1) r.error(key + ".retry.max_attempts", "must be ≥ 1");
        }
    } else {
        r.error(key + ".kind", "must be mock or openai");
        return std::nullopt;
    }
    return cfg;
}

json backend_json(const BackendConfig& b) {
    if (b.kind == "mock") {
        json aff = json::array();
        for (const auto& a : b.mock_scorer.affinities) aff.push_back({{"cue", a.cue}, {"words", a.words}, {"bonus", a.bonus}});
        json j = {{"kind", "mock"}, {"seed", b.mock_scorer.seed}, {"shift", b.mock_scorer.shift}, {"affinity", aff}};
        if (b.mock_generator.fill_word) j["fill_word"] = *b.mock_generator.fill_word;
        if (b.mock_generator.constant) j["constant"] = *b.mock_generator.constant;
        return j;
    }
    return {{"kind", b.kind},
            {"base_url", b.http.base_url},
            {"model", b.http.model},
            {"api_key_env", b.api_key_env},
            {"requests_per_second", b.http.requests_per_second},
            {"retry",
             {{"max_attempts", b.http.retry.max_attempts},
              {"base_delay_ms", b.http.retry.base_delay.count()},
              {"max_delay_ms", b.http.retry.max_delay.count()}}}};
}

}  // namespace

json effective_json(const RunConfig& c) {
    json j;
    j["corpus"] = {{"path", c.corpus_path_text},
                   {"format", c.corpus_format == CorpusFormat::jsonl ? "jsonl" : "plain-lines"},
                   {"downsample", c.downsample ? json(*c.downsample) : json(nullptr)}};
    j["task"] = {{"class_name", c.task.class_name()},
                 {"style", c.task.style()},
                 {"k_percent", c.task.k_percent()},
                 {"n_percent", c.task.n_percent()},
                 {"mask_token", c.task.mask_token()},
                 {"mask_punctuation", c.task.mask_punctuation()},
                 {"template_count", c.template_count ? json(*c.template_count) : json(nullptr)}};
    j["method"] = to_string(c.method);
    j["ablation"] = to_string(c.ablation);
    j["scoring_backend"] = c.scoring_backend ? backend_json(*c.scoring_backend) : json(nullptr);
    j["generation_backend"] = c.generation_backend ? backend_json(*c.generation_backend) : json(nullptr);
    j["seeds"] = c.seeds.to_json();
    j["synthesis"] = {{"max_attempts", c.fill.max_attempts},
                      {"max_tokens", c.fill.max_tokens},
                      {"temperature", c.fill.temperature},
                      {"min_length_ratio", c.fill.rules.min_length_ratio},
                      {"max_length_ratio", c.fill.rules.max_length_ratio}};
    j["baselines"] = {{"mining_rate_percent", c.mining_rate_percent},
                      {"count", c.synthesis_count},
                      {"examples_per_prompt", c.examples_per_prompt}};
    j["dataset"] = {{"negative_strategy", to_string(c.effective_negative_strategy())},
                    {"ratio", c.negative_ratio},
                    {"validation_fraction", c.validation_fraction}};
    j["sweep"] = {{"k_percent", c.sweep_k_percent}, {"template_count", c.sweep_template_count}};
    return j;
}

ConfigResult parse_run_config(const json& j, const fs::path& base_dir) {
    ConfigResult result;
    auto& errors = result.errors;
    Reader r(errors);
    if (!j.is_object()) {
        errors.push_back("config: must be a JSON object");
        return result;
    }
    r.unknown_keys(&j,
                   {"corpus", "task", "method", "ablation", "scoring_backend", "generation_backend", "seeds",
                    "synthesis", "baselines", "dataset", "sweep", "output_dir", "cache_dir"},
                   "");

    RunConfig c;

    // corpus
    const json* corpus = r.object(j, "corpus", "corpus");
    if (!corpus) {
        errors.push_back("corpus: required");
    } else {
        r.unknown_keys(corpus, {"path", "format", "downsample"}, "corpus");
        c.corpus_path_text = r.str(corpus, "path", "corpus.path").value_or("");
        if (c.corpus_path_text.empty()) {
            errors.push_back("corpus.path: required");
        } else {
            c.corpus_path = fs::path(c.corpus_path_text).is_absolute() ? fs::path(c.corpus_path_text)
                                                                       : base_dir / c.corpus_path_text;
            if (!fs::exists(c.corpus_path)) errors.push_back("corpus.path: file not found: " + c.corpus_path.string());
        }
        try {
            c.corpus_format = parse_corpus_format(r.str(corpus, "format", "corpus.format").value_or("jsonl"));
        } catch (const ConfigError& e) {
            errors.push_back(std::string("corpus.format: ") + e.what());
        }
        if (auto n = r.uint(corpus, "downsample", "corpus.downsample")) {
            if (*n < 1) errors.push_back("corpus.downsample: n must be ≥ 1");
            c.downsample = *n;
        }
    }

    // task
    const json* task = r.object(j, "task", "task");
    if (!task) {
        errors.push_back("task: required");
    } else {
        r.unknown_keys(task,
                       {"class_name", "style", "k_percent", "n_percent", "mask_token", "mask_punctuation",
                        "template_count"},
                       "task");
        const auto cls = r.str(task, "class_name", "task.class_name").value_or("");
        const auto style = r.str(task, "style", "task.style").value_or("");
        const auto k = r.num(task, "k_percent", "task.k_percent").value_or(25.0);
        const auto n = r.num(task, "n_percent", "task.n_percent").value_or(10.0);
        const auto mask = r.str(task, "mask_token", "task.mask_token").value_or("_");
        const auto mp = r.boolean(task, "mask_punctuation", "task.mask_punctuation").value_or(true);
        bool ok = true;
        if (cls.empty()) errors.push_back("task.class_name: required"), ok = false;
        if (style.empty()) errors.push_back("task.style: required"), ok = false;
        if (!(k > 0 && k <= 100)) errors.push_back("task.k_percent: k_percent must be in (0,100]"), ok = false;
        if (!(n > 0 && n <= 100)) errors.push_back("task.n_percent: n_percent must be in (0,100]"), ok = false;
        if (ok) {
            try {
                c.task = TaskSpec(cls, style, k, n, mask, mp);
            } catch (const ConfigError& e) {
                errors.push_back(std::string("task: ") + e.what());
            }
        }
        if (auto tc = r.uint(task, "template_count", "task.template_count")) {
            if (*tc < 1) errors.push_back("task.template_count: must be ≥ 1");
            c.template_count = *tc;
        }
    }

    // method
    const auto method = j.contains("method") && j["method"].is_string() ? j["method"].get<std::string>() : "";
    if (method == "graft") c.method = Method::graft;
    else if (method == "zerogen") c.method = Method::zerogen;
    else if (method == "icg") c.method = Method::icg;
    else if (method == "prompt-mine") c.method = Method::prompt_mine;
    else if (method == "dcpmi-mine") c.method = Method::dcpmi_mine;
    else errors.push_back("method: must be one of graft, zerogen, icg, prompt-mine, dcpmi-mine");

    const auto ablation = r.str(&j, "ablation", "ablation").value_or("none");
    if (ablation == "none") c.ablation = Ablation::none;
    else if (ablation == "no-mining") c.ablation = Ablation::no_mining;
    else if (ablation == "random-masking") c.ablation = Ablation::random_masking;
    else if (ablation == "mf-icg") c.ablation = Ablation::mf_icg;
    else errors.push_back("ablation: must be one of none, no-mining, random-masking, mf-icg");
    if (c.ablation != Ablation::none && c.method != Method::graft)
        errors.push_back("ablation: ablations apply only to method graft");

    c.scoring_backend = parse_backend(r, j, "scoring_backend");
    c.generation_backend = parse_backend(r, j, "generation_backend");

    // seeds
    if (const json* s = r.object(j, "seeds", "seeds")) {
        r.unknown_keys(s, {"sample", "masking", "selection", "generation", "negatives", "split"}, "seeds");
        c.seeds.sample = r.uint(s, "sample", "seeds.sample").value_or(0);
        c.seeds.masking = r.uint(s, "masking", "seeds.masking").value_or(0);
        c.seeds.selection = r.uint(s, "selection", "seeds.selection").value_or(0);
        c.seeds.generation = r.uint(s, "generation", "seeds.generation").value_or(0);
        c.seeds.negatives = r.uint(s, "negatives", "seeds.negatives").value_or(0);
        c.seeds.split = r.uint(s, "split", "seeds.split").value_or(0);
    }
    c.fill.seed = c.seeds.generation;

    if (const json* s = r.object(j, "synthesis", "synthesis")) {
        r.unknown_keys(s, {"max_attempts", "max_tokens", "temperature", "min_length_ratio", "max_length_ratio"},
                       "synthesis");
        c.fill.max_attempts = static_cast<int>(r.uint(s, "max_attempts", "synthesis.max_attempts").value_or(3));
        c.fill.max_tokens = static_cast<int>(r.uint(s, "max_tokens", "synthesis.max_tokens").value_or(256));
        c.fill.temperature = r.num(s, "temperature", "synthesis.temperature").value_or(1.0);
        c.fill.rules.min_length_ratio = r.num(s, "min_length_ratio", "synthesis.min_length_ratio").value_or(0.5);
        c.fill.rules.max_length_ratio = r.num(s, "max_length_ratio", "synthesis.max_length_ratio").value_or(2.0);
        if (c.fill.max_attempts < 1) errors.push_back("synthesis.max_attempts: must be ≥ 1");
        if (c.fill.max_tokens < 1) errors.push_back("synthesis.max_tokens: must be ≥ 1");
        if (c.fill.temperature < 0) errors.push_back("synthesis.temperature: must be ≥ 0");
        if (!(c.fill.rules.min_length_ratio > 0 && c.fill.rules.min_length_ratio <= c.fill.rules.max_length_ratio))
            errors.push_back("synthesis.min_length_ratio: must be > 0 and ≤ max_length_ratio");
    }

    if (const json* b = r.object(j, "baselines", "baselines")) {
        r.unknown_keys(b, {"mining_rate_percent", "count", "examples_per_prompt"}, "baselines");
        c.mining_rate_percent = r.num(b, "mining_rate_percent", "baselines.mining_rate_percent").value_or(1.0);
        c.synthesis_count = r.uint(b, "count", "baselines.count").value_or(1000);
        c.examples_per_prompt = r.uint(b, "examples_per_prompt", "baselines.examples_per_prompt").value_or(3);
        if (!(c.mining_rate_percent > 0 && c.mining_rate_percent <= 100))
            errors.push_back("baselines.mining_rate_percent: must be in (0,100]");
        if (c.synthesis_count < 1) errors.push_back("baselines.count: count must be ≥ 1");
        if (c.examples_per_prompt < 1) errors.push_back("baselines.examples_per_prompt: must be ≥ 1");
    }

    if (const json* d = r.object(j, "dataset", "dataset")) {
        r.unknown_keys(d, {"negative_strategy", "ratio", "validation_fraction"}, "dataset");
        if (auto s = r.str(d, "negative_strategy", "dataset.negative_strategy"); s && *s != "auto") {
            try {
                c.negative_strategy = parse_negative_strategy(*s);
            } catch (const ConfigError& e) {
                errors.push_back(std::string("dataset.negative_strategy: ") + e.what());
            }
        }
        c.negative_ratio = r.num(d, "ratio", "dataset.ratio").value_or(1.0);
        c.validation_fraction = r.num(d, "validation_fraction", "dataset.validation_fraction").value_or(0.2);
        if (!(c.negative_ratio > 0)) errors.push_back("dataset.ratio: must be > 0");
        if (!(c.validation_fraction > 0 && c.validation_fraction < 1))
            errors.push_back("dataset.validation_fraction: must be in (0,1)");
    }

    if (const json* s = r.object(j, "sweep", "sweep")) {
        r.unknown_keys(s, {"k_percent", "mask_ratio", "template_count"}, "sweep");
        if (s->contains("k_percent")) {
            const auto& a = (*s)["k_percent"];
            if (!a.is_array()) errors.push_back("sweep.k_percent: must be an array");
            else
                for (const auto& v : a) {
                    if (!v.is_number() || !(v.get<double>() > 0 && v.get<double>() <= 100))
                        errors.push_back("sweep.k_percent: k_percent must be in (0,100]");
                    else c.sweep_k_percent.push_back(v.get<double>());
                }
        }
        // Mask ratio r keeps 100(1 - r)% of the words.
        if (s->contains("mask_ratio")) {
            const auto& a = (*s)["mask_ratio"];
            if (!a.is_array()) errors.push_back("sweep.mask_ratio: must be an array");
            else
                for (const auto& v : a) {
                    if (!v.is_number() || !(v.get<double>() >= 0 && v.get<double>() < 1))
                        errors.push_back("sweep.mask_ratio: must be in [0,1)");
                    else c.sweep_k_percent.push_back(100.0 * (1.0 - v.get<double>()));
                }
        }
        if (s->contains("template_count")) {
            const auto& a = (*s)["template_count"];
            if (!a.is_array()) errors.push_back("sweep.template_count: must be an array");
            else
                for (const auto& v : a) {
                    if (!v.is_number_unsigned() || v.get<std::size_t>() < 1)
                        errors.push_back("sweep.template_count: entries must be integers ≥ 1");
                    else c.sweep_template_count.push_back(v.get<std::size_t>());
                }
        }
    }

    // Method-specific requirements.
    const bool needs_scoring = c.method == Method::graft || c.method == Method::prompt_mine ||
                               c.method == Method::dcpmi_mine;
    const bool needs_generation = c.method == Method::graft || c.method == Method::zerogen ||
                                  c.method == Method::icg ||
                                  c.effective_negative_strategy() == NegativeStrategy::synthesized;
    if (needs_scoring && !c.scoring_backend && (!j.contains("scoring_backend") || j["scoring_backend"].is_null()))
        errors.push_back("scoring_backend: required for method " + std::string(to_string(c.method)));
    if (needs_generation && !c.generation_backend && (!j.contains("generation_backend") || j["generation_backend"].is_null()))
        errors.push_back("generation_backend: required for method " + std::string(to_string(c.method)) +
                         (c.method == Method::graft || c.method == Method::zerogen || c.method == Method::icg
                              ? ""
                              : " with synthesized negatives"));

    const auto out = r.str(&j, "output_dir", "output_dir");
    if (!out) errors.push_back("output_dir: required");
    else c.output_dir = fs::path(*out).is_absolute() ? fs::path(*out) : base_dir / *out;
    if (auto cache = r.str(&j, "cache_dir", "cache_dir"))
        c.cache_dir = fs::path(*cache).is_absolute() ? fs::path(*cache) : base_dir / *cache;
    else c.cache_dir = c.output_dir / "cache";

    if (errors.empty()) {
        c.effective = effective_json(c);
        result.config = std::move(c);
    }
    return result;
}

void apply_override(json& j, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0)
        throw ConfigError("override '" + std::string(assignment) + "' must look like path.to.field=value");
    const std::string path(assignment.substr(0, eq));
    const std::string raw(assignment.substr(eq + 1));
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;
    }
    std::string pointer;
    std::size_t pos = 0;
    while (pos <= path.size()) {
        auto dot = path.find('.', pos);
        if (dot == std::string::npos) dot = path.size();
        pointer += "/" + path.substr(pos, dot - pos);
        pos = dot + 1;
    }
    j[json::json_pointer(pointer)] = value;
}

ConfigResult load_run_config(const fs::path& path, const std::vector<std::string>& overrides) {
    ConfigResult result;
    std::ifstream in(path);
    if (!in) {
        result.errors.push_back("config: cannot open " + path.string());
        return result;
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        result.errors.push_back(std::string("config: invalid JSON: ") + e.what());
        return result;
    }
    try {
        for (const auto& o : overrides) apply_override(j, o);
    } catch (const std::exception& e) {
        result.errors.push_back(std::string("override: ") + e.what());
        return result;
    }
    return parse_run_config(j, fs::absolute(path).parent_path());
}

RunConfig load_run_config_or_throw(const fs::path& path, const std::vector<std::string>& overrides) {
    auto r = load_run_config(path, overrides);
    if (!r.config) {
        std::string msg = "invalid config " + path.string() + ":";
        for (const auto& e : r.errors) msg += "\n  " + e;
        throw ConfigError(msg);
    }
    return *std::move(r.config);
}

namespace {

HttpBackendConfig with_key(const BackendConfig& cfg) {
    HttpBackendConfig http = cfg.http;
    if (const char* key = std::getenv(cfg.api_key_env.c_str())) http.api_key = key;
    return http;
}

}  // namespace

std::shared_ptr<ScoringBackend> make_scoring_backend(const BackendConfig& cfg, std::shared_ptr<ScoringCache> cache) {
    std::shared_ptr<ScoringBackend> inner;
    if (cfg.kind == "mock") inner = std::make_shared<MockScoringBackend>(cfg.mock_scorer);
    else if (cfg.kind == "openai") inner = std::make_shared<OpenAIScoringBackend>(with_key(cfg));
    else throw ConfigError("unknown backend kind " + cfg.kind);
    if (!cache) return inner;
    return std::make_shared<CachedScoringBackend>(std::move(inner), std::move(cache));
}

std::shared_ptr<GenerationBackend> make_generation_backend(const BackendConfig& cfg) {
    if (cfg.kind == "mock") return std::make_shared<MockGenerationBackend>(cfg.mock_generator);
    if (cfg.kind == "openai") return std::make_shared<OpenAIChatBackend>(with_key(cfg));
    throw ConfigError("unknown backend kind " + cfg.kind);
}

}  // namespace graftkit
