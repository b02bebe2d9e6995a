#include "spikefed/experiment/config.hpp"

#include "spikefed/common/rng.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace spikefed::experiment {

using nlohmann::json;

namespace {

std::string_view reset_name(models::ResetMode m) { return m == models::ResetMode::Subtract ? "subtract" : "zero"; }

models::ResetMode parse_reset(const std::string& s) {
    if (s == "subtract") return models::ResetMode::Subtract;
    if (s == "zero") return models::ResetMode::Zero;
    throw ValidationError("model.lif.reset must be 'subtract' or 'zero', got '" + s + "'");
}

/// Reads known keys of one JSON object and rejects the rest.
class Section {
public:
    Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ValidationError(where("") + " must be an object");
    }
    ~Section() noexcept(false) {
        if (std::uncaught_exceptions()) return;
        for (const auto& [k, v] : obj_.items())
            if (!seen_.contains(k)) throw ValidationError("unknown config key '" + where(k) + "'");
    }

    template <class T>
    void get(const std::string& key, T& out) {
        seen_.insert(key);
        if (!obj_.contains(key)) return;
        try {
            out = obj_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ValidationError("config key '" + where(key) + "' has the wrong type");
        }
    }
    void get_size(const std::string& key, std::size_t& out) {
        seen_.insert(key);
        if (!obj_.contains(key)) return;
        const auto& v = obj_.at(key);
        if (!v.is_number_unsigned()) throw ValidationError("config key '" + where(key) + "' must be a non-negative integer");
        out = v.get<std::size_t>();
    }
    Section sub(const std::string& key) {
        seen_.insert(key);
        static const json empty = json::object();
        return Section(obj_.contains(key) ? obj_.at(key) : empty, where(key));
    }
    bool has(const std::string& key) const { return obj_.contains(key); }

private:
    std::string where(const std::string& key) const {
        if (path_.empty()) return key;
        return key.empty() ? path_ : path_ + "." + key;
    }
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

json to_json(const ExperimentConfig& c) {
    const auto& a = c.arch;
    const auto& s = c.dataset.synthetic_spec;
    json j;
    if (c.seed) j["seed"] = *c.seed;
    j["output"] = c.output;
    j["dataset"] = {
        {"path", c.dataset.path},
        {"subjects", c.dataset.subjects},
        {"runs", c.dataset.runs},
        {"window", c.dataset.window},
        {"split_ratio", c.dataset.split_ratio},
        {"synthetic", c.dataset.synthetic},
        {"synthetic_data",
         {{"cues_per_run", s.cues_per_run},
          {"sampling_rate", s.sampling_rate},
          {"rest_seconds", s.rest_seconds},
          {"cue_seconds", s.cue_seconds},
          {"background_uv", s.background_uv},
          {"class_uv", s.class_uv},
          {"evoked_uv", s.evoked_uv}}},
    };
    j["encoder"] = {{"scheme", std::string(encoding::to_string(c.encoder.scheme))},
                    {"steps", c.encoder.steps},
                    {"delta_threshold", c.encoder.delta_threshold}};
    j["model"] = {
        {"kind", std::string(models::to_string(c.model))},
        {"architecture",
         {{"channels", a.channels},
          {"classes", a.classes},
          {"conv1_channels", a.conv1_channels},
          {"conv1_kernel", a.conv1_kernel},
          {"conv1_stride", a.conv1_stride},
          {"conv2_channels", a.conv2_channels},
          {"conv2_kernel", a.conv2_kernel},
          {"conv2_stride", a.conv2_stride},
          {"hidden", a.hidden},
          {"lstm_hidden", a.lstm_hidden},
          {"lstm_layers", a.lstm_layers},
          {"init_gain", a.init_gain}}},
        {"lif",
         {{"beta", c.lif.beta},
          {"threshold", c.lif.threshold},
          {"reset", std::string(reset_name(c.lif.reset))},
          {"slope", c.lif.slope}}},
    };
    j["federated"] = {{"rounds", c.rounds},
                      {"lr", c.training.lr},
                      {"batch", c.training.batch},
                      {"local_epochs", c.training.local_epochs},
                      {"microbatch", c.training.microbatch}};
    j["energy"] = {{"e_mac", c.energy.e_mac}, {"e_ac", c.energy.e_ac}};
    return j;
}

ExperimentConfig from_json(const json& j) {
    ExperimentConfig c;
    Section root(j, "");
    if (root.has("seed")) {
        if (!j.at("seed").is_number_unsigned()) throw ValidationError("seed must be a non-negative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    std::uint64_t ignored = 0;
    root.get("seed", ignored);
    root.get("output", c.output);
    {
        auto d = root.sub("dataset");
        d.get("path", c.dataset.path);
        d.get("subjects", c.dataset.subjects);
        d.get("runs", c.dataset.runs);
        d.get_size("window", c.dataset.window);
        d.get("split_ratio", c.dataset.split_ratio);
        d.get("synthetic", c.dataset.synthetic);
        auto s = d.sub("synthetic_data");
        auto& ss = c.dataset.synthetic_spec;
        s.get_size("cues_per_run", ss.cues_per_run);
        s.get("sampling_rate", ss.sampling_rate);
        s.get("rest_seconds", ss.rest_seconds);
        s.get("cue_seconds", ss.cue_seconds);
        s.get("background_uv", ss.background_uv);
        s.get("class_uv", ss.class_uv);
        s.get("evoked_uv", ss.evoked_uv);
    }
    {
        auto e = root.sub("encoder");
        std::string scheme(encoding::to_string(c.encoder.scheme));
        e.get("scheme", scheme);
        c.encoder.scheme = encoding::parse_scheme(scheme);
        e.get_size("steps", c.encoder.steps);
        e.get("delta_threshold", c.encoder.delta_threshold);
    }
    {
        auto m = root.sub("model");
        std::string kind(models::to_string(c.model));
        m.get("kind", kind);
        c.model = models::parse_model_kind(kind);
        auto a = m.sub("architecture");
        auto& ar = c.arch;
        a.get_size("channels", ar.channels);
        a.get_size("classes", ar.classes);
        a.get_size("conv1_channels", ar.conv1_channels);
        a.get_size("conv1_kernel", ar.conv1_kernel);
        a.get_size("conv1_stride", ar.conv1_stride);
        a.get_size("conv2_channels", ar.conv2_channels);
        a.get_size("conv2_kernel", ar.conv2_kernel);
        a.get_size("conv2_stride", ar.conv2_stride);
        a.get_size("hidden", ar.hidden);
        a.get_size("lstm_hidden", ar.lstm_hidden);
        a.get_size("lstm_layers", ar.lstm_layers);
        a.get("init_gain", ar.init_gain);
        auto l = m.sub("lif");
        l.get("beta", c.lif.beta);
        l.get("threshold", c.lif.threshold);
        std::string reset(reset_name(c.lif.reset));
        l.get("reset", reset);
        c.lif.reset = parse_reset(reset);
        l.get("slope", c.lif.slope);
    }
    {
        auto f = root.sub("federated");
        f.get_size("rounds", c.rounds);
        f.get("lr", c.training.lr);
        f.get_size("batch", c.training.batch);
        f.get_size("local_epochs", c.training.local_epochs);
        f.get_size("microbatch", c.training.microbatch);
    }
    {
        auto e = root.sub("energy");
        e.get("e_mac", c.energy.e_mac);
        e.get("e_ac", c.energy.e_ac);
    }
    c.arch.window = c.dataset.window;
    return c;
}

// "a.b.c=value": the value is parsed as JSON when it is valid JSON, otherwise
// taken as a string, so `--set model.kind=cnn` needs no quoting.
void apply_override(json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("override '" + assignment + "' is not key=value");
    const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    json* node = &j;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ValidationError("override key '" + key + "' has an empty component");
        if (!node->is_object()) throw ValidationError("override key '" + key + "' descends into a non-object");
        if (dot == std::string::npos) {
            (*node)[part] = std::move(value);
            return;
        }
        node = &(*node)[part];
        if (node->is_null()) *node = json::object();
        start = dot + 1;
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    if (!seed) throw ValidationError("config: 'seed' is mandatory");
    if (rounds == 0) throw ValidationError("federated.rounds must be at least 1");
    if (dataset.subjects.empty()) throw ValidationError("dataset.subjects must not be empty");
    if (dataset.runs.empty()) throw ValidationError("dataset.runs must not be empty");
    for (int r : dataset.runs)
        if (!data::imagery_run_kind(r))
            throw ValidationError("dataset.runs: run " + std::to_string(r) + " is not a motor-imagery run");
    std::set<std::string> uniq(dataset.subjects.begin(), dataset.subjects.end());
    if (uniq.size() != dataset.subjects.size()) throw ValidationError("dataset.subjects has duplicates");
    if (dataset.window == 0) throw ValidationError("dataset.window must be positive");
    if (!(dataset.split_ratio > 0.0 && dataset.split_ratio < 1.0))
        throw ValidationError("dataset.split_ratio must lie strictly between 0 and 1");
    if (dataset.synthetic) {
        const auto& s = dataset.synthetic_spec;
        if (s.cues_per_run < 2) throw ValidationError("dataset.synthetic_data.cues_per_run must be at least 2");
        if (!(s.sampling_rate > 0.0)) throw ValidationError("dataset.synthetic_data.sampling_rate must be positive");
        if (!(s.cue_seconds > 0.0) || !(s.rest_seconds >= 0.0))
            throw ValidationError("dataset.synthetic_data: cue/rest durations out of range");
    } else {
        if (dataset.path.empty())
            throw ValidationError(std::string("dataset.path is empty (set it, export ") + kDataRootEnv +
                                  ", or use synthetic mode)");
        if (!std::filesystem::is_directory(dataset.path))
            throw ValidationError("dataset.path '" + dataset.path + "' is not a directory");
    }
    if (output.empty()) throw ValidationError("output must not be empty");
    if (arch.window != dataset.window) throw ValidationError("architecture window differs from dataset.window");
    for (auto k : {models::ModelKind::Snn, models::ModelKind::Cnn, models::ModelKind::Lstm}) model_spec(k).validate();
    training.validate();
    energy.validate();
}

std::uint64_t ExperimentConfig::master_seed() const {
    if (!seed) throw ValidationError("config: 'seed' is mandatory");
    return *seed;
}

std::filesystem::path ExperimentConfig::data_root() const {
    if (dataset.synthetic) return output_dir() / "synthetic-edf";
    return dataset.path;
}

models::ModelSpec ExperimentConfig::model_spec(models::ModelKind kind) const {
    models::ModelSpec s;
    s.kind = kind;
    s.arch = arch;
    s.arch.window = dataset.window;
    s.lif = lif;
    s.encoder = encoder;
    s.encoder.seed = seed ? encoder_seed(*this) : 0;
    return s;
}

data::SyntheticSpec ExperimentConfig::synthetic_spec() const {
    auto s = dataset.synthetic_spec;
    s.subjects = dataset.subjects;
    s.runs = dataset.runs;
    s.seed = synthetic_seed(*this);
    return s;
}

std::uint64_t split_seed(const ExperimentConfig& cfg) { return derive_seed(cfg.master_seed(), "split"); }
std::uint64_t shuffle_seed(const ExperimentConfig& cfg) { return derive_seed(cfg.master_seed(), "shuffle"); }
std::uint64_t init_seed(const ExperimentConfig& cfg, models::ModelKind kind) {
    return derive_seed(cfg.master_seed(), "init", {static_cast<std::uint64_t>(kind)});
}
std::uint64_t encoder_seed(const ExperimentConfig& cfg) { return derive_seed(cfg.master_seed(), "encoder"); }
std::uint64_t synthetic_seed(const ExperimentConfig& cfg) { return derive_seed(cfg.master_seed(), "synthetic"); }

ExperimentConfig parse_config(std::string_view json_text, const std::vector<std::string>& overrides) {
    json j = json::parse(json_text, nullptr, false);
    if (j.is_discarded()) throw ValidationError("config is not valid JSON");
    if (!j.is_object()) throw ValidationError("config must be a JSON object");
    for (const auto& o : overrides) apply_override(j, o);
    return from_json(j);
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str(), overrides);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void apply_environment(ExperimentConfig& cfg) {
    if (const char* root = std::getenv(kDataRootEnv); root && *root) cfg.dataset.path = root;
}

std::string to_json_text(const ExperimentConfig& cfg) { return to_json(cfg).dump(2); }
std::string to_json_line(const ExperimentConfig& cfg) { return to_json(cfg).dump(); }

ExperimentConfig default_config(std::uint64_t seed) {
    ExperimentConfig c;
    c.seed = seed;
    return c;
}

}  // namespace spikefed::experiment
