#include "spikefed/experiment/pipeline.hpp"

#include "spikefed/common/hash.hpp"
#include "spikefed/data/dataset.hpp"
#include "spikefed/numerics/checkpoint.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#ifndef SPIKEFED_VERSION
#define SPIKEFED_VERSION "0.0.0"
#endif

namespace spikefed::experiment {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kCacheMagic = "SPFCACHE";
constexpr std::uint64_t kCacheVersion = 1;
constexpr models::ModelKind kAllKinds[] = {models::ModelKind::Snn, models::ModelKind::Cnn, models::ModelKind::Lstm};

void say(const Logger& log, const std::string& line) {
    if (log) log(line);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), f, args...);
    return buf;
}

std::string run_file_name(const std::string& subject, int run) { return fmt("%sR%02d.edf", subject.c_str(), run); }

// Little-endian binary encoding of the cache.
class Writer {
public:
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void str(std::string_view s) {
        u64(s.size());
        buf_.append(s);
    }
    void raw(std::string_view s) { buf_.append(s); }
    std::string& buffer() { return buf_; }

private:
    std::string buf_;
};

class Reader {
public:
    Reader(std::string_view bytes, std::string source) : bytes_(bytes), source_(std::move(source)) {}
    std::uint64_t u64() {
        need(8, "integer");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        const auto n = u64();
        need(n, "string");
        std::string s(bytes_.substr(pos_, n));
        pos_ += n;
        return s;
    }
    std::string_view raw(std::size_t n) {
        need(n, "bytes");
        auto s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    bool at_end() const { return pos_ == bytes_.size(); }

private:
    void need(std::uint64_t n, const char* what) {
        if (n > bytes_.size() - pos_)
            throw DataError(source_ + ": truncated cache while reading " + what + " (byte offset " +
                            std::to_string(pos_) + ")");
    }
    std::string_view bytes_;
    std::string source_;
    std::size_t pos_ = 0;
};

json ingest_key(const ExperimentConfig& cfg) {
    json k = {{"subjects", cfg.dataset.subjects},
              {"runs", cfg.dataset.runs},
              {"window", cfg.dataset.window},
              {"split_ratio", cfg.dataset.split_ratio},
              {"seed", cfg.master_seed()},
              {"synthetic", cfg.dataset.synthetic}};
    if (cfg.dataset.synthetic) k["synthetic_data"] = json::parse(to_json_line(cfg))["dataset"]["synthetic_data"];
    return k;
}

void write_examples(Writer& w, const std::vector<data::LabeledExample>& v) {
    w.u64(v.size());
    for (const auto& ex : v) {
        w.u64(static_cast<std::uint64_t>(ex.label));
        w.str(ex.subject);
        w.str(ex.trial_id);
        w.u64(ex.window.dim(0));
        w.u64(ex.window.dim(1));
        for (std::size_t i = 0; i < ex.window.size(); ++i) w.f64(ex.window[i]);
    }
}

std::vector<data::LabeledExample> read_examples(Reader& r) {
    const auto n = r.u64();
    std::vector<data::LabeledExample> v;
    for (std::uint64_t k = 0; k < n; ++k) {
        data::LabeledExample ex;
        ex.label = static_cast<int>(r.u64());
        if (ex.label < 0 || ex.label >= static_cast<int>(data::kClassCount)) throw DataError("cache: bad label");
        ex.subject = r.str();
        ex.trial_id = r.str();
        const auto c = r.u64(), l = r.u64();
        if (c == 0 || l == 0 || c > (1u << 16) || l > (1u << 24)) throw DataError("cache: bad window shape");
        ex.window = numerics::Tensor({c, l});
        for (std::size_t i = 0; i < ex.window.size(); ++i) ex.window[i] = r.f64();
        v.push_back(std::move(ex));
    }
    return v;
}

struct Cache {
    json header;
    data::DatasetSplit split;
    std::string digest;
};

Cache load_cache(const ExperimentConfig& cfg) {
    const auto path = cache_path(cfg);
    if (!fs::exists(path)) throw DataError("no ingest cache at '" + path.string() + "'; run 'ingest' first");
    const auto bytes = read_file(path);
    Reader r(bytes, path.string());
    if (r.raw(kCacheMagic.size()) != kCacheMagic) throw DataError(path.string() + ": not a spikefed cache");
    if (r.u64() != kCacheVersion) throw DataError(path.string() + ": unsupported cache version");
    Cache c;
    c.header = json::parse(r.str(), nullptr, false);
    if (c.header.is_discarded()) throw DataError(path.string() + ": corrupt cache header");
    if (c.header.value("key", json()) != ingest_key(cfg))
        throw ValidationError("cache '" + path.string() + "' was built from a different dataset configuration; rerun 'ingest'");
    const auto channels = r.u64();
    for (std::uint64_t i = 0; i < channels; ++i) c.split.stats.mean.push_back(r.f64());
    for (std::uint64_t i = 0; i < channels; ++i) c.split.stats.stddev.push_back(r.f64());
    c.split.seed = r.u64();
    c.split.train = read_examples(r);
    c.split.test = read_examples(r);
    if (!r.at_end()) throw DataError(path.string() + ": trailing bytes in cache");
    Fnv1a64 h;
    h.update(std::as_bytes(std::span(bytes.data(), bytes.size())));
    c.digest = hex64(h.digest());
    return c;
}

std::string tsv_header(const ExperimentConfig& cfg) { return "# config " + to_json_line(cfg) + "\n"; }

json layer_json(const energy::LayerOps& l) {
    return {{"name", l.name}, {"macs", l.macs}, {"synapses", l.synapses}, {"steps", l.steps}, {"rate", l.rate}, {"acs", l.acs()}};
}

json read_json(const fs::path& path) {
    if (!fs::exists(path)) throw DataError("missing file '" + path.string() + "'");
    auto j = json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) throw DataError("'" + path.string() + "' is not valid JSON");
    return j;
}

}  // namespace

std::string toolkit_version() { return SPIKEFED_VERSION; }

fs::path cache_path(const ExperimentConfig& cfg) { return cfg.output_dir() / "cache" / "dataset.bin"; }

fs::path method_dir(const ExperimentConfig& cfg, models::ModelKind kind) {
    return cfg.output_dir() / std::string(models::to_string(kind));
}

void write_file_atomic(const fs::path& path, std::string_view content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

IngestResult cmd_ingest(const ExperimentConfig& cfg, const Logger& log) {
    cfg.validate();
    const auto root = cfg.data_root();
    if (cfg.dataset.synthetic) {
        say(log, "ingest: writing synthetic EDF files to " + root.string());
        data::write_synthetic_dataset(cfg.synthetic_spec(), root);
    }

    IngestResult res;
    Fnv1a64 data_hash;
    std::vector<data::LabeledExample> all;
    std::size_t channels = 0;
    for (const auto& subject : cfg.dataset.subjects) {
        for (int run : cfg.dataset.runs) {
            const auto path = root / subject / run_file_name(subject, run);
            if (!fs::exists(path)) throw DataError("missing dataset file '" + path.string() + "'");
            const auto bytes = read_file(path);
            data_hash.update(path.filename().string());
            data_hash.update(std::as_bytes(std::span(bytes.data(), bytes.size())));
            data::EegRecording rec;
            try {
                rec = data::parse_edf(std::as_bytes(std::span(bytes.data(), bytes.size())), subject);
            } catch (const DataError& e) {
                throw DataError(path.string() + ": " + e.what());
            }
            if (channels == 0) channels = rec.channel_count();
            if (rec.channel_count() != channels)
                throw DataError(path.string() + ": " + std::to_string(rec.channel_count()) + " channels, expected " +
                                std::to_string(channels));
            data::TaskSpec task{*data::imagery_run_kind(run), cfg.dataset.window,
                                subject + fmt("R%02d", run)};
            data::TrialExtraction trials;
            try {
                trials = data::build_trials(rec, task);
            } catch (const DataError& e) {
                throw DataError(path.string() + ": " + e.what());
            }
            ++res.files;
            res.samples += rec.sample_count();
            for (auto& ex : trials.examples) all.push_back(std::move(ex));
        }
    }
    if (channels != cfg.arch.channels)
        throw ValidationError("recordings have " + std::to_string(channels) + " channels but model.architecture.channels is " +
                              std::to_string(cfg.arch.channels));
    res.data_digest = hex64(data_hash.digest());
    auto split = data::split_normalize(std::move(all), cfg.dataset.split_ratio, split_seed(cfg));

    for (const auto& s : cfg.dataset.subjects) {
        res.train_counts[s] = {};
        res.test_counts[s] = {};
    }
    for (const auto& ex : split.train) ++res.train_counts[ex.subject][static_cast<std::size_t>(ex.label)];
    for (const auto& ex : split.test) ++res.test_counts[ex.subject][static_cast<std::size_t>(ex.label)];

    Writer w;
    w.raw(kCacheMagic);
    w.u64(kCacheVersion);
    json header = {{"key", ingest_key(cfg)}, {"data_digest", res.data_digest}, {"toolkit_version", toolkit_version()}};
    w.str(header.dump());
    w.u64(split.stats.mean.size());
    for (double v : split.stats.mean) w.f64(v);
    for (double v : split.stats.stddev) w.f64(v);
    w.u64(split.seed);
    write_examples(w, split.train);
    write_examples(w, split.test);
    res.cache = cache_path(cfg);
    write_file_atomic(res.cache, w.buffer());
    Fnv1a64 ch;
    ch.update(std::as_bytes(std::span(w.buffer().data(), w.buffer().size())));
    res.cache_digest = hex64(ch.digest());

    std::ostringstream t;
    t << fmt("%-8s", "subject");
    for (std::size_t c = 0; c < data::kClassCount; ++c) t << fmt(" %12s", data::class_name(static_cast<int>(c)));
    t << "   (train/test)\n";
    json summary = {{"files", res.files},
                    {"channels", channels},
                    {"signal_samples", res.samples},
                    {"train_examples", split.train.size()},
                    {"test_examples", split.test.size()},
                    {"data_digest", res.data_digest},
                    {"cache_digest", res.cache_digest},
                    {"config", json::parse(to_json_line(cfg))}};
    for (const auto& s : cfg.dataset.subjects) {
        t << fmt("%-8s", s.c_str());
        json per;
        for (std::size_t c = 0; c < data::kClassCount; ++c) {
            const auto tr = res.train_counts[s][c], te = res.test_counts[s][c];
            t << fmt(" %12s", fmt("%zu/%zu", tr, te).c_str());
            per[data::class_name(static_cast<int>(c))] = {{"train", tr}, {"test", te}};
        }
        t << "\n";
        summary["subjects"][s] = per;
    }
    t << fmt("%zu files, %zu channels, %zu signal samples per channel, %zu train / %zu test examples\n", res.files,
             channels, res.samples, split.train.size(), split.test.size());
    t << "cache digest " << res.cache_digest << "\n";
    res.summary = t.str();
    write_file_atomic(cfg.output_dir() / "cache" / "summary.json", summary.dump(2) + "\n");
    return res;
}

TrainResult cmd_train(const ExperimentConfig& cfg, models::ModelKind kind, const Logger& log) {
    cfg.validate();
    auto cache = load_cache(cfg);
    const auto dir = method_dir(cfg, kind);
    fs::create_directories(dir);
    const std::string method(models::to_string(kind));
    const auto spec = cfg.model_spec(kind);

    json manifest = {{"method", method},
                     {"toolkit_version", toolkit_version()},
                     {"config", json::parse(to_json_line(cfg))},
                     {"dataset_digest", cache.header.value("data_digest", "")},
                     {"cache_digest", cache.digest},
                     {"status", "running"},
                     {"rounds_completed", 0},
                     {"files",
                      {{"metrics", "metrics.tsv"},
                       {"timings", "timings.tsv"},
                       {"checkpoint", "checkpoint.txt"},
                       {"evaluation", "evaluation.json"}}}};
    // Digests are on record before any training starts.
    write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");

    auto partition = federated::partition_by_subject(std::move(cache.split), shuffle_seed(cfg));
    const auto init = models::init_params(spec, init_seed(cfg, kind));
    say(log, fmt("[%s] %zu clients, %zu test examples, %zu parameters, %zu rounds", method.c_str(),
                 partition.clients.size(), partition.test.size(), init.element_count(), cfg.rounds));

    std::ofstream metrics(dir / "metrics.tsv", std::ios::binary | std::ios::trunc);
    std::ofstream timings(dir / "timings.tsv", std::ios::binary | std::ios::trunc);
    if (!metrics || !timings) throw std::runtime_error("cannot write metrics in '" + dir.string() + "'");
    metrics << tsv_header(cfg) << "round\tclient\tloss\taccuracy\n";
    timings << "round\tclient\tduration_ms\n";
    using numerics::format_double;
    auto on_round = [&](const federated::RoundResult& r) {
        for (const auto& c : r.clients) {
            metrics << r.round << '\t' << c.client_id << '\t' << format_double(c.loss) << '\t'
                    << format_double(c.accuracy) << '\n';
            timings << r.round << '\t' << c.client_id << '\t' << fmt("%.1f", c.duration_ms) << '\n';
        }
        metrics << r.round << "\tglobal\t" << format_double(r.test_loss) << '\t' << format_double(r.test_accuracy)
                << '\n';
        timings << r.round << "\tglobal\t" << fmt("%.1f", r.duration_ms) << '\n';
        metrics.flush();
        timings.flush();
        say(log, fmt("[%s] round %zu/%zu  test acc %.4f  test loss %.4f  (%.1f s)", method.c_str(), r.round,
                     cfg.rounds, r.test_accuracy, r.test_loss, r.duration_ms / 1000.0));
    };
    auto run = federated::run_rounds(partition.clients, spec, init, partition.test, cfg.training, cfg.rounds,
                                     on_round);
    metrics.close();
    timings.close();

    numerics::save_checkpoint(run.global, dir / "checkpoint.txt");

    const auto& ev = run.final_evaluation;
    const auto counts = energy::count_ops(spec, ev.spikes ? &*ev.spikes : nullptr);
    const double joules = energy::estimate_energy(counts, cfg.energy);
    json layers = json::array();
    for (const auto& l : counts.layers) layers.push_back(layer_json(l));
    json evaluation = {{"method", method},
                       {"accuracy", ev.accuracy},
                       {"loss", ev.loss},
                       {"test_examples", ev.predictions.size()},
                       {"energy",
                        {{"joules_per_inference", joules},
                         {"macs", counts.total_macs()},
                         {"acs", counts.total_acs()},
                         {"e_mac", cfg.energy.e_mac},
                         {"e_ac", cfg.energy.e_ac},
                         {"layers", layers}}},
                       {"params_digest", hex64(federated::params_digest(run.global))},
                       {"config", json::parse(to_json_line(cfg))}};
    if (ev.spikes) {
        json rates;
        for (std::size_t i = 0; i < ev.spikes->layers.size(); ++i) rates[ev.spikes->layers[i].name] = ev.spikes->rate(i);
        evaluation["spike_rates"] = rates;
        evaluation["steps"] = ev.spikes->steps;
    }
    write_file_atomic(dir / "evaluation.json", evaluation.dump(2) + "\n");

    manifest["status"] = "complete";
    manifest["rounds_completed"] = run.rounds.size();
    manifest["final_accuracy"] = ev.accuracy;
    manifest["energy_joules"] = joules;
    write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
    say(log, fmt("[%s] done: accuracy %.4f, %.4g J per inference", method.c_str(), ev.accuracy, joules));
    return {dir, ev.accuracy, joules, run.rounds.size()};
}

CompareResult cmd_compare(const ExperimentConfig& cfg, const Logger& log) {
    cfg.validate();
    std::vector<energy::MethodResult> inputs;
    std::vector<json> evals;
    std::vector<std::vector<std::string>> curves;
    std::string cache_digest;
    for (auto kind : kAllKinds) {
        const auto dir = method_dir(cfg, kind);
        const auto manifest_path = dir / "manifest.json";
        if (!fs::exists(manifest_path))
            throw DataError("missing run manifest '" + manifest_path.string() + "'; train this method first");
        const auto manifest = read_json(manifest_path);
        if (manifest.value("status", "") != "complete")
            throw DataError("run '" + dir.string() + "' did not complete");
        const std::string digest = manifest.value("cache_digest", "");
        if (cache_digest.empty()) cache_digest = digest;
        if (digest != cache_digest) throw DataError("runs were trained on different ingest caches");
        auto ev = read_json(dir / manifest["files"].value("evaluation", "evaluation.json"));
        inputs.push_back({std::string(models::to_string(kind)), ev.at("accuracy").get<double>(),
                          ev.at("energy").at("joules_per_inference").get<double>()});
        evals.push_back(std::move(ev));

        std::istringstream metrics(read_file(dir / manifest["files"].value("metrics", "metrics.tsv")));
        std::vector<std::string> acc;
        for (std::string line; std::getline(metrics, line);) {
            if (line.empty() || line[0] == '#' || line.rfind("round\t", 0) == 0) continue;
            std::istringstream row(line);
            std::string round, client, loss, a;
            std::getline(row, round, '\t');
            std::getline(row, client, '\t');
            std::getline(row, loss, '\t');
            std::getline(row, a, '\t');
            if (client == "global") acc.push_back(a);
        }
        curves.push_back(std::move(acc));
    }

    CompareResult res;
    res.wsp = energy::compute_wsp(inputs);
    const auto snn_energy = inputs[0].energy;
    std::size_t lowest = 0;
    for (std::size_t i = 1; i < inputs.size(); ++i)
        if (inputs[i].energy < inputs[lowest].energy) lowest = i;

    json methods = json::array();
    std::ostringstream t;
    t << fmt("%-6s %9s %14s %14s %14s %8s %10s\n", "method", "accuracy", "energy (J)", "MACs", "ACs", "WSP",
             "snn/this");
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const auto& e = res.wsp.entries[i];
        const auto& en = evals[i].at("energy");
        methods.push_back({{"method", e.method},
                           {"accuracy", e.accuracy},
                           {"energy_joules", e.energy},
                           {"macs", en.at("macs")},
                           {"acs", en.at("acs")},
                           {"wsp", e.wsp},
                           {"wsp_ratio_snn_over_this", e.first_over},
                           {"energy_ratio_this_over_snn", e.energy / snn_energy}});
        t << fmt("%-6s %9.4f %14.4g %14llu %14.4g %8.4f %10.3f\n", e.method.c_str(), e.accuracy, e.energy,
                 static_cast<unsigned long long>(en.at("macs").get<std::uint64_t>()), en.at("acs").get<double>(), e.wsp,
                 e.first_over);
    }
    t << "lowest energy: " << inputs[lowest].method << ", highest WSP: " << res.wsp.entries[res.wsp.best()].method
      << " (energies are per inference)\n";
    res.table = t.str();

    json report = {{"config", json::parse(to_json_line(cfg))},
                   {"cache_digest", cache_digest},
                   {"toolkit_version", toolkit_version()},
                   {"energy_per", "inference"},
                   {"energy_model", {{"e_mac", cfg.energy.e_mac}, {"e_ac", cfg.energy.e_ac}}},
                   {"wsp_definition", "0.5 * accuracy / max(accuracy) + 0.5 * min(energy) / energy"},
                   {"wsp_weights", {{"accuracy", res.wsp.accuracy_weight}, {"energy", res.wsp.energy_weight}}},
                   {"methods", methods},
                   {"lowest_energy", inputs[lowest].method},
                   {"highest_wsp", res.wsp.entries[res.wsp.best()].method}};
    res.report = cfg.output_dir() / "report.json";
    write_file_atomic(res.report, report.dump(2) + "\n");

    std::ostringstream c;
    c << tsv_header(cfg) << "round\tsnn\tcnn\tlstm\n";
    const std::size_t rows = std::max({curves[0].size(), curves[1].size(), curves[2].size()});
    for (std::size_t r = 0; r < rows; ++r) {
        c << r + 1;
        for (const auto& col : curves) c << '\t' << (r < col.size() ? col[r] : "NA");
        c << '\n';
    }
    res.curves = cfg.output_dir() / "curves.tsv";
    write_file_atomic(res.curves, c.str());
    say(log, "compare: wrote " + res.report.string() + " and " + res.curves.string());
    return res;
}

std::string cmd_inspect(const fs::path& path) {
    if (!fs::exists(path)) throw DataError("no such file '" + path.string() + "'");
    if (fs::is_directory(path)) {
        std::ostringstream out;
        out << path.string() << ":\n";
        std::vector<fs::path> entries;
        for (const auto& e : fs::directory_iterator(path)) entries.push_back(e.path());
        std::sort(entries.begin(), entries.end());
        for (const auto& e : entries)
            out << "  " << e.filename().string() << (fs::is_directory(e) ? "/" : fmt("  %ju bytes", static_cast<std::uintmax_t>(fs::file_size(e)))) << "\n";
        return out.str();
    }
    const auto bytes = read_file(path);
    std::ostringstream out;
    if (bytes.rfind("spikefed-checkpoint", 0) == 0) {
        const auto p = numerics::read_checkpoint(bytes);
        out << "checkpoint " << path.string() << "\n"
            << "fingerprint " << hex64(p.fingerprint()) << "  content digest " << hex64(federated::params_digest(p))
            << "\n";
        for (std::size_t e = 0; e < p.size(); ++e)
            out << fmt("  %-16s %-20s %zu values\n", p.name(e).c_str(), numerics::to_string(p.tensor(e).shape()).c_str(),
                       p.tensor(e).size());
        out << p.element_count() << " parameters\n";
        return out.str();
    }
    if (bytes.rfind(kCacheMagic, 0) == 0) {
        Reader r(bytes, path.string());
        r.raw(kCacheMagic.size());
        r.u64();
        auto header = json::parse(r.str(), nullptr, false);
        out << "ingest cache " << path.string() << "\n" << (header.is_discarded() ? "corrupt header" : header.dump(2)) << "\n";
        return out.str();
    }
    if (!bytes.empty() && bytes[0] == '{') {
        auto j = json::parse(bytes, nullptr, false);
        if (j.is_discarded()) throw DataError("'" + path.string() + "' is not valid JSON");
        if (j.contains("config")) j["config"] = "<embedded config, " + std::to_string(j["config"].dump().size()) + " bytes>";
        return j.dump(2) + "\n";
    }
    if (path.extension() == ".tsv") {
        std::istringstream in(bytes);
        std::size_t rows = 0;
        std::string header, last;
        for (std::string line; std::getline(in, line);) {
            if (line.empty() || line[0] == '#') continue;
            if (header.empty()) {
                header = line;
                continue;
            }
            ++rows;
            last = line;
        }
        out << path.string() << ": " << rows << " rows\ncolumns: " << header << "\nlast: " << last << "\n";
        return out.str();
    }
    // Anything else is tried as EDF.
    data::EegRecording rec;
    try {
        rec = data::parse_edf(std::as_bytes(std::span(bytes.data(), bytes.size())));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    out << "EDF" << (rec.header.reserved.rfind("EDF+", 0) == 0 ? "+ " : " ") << path.string() << "\n"
        << fmt("%zu signal channels at %g Hz, %zu samples (%.1f s), %zu records of %g s\n", rec.channel_count(),
               rec.sampling_rate, rec.sample_count(), rec.sample_count() / std::max(rec.sampling_rate, 1e-300),
               rec.header.record_count, rec.header.record_duration);
    std::map<std::string, std::size_t> labels;
    for (const auto& a : rec.annotations) ++labels[a.label];
    out << rec.annotations.size() << " annotations:";
    for (const auto& [l, n] : labels) out << " " << l << "=" << n;
    out << "\n";
    return out.str();
}

}  // namespace spikefed::experiment
