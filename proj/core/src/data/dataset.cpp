#include "spikefed/data/dataset.hpp"

#include "spikefed/common/rng.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

namespace spikefed::data {

const char* class_name(int label) noexcept {
    switch (label) {
        case 0: return "left_fist";
        case 1: return "right_fist";
        case 2: return "both_fists";
        case 3: return "both_feet";
        default: return "unknown";
    }
}

std::optional<RunKind> imagery_run_kind(int run) noexcept {
    switch (run) {
        case 4:
        case 8:
        case 12: return RunKind::LeftRightFist;
        case 6:
        case 10:
        case 14: return RunKind::FistsFeet;
        default: return std::nullopt;
    }
}

std::optional<RunFile> parse_run_filename(std::string_view name) {
    // S<digits>R<digits>.edf
    auto lower = [](char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); };
    if (name.size() < 4) return std::nullopt;
    auto ext = name.substr(name.size() - 4);
    if (lower(ext[0]) != '.' || lower(ext[1]) != 'e' || lower(ext[2]) != 'd' || lower(ext[3]) != 'f')
        return std::nullopt;
    auto stem = name.substr(0, name.size() - 4);
    if (stem.empty() || (stem[0] != 'S' && stem[0] != 's')) return std::nullopt;
    const auto r = stem.find_first_of("Rr", 1);
    if (r == std::string_view::npos || r == 1 || r + 1 >= stem.size()) return std::nullopt;
    auto digits = [](std::string_view s) {
        return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    if (!digits(stem.substr(1, r - 1)) || !digits(stem.substr(r + 1))) return std::nullopt;
    RunFile f;
    f.subject = "S" + std::string(stem.substr(1, r - 1));
    f.run = std::stoi(std::string(stem.substr(r + 1)));
    return f;
}

TrialExtraction build_trials(const EegRecording& rec, const TaskSpec& task) {
    TrialExtraction out;
    if (task.window_length == 0) throw ValidationError("window length must be positive");
    const std::size_t channels = rec.channel_count();
    const std::size_t total = rec.sample_count();
    std::size_t index = 0;
    for (const auto& a : rec.annotations) {
        ++index;
        int label = -1;
        if (a.label == "T0") {
            ++out.rest_skipped;
            continue;
        } else if (a.label == "T1") {
            label = task.run_kind == RunKind::LeftRightFist ? 0 : 2;
        } else if (a.label == "T2") {
            label = task.run_kind == RunKind::LeftRightFist ? 1 : 3;
        } else {
            throw DataError("unknown annotation code '" + a.label + "' in " +
                            (task.run_tag.empty() ? rec.subject_id : task.run_tag));
        }
        const auto window_seconds = static_cast<double>(task.window_length) / rec.sampling_rate;
        if (a.duration > 0.0 && a.duration + 1e-9 < window_seconds) {
            ++out.short_discarded;
            continue;
        }
        const auto start = static_cast<std::size_t>(std::llround(std::max(0.0, a.onset) * rec.sampling_rate));
        if (start + task.window_length > total) {
            ++out.overrun_discarded;
            continue;
        }
        numerics::Tensor w({channels, task.window_length});
        for (std::size_t c = 0; c < channels; ++c)
            std::copy_n(rec.samples[c].begin() + static_cast<std::ptrdiff_t>(start), task.window_length,
                        w.data() + c * task.window_length);
        LabeledExample ex;
        ex.window = std::move(w);
        ex.label = label;
        ex.subject = rec.subject_id;
        ex.trial_id = (task.run_tag.empty() ? rec.subject_id : task.run_tag) + "#" + std::to_string(index);
        out.examples.push_back(std::move(ex));
    }
    return out;
}

NormalizationStats channel_stats(const std::vector<LabeledExample>& examples) {
    NormalizationStats s;
    if (examples.empty()) return s;
    const std::size_t channels = examples.front().window.dim(0);
    const std::size_t len = examples.front().window.dim(1);
    s.mean.assign(channels, 0.0);
    s.stddev.assign(channels, 0.0);
    const double n = static_cast<double>(examples.size() * len);
    for (const auto& ex : examples)
        for (std::size_t c = 0; c < channels; ++c)
            for (std::size_t t = 0; t < len; ++t) s.mean[c] += ex.window[c * len + t];
    for (auto& m : s.mean) m /= n;
    for (const auto& ex : examples)
        for (std::size_t c = 0; c < channels; ++c)
            for (std::size_t t = 0; t < len; ++t) {
                const double d = ex.window[c * len + t] - s.mean[c];
                s.stddev[c] += d * d;
            }
    for (auto& v : s.stddev) v = std::sqrt(v / n);
    return s;
}

DatasetSplit split_normalize(std::vector<LabeledExample> examples, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw ValidationError("split ratio must lie strictly between 0 and 1");
    if (examples.empty()) throw ValidationError("cannot split an empty example list");
    const auto shape = examples.front().window.shape();
    for (const auto& ex : examples)
        if (ex.window.shape() != shape) throw ValidationError("examples have differing window shapes");

    std::map<std::pair<std::string, int>, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < examples.size(); ++i) strata[{examples[i].subject, examples[i].label}].push_back(i);

    DatasetSplit split;
    split.seed = seed;
    Rng rng(seed);
    for (auto& [key, idx] : strata) {
        const std::size_t n = idx.size();
        if (n < 2)
            throw ValidationError("stratum (" + key.first + ", " + class_name(key.second) +
                                  ") has fewer than 2 examples");
        rng.shuffle(idx);
        auto n_test = static_cast<std::size_t>(std::floor(static_cast<double>(n) * (1.0 - ratio) + 1e-9));
        n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
        for (std::size_t k = 0; k < n; ++k) {
            auto& dst = k < n - n_test ? split.train : split.test;
            dst.push_back(std::move(examples[idx[k]]));
        }
    }

    split.stats = channel_stats(split.train);
    const std::size_t channels = shape[0], len = shape[1];
    auto apply = [&](std::vector<LabeledExample>& part) {
        for (auto& ex : part)
            for (std::size_t c = 0; c < channels; ++c) {
                const double sd = split.stats.stddev[c] > 0.0 ? split.stats.stddev[c] : 1.0;
                for (std::size_t t = 0; t < len; ++t) {
                    auto& v = ex.window[c * len + t];
                    v = (v - split.stats.mean[c]) / sd;
                }
            }
    };
    apply(split.train);
    apply(split.test);
    return split;
}

}  // namespace spikefed::data
