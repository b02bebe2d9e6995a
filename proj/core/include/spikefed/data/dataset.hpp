#pragma once

#include "spikefed/data/edf.hpp"
#include "spikefed/numerics/tensor.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace spikefed::data {

inline constexpr std::size_t kClassCount = 4;

/// Imagery classes.
enum class ImageryClass : int { LeftFist = 0, RightFist = 1, BothFists = 2, BothFeet = 3 };

const char* class_name(int label) noexcept;

/// Which pair of classes a run's T1/T2 cues stand for.
enum class RunKind { LeftRightFist, FistsFeet };

/// Imagery run protocol: runs 4, 8, 12 cue left/right fist; runs 6, 10, 14 cue
/// both fists/both feet. Other runs (baselines, physical execution) map to nullopt.
std::optional<RunKind> imagery_run_kind(int run) noexcept;

struct RunFile {
    std::string subject;  // "S001"
    int run = 0;          // 4
};

/// Parses names of the form S001R04.edf (case-insensitive extension).
std::optional<RunFile> parse_run_filename(std::string_view filename);

struct TaskSpec {
    RunKind run_kind = RunKind::LeftRightFist;
    std::size_t window_length = 640;  // samples cropped from each cue onset
    std::string run_tag;              // carried into trial ids, e.g. "S001R04"
};

struct LabeledExample {
    numerics::Tensor window;  // (channels, window length)
    int label = 0;            // ImageryClass value
    std::string subject;
    std::string trial_id;     // unique within a dataset, e.g. "S001R04#7"
};

struct TrialExtraction {
    std::vector<LabeledExample> examples;
    std::size_t rest_skipped = 0;         // T0 annotations
    std::size_t short_discarded = 0;      // cue shorter than the window
    std::size_t overrun_discarded = 0;    // window runs past the end of the signal
};

/// One example per T1/T2 annotation whose window fits; windows start at the
/// annotation onset. Throws DataError on an annotation code other than T0/T1/T2.
TrialExtraction build_trials(const EegRecording& rec, const TaskSpec& task);

struct NormalizationStats {
    std::vector<double> mean;    // per channel
    std::vector<double> stddev;  // per channel, population form
};

/// Stratified train/test partition with z-scoring fitted on the training side.
struct DatasetSplit {
    std::vector<LabeledExample> train;
    std::vector<LabeledExample> test;
    NormalizationStats stats;
    std::uint64_t seed = 0;
};

/// Splits each (subject, class) stratum with a seeded shuffle: floor(n * (1 - ratio))
/// examples (at least one, at most n - 1) go to test, the remainder to train. Then
/// z-scores both partitions with per-channel statistics computed on train only.
DatasetSplit split_normalize(std::vector<LabeledExample> examples, double ratio, std::uint64_t seed);

/// Per-channel mean and population standard deviation over all windows and time points.
NormalizationStats channel_stats(const std::vector<LabeledExample>& examples);

}  // namespace spikefed::data
