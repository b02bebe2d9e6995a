#pragma once

#include "spikefed/data/edf.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace spikefed::data {

/// Seeded surrogate for the motor-imagery recordings: 64 channels at 160 Hz,
/// alternating rest (T0) and cue (T1/T2) periods. Each imagery class adds, over
/// its own group of motor channels, an induced band-limited oscillation with
/// random phase and a slow cue-locked potential (a half sine spanning the cue).
/// Group gains and frequencies vary per subject, so clients are non-IID.
struct SyntheticSpec {
    std::vector<std::string> subjects{"S001", "S002", "S003"};
    std::vector<int> runs{4, 6, 8, 10, 12, 14};
    std::size_t cues_per_run = 15;  // half T1, half T2
    double sampling_rate = 160.0;
    double rest_seconds = 4.2;
    double cue_seconds = 4.1;
    double background_uv = 10.0;  // std of the background activity
    double class_uv = 8.0;        // amplitude of the class-specific oscillation
    double evoked_uv = 12.0;      // peak of the class-specific slow potential
    std::uint64_t seed = 1;
};

/// The 64 electrode labels in recording order.
const std::vector<std::string>& eeg_channel_labels();

EegRecording synthesize_run(const SyntheticSpec& spec, const std::string& subject, int run);

/// Writes <dir>/<subject>/<subject>R<run>.edf for every subject and run and
/// returns the paths in (subject, run) order.
std::vector<std::filesystem::path> write_synthetic_dataset(const SyntheticSpec& spec,
                                                           const std::filesystem::path& dir);

}  // namespace spikefed::data
