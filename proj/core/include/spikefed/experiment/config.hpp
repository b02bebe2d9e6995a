#pragma once

#include "spikefed/data/synthetic.hpp"
#include "spikefed/energy/energy.hpp"
#include "spikefed/federated/fedavg.hpp"
#include "spikefed/models/architecture.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace spikefed::experiment {

/// Environment variable that, when set and non-empty, replaces dataset.path.
inline constexpr const char* kDataRootEnv = "SPIKEFED_DATA_ROOT";

struct DatasetConfig {
    std::string path;  // root holding <subject>/<subject>R<run>.edf
    std::vector<std::string> subjects{"S001", "S002", "S003"};
    std::vector<int> runs{4, 6, 8, 10, 12, 14};
    std::size_t window = 640;
    double split_ratio = 0.8;
    bool synthetic = false;
    data::SyntheticSpec synthetic_spec;  // subjects, runs and seed are taken from the fields above
};

struct ExperimentConfig {
    std::optional<std::uint64_t> seed;  // mandatory; no clock-based default
    DatasetConfig dataset;
    encoding::EncoderConfig encoder;  // its seed is derived from `seed`
    models::ModelKind model = models::ModelKind::Snn;
    models::Architecture arch;
    models::LifConfig lif;
    federated::TrainingConfig training;
    std::size_t rounds = 60;
    energy::EnergyModel energy;
    std::string output = "spikefed-out";

    /// Throws ValidationError on any out-of-range value, a missing seed, or a
    /// dataset path that does not exist (outside synthetic mode).
    void validate() const;

    [[nodiscard]] std::uint64_t master_seed() const;
    [[nodiscard]] std::filesystem::path output_dir() const { return output; }
    /// Directory the EDF files are read from: synthetic files live under the output.
    [[nodiscard]] std::filesystem::path data_root() const;
    /// Model spec for `kind` with the encoder seed drawn from the master seed.
    [[nodiscard]] models::ModelSpec model_spec(models::ModelKind kind) const;
    [[nodiscard]] data::SyntheticSpec synthetic_spec() const;
};

// Named sub-streams of the master seed.
std::uint64_t split_seed(const ExperimentConfig& cfg);
std::uint64_t shuffle_seed(const ExperimentConfig& cfg);
std::uint64_t init_seed(const ExperimentConfig& cfg, models::ModelKind kind);
std::uint64_t encoder_seed(const ExperimentConfig& cfg);
std::uint64_t synthetic_seed(const ExperimentConfig& cfg);

/// Parses JSON text. Unknown keys are rejected so typos do not pass silently.
ExperimentConfig parse_config(std::string_view json_text,
                              const std::vector<std::string>& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});
/// Applies SPIKEFED_DATA_ROOT if set.
void apply_environment(ExperimentConfig& cfg);

/// Canonical JSON (sorted keys, 2-space indent) of every field.
std::string to_json_text(const ExperimentConfig& cfg);
/// Same, on one line; embedded into reports.
std::string to_json_line(const ExperimentConfig& cfg);

/// Config with the toolkit's defaults and the given seed.
ExperimentConfig default_config(std::uint64_t seed);

}  // namespace spikefed::experiment
