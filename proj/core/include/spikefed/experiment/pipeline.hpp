#pragma once

#include "spikefed/experiment/config.hpp"

#include <filesystem>
#include <array>
#include <functional>
#include <map>
#include <string>

namespace spikefed::experiment {

/// Progress lines ("[snn] round 3/60 ...") go here; silent when empty.
using Logger = std::function<void(const std::string&)>;

std::string toolkit_version();

// Output layout under cfg.output:
//   cache/dataset.bin, cache/summary.json         ingest
//   <method>/metrics.tsv, timings.tsv,             train
//   <method>/checkpoint.txt, evaluation.json, manifest.json
//   report.json, curves.tsv                       compare
std::filesystem::path cache_path(const ExperimentConfig& cfg);
std::filesystem::path method_dir(const ExperimentConfig& cfg, models::ModelKind kind);

struct IngestResult {
    std::filesystem::path cache;
    std::string data_digest;   // FNV-1a over the EDF files read, in order
    std::string cache_digest;  // FNV-1a over the cache file
    std::map<std::string, std::array<std::size_t, 4>> train_counts;  // subject -> per class
    std::map<std::string, std::array<std::size_t, 4>> test_counts;
    std::size_t files = 0;
    std::size_t samples = 0;  // signal samples per channel summed over files
    std::string summary;      // human-readable table
};

/// Reads <root>/<subject>/<subject>R<run>.edf for every configured subject and
/// run (writing them first in synthetic mode), cuts trials, splits, z-scores,
/// and writes the cache. DataError names the file on any parse failure.
IngestResult cmd_ingest(const ExperimentConfig& cfg, const Logger& log = {});

struct TrainResult {
    std::filesystem::path dir;
    double accuracy = 0.0;
    double energy_joules = 0.0;
    std::size_t rounds = 0;
};

/// Federated training of one method from the ingest cache.
TrainResult cmd_train(const ExperimentConfig& cfg, models::ModelKind kind, const Logger& log = {});

struct CompareResult {
    std::filesystem::path report;
    std::filesystem::path curves;
    energy::WspReport wsp;  // rows in snn, cnn, lstm order
    std::string table;
};

/// Energy and WSP table over the three completed runs plus curve data.
CompareResult cmd_compare(const ExperimentConfig& cfg, const Logger& log = {});

/// Description of a checkpoint, cache, manifest/report JSON, metrics file or EDF file.
std::string cmd_inspect(const std::filesystem::path& path);

/// Writes through a temporary file and a rename, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace spikefed::experiment
