#pragma once

#include "spikefed/common/error.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace spikefed::data {

/// Parse failure with the byte offset at which the problem was detected.
class EdfError : public DataError {
public:
    EdfError(const std::string& what, std::size_t offset)
        : DataError(what + " (byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

struct EdfChannel {
    std::string label;
    std::string transducer;
    std::string physical_dimension;
    double physical_min = 0.0;
    double physical_max = 0.0;
    std::int32_t digital_min = -32768;
    std::int32_t digital_max = 32767;
    std::string prefiltering;
    std::size_t samples_per_record = 0;

    [[nodiscard]] double gain() const {
        return (physical_max - physical_min) / static_cast<double>(digital_max - digital_min);
    }
    [[nodiscard]] double to_physical(std::int32_t digital) const {
        return static_cast<double>(digital - digital_min) * gain() + physical_min;
    }
    friend bool operator==(const EdfChannel&, const EdfChannel&) = default;
};

struct Annotation {
    double onset = 0.0;     // seconds from recording start
    double duration = 0.0;  // seconds; 0 when unspecified
    std::string label;
    friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct EdfHeaderInfo {
    std::string version = "0";
    std::string patient;
    std::string recording;
    std::string start_date = "01.01.00";
    std::string start_time = "00.00.00";
    std::string reserved;  // "EDF+C" / "EDF+D" for EDF+
    std::size_t record_count = 0;
    double record_duration = 1.0;  // seconds
    friend bool operator==(const EdfHeaderInfo&, const EdfHeaderInfo&) = default;
};

/// A parsed biosignal recording. `samples` holds physical values (the
/// digital-to-physical mapping has been applied exactly once); annotation
/// onsets are non-decreasing. Every signal channel shares one sampling rate.
struct EegRecording {
    std::string subject_id;
    EdfHeaderInfo header;
    std::vector<EdfChannel> channels;  // signal channels only
    double sampling_rate = 0.0;        // Hz, shared by all signal channels
    std::vector<std::vector<double>> samples;
    std::vector<Annotation> annotations;
    /// Samples per record of the "EDF Annotations" channel, 0 when absent.
    std::size_t annotation_samples_per_record = 0;

    [[nodiscard]] std::size_t channel_count() const noexcept { return channels.size(); }
    [[nodiscard]] std::size_t sample_count() const noexcept { return samples.empty() ? 0 : samples.front().size(); }

    friend bool operator==(const EegRecording&, const EegRecording&) = default;
};

inline constexpr std::string_view kAnnotationLabel = "EDF Annotations";

/// Parses an EDF/EDF+ byte image. Never reads past the buffer; every failure is
/// an EdfError carrying the offending byte offset.
EegRecording parse_edf(std::span<const std::byte> bytes, std::string subject_id = {});
EegRecording read_edf_file(const std::filesystem::path& path, std::string subject_id = {});

/// Serializes a recording. Physical samples are quantized back through each
/// channel's scaling; annotations are packed into the annotation channel after
/// each record's time-keeping entry. Throws DataError if a header value cannot
/// be represented in its fixed-width field or the annotations do not fit.
std::vector<std::byte> write_edf(const EegRecording& rec);
void write_edf_file(const EegRecording& rec, const std::filesystem::path& path);

}  // namespace spikefed::data
