#pragma once

// Randomized synthetic EDF/EDF+ recordings for round-trip and fuzz tests.

#include "spikefed/common/rng.hpp"
#include "spikefed/data/edf.hpp"

#include <cmath>
#include <string>

namespace spikefed::testing {

inline data::EegRecording random_recording(Rng& rng) {
    data::EegRecording rec;
    rec.subject_id = "S" + std::to_string(rng.below(1000));
    rec.header.patient = "P" + std::to_string(rng.below(100000));
    rec.header.recording = "Startdate 01-JAN-2001 R" + std::to_string(rng.below(100));
    rec.header.start_date = "0" + std::to_string(1 + rng.below(9)) + ".02.03";
    rec.header.start_time = "12.3" + std::to_string(rng.below(10)) + ".00";
    const bool plus = rng.below(2) == 1;
    rec.header.reserved = plus ? "EDF+C" : "";
    rec.header.record_count = rng.below(8);
    // Durations with short exact decimal forms.
    const double durations[] = {1.0, 0.5, 2.0, 0.25, 4.0};
    rec.header.record_duration = durations[rng.below(5)];

    const std::size_t nch = 1 + rng.below(5);
    const std::size_t spr = 1 + rng.below(24);
    rec.sampling_rate = static_cast<double>(spr) / rec.header.record_duration;
    for (std::size_t c = 0; c < nch; ++c) {
        data::EdfChannel ch;
        ch.label = "Ch" + std::to_string(c);
        ch.transducer = c % 2 ? "AgAgCl electrode" : "";
        ch.physical_dimension = "uV";
        const auto lo = -static_cast<double>(1 + rng.below(5000));
        ch.physical_min = lo + 0.5 * static_cast<double>(rng.below(2));
        ch.physical_max = static_cast<double>(1 + rng.below(5000));
        ch.digital_min = -static_cast<std::int32_t>(1 + rng.below(32768));
        ch.digital_max = static_cast<std::int32_t>(1 + rng.below(32767));
        ch.prefiltering = "HP:0.1Hz";
        ch.samples_per_record = spr;
        rec.channels.push_back(ch);
        std::vector<double> s(rec.header.record_count * spr);
        for (auto& v : s) {
            const auto span = static_cast<std::uint64_t>(ch.digital_max - ch.digital_min + 1);
            v = ch.to_physical(ch.digital_min + static_cast<std::int32_t>(rng.below(span)));
        }
        rec.samples.push_back(std::move(s));
    }
    if (plus || rng.below(3) == 0) {
        rec.annotation_samples_per_record = 120 + rng.below(40);
        const double total = static_cast<double>(rec.header.record_count) * rec.header.record_duration;
        const std::size_t na = rec.header.record_count == 0 ? 0 : rng.below(3 * rec.header.record_count + 1);
        double onset = 0.0;
        const char* codes[] = {"T0", "T1", "T2", "Stimulus A"};
        for (std::size_t i = 0; i < na; ++i) {
            onset += std::round(rng.uniform(0.0, total / static_cast<double>(na + 1)) * 100.0) / 100.0;
            const double dur = rng.below(2) ? std::round(rng.uniform(0.0, 5.0) * 10.0) / 10.0 : 0.0;
            rec.annotations.push_back({onset, dur, codes[rng.below(4)]});
        }
    }
    return rec;
}

}  // namespace spikefed::testing
