#include "spikefed/data/synthetic.hpp"

#include "spikefed/common/hash.hpp"
#include "spikefed/common/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace spikefed::data {

namespace {

// Channel groups (indices into eeg_channel_labels) carrying each class's rhythm.
const std::vector<std::vector<std::size_t>>& class_groups() {
    static const std::vector<std::vector<std::size_t>> groups{
        {4, 5, 6, 11, 12, 13, 18, 19, 20},  // left fist: right-hemisphere motor strip
        {0, 1, 2, 7, 8, 9, 14, 15, 16},     // right fist: left-hemisphere motor strip
        {1, 5, 8, 12, 15, 19},              // both fists: bilateral C3/C4 neighbourhood
        {3, 10, 17, 50, 33, 9, 11},         // both feet: midline (FCz, Cz, CPz, Pz, Fz, C1, C2)
    };
    return groups;
}

constexpr double kClassHz[4] = {10.0, 12.0, 18.0, 22.0};

std::uint64_t subject_key(const std::string& subject) {
    Fnv1a64 h;
    h.update(subject);
    return h.digest();
}

int run_kind_offset(int run) {
    // T1/T2 of fists/feet runs map to classes 2/3.
    return (run == 6 || run == 10 || run == 14) ? 2 : 0;
}

}  // namespace

const std::vector<std::string>& eeg_channel_labels() {
    static const std::vector<std::string> labels{
        "Fc5.", "Fc3.", "Fc1.", "Fcz.", "Fc2.", "Fc4.", "Fc6.", "C5..", "C3..", "C1..", "Cz..", "C2..", "C4..",
        "C6..", "Cp5.", "Cp3.", "Cp1.", "Cpz.", "Cp2.", "Cp4.", "Cp6.", "Fp1.", "Fpz.", "Fp2.", "Af7.", "Af3.",
        "Afz.", "Af4.", "Af8.", "F7..", "F5..", "F3..", "F1..", "Fz..", "F2..", "F4..", "F6..", "F8..", "Ft7.",
        "Ft8.", "T7..", "T8..", "T9..", "T10.", "Tp7.", "Tp8.", "P7..", "P5..", "P3..", "P1..", "Pz..", "P2..",
        "P4..", "P6..", "P8..", "Po7.", "Po3.", "Poz.", "Po4.", "Po8.", "O1..", "Oz..", "O2..", "Iz.."};
    return labels;
}

EegRecording synthesize_run(const SyntheticSpec& spec, const std::string& subject, int run) {
    const auto& labels = eeg_channel_labels();
    const std::size_t channels = labels.size();
    const double fs = spec.sampling_rate;

    // Subject traits are shared across that subject's runs.
    Rng trait(derive_seed(spec.seed, "synthetic-subject", {subject_key(subject)}));
    std::vector<double> class_gain(4), class_hz(4);
    for (int k = 0; k < 4; ++k) {
        class_gain[k] = trait.uniform(0.7, 1.3);
        class_hz[k] = kClassHz[k] + trait.uniform(-1.0, 1.0);
    }
    std::vector<double> alpha_amp(channels);
    for (auto& a : alpha_amp) a = trait.uniform(0.2, 0.6);

    Rng rng(derive_seed(spec.seed, "synthetic-run",
                        {subject_key(subject), static_cast<std::uint64_t>(run)}));

    // Timeline: 1 s lead-in, then (rest, cue) pairs, then a final rest and 1 s tail.
    std::vector<int> cue_codes;
    for (std::size_t i = 0; i < spec.cues_per_run; ++i) cue_codes.push_back(i % 2 == 0 ? 1 : 2);
    rng.shuffle(cue_codes);

    EegRecording rec;
    rec.subject_id = subject;
    double t = 1.0;
    for (int code : cue_codes) {
        rec.annotations.push_back({t, spec.rest_seconds, "T0"});
        t += spec.rest_seconds;
        rec.annotations.push_back({t, spec.cue_seconds, code == 1 ? "T1" : "T2"});
        t += spec.cue_seconds;
    }
    rec.annotations.push_back({t, spec.rest_seconds, "T0"});
    t += spec.rest_seconds + 1.0;
    // Round onsets to the sample grid so they survive the text encoding exactly.
    for (auto& a : rec.annotations) a.onset = std::round(a.onset * 10.0) / 10.0;

    const auto seconds = static_cast<std::size_t>(std::ceil(t));
    const auto spr = static_cast<std::size_t>(fs);
    const std::size_t total = seconds * spr;

    rec.header.patient = "X X X X";
    rec.header.recording = "Startdate X X X X synthetic";
    rec.header.reserved = "EDF+C";
    rec.header.record_count = seconds;
    rec.header.record_duration = 1.0;
    rec.sampling_rate = fs;
    rec.annotation_samples_per_record = 60;
    for (const auto& l : labels) {
        EdfChannel c;
        c.label = l;
        c.physical_dimension = "uV";
        c.physical_min = -3276.8;
        c.physical_max = 3276.7;
        c.digital_min = -32768;
        c.digital_max = 32767;
        c.samples_per_record = spr;
        rec.channels.push_back(c);
    }

    // Background: AR(1) noise plus a weak alpha rhythm with per-channel amplitude.
    rec.samples.assign(channels, std::vector<double>(total));
    const double ar = 0.9;
    const double drive = spec.background_uv * std::sqrt(1.0 - ar * ar);
    for (std::size_t c = 0; c < channels; ++c) {
        double state = rng.normal() * spec.background_uv;
        const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double hz = 9.5 + rng.uniform(-1.0, 1.0);
        auto& x = rec.samples[c];
        for (std::size_t i = 0; i < total; ++i) {
            state = ar * state + drive * rng.normal();
            x[i] = state + alpha_amp[c] * spec.background_uv *
                               std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / fs + phase);
        }
    }

    // Class rhythm during each cue, ramped in and out over 0.25 s, on top of a
    // slow potential locked to the cue.
    const int offset = run_kind_offset(run);
    for (const auto& a : rec.annotations) {
        if (a.label == "T0") continue;
        const int cls = offset + (a.label == "T1" ? 0 : 1);
        const auto start = static_cast<std::size_t>(std::llround(a.onset * fs));
        const auto len = static_cast<std::size_t>(std::llround(a.duration * fs));
        const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double amp = spec.class_uv * class_gain[cls];
        const double slow = spec.evoked_uv * class_gain[cls] * rng.uniform(0.7, 1.3);
        for (auto c : class_groups()[cls]) {
            const double local = rng.uniform(0.8, 1.2);
            for (std::size_t i = 0; i < len && start + i < total; ++i) {
                const double tt = static_cast<double>(i) / fs;
                const double ramp = std::min({1.0, tt / 0.25, (a.duration - tt) / 0.25});
                rec.samples[c][start + i] +=
                    local * amp * std::max(0.0, ramp) * std::sin(2.0 * std::numbers::pi * class_hz[cls] * tt + phase) +
                    local * slow * std::sin(std::numbers::pi * tt / a.duration);
            }
        }
    }

    // Quantize to the 0.1 uV grid so samples already equal their stored form.
    for (std::size_t c = 0; c < channels; ++c) {
        const auto& ch = rec.channels[c];
        for (auto& v : rec.samples[c]) {
            const double d = std::clamp(std::round((v - ch.physical_min) / ch.gain() + ch.digital_min),
                                        static_cast<double>(ch.digital_min), static_cast<double>(ch.digital_max));
            v = ch.to_physical(static_cast<std::int32_t>(d));
        }
    }
    return rec;
}

std::vector<std::filesystem::path> write_synthetic_dataset(const SyntheticSpec& spec,
                                                           const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> out;
    for (const auto& s : spec.subjects) {
        const auto sub = dir / s;
        std::filesystem::create_directories(sub);
        for (int run : spec.runs) {
            char name[64];
            std::snprintf(name, sizeof(name), "%sR%02d.edf", s.c_str(), run);
            const auto path = sub / name;
            write_edf_file(synthesize_run(spec, s, run), path);
            out.push_back(path);
        }
    }
    return out;
}

}  // namespace spikefed::data
