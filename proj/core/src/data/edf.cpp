#include "spikefed/data/edf.hpp"

#include "spikefed/numerics/checkpoint.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string_view>

namespace spikefed::data {

namespace {

constexpr std::size_t kFixedHeader = 256;
constexpr std::size_t kPerSignalHeader = 256;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\0')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\0')) s.remove_suffix(1);
    return s;
}

class HeaderReader {
public:
    explicit HeaderReader(std::span<const std::byte> bytes) : bytes_(bytes) {}

    std::string_view field(std::size_t offset, std::size_t width, const char* name) const {
        if (offset + width > bytes_.size())
            throw EdfError(std::string("header truncated while reading ") + name, bytes_.size());
        const auto* p = reinterpret_cast<const char*>(bytes_.data()) + offset;
        for (std::size_t i = 0; i < width; ++i) {
            const auto c = static_cast<unsigned char>(p[i]);
            if (c < 32 || c > 126) throw EdfError(std::string("non-ASCII byte in ") + name, offset + i);
        }
        return {p, width};
    }

    std::string text(std::size_t offset, std::size_t width, const char* name) const {
        return std::string(trim(field(offset, width, name)));
    }

    long long integer(std::size_t offset, std::size_t width, const char* name) const {
        auto s = trim(field(offset, width, name));
        if (!s.empty() && s.front() == '+') s.remove_prefix(1);
        long long v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc{} || p != s.data() + s.size())
            throw EdfError(std::string("malformed integer in ") + name + ": '" + std::string(s) + "'", offset);
        return v;
    }

    double real(std::size_t offset, std::size_t width, const char* name) const {
        auto s = trim(field(offset, width, name));
        if (!s.empty() && s.front() == '+') s.remove_prefix(1);
        double v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v))
            throw EdfError(std::string("malformed number in ") + name + ": '" + std::string(s) + "'", offset);
        return v;
    }

private:
    std::span<const std::byte> bytes_;
};

// Decodes the time-stamped annotation lists of one record's annotation block.
void parse_tals(std::span<const std::byte> block, std::size_t base_offset, std::vector<Annotation>& out) {
    const auto* s = reinterpret_cast<const char*>(block.data());
    const std::size_t n = block.size();
    std::size_t i = 0;
    while (i < n) {
        if (s[i] == '\0') {  // padding after the last TAL
            ++i;
            continue;
        }
        const std::size_t tal_start = i;
        if (s[i] != '+' && s[i] != '-') throw EdfError("TAL does not start with a signed onset", base_offset + i);
        std::size_t j = i;
        while (j < n && s[j] != '\x14' && s[j] != '\x15') ++j;
        if (j >= n) throw EdfError("unterminated TAL onset", base_offset + tal_start);
        const std::string_view onset_text(s + i, j - i);
        double duration = 0.0;
        if (s[j] == '\x15') {
            std::size_t k = j + 1;
            while (k < n && s[k] != '\x14') ++k;
            if (k >= n) throw EdfError("unterminated TAL duration", base_offset + j);
            try {
                duration = numerics::parse_double(std::string_view(s + j + 1, k - j - 1));
            } catch (const DataError&) {
                throw EdfError("malformed TAL duration", base_offset + j + 1);
            }
            j = k;
        }
        double onset = 0.0;
        try {
            auto t = onset_text;
            if (t.front() == '+') t.remove_prefix(1);
            onset = numerics::parse_double(t);
            if (onset_text.front() == '-') onset = -std::abs(onset);
        } catch (const DataError&) {
            throw EdfError("malformed TAL onset '" + std::string(onset_text) + "'", base_offset + tal_start);
        }
        // j is at the \x14 closing the onset/duration part.
        ++j;
        for (;;) {
            if (j >= n) throw EdfError("unterminated TAL", base_offset + tal_start);
            if (s[j] == '\0') {
                ++j;
                break;
            }
            std::size_t k = j;
            while (k < n && s[k] != '\x14') ++k;
            if (k >= n) throw EdfError("unterminated TAL annotation text", base_offset + j);
            if (k > j) out.push_back({onset, duration, std::string(s + j, k - j)});
            j = k + 1;
        }
        i = j;
    }
}

}  // namespace

EegRecording parse_edf(std::span<const std::byte> bytes, std::string subject_id) {
    if (bytes.size() < kFixedHeader) throw EdfError("file shorter than the 256-byte EDF header", bytes.size());
    HeaderReader hr(bytes);

    EegRecording rec;
    rec.subject_id = std::move(subject_id);
    auto& h = rec.header;
    h.version = hr.text(0, 8, "version");
    if (h.version != "0") throw EdfError("unsupported EDF version '" + h.version + "'", 0);
    h.patient = hr.text(8, 80, "patient id");
    h.recording = hr.text(88, 80, "recording id");
    h.start_date = hr.text(168, 8, "start date");
    h.start_time = hr.text(176, 8, "start time");
    const long long header_bytes = hr.integer(184, 8, "header size");
    h.reserved = hr.text(192, 44, "reserved");
    const long long records = hr.integer(236, 8, "record count");
    h.record_duration = hr.real(244, 8, "record duration");
    const long long ns = hr.integer(252, 4, "signal count");

    if (ns < 0 || ns > 4096) throw EdfError("implausible signal count " + std::to_string(ns), 252);
    const auto nsig = static_cast<std::size_t>(ns);
    const std::size_t expected_header = kFixedHeader + kPerSignalHeader * nsig;
    if (header_bytes < 0 || static_cast<std::size_t>(header_bytes) != expected_header)
        throw EdfError("header size " + std::to_string(header_bytes) + " inconsistent with " + std::to_string(ns) +
                           " signals",
                       184);
    if (bytes.size() < expected_header) throw EdfError("signal header truncated", bytes.size());
    if (h.record_duration < 0) throw EdfError("negative record duration", 244);

    std::vector<EdfChannel> all(nsig);
    auto sig_field = [&](std::size_t field_offset, std::size_t width, std::size_t k) {
        return kFixedHeader + field_offset * nsig + width * k;
    };
    for (std::size_t k = 0; k < nsig; ++k) {
        auto& c = all[k];
        c.label = hr.text(sig_field(0, 16, k), 16, "signal label");
        c.transducer = hr.text(kFixedHeader + 16 * nsig + 80 * k, 80, "transducer");
        c.physical_dimension = hr.text(kFixedHeader + 96 * nsig + 8 * k, 8, "physical dimension");
        c.physical_min = hr.real(kFixedHeader + 104 * nsig + 8 * k, 8, "physical minimum");
        c.physical_max = hr.real(kFixedHeader + 112 * nsig + 8 * k, 8, "physical maximum");
        const auto dmin_off = kFixedHeader + 120 * nsig + 8 * k;
        const auto dmin = hr.integer(dmin_off, 8, "digital minimum");
        const auto dmax = hr.integer(kFixedHeader + 128 * nsig + 8 * k, 8, "digital maximum");
        if (dmin < -32768 || dmax > 32767 || dmax <= dmin)
            throw EdfError("invalid digital range for signal '" + c.label + "'", dmin_off);
        c.digital_min = static_cast<std::int32_t>(dmin);
        c.digital_max = static_cast<std::int32_t>(dmax);
        if (c.physical_max == c.physical_min)
            throw EdfError("zero physical range for signal '" + c.label + "'", kFixedHeader + 104 * nsig + 8 * k);
        c.prefiltering = hr.text(kFixedHeader + 136 * nsig + 80 * k, 80, "prefiltering");
        const auto spr_off = kFixedHeader + 216 * nsig + 8 * k;
        const auto spr = hr.integer(spr_off, 8, "samples per record");
        if (spr < 0 || spr > (1 << 24)) throw EdfError("invalid samples per record", spr_off);
        c.samples_per_record = static_cast<std::size_t>(spr);
        hr.field(kFixedHeader + 224 * nsig + 32 * k, 32, "signal reserved");
    }

    std::size_t record_bytes = 0;
    std::size_t annotation_index = nsig;
    for (std::size_t k = 0; k < nsig; ++k) {
        record_bytes += 2 * all[k].samples_per_record;
        if (all[k].label == kAnnotationLabel && annotation_index == nsig) annotation_index = k;
    }

    const std::size_t data_bytes = bytes.size() - expected_header;
    std::size_t nrec = 0;
    if (record_bytes == 0) {
        if (records > 0) throw EdfError("records declared but record size is zero", 236);
    } else if (records == -1) {
        if (data_bytes % record_bytes != 0) throw EdfError("partial trailing data record", bytes.size());
        nrec = data_bytes / record_bytes;
    } else if (records < 0) {
        throw EdfError("invalid record count " + std::to_string(records), 236);
    } else {
        nrec = static_cast<std::size_t>(records);
        if (nrec > data_bytes / record_bytes)
            throw EdfError("truncated data record: " + std::to_string(records) + " records declared, " +
                               std::to_string(data_bytes / record_bytes) + " complete records present",
                           expected_header + (data_bytes / record_bytes) * record_bytes);
        if (data_bytes != nrec * record_bytes)
            throw EdfError("inconsistent record count: " + std::to_string(data_bytes - nrec * record_bytes) +
                               " bytes beyond the declared records",
                           expected_header + nrec * record_bytes);
    }
    h.record_count = nrec;

    std::size_t spr_signal = 0;
    bool first = true;
    for (std::size_t k = 0; k < nsig; ++k) {
        if (k == annotation_index) {
            rec.annotation_samples_per_record = all[k].samples_per_record;
            continue;
        }
        if (first) {
            spr_signal = all[k].samples_per_record;
            first = false;
        } else if (all[k].samples_per_record != spr_signal) {
            throw EdfError("unsupported mixed sampling rates ('" + all[k].label + "')",
                           kFixedHeader + 216 * nsig + 8 * k);
        }
        rec.channels.push_back(all[k]);
    }
    if (!rec.channels.empty()) {
        if (h.record_duration <= 0) throw EdfError("record duration must be positive for signal data", 244);
        rec.sampling_rate = static_cast<double>(spr_signal) / h.record_duration;
    }
    rec.samples.assign(rec.channels.size(), std::vector<double>(nrec * spr_signal));

    std::size_t off = expected_header;
    for (std::size_t r = 0; r < nrec; ++r) {
        std::size_t ch = 0;
        for (std::size_t k = 0; k < nsig; ++k) {
            const std::size_t n = all[k].samples_per_record;
            const auto block = bytes.subspan(off, 2 * n);
            if (k == annotation_index) {
                parse_tals(block, off, rec.annotations);
            } else {
                const auto& c = all[k];
                auto& dst = rec.samples[ch];
                for (std::size_t i = 0; i < n; ++i) {
                    const auto lo = static_cast<std::uint16_t>(block[2 * i]);
                    const auto hi = static_cast<std::uint16_t>(block[2 * i + 1]);
                    const auto d = static_cast<std::int16_t>(static_cast<std::uint16_t>(lo | (hi << 8)));
                    dst[r * n + i] = c.to_physical(d);
                }
                ++ch;
            }
            off += 2 * n;
        }
    }
    std::stable_sort(rec.annotations.begin(), rec.annotations.end(),
                     [](const Annotation& a, const Annotation& b) { return a.onset < b.onset; });
    return rec;
}

EegRecording read_edf_file(const std::filesystem::path& path, std::string subject_id) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open " + path.string());
    std::vector<char> raw((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    try {
        return parse_edf(std::as_bytes(std::span(raw)), std::move(subject_id));
    } catch (const EdfError& e) {
        throw EdfError(path.string() + ": " + e.what(), e.offset());
    }
}

// ---------------------------------------------------------------------------

namespace {

void put_field(std::string& out, std::string_view value, std::size_t width, const char* name) {
    if (value.size() > width)
        throw DataError(std::string("value '") + std::string(value) + "' does not fit the " + std::to_string(width) +
                        "-character " + name + " field");
    out.append(value);
    out.append(width - value.size(), ' ');
}

std::string number_field(double v) { return numerics::format_double(v); }

}  // namespace

std::vector<std::byte> write_edf(const EegRecording& rec) {
    const auto& h = rec.header;
    const bool has_annotations = rec.annotation_samples_per_record > 0;
    const std::size_t nsig = rec.channels.size() + (has_annotations ? 1 : 0);
    const std::size_t spr = rec.channels.empty() ? 0 : rec.channels.front().samples_per_record;
    for (const auto& c : rec.channels)
        if (c.samples_per_record != spr) throw DataError("write_edf: channels disagree on samples per record");
    if (rec.samples.size() != rec.channels.size()) throw DataError("write_edf: sample arrays do not match channels");
    for (const auto& s : rec.samples)
        if (s.size() != h.record_count * spr) throw DataError("write_edf: sample count does not match record layout");
    if (!has_annotations && !rec.annotations.empty())
        throw DataError("write_edf: annotations present but no annotation channel");

    std::vector<EdfChannel> all = rec.channels;
    if (has_annotations) {
        EdfChannel a;
        a.label = std::string(kAnnotationLabel);
        a.physical_min = -1;
        a.physical_max = 1;
        a.digital_min = -32768;
        a.digital_max = 32767;
        a.samples_per_record = rec.annotation_samples_per_record;
        all.push_back(a);
    }

    std::string head;
    put_field(head, h.version, 8, "version");
    put_field(head, h.patient, 80, "patient id");
    put_field(head, h.recording, 80, "recording id");
    put_field(head, h.start_date, 8, "start date");
    put_field(head, h.start_time, 8, "start time");
    put_field(head, std::to_string(256 + 256 * nsig), 8, "header size");
    put_field(head, h.reserved, 44, "reserved");
    put_field(head, std::to_string(h.record_count), 8, "record count");
    put_field(head, number_field(h.record_duration), 8, "record duration");
    put_field(head, std::to_string(nsig), 4, "signal count");
    for (const auto& c : all) put_field(head, c.label, 16, "label");
    for (const auto& c : all) put_field(head, c.transducer, 80, "transducer");
    for (const auto& c : all) put_field(head, c.physical_dimension, 8, "physical dimension");
    for (const auto& c : all) put_field(head, number_field(c.physical_min), 8, "physical minimum");
    for (const auto& c : all) put_field(head, number_field(c.physical_max), 8, "physical maximum");
    for (const auto& c : all) put_field(head, std::to_string(c.digital_min), 8, "digital minimum");
    for (const auto& c : all) put_field(head, std::to_string(c.digital_max), 8, "digital maximum");
    for (const auto& c : all) put_field(head, c.prefiltering, 80, "prefiltering");
    for (const auto& c : all) put_field(head, std::to_string(c.samples_per_record), 8, "samples per record");
    for (std::size_t k = 0; k < nsig; ++k) put_field(head, "", 32, "reserved");

    std::vector<std::byte> out;
    out.reserve(head.size() + h.record_count * (2 * spr * rec.channels.size() + 2 * rec.annotation_samples_per_record));
    for (char c : head) out.push_back(static_cast<std::byte>(c));

    std::size_t next_annotation = 0;
    for (std::size_t r = 0; r < h.record_count; ++r) {
        for (std::size_t ch = 0; ch < rec.channels.size(); ++ch) {
            const auto& c = rec.channels[ch];
            const double g = c.gain();
            for (std::size_t i = 0; i < spr; ++i) {
                const double p = rec.samples[ch][r * spr + i];
                const double d = std::round((p - c.physical_min) / g + c.digital_min);
                const auto clamped = static_cast<std::int32_t>(
                    std::clamp(d, static_cast<double>(c.digital_min), static_cast<double>(c.digital_max)));
                const auto u = static_cast<std::uint16_t>(static_cast<std::int16_t>(clamped));
                out.push_back(static_cast<std::byte>(u & 0xff));
                out.push_back(static_cast<std::byte>(u >> 8));
            }
        }
        if (has_annotations) {
            const std::size_t cap = 2 * rec.annotation_samples_per_record;
            std::string block = "+" + number_field(static_cast<double>(r) * h.record_duration) + "\x14\x14";
            block.push_back('\0');
            if (block.size() > cap) throw DataError("write_edf: annotation channel too small for time keeping");
            while (next_annotation < rec.annotations.size()) {
                const auto& a = rec.annotations[next_annotation];
                const bool last_record = r + 1 == h.record_count;
                if (!last_record && a.onset >= static_cast<double>(r + 1) * h.record_duration) break;
                std::string tal = (a.onset < 0 ? "-" : "+") + number_field(std::abs(a.onset));
                if (a.duration != 0.0) tal += "\x15" + number_field(a.duration);
                tal += "\x14" + a.label + "\x14";
                tal.push_back('\0');
                if (block.size() + tal.size() > cap) break;
                block += tal;
                ++next_annotation;
            }
            block.resize(cap, '\0');
            for (char c : block) out.push_back(static_cast<std::byte>(c));
        }
    }
    if (next_annotation != rec.annotations.size())
        throw DataError("write_edf: annotations do not fit the annotation channel");
    return out;
}

void write_edf_file(const EegRecording& rec, const std::filesystem::path& path) {
    auto bytes = write_edf(rec);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write " + path.string());
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace spikefed::data
