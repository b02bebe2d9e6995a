#include "spikefed/numerics/checkpoint.hpp"

#include "spikefed/common/hash.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace spikefed::numerics {

namespace {

constexpr std::string_view kMagic = "spikefed-checkpoint";

class Tokens {
public:
    explicit Tokens(std::string_view text) : text_(text) {}

    std::string_view next(const char* what) {
        while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
        if (pos_ >= text_.size()) throw DataError(std::string("checkpoint truncated: expected ") + what);
        const auto start = pos_;
        while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
        return text_.substr(start, pos_ - start);
    }
    void expect(std::string_view word) {
        auto tok = next(std::string(word).c_str());
        if (tok != word)
            throw DataError("checkpoint: expected '" + std::string(word) + "', found '" + std::string(tok) + "'");
    }
    std::size_t next_size(const char* what) {
        auto tok = next(what);
        std::size_t v = 0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || p != tok.data() + tok.size())
            throw DataError(std::string("checkpoint: bad ") + what + " '" + std::string(tok) + "'");
        return v;
    }
    bool at_end() {
        while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
        return pos_ >= text_.size();
    }

private:
    static bool is_space(char c) { return c == ' ' || c == '\n' || c == '\t' || c == '\r'; }
    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

double parse_double(std::string_view token) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || p != token.data() + token.size())
        throw DataError("not a number: '" + std::string(token) + "'");
    return v;
}

std::string write_checkpoint(const ParameterSet& params) {
    std::string out;
    out += kMagic;
    out += " 1\nfingerprint " + hex64(params.fingerprint()) + "\nentries " + std::to_string(params.size()) + "\n";
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& t = params.tensor(i);
        out += "tensor " + params.name(i) + " " + std::to_string(t.rank());
        for (auto d : t.shape()) out += " " + std::to_string(d);
        out += "\n";
        for (std::size_t j = 0; j < t.size(); ++j) {
            if (j) out += (j % 8 == 0) ? '\n' : ' ';
            out += format_double(t[j]);
        }
        out += "\n";
    }
    return out;
}

ParameterSet read_checkpoint(std::string_view text) {
    Tokens tk(text);
    tk.expect(kMagic);
    tk.expect("1");
    tk.expect("fingerprint");
    const auto fp_text = std::string(tk.next("fingerprint"));
    tk.expect("entries");
    const auto n = tk.next_size("entry count");
    ParameterSet params;
    for (std::size_t i = 0; i < n; ++i) {
        tk.expect("tensor");
        std::string name(tk.next("tensor name"));
        const auto rank = tk.next_size("rank");
        Shape shape(rank);
        for (auto& d : shape) d = tk.next_size("dimension");
        std::vector<double> values(element_count(shape));
        for (auto& v : values) v = parse_double(tk.next("value"));
        params.add(std::move(name), Tensor(std::move(shape), std::move(values)));
    }
    if (!tk.at_end()) throw DataError("checkpoint: trailing content after last tensor");
    if (hex64(params.fingerprint()) != fp_text)
        throw DataError("checkpoint: fingerprint " + fp_text + " does not match reloaded layout " +
                        hex64(params.fingerprint()));
    return params;
}

void save_checkpoint(const ParameterSet& params, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write checkpoint " + path.string());
    f << write_checkpoint(params);
}

ParameterSet load_checkpoint(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open checkpoint " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return read_checkpoint(ss.str());
}

}  // namespace spikefed::numerics
