#include "techmap/csv.hpp"
#include "techmap/error.hpp"
#include "techmap/hash.hpp"
#include "techmap/text.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace techmap {

namespace {

std::string locate(const std::string& message, const std::string& source, std::size_t line) {
    if (source.empty() && line == 0) return message;
    std::string where = source.empty() ? "<input>" : source;
    if (line > 0) where += ":" + std::to_string(line);
    return where + ": " + message;
}

std::string join_problems(const std::vector<std::string>& problems) {
    std::string out = "invalid configuration";
    for (const auto& p : problems) out += "\n  - " + p;
    return out;
}

} // namespace

DataError::DataError(const std::string& message, std::string source, std::size_t line)
    : Error(locate(message, source, line)), source_(std::move(source)), line_(line) {}

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error(join_problems(problems)), problems_(std::move(problems)) {}

StageError::StageError(const std::string& message, std::string required_stage)
    : Error(message), required_stage_(std::move(required_stage)) {}

NumericalError::NumericalError(const std::string& message, double residual)
    : Error(message), residual_(residual) {}

// ---------------------------------------------------------------------------

namespace text {

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

std::string_view trim(std::string_view s) {
    const char* ws = " \t\r\n\f\v";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(s.substr(start));
            return out;
        }
        out.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

bool is_alnum(char c) noexcept {
    return (c >= '0' && c <= '9') || is_upper(c) || is_lower(c) ||
           static_cast<unsigned char>(c) >= 0x80;
}
bool is_upper(char c) noexcept { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) noexcept { return c >= 'a' && c <= 'z'; }

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                   std::chars_format::general, 17);
    return std::string(buf.data(), ptr);
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

std::optional<long long> parse_int(std::string_view s) {
    s = trim(s);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

} // namespace text

// ---------------------------------------------------------------------------

namespace csv {

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string join_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += escape(fields[i]);
    }
    return out;
}

Reader::Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

std::optional<std::vector<std::string>> Reader::next() {
    std::string line;
    while (true) {
        if (!std::getline(in_, line)) return std::nullopt;
        ++line_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!seen_record_ && !line.empty() && line.front() == '#') continue;
        if (line.empty()) continue;
        break;
    }
    record_line_ = line_;
    seen_record_ = true;

    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    while (true) {
        if (i >= line.size()) {
            if (!quoted) break;
            // quoted field continues on the next physical line
            std::string more;
            if (!std::getline(in_, more))
                throw DataError("unterminated quoted field", source_, record_line_);
            ++line_;
            if (!more.empty() && more.back() == '\r') more.pop_back();
            field += '\n';
            line = std::move(more);
            i = 0;
            continue;
        }
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
        ++i;
    }
    fields.push_back(std::move(field));
    return fields;
}

} // namespace csv

// ---------------------------------------------------------------------------

std::string sha256_hex(std::string_view data) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1)
        throw Error("sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file", path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

} // namespace techmap
