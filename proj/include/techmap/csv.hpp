#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace techmap::csv {

/// Quotes a field when it contains a comma, quote, or line break.
std::string escape(std::string_view field);

std::string join_row(const std::vector<std::string>& fields);

/// RFC 4180 style record reader. Quoted fields may span lines. Lines whose
/// first character is '#' are skipped when they appear before the header.
class Reader {
public:
    Reader(std::istream& in, std::string source);

    /// Next record, or nullopt at end of input. Throws DataError on an
    /// unterminated quote.
    std::optional<std::vector<std::string>> next();

    /// Line on which the most recently returned record started.
    std::size_t line() const noexcept { return record_line_; }
    const std::string& source() const noexcept { return source_; }

private:
    std::istream& in_;
    std::string source_;
    std::size_t line_ = 0;
    std::size_t record_line_ = 0;
    bool seen_record_ = false;
};

} // namespace techmap::csv
