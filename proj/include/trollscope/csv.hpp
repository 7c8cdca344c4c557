#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace trollscope::csv {

/// Reads RFC 4180 records: comma separated, '"' quoting with "" escapes,
/// quoted fields may span lines. Accepts LF and CRLF.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    /// Next record, or nullopt at end of input. Throws Error{MalformedRow} on an
    /// unterminated quote.
    std::optional<std::vector<std::string>> next();

    /// Physical line on which the last returned record started (1-based).
    std::size_t line() const noexcept { return record_line_; }

private:
    std::istream& in_;
    std::size_t line_ = 1;
    std::size_t record_line_ = 0;
};

/// Quotes a field when it contains ',', '"', CR or LF.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace trollscope::csv
