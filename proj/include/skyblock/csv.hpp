#ifndef SKYBLOCK_CSV_HPP
#define SKYBLOCK_CSV_HPP

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace skyblock::csv {

/**
 * Reads delimited rows with RFC 4180 quoting: a field wrapped in double
 * quotes may contain the delimiter, line breaks and doubled quotes.
 * Trailing CR is stripped so CRLF files parse the same as LF files.
 */
class Reader {
public:
    Reader(std::istream& in, char delimiter) : in_(in), delimiter_(delimiter) {}

    /// Next row, or nullopt at end of input. `line()` afterwards gives the
    /// 1-based line on which the row started.
    std::optional<std::vector<std::string>> next() {
        std::string line;
        if (!std::getline(in_, line)) {
            return std::nullopt;
        }
        ++physical_line_;
        row_line_ = physical_line_;
        strip_cr(line);

        std::vector<std::string> fields;
        std::string field;
        bool quoted = false;
        std::size_t i = 0;
        while (true) {
            if (i == line.size()) {
                if (quoted) {
                    // Quoted field continues on the next physical line.
                    std::string more;
                    if (!std::getline(in_, more)) {
                        break;
                    }
                    ++physical_line_;
                    strip_cr(more);
                    field.push_back('\n');
                    line = std::move(more);
                    i = 0;
                    continue;
                }
                break;
            }
            const char c = line[i];
            if (quoted) {
                if (c == '"') {
                    if (i + 1 < line.size() && line[i + 1] == '"') {
                        field.push_back('"');
                        i += 2;
                        continue;
                    }
                    quoted = false;
                } else {
                    field.push_back(c);
                }
            } else if (c == '"' && field.empty()) {
                quoted = true;
            } else if (c == delimiter_) {
                fields.push_back(std::move(field));
                field.clear();
            } else {
                field.push_back(c);
            }
            ++i;
        }
        fields.push_back(std::move(field));
        return fields;
    }

    std::size_t line() const { return row_line_; }

private:
    static void strip_cr(std::string& s) {
        if (!s.empty() && s.back() == '\r') {
            s.pop_back();
        }
    }

    std::istream& in_;
    char delimiter_;
    std::size_t physical_line_ = 0;
    std::size_t row_line_ = 0;
};

inline void write_field(std::ostream& out, const std::string& value, char delimiter) {
    const bool needs_quotes = value.find_first_of(std::string{delimiter, '"', '\n', '\r'}) != std::string::npos;
    if (!needs_quotes) {
        out << value;
        return;
    }
    out << '"';
    for (char c : value) {
        if (c == '"') {
            out << '"';
        }
        out << c;
    }
    out << '"';
}

inline void write_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) {
            out << delimiter;
        }
        write_field(out, fields[i], delimiter);
    }
    out << '\n';
}

} // namespace skyblock::csv

#endif
