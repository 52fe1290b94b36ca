#ifndef SKYBLOCK_PHONETIC_HPP
#define SKYBLOCK_PHONETIC_HPP

#include <array>
#include <cctype>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>

namespace skyblock {

namespace detail {

inline bool is_ascii_alpha(char c) {
    const auto u = static_cast<unsigned char>(c);
    return u < 128 && std::isalpha(u);
}

inline std::string upper_ascii(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        const auto u = static_cast<unsigned char>(c);
        out.push_back(u < 128 ? static_cast<char>(std::toupper(u)) : c);
    }
    return out;
}

} // namespace detail

/**
 * American Soundex: first letter followed by three digits, zero padded.
 *
 * Leading non-letters are skipped. H and W do not separate letters with the
 * same code; vowels do. A value without any ASCII letter yields "".
 */
inline std::string soundex(std::string_view value) {
    // A B C D E F G H I J K L M N O P Q R S T U V W X Y Z
    static constexpr std::array<char, 26> digits = {
        '0', '1', '2', '3', '0', '1', '2', '0', '0', '2', '2', '4', '5',
        '5', '0', '1', '2', '6', '2', '3', '0', '1', '0', '2', '0', '2'};

    std::size_t pos = 0;
    while (pos < value.size() && !detail::is_ascii_alpha(value[pos])) {
        ++pos;
    }
    if (pos == value.size()) {
        return {};
    }

    std::string code(1, static_cast<char>(std::toupper(static_cast<unsigned char>(value[pos]))));
    char last = digits[code[0] - 'A'];
    for (++pos; pos < value.size() && code.size() < 4; ++pos) {
        if (!detail::is_ascii_alpha(value[pos])) {
            continue;
        }
        const char letter = static_cast<char>(std::toupper(static_cast<unsigned char>(value[pos])));
        const char d = digits[letter - 'A'];
        if (letter == 'H' || letter == 'W') {
            continue;
        }
        if (d == '0') {
            last = '0';
            continue;
        }
        if (d != last) {
            code.push_back(d);
        }
        last = d;
    }
    code.resize(4, '0');
    return code;
}

/// Primary and alternate Double Metaphone keys. When a word has no
/// alternate pronunciation both keys are equal.
struct MetaphoneCodes {
    std::string primary;
    std::string alternate;

    bool operator==(const MetaphoneCodes&) const = default;
};

namespace detail {

// Port of Lawrence Philips' reference Double Metaphone rules.
class DoubleMetaphoneEncoder {
public:
    DoubleMetaphoneEncoder(std::string word, std::size_t max_length)
        : word_(std::move(word)), length_(static_cast<int>(word_.size())), last_(length_ - 1), max_(max_length) {
        slavo_germanic_ = word_.find('W') != std::string::npos || word_.find('K') != std::string::npos ||
                          word_.find("CZ") != std::string::npos || word_.find("WITZ") != std::string::npos;
    }

    MetaphoneCodes run() {
        int current = 0;
        if (length_ < 1) {
            return {};
        }
        if (at(0, {"GN", "KN", "PN", "WR", "PS"})) {
            current += 1;
        }
        if (get(0) == 'X') {
            add("S");
            current += 1;
        }

        while ((primary_.size() < max_ || alternate_.size() < max_) && current < length_) {
            const char c = get(current);
            switch (c) {
            case 'A':
            case 'E':
            case 'I':
            case 'O':
            case 'U':
            case 'Y':
                if (current == 0) {
                    add("A");
                }
                current += 1;
                break;
            case 'B':
                add("P");
                current += get(current + 1) == 'B' ? 2 : 1;
                break;
            case 'C':
                current = encode_c(current);
                break;
            case 'D':
                if (at(current, {"DG"})) {
                    if (at(current + 2, {"I", "E", "Y"})) {
                        add("J");
                        current += 3;
                    } else {
                        add("TK");
                        current += 2;
                    }
                    break;
                }
                add("T");
                current += at(current, {"DT", "DD"}) ? 2 : 1;
                break;
            case 'F':
                add("F");
                current += get(current + 1) == 'F' ? 2 : 1;
                break;
            case 'G':
                current = encode_g(current);
                break;
            case 'H':
                if ((current == 0 || vowel(current - 1)) && vowel(current + 1)) {
                    add("H");
                    current += 2;
                } else {
                    current += 1;
                }
                break;
            case 'J':
                current = encode_j(current);
                break;
            case 'K':
                add("K");
                current += get(current + 1) == 'K' ? 2 : 1;
                break;
            case 'L':
                if (get(current + 1) == 'L') {
                    if ((current == length_ - 3 && at(current - 1, {"ILLO", "ILLA", "ALLE"})) ||
                        ((at(last_ - 1, {"AS", "OS"}) || at(last_, {"A", "O"})) && at(current - 1, {"ALLE"}))) {
                        add("L", "");
                        current += 2;
                        break;
                    }
                    current += 2;
                } else {
                    current += 1;
                }
                add("L");
                break;
            case 'M':
                if ((at(current - 1, {"UMB"}) && (current + 1 == last_ || at(current + 2, {"ER"}))) ||
                    get(current + 1) == 'M') {
                    current += 2;
                } else {
                    current += 1;
                }
                add("M");
                break;
            case 'N':
                add("N");
                current += get(current + 1) == 'N' ? 2 : 1;
                break;
            case 'P':
                if (get(current + 1) == 'H') {
                    add("F");
                    current += 2;
                    break;
                }
                current += at(current + 1, {"P", "B"}) ? 2 : 1;
                add("P");
                break;
            case 'Q':
                add("K");
                current += get(current + 1) == 'Q' ? 2 : 1;
                break;
            case 'R':
                if (current == last_ && !slavo_germanic_ && at(current - 2, {"IE"}) &&
                    !at(current - 4, {"ME", "MA"})) {
                    add("", "R");
                } else {
                    add("R");
                }
                current += get(current + 1) == 'R' ? 2 : 1;
                break;
            case 'S':
                current = encode_s(current);
                break;
            case 'T':
                current = encode_t(current);
                break;
            case 'V':
                add("F");
                current += get(current + 1) == 'V' ? 2 : 1;
                break;
            case 'W':
                current = encode_w(current);
                break;
            case 'X':
                if (!(current == last_ && (at(current - 3, {"IAU", "EAU"}) || at(current - 2, {"AU", "OU"})))) {
                    add("KS");
                }
                current += at(current + 1, {"C", "X"}) ? 2 : 1;
                break;
            case 'Z':
                if (get(current + 1) == 'H') {
                    add("J");
                    current += 2;
                    break;
                }
                if (at(current + 1, {"ZO", "ZI", "ZA"}) || (slavo_germanic_ && current > 0 && get(current - 1) != 'T')) {
                    add("S", "TS");
                } else {
                    add("S");
                }
                current += get(current + 1) == 'Z' ? 2 : 1;
                break;
            default:
                current += 1;
                break;
            }
        }

        if (primary_.size() > max_) {
            primary_.resize(max_);
        }
        if (alternate_.size() > max_) {
            alternate_.resize(max_);
        }
        return {primary_, alternate_};
    }

private:
    char get(int pos) const {
        if (pos < 0 || pos >= length_) {
            return '\0';
        }
        return word_[static_cast<std::size_t>(pos)];
    }

    bool vowel(int pos) const {
        switch (get(pos)) {
        case 'A':
        case 'E':
        case 'I':
        case 'O':
        case 'U':
        case 'Y':
            return true;
        default:
            return false;
        }
    }

    // Positions past the end read as spaces, as in the padded reference buffer.
    bool at(int start, std::initializer_list<std::string_view> options) const {
        if (start < 0) {
            return false;
        }
        for (auto option : options) {
            bool match = true;
            for (std::size_t i = 0; i < option.size(); ++i) {
                const int p = start + static_cast<int>(i);
                const char c = p < length_ ? word_[static_cast<std::size_t>(p)] : ' ';
                if (c != option[i]) {
                    match = false;
                    break;
                }
            }
            if (match) {
                return true;
            }
        }
        return false;
    }

    void add(std::string_view both) {
        primary_ += both;
        alternate_ += both;
    }

    void add(std::string_view main, std::string_view alt) {
        primary_ += main;
        alternate_ += alt;
    }

    int encode_c(int current) {
        if (current > 1 && !vowel(current - 2) && at(current - 1, {"ACH"}) && get(current + 2) != 'I' &&
            (get(current + 2) != 'E' || at(current - 2, {"BACHER", "MACHER"}))) {
            add("K");
            return current + 2;
        }
        if (current == 0 && at(current, {"CAESAR"})) {
            add("S");
            return current + 2;
        }
        if (at(current, {"CHIA"})) {
            add("K");
            return current + 2;
        }
        if (at(current, {"CH"})) {
            if (current > 0 && at(current, {"CHAE"})) {
                add("K", "X");
                return current + 2;
            }
            if (current == 0 && (at(current + 1, {"HARAC", "HARIS"}) || at(current + 1, {"HOR", "HYM", "HIA", "HEM"})) &&
                !at(0, {"CHORE"})) {
                add("K");
                return current + 2;
            }
            if (at(0, {"VAN ", "VON "}) || at(0, {"SCH"}) || at(current - 2, {"ORCHES", "ARCHIT", "ORCHID"}) ||
                at(current + 2, {"T", "S"}) ||
                ((at(current - 1, {"A", "O", "U", "E"}) || current == 0) &&
                 at(current + 2, {"L", "R", "N", "M", "B", "H", "F", "V", "W", " "}))) {
                add("K");
            } else if (current > 0) {
                if (at(0, {"MC"})) {
                    add("K");
                } else {
                    add("X", "K");
                }
            } else {
                add("X");
            }
            return current + 2;
        }
        if (at(current, {"CZ"}) && !at(current - 2, {"WICZ"})) {
            add("S", "X");
            return current + 2;
        }
        if (at(current + 1, {"CIA"})) {
            add("X");
            return current + 3;
        }
        if (at(current, {"CC"}) && !(current == 1 && get(0) == 'M')) {
            if (at(current + 2, {"I", "E", "H"}) && !at(current + 2, {"HU"})) {
                if ((current == 1 && get(current - 1) == 'A') || at(current - 1, {"UCCEE", "UCCES"})) {
                    add("KS");
                } else {
                    add("X");
                }
                return current + 3;
            }
            add("K");
            return current + 2;
        }
        if (at(current, {"CK", "CG", "CQ"})) {
            add("K");
            return current + 2;
        }
        if (at(current, {"CI", "CE", "CY"})) {
            if (at(current, {"CIO", "CIE", "CIA"})) {
                add("S", "X");
            } else {
                add("S");
            }
            return current + 2;
        }
        add("K");
        if (at(current + 1, {" C", " Q", " G"})) {
            return current + 3;
        }
        if (at(current + 1, {"C", "K", "Q"}) && !at(current + 1, {"CE", "CI"})) {
            return current + 2;
        }
        return current + 1;
    }

    int encode_g(int current) {
        if (get(current + 1) == 'H') {
            if (current > 0 && !vowel(current - 1)) {
                add("K");
                return current + 2;
            }
            if (current == 0) {
                add(get(current + 2) == 'I' ? "J" : "K");
                return current + 2;
            }
            if ((current > 1 && at(current - 2, {"B", "H", "D"})) || (current > 2 && at(current - 3, {"B", "H", "D"})) ||
                (current > 3 && at(current - 4, {"B", "H"}))) {
                return current + 2;
            }
            if (current > 2 && get(current - 1) == 'U' && at(current - 3, {"C", "G", "L", "R", "T"})) {
                add("F");
            } else if (current > 0 && get(current - 1) != 'I') {
                add("K");
            }
            return current + 2;
        }
        if (get(current + 1) == 'N') {
            if (current == 1 && vowel(0) && !slavo_germanic_) {
                add("KN", "N");
            } else if (!at(current + 2, {"EY"}) && get(current + 1) != 'Y' && !slavo_germanic_) {
                add("N", "KN");
            } else {
                add("KN");
            }
            return current + 2;
        }
        if (at(current + 1, {"LI"}) && !slavo_germanic_) {
            add("KL", "L");
            return current + 2;
        }
        if (current == 0 &&
            (get(current + 1) == 'Y' ||
             at(current + 1, {"ES", "EP", "EB", "EL", "EY", "IB", "IL", "IN", "IE", "EI", "ER"}))) {
            add("K", "J");
            return current + 2;
        }
        if ((at(current + 1, {"ER"}) || get(current + 1) == 'Y') && !at(0, {"DANGER", "RANGER", "MANGER"}) &&
            !at(current - 1, {"E", "I"}) && !at(current - 1, {"RGY", "OGY"})) {
            add("K", "J");
            return current + 2;
        }
        if (at(current + 1, {"E", "I", "Y"}) || at(current - 1, {"AGGI", "OGGI"})) {
            if (at(0, {"VAN ", "VON "}) || at(0, {"SCH"}) || at(current + 1, {"ET"})) {
                add("K");
            } else if (at(current + 1, {"IER "})) {
                add("J");
            } else {
                add("J", "K");
            }
            return current + 2;
        }
        add("K");
        return current + (get(current + 1) == 'G' ? 2 : 1);
    }

    int encode_j(int current) {
        if (at(current, {"JOSE"}) || at(0, {"SAN "})) {
            if ((current == 0 && get(current + 4) == ' ') || at(0, {"SAN "})) {
                add("H");
            } else {
                add("J", "H");
            }
            return current + 1;
        }
        if (current == 0 && !at(current, {"JOSE"})) {
            add("J", "A");
        } else if (vowel(current - 1) && !slavo_germanic_ && (get(current + 1) == 'A' || get(current + 1) == 'O')) {
            add("J", "H");
        } else if (current == last_) {
            add("J", "");
        } else if (!at(current + 1, {"L", "T", "K", "S", "N", "M", "B", "Z"}) && !at(current - 1, {"S", "K", "L"})) {
            add("J");
        }
        return current + (get(current + 1) == 'J' ? 2 : 1);
    }

    int encode_s(int current) {
        if (at(current - 1, {"ISL", "YSL"})) {
            return current + 1;
        }
        if (current == 0 && at(current, {"SUGAR"})) {
            add("X", "S");
            return current + 1;
        }
        if (at(current, {"SH"})) {
            add(at(current + 1, {"HEIM", "HOEK", "HOLM", "HOLZ"}) ? "S" : "X");
            return current + 2;
        }
        if (at(current, {"SIO", "SIA"}) || at(current, {"SIAN"})) {
            if (!slavo_germanic_) {
                add("S", "X");
            } else {
                add("S");
            }
            return current + 3;
        }
        if ((current == 0 && at(current + 1, {"M", "N", "L", "W"})) || at(current + 1, {"Z"})) {
            add("S", "X");
            return current + (at(current + 1, {"Z"}) ? 2 : 1);
        }
        if (at(current, {"SC"})) {
            if (get(current + 2) == 'H') {
                if (at(current + 3, {"OO", "ER", "EN", "UY", "ED", "EM"})) {
                    if (at(current + 3, {"ER", "EN"})) {
                        add("X", "SK");
                    } else {
                        add("SK");
                    }
                    return current + 3;
                }
                if (current == 0 && !vowel(3) && get(3) != 'W') {
                    add("X", "S");
                } else {
                    add("X");
                }
                return current + 3;
            }
            if (at(current + 2, {"I", "E", "Y"})) {
                add("S");
                return current + 3;
            }
            add("SK");
            return current + 3;
        }
        if (current == last_ && at(current - 2, {"AI", "OI"})) {
            add("", "S");
        } else {
            add("S");
        }
        return current + (at(current + 1, {"S", "Z"}) ? 2 : 1);
    }

    int encode_t(int current) {
        if (at(current, {"TION"})) {
            add("X");
            return current + 3;
        }
        if (at(current, {"TIA", "TCH"})) {
            add("X");
            return current + 3;
        }
        if (at(current, {"TH"}) || at(current, {"TTH"})) {
            if (at(current + 2, {"OM", "AM"}) || at(0, {"VAN ", "VON "}) || at(0, {"SCH"})) {
                add("T");
            } else {
                add("0", "T");
            }
            return current + 2;
        }
        add("T");
        return current + (at(current + 1, {"T", "D"}) ? 2 : 1);
    }

    int encode_w(int current) {
        if (at(current, {"WR"})) {
            add("R");
            return current + 2;
        }
        if (current == 0 && (vowel(current + 1) || at(current, {"WH"}))) {
            if (vowel(current + 1)) {
                add("A", "F");
            } else {
                add("A");
            }
        }
        if ((current == last_ && vowel(current - 1)) || at(current - 1, {"EWSKI", "EWSKY", "OWSKI", "OWSKY"}) ||
            at(0, {"SCH"})) {
            add("", "F");
            return current + 1;
        }
        if (at(current, {"WICZ", "WITZ"})) {
            add("TS", "FX");
            return current + 4;
        }
        return current + 1;
    }

    std::string word_;
    int length_;
    int last_;
    std::size_t max_;
    bool slavo_germanic_ = false;
    std::string primary_;
    std::string alternate_;
};

} // namespace detail

/**
 * Double Metaphone keys truncated to `max_length` characters.
 *
 * Input is upper-cased and leading non-letters are dropped; a value with no
 * ASCII letter encodes to two empty keys.
 */
inline MetaphoneCodes double_metaphone(std::string_view value, std::size_t max_length = 4) {
    std::size_t pos = 0;
    while (pos < value.size() && !detail::is_ascii_alpha(value[pos])) {
        ++pos;
    }
    if (pos == value.size()) {
        return {};
    }
    detail::DoubleMetaphoneEncoder encoder(detail::upper_ascii(value.substr(pos)), max_length);
    return encoder.run();
}

} // namespace skyblock

#endif
