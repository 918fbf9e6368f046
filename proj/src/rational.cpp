#include "rsld/rational.hpp"

#include <cassert>
#include <cctype>

namespace rsld {

namespace mp = boost::multiprecision;

std::optional<Rational> parse_rational(const std::string& text) {
    if (text.empty()) return std::nullopt;
    std::size_t at = 0;
    bool negative = false;
    if (text[at] == '-') {
        negative = true;
        ++at;
    }
    auto digits = [&](mp::cpp_int& out) -> std::size_t {
        std::size_t count = 0;
        out = 0;
        while (at < text.size() && std::isdigit(static_cast<unsigned char>(text[at]))) {
            out = out * 10 + (text[at] - '0');
            ++at;
            ++count;
        }
        return count;
    };
    mp::cpp_int whole;
    if (digits(whole) == 0) return std::nullopt;
    mp::cpp_int num = whole;
    mp::cpp_int den = 1;
    if (at < text.size() && text[at] == '/') {
        ++at;
        if (digits(den) == 0 || den == 0) return std::nullopt;
    } else if (at < text.size() && text[at] == '.') {
        ++at;
        std::size_t start = at;
        mp::cpp_int frac;
        std::size_t places = digits(frac);
        if (places == 0 && start == at) return std::nullopt;
        for (std::size_t i = 0; i < places; ++i) den *= 10;
        num = whole * den + frac;
    }
    if (at != text.size()) return std::nullopt;
    Rational r(num, den);
    return negative ? -r : r;
}

Rational fresh_between(const std::optional<Rational>& low,
                       const std::optional<Rational>& high) {
    if (low && high) {
        assert(*low < *high);
        return (*low + *high) / 2;
    }
    if (high) return *high - 1;
    if (low) return *low + 1;
    return Rational(1);
}

} // namespace rsld
