#include "tmas/rational.hpp"

#include "tmas/error.hpp"

#include <cctype>
#include <charconv>

namespace tmas {

namespace {

std::int64_t parse_int(std::string_view digits, std::string_view whole)
{
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) {
        fail(ErrorCode::SyntaxError, "not a rational number: '" + std::string(whole) + "'");
    }
    return value;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

Rational parse_rational(std::string_view text)
{
    std::string_view s = trim(text);
    bool negative = false;
    std::string_view body = s;
    if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }
    Rational result;
    if (auto slash = body.find('/'); slash != std::string_view::npos) {
        std::int64_t num = parse_int(body.substr(0, slash), s);
        std::int64_t den = parse_int(body.substr(slash + 1), s);
        if (den == 0) fail(ErrorCode::SyntaxError, "zero denominator in '" + std::string(s) + "'");
        result = Rational(num, den);
    } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
        std::string_view ip = body.substr(0, dot);
        std::string_view fp = body.substr(dot + 1);
        if (fp.size() > 17) fail(ErrorCode::SyntaxError, "too many decimals in '" + std::string(s) + "'");
        std::int64_t whole = ip.empty() ? 0 : parse_int(ip, s);
        std::int64_t frac = fp.empty() ? 0 : parse_int(fp, s);
        if (ip.empty() && fp.empty()) fail(ErrorCode::SyntaxError, "not a rational number: '" + std::string(s) + "'");
        std::int64_t scale = 1;
        for (std::size_t k = 0; k < fp.size(); ++k) scale *= 10;
        result = Rational(whole) + Rational(frac, scale);
    } else {
        result = Rational(parse_int(body, s));
    }
    return negative ? -result : result;
}

std::string to_fraction_string(const Rational& r)
{
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

std::string to_decimal_string(const Rational& r)
{
    std::int64_t den = r.denominator();
    int twos = 0;
    int fives = 0;
    while (den % 2 == 0) { den /= 2; ++twos; }
    while (den % 5 == 0) { den /= 5; ++fives; }
    if (den != 1) return to_fraction_string(r);
    int digits = std::max(twos, fives);
    std::int64_t scale = 1;
    for (int k = 0; k < digits; ++k) scale *= 10;
    Rational scaled = r * Rational(scale);
    std::int64_t n = scaled.numerator();
    bool negative = n < 0;
    std::string mag = std::to_string(negative ? -n : n);
    if (digits > 0) {
        if (static_cast<int>(mag.size()) <= digits) mag.insert(0, digits - mag.size() + 1, '0');
        mag.insert(mag.size() - digits, ".");
    }
    return negative ? "-" + mag : mag;
}

double to_double(const Rational& r)
{
    return boost::rational_cast<double>(r);
}

}  // namespace tmas
