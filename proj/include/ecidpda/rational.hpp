#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ecidpda {

// Exact rational number used for timestamps, clock values and constraint bounds.
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

namespace detail {

inline std::string_view trim(std::string_view text)
{
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
        text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
        text.remove_suffix(1);
    return text;
}

inline bool all_digits(std::string_view text)
{
    if (text.empty())
        return false;
    for (char ch : text)
        if (!std::isdigit(static_cast<unsigned char>(ch)))
            return false;
    return true;
}

// cpp_int reads a leading 0 as an octal prefix
inline Integer decimal_integer(std::string_view digits)
{
    const auto first = digits.find_first_not_of('0');
    return first == std::string_view::npos ? Integer(0) : Integer(std::string{digits.substr(first)});
}

} // namespace detail

// Parses a nonnegative rational written as "3", "0.6", ".5" or "p/q".
inline Rational parse_rational(std::string_view text)
{
    const std::string_view body = detail::trim(text);
    if (const auto slash = body.find('/'); slash != std::string_view::npos) {
        const auto num = detail::trim(body.substr(0, slash));
        const auto den = detail::trim(body.substr(slash + 1));
        if (!detail::all_digits(num) || !detail::all_digits(den))
            throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
        const Integer denominator = detail::decimal_integer(den);
        if (denominator == 0)
            throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
        return Rational(detail::decimal_integer(num), denominator);
    }

    const auto dot = body.find('.');
    const std::string_view whole = dot == std::string_view::npos ? body : body.substr(0, dot);
    const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : body.substr(dot + 1);
    if ((whole.empty() && frac.empty()) || (!whole.empty() && !detail::all_digits(whole))
        || (!frac.empty() && !detail::all_digits(frac)))
        throw std::invalid_argument("malformed rational '" + std::string(text) + "'");

    std::string digits{whole};
    digits += frac;
    Integer denominator = 1;
    for (std::size_t i = 0; i < frac.size(); ++i)
        denominator *= 10;
    return Rational(detail::decimal_integer(digits), denominator);
}

// Decimal when the denominator divides a power of ten, "p/q" otherwise.
inline std::string format_rational(const Rational& value)
{
    Integer num = boost::multiprecision::numerator(value);
    const Integer den = boost::multiprecision::denominator(value);
    if (den == 1)
        return num.str();

    Integer rest = den;
    unsigned twos = 0;
    unsigned fives = 0;
    while (rest % 2 == 0) {
        rest /= 2;
        ++twos;
    }
    while (rest % 5 == 0) {
        rest /= 5;
        ++fives;
    }
    if (rest != 1)
        return num.str() + "/" + den.str();

    const unsigned places = twos > fives ? twos : fives;
    Integer scale = 1;
    for (unsigned i = 0; i < places; ++i)
        scale *= 10;
    const bool negative = num < 0;
    if (negative)
        num = -num;
    const Integer scaled = num * (scale / den);
    std::string digits = scaled.str();
    if (digits.size() <= places)
        digits.insert(0, places - digits.size() + 1, '0');
    digits.insert(digits.size() - places, ".");
    return negative ? "-" + digits : digits;
}

} // namespace ecidpda
