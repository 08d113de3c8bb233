#include "bifree/rational.hpp"

#include "bifree/error.hpp"

#include <algorithm>
#include <cctype>

namespace bifree {

namespace {

bool all_digits(std::string_view s)
{
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

}  // namespace

Rational parse_rational(std::string_view text)
{
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) throw ValidationError("empty rational literal");

    bool negative = false;
    std::string_view body = text;
    if (body.front() == '-' || body.front() == '+') {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }

    Rational result;
    if (auto slash = body.find('/'); slash != std::string_view::npos) {
        auto num = body.substr(0, slash);
        auto den = body.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) throw ValidationError("bad rational literal: " + std::string(text));
        mpz_class n{std::string(num)};
        mpz_class d{std::string(den)};
        if (d == 0) throw ValidationError("zero denominator: " + std::string(text));
        result = Rational(n, d);
    } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
        auto whole = body.substr(0, dot);
        auto frac = body.substr(dot + 1);
        if ((!whole.empty() && !all_digits(whole)) || !all_digits(frac))
            throw ValidationError("bad decimal literal: " + std::string(text));
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
        mpz_class digits(std::string(whole.empty() ? "0" : whole) + std::string(frac));
        result = Rational(digits, scale);
    } else {
        if (!all_digits(body)) throw ValidationError("bad rational literal: " + std::string(text));
        result = Rational(mpz_class(std::string(body)));
    }
    result.canonicalize();
    return negative ? Rational(-result) : result;
}

std::string to_string(const Rational& value)
{
    return value.get_str();
}

}  // namespace bifree
