#include "bifree/ncalg.hpp"

#include "bifree/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace bifree {

namespace {

constexpr std::string_view kTensorSign = "\xE2\x8A\x97";  // U+2297

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool looks_numeric(std::string_view s)
{
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isdigit(c) || c == '/' || c == '.';
    });
}

// Splits "a + b - c" into signed term bodies.
std::vector<std::pair<bool, std::string_view>> split_terms(std::string_view text)
{
    std::vector<std::pair<bool, std::string_view>> out;
    bool negative = false;
    std::size_t start = 0;
    auto flush = [&](std::size_t end) {
        auto body = trim(text.substr(start, end - start));
        if (!body.empty()) {
            out.emplace_back(negative, body);
        } else if (end != 0 && !out.empty()) {
            throw ValidationError("empty term in literal: " + std::string(text));
        }
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '+' || text[i] == '-') {
            flush(i);
            negative = text[i] == '-';
            start = i + 1;
        }
    }
    flush(text.size());
    return out;
}

// Parses "[coef*]word" into (coefficient, word).
std::pair<Rational, Word> parse_scaled_word(std::string_view body)
{
    if (auto star_pos = body.find('*'); star_pos != std::string_view::npos) {
        return {parse_rational(trim(body.substr(0, star_pos))), parse_word(body.substr(star_pos + 1))};
    }
    if (looks_numeric(body) && body != "1") return {parse_rational(body), Word{}};
    return {Rational(1), parse_word(body)};
}

std::string format_scaled(const Rational& magnitude, const std::string& word_text, bool word_is_unit)
{
    if (word_is_unit) return to_string(magnitude);
    if (magnitude == 1) return word_text;
    return to_string(magnitude) + "*" + word_text;
}

template <class Map, class Key>
void accumulate(Map& terms, Key&& key, const Rational& coeff)
{
    if (coeff == 0) return;
    auto [it, inserted] = terms.try_emplace(std::forward<Key>(key), coeff);
    if (inserted) {
        it->second.canonicalize();
    } else {
        it->second += coeff;
        if (it->second == 0) terms.erase(it);
    }
}

}  // namespace

// ---------------------------------------------------------------- Letter

std::string to_string(const Letter& letter)
{
    char head = 0;
    if (letter.is_variable()) {
        head = letter.side == Side::left ? 'X' : 'Y';
    } else {
        head = letter.side == Side::left ? 'x' : 'y';
    }
    return head + std::to_string(letter.index);
}

Letter parse_letter(std::string_view token)
{
    token = trim(token);
    if (token.size() < 2) throw ValidationError("bad letter token: '" + std::string(token) + "'");
    Letter l;
    switch (token.front()) {
    case 'X': l = Letter::X(0); break;
    case 'Y': l = Letter::Y(0); break;
    case 'x': l = Letter::left_symbol(0); break;
    case 'y': l = Letter::right_symbol(0); break;
    default: throw ValidationError("bad letter token: '" + std::string(token) + "'");
    }
    auto digits = token.substr(1);
    std::uint32_t index = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || index == 0)
        throw ValidationError("bad letter index: '" + std::string(token) + "'");
    l.index = index;
    return l;
}

// ---------------------------------------------------------------- Word

Word Word::slice(std::size_t first, std::size_t last) const
{
    return Word(std::vector<Letter>(letters_.begin() + static_cast<std::ptrdiff_t>(first),
                                     letters_.begin() + static_cast<std::ptrdiff_t>(last)));
}

Word Word::reversed() const
{
    return Word(std::vector<Letter>(letters_.rbegin(), letters_.rend()));
}

Word Word::side_part(Side side) const
{
    std::vector<Letter> out;
    std::copy_if(letters_.begin(), letters_.end(), std::back_inserter(out),
                 [side](const Letter& l) { return l.side == side; });
    return Word(std::move(out));
}

bool Word::is_one_sided(Side side) const
{
    return std::all_of(letters_.begin(), letters_.end(), [side](const Letter& l) { return l.side == side; });
}

Word operator*(const Word& a, const Word& b)
{
    std::vector<Letter> out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.letters_.begin(), a.letters_.end());
    out.insert(out.end(), b.letters_.begin(), b.letters_.end());
    return Word(std::move(out));
}

std::strong_ordering operator<=>(const Word& a, const Word& b)
{
    if (auto c = a.size() <=> b.size(); c != 0) return c;
    return std::lexicographical_compare_three_way(a.letters_.begin(), a.letters_.end(), b.letters_.begin(),
                                                  b.letters_.end());
}

std::string to_string(const Word& word)
{
    if (word.empty()) return "1";
    std::string out;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (i) out += ' ';
        out += to_string(word[i]);
    }
    return out;
}

Word parse_word(std::string_view text)
{
    text = trim(text);
    if (text.empty() || text == "1") return {};
    std::vector<Letter> letters;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i >= text.size()) break;
        std::size_t j = i + 1;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        letters.push_back(parse_letter(text.substr(i, j - i)));
        i = j;
    }
    return Word(std::move(letters));
}

// ---------------------------------------------------------------- mode

bool AlgebraMode::admits(const Letter& letter) const
{
    if (!letter.is_variable()) return true;
    return letter.side == Side::left ? letter.index <= left_arity : letter.index <= right_arity;
}

Word normal_form(const Word& word, const AlgebraMode& mode)
{
    if (!mode.is_bipartite()) return word;
    return word.side_part(Side::left) * word.side_part(Side::right);
}

// ---------------------------------------------------------------- NCPolynomial

NCPolynomial::NCPolynomial(const Word& word, Rational coeff)
{
    accumulate(terms_, word, coeff);
}

NCPolynomial NCPolynomial::scalar(Rational value)
{
    return NCPolynomial(Word{}, std::move(value));
}

std::size_t NCPolynomial::degree() const
{
    std::size_t d = 0;
    for (const auto& [w, c] : terms_) d = std::max(d, w.size());
    return d;
}

Rational NCPolynomial::coefficient(const Word& w) const
{
    auto it = terms_.find(w);
    return it == terms_.end() ? Rational(0) : it->second;
}

void NCPolynomial::add_term(const Word& w, const Rational& coeff)
{
    accumulate(terms_, w, coeff);
}

NCPolynomial& NCPolynomial::operator+=(const NCPolynomial& other)
{
    for (const auto& [w, c] : other.terms_) accumulate(terms_, w, c);
    return *this;
}

NCPolynomial& NCPolynomial::operator-=(const NCPolynomial& other)
{
    for (const auto& [w, c] : other.terms_) accumulate(terms_, w, Rational(-c));
    return *this;
}

NCPolynomial& NCPolynomial::operator*=(const Rational& scale)
{
    if (scale == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [w, c] : terms_) c *= scale;
    return *this;
}

NCPolynomial operator*(const NCPolynomial& a, const NCPolynomial& b)
{
    NCPolynomial out;
    for (const auto& [wa, ca] : a.terms_)
        for (const auto& [wb, cb] : b.terms_) accumulate(out.terms_, wa * wb, Rational(ca * cb));
    return out;
}

void check_arity(const NCPolynomial& p, const AlgebraMode& mode)
{
    for (const auto& [w, c] : p.terms())
        for (const auto& l : w)
            if (!mode.admits(l))
                throw ValidationError("arity mismatch: letter " + to_string(l) + " outside declared arities (" +
                                      std::to_string(mode.left_arity) + ", " + std::to_string(mode.right_arity) +
                                      ")");
}

NCPolynomial normalize(const NCPolynomial& p, const AlgebraMode& mode)
{
    if (!mode.is_bipartite()) return p;
    NCPolynomial out;
    for (const auto& [w, c] : p.terms()) out.add_term(normal_form(w, mode), c);
    return out;
}

NCPolynomial mul(const NCPolynomial& p, const NCPolynomial& q, const AlgebraMode& mode)
{
    check_arity(p, mode);
    check_arity(q, mode);
    return normalize(p * q, mode);
}

NCPolynomial star(const NCPolynomial& p)
{
    NCPolynomial out;
    for (const auto& [w, c] : p.terms()) out.add_term(w.reversed(), c);
    return out;
}

NCPolynomial star(const NCPolynomial& p, const AlgebraMode& mode)
{
    return normalize(star(p), mode);
}

std::string to_string(const NCPolynomial& p)
{
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [w, c] : p.terms()) {
        const bool negative = c < 0;
        if (first) {
            if (negative) out += '-';
        } else {
            out += negative ? " - " : " + ";
        }
        out += format_scaled(abs(c), to_string(w), w.empty());
        first = false;
    }
    return out;
}

NCPolynomial parse_polynomial(std::string_view text)
{
    text = trim(text);
    if (text.empty()) throw ValidationError("empty polynomial literal");
    NCPolynomial out;
    if (text == "0") return out;
    for (const auto& [negative, body] : split_terms(text)) {
        auto [coeff, word] = parse_scaled_word(body);
        out.add_term(word, negative ? Rational(-coeff) : coeff);
    }
    return out;
}

// ---------------------------------------------------------------- TensorPoly

TensorPoly::TensorPoly(const Word& first, const Word& second, Rational coeff)
{
    accumulate(terms_, Key{first, second}, coeff);
}

TensorPoly TensorPoly::elementary(const NCPolynomial& a, const NCPolynomial& b)
{
    TensorPoly out;
    for (const auto& [wa, ca] : a.terms())
        for (const auto& [wb, cb] : b.terms()) out.add_term(wa, wb, ca * cb);
    return out;
}

Rational TensorPoly::coefficient(const Word& first, const Word& second) const
{
    auto it = terms_.find(Key{first, second});
    return it == terms_.end() ? Rational(0) : it->second;
}

void TensorPoly::add_term(const Word& first, const Word& second, const Rational& coeff)
{
    accumulate(terms_, Key{first, second}, coeff);
}

TensorPoly& TensorPoly::operator+=(const TensorPoly& other)
{
    for (const auto& [k, c] : other.terms_) accumulate(terms_, k, c);
    return *this;
}

TensorPoly& TensorPoly::operator-=(const TensorPoly& other)
{
    for (const auto& [k, c] : other.terms_) accumulate(terms_, k, Rational(-c));
    return *this;
}

TensorPoly& TensorPoly::operator*=(const Rational& scale)
{
    if (scale == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [k, c] : terms_) c *= scale;
    return *this;
}

void check_arity(const TensorPoly& t, const AlgebraMode& mode)
{
    for (const auto& [k, c] : t.terms()) {
        check_arity(NCPolynomial(k.first), mode);
        check_arity(NCPolynomial(k.second), mode);
    }
}

TensorPoly normalize(const TensorPoly& t, const AlgebraMode& mode)
{
    if (!mode.is_bipartite()) return t;
    TensorPoly out;
    for (const auto& [k, c] : t.terms()) out.add_term(normal_form(k.first, mode), normal_form(k.second, mode), c);
    return out;
}

TensorPoly tensor_mul(const TensorPoly& s, const TensorPoly& t, TensorConvention convention, const AlgebraMode& mode)
{
    check_arity(s, mode);
    check_arity(t, mode);
    TensorPoly out;
    for (const auto& [ks, cs] : s.terms()) {
        for (const auto& [kt, ct] : t.terms()) {
            Word first = ks.first * kt.first;
            Word second = convention == TensorConvention::straight ? ks.second * kt.second : kt.second * ks.second;
            out.add_term(first, second, cs * ct);
        }
    }
    return normalize(out, mode);
}

TensorPoly tensor_star(const TensorPoly& t)
{
    TensorPoly out;
    for (const auto& [k, c] : t.terms()) out.add_term(k.second.reversed(), k.first.reversed(), c);
    return out;
}

TensorPoly componentwise_star(const TensorPoly& t)
{
    TensorPoly out;
    for (const auto& [k, c] : t.terms()) out.add_term(k.first.reversed(), k.second.reversed(), c);
    return out;
}

TensorPoly bimodule_act(const NCPolynomial& a, const TensorPoly& t, const NCPolynomial& b)
{
    TensorPoly out;
    for (const auto& [wa, ca] : a.terms())
        for (const auto& [k, c] : t.terms())
            for (const auto& [wb, cb] : b.terms()) out.add_term(wa * k.first, k.second * wb, ca * c * cb);
    return out;
}

TensorPoly swap_legs(const TensorPoly& t)
{
    TensorPoly out;
    for (const auto& [k, c] : t.terms()) out.add_term(k.second, k.first, c);
    return out;
}

NCPolynomial contract(const TensorPoly& t)
{
    NCPolynomial out;
    for (const auto& [k, c] : t.terms()) out.add_term(k.first * k.second, c);
    return out;
}

std::string to_string(const TensorPoly& t)
{
    if (t.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [k, c] : t.terms()) {
        const bool negative = c < 0;
        if (first) {
            if (negative) out += '-';
        } else {
            out += negative ? " - " : " + ";
        }
        const Rational magnitude = abs(c);
        if (magnitude != 1) out += to_string(magnitude) + "*";
        out += to_string(k.first);
        out += " ";
        out += kTensorSign;
        out += " ";
        out += to_string(k.second);
        first = false;
    }
    return out;
}

TensorPoly parse_tensor(std::string_view text)
{
    text = trim(text);
    if (text.empty()) throw ValidationError("empty tensor literal");
    TensorPoly out;
    if (text == "0") return out;
    for (const auto& [negative, body] : split_terms(text)) {
        std::size_t sep = body.find(kTensorSign);
        std::size_t sep_len = kTensorSign.size();
        if (sep == std::string_view::npos) {
            sep = body.find("(x)");
            sep_len = 3;
        }
        if (sep == std::string_view::npos)
            throw ValidationError("tensor term without separator: '" + std::string(body) + "'");
        auto [coeff, first] = parse_scaled_word(trim(body.substr(0, sep)));
        Word second = parse_word(body.substr(sep + sep_len));
        out.add_term(first, second, negative ? Rational(-coeff) : coeff);
    }
    return out;
}

}  // namespace bifree
