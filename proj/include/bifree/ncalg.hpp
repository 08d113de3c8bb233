#pragma once

// Exact noncommutative polynomials in left letters X1..Xn, right letters
// Y1..Ym and opaque subalgebra symbols (x1, x2, ... on the left, y1, y2, ...
// on the right), together with the tensor-square A (x) A.

#include "bifree/rational.hpp"

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bifree {

enum class Side : std::uint8_t { left, right };

enum class LetterKind : std::uint8_t { variable, symbol };

constexpr Side opposite(Side s) { return s == Side::left ? Side::right : Side::left; }

struct Letter {
    Side side = Side::left;
    std::uint32_t index = 1;
    LetterKind kind = LetterKind::variable;

    static constexpr Letter X(std::uint32_t i) { return {Side::left, i, LetterKind::variable}; }
    static constexpr Letter Y(std::uint32_t j) { return {Side::right, j, LetterKind::variable}; }
    static constexpr Letter left_symbol(std::uint32_t i) { return {Side::left, i, LetterKind::symbol}; }
    static constexpr Letter right_symbol(std::uint32_t j) { return {Side::right, j, LetterKind::symbol}; }

    constexpr bool is_variable() const { return kind == LetterKind::variable; }

    // (side, index) first; kind only breaks ties between Xi and xi.
    friend constexpr auto operator<=>(const Letter&, const Letter&) = default;
};

/// Token form: X3, Y1 for variables; x3, y1 for subalgebra symbols.
std::string to_string(const Letter& letter);
Letter parse_letter(std::string_view token);

/// A monomial. The empty word is the unit.
class Word {
public:
    Word() = default;
    Word(std::initializer_list<Letter> letters) : letters_(letters) {}
    explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}

    std::size_t size() const { return letters_.size(); }
    bool empty() const { return letters_.empty(); }
    const Letter& operator[](std::size_t i) const { return letters_[i]; }
    std::span<const Letter> letters() const { return letters_; }
    auto begin() const { return letters_.begin(); }
    auto end() const { return letters_.end(); }

    /// Letters in [first, last).
    Word slice(std::size_t first, std::size_t last) const;
    Word reversed() const;
    /// Subsequence of letters lying on `side`, relative order kept.
    Word side_part(Side side) const;
    bool is_one_sided(Side side) const;

    void push_back(Letter l) { letters_.push_back(l); }

    friend Word operator*(const Word& a, const Word& b);

    // Degree first, then lexicographic on letters.
    friend std::strong_ordering operator<=>(const Word& a, const Word& b);
    friend bool operator==(const Word& a, const Word& b) = default;

private:
    std::vector<Letter> letters_;
};

std::string to_string(const Word& word);
/// Whitespace-separated letter tokens; "1" or "" is the unit.
Word parse_word(std::string_view text);

struct AlgebraMode {
    enum class Kind : std::uint8_t { free, bipartite };

    Kind kind = Kind::free;
    std::uint32_t left_arity = 1;
    std::uint32_t right_arity = 1;

    static AlgebraMode free_mode(std::uint32_t n, std::uint32_t m) { return {Kind::free, n, m}; }
    static AlgebraMode bipartite(std::uint32_t n, std::uint32_t m) { return {Kind::bipartite, n, m}; }

    bool is_bipartite() const { return kind == Kind::bipartite; }
    /// Variables must respect the declared arities; symbols are unconstrained.
    bool admits(const Letter& letter) const;

    friend bool operator==(const AlgebraMode&, const AlgebraMode&) = default;
};

/// Left letters first, then right letters, each side in original order.
Word normal_form(const Word& word, const AlgebraMode& mode);

class NCPolynomial {
public:
    using TermMap = std::map<Word, Rational>;

    NCPolynomial() = default;
    NCPolynomial(const Word& word, Rational coeff = 1);
    static NCPolynomial scalar(Rational value);
    static NCPolynomial letter(Letter l) { return NCPolynomial(Word{l}); }

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t degree() const;
    Rational coefficient(const Word& w) const;

    void add_term(const Word& w, const Rational& coeff);

    NCPolynomial& operator+=(const NCPolynomial& other);
    NCPolynomial& operator-=(const NCPolynomial& other);
    NCPolynomial& operator*=(const Rational& scale);

    friend NCPolynomial operator+(NCPolynomial a, const NCPolynomial& b) { return a += b; }
    friend NCPolynomial operator-(NCPolynomial a, const NCPolynomial& b) { return a -= b; }
    friend NCPolynomial operator-(NCPolynomial a) { return a *= Rational(-1); }
    friend NCPolynomial operator*(NCPolynomial a, const Rational& s) { return a *= s; }
    friend NCPolynomial operator*(const Rational& s, NCPolynomial a) { return a *= s; }
    /// Raw concatenation product; use `mul` to respect an algebra mode.
    friend NCPolynomial operator*(const NCPolynomial& a, const NCPolynomial& b);

    friend bool operator==(const NCPolynomial&, const NCPolynomial&) = default;

private:
    TermMap terms_;
};

/// Throws ValidationError when a variable of `p` exceeds the mode's arities.
void check_arity(const NCPolynomial& p, const AlgebraMode& mode);

NCPolynomial normalize(const NCPolynomial& p, const AlgebraMode& mode);
NCPolynomial mul(const NCPolynomial& p, const NCPolynomial& q, const AlgebraMode& mode);
/// Reverses every word; letters are self-adjoint and coefficients real.
NCPolynomial star(const NCPolynomial& p);
NCPolynomial star(const NCPolynomial& p, const AlgebraMode& mode);

std::string to_string(const NCPolynomial& p);
/// Terms joined by + or -, each `[coef*]word`, e.g. "3/4*X1 Y2 - X1 + 2".
NCPolynomial parse_polynomial(std::string_view text);

/// Multiplication convention on A (x) A.
enum class TensorConvention : std::uint8_t {
    straight,              // (a (x) b)(c (x) d) = ac (x) bd
    opposite_second_leg,   // (a (x) b)(c (x) d) = ac (x) db
};

class TensorPoly {
public:
    using Key = std::pair<Word, Word>;
    using TermMap = std::map<Key, Rational>;

    TensorPoly() = default;
    TensorPoly(const Word& first, const Word& second, Rational coeff = 1);
    static TensorPoly elementary(const NCPolynomial& a, const NCPolynomial& b);
    static TensorPoly unit() { return TensorPoly(Word{}, Word{}); }

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    Rational coefficient(const Word& first, const Word& second) const;

    void add_term(const Word& first, const Word& second, const Rational& coeff);

    TensorPoly& operator+=(const TensorPoly& other);
    TensorPoly& operator-=(const TensorPoly& other);
    TensorPoly& operator*=(const Rational& scale);

    friend TensorPoly operator+(TensorPoly a, const TensorPoly& b) { return a += b; }
    friend TensorPoly operator-(TensorPoly a, const TensorPoly& b) { return a -= b; }
    friend TensorPoly operator*(TensorPoly a, const Rational& s) { return a *= s; }
    friend TensorPoly operator*(const Rational& s, TensorPoly a) { return a *= s; }

    friend bool operator==(const TensorPoly&, const TensorPoly&) = default;

private:
    TermMap terms_;
};

void check_arity(const TensorPoly& t, const AlgebraMode& mode);
TensorPoly normalize(const TensorPoly& t, const AlgebraMode& mode);

TensorPoly tensor_mul(const TensorPoly& s, const TensorPoly& t, TensorConvention convention,
                      const AlgebraMode& mode);
/// (A (x) B)^star = B* (x) A*.
TensorPoly tensor_star(const TensorPoly& t);
/// Canonical involution of the tensor product: (A (x) B)* = A* (x) B*.
TensorPoly componentwise_star(const TensorPoly& t);
/// Bimodule action a (P (x) Q) b = aP (x) Qb.
TensorPoly bimodule_act(const NCPolynomial& a, const TensorPoly& t, const NCPolynomial& b);
/// Theta_(1,2): P (x) Q -> Q (x) P.
TensorPoly swap_legs(const TensorPoly& t);
/// C(P (x) Q) = PQ.
NCPolynomial contract(const TensorPoly& t);

std::string to_string(const TensorPoly& t);
/// Terms `[coef*]word ⊗ word` joined by + or -; "(x)" is accepted for ⊗.
TensorPoly parse_tensor(std::string_view text);

}  // namespace bifree
