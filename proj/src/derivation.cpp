#include "bifree/derivation.hpp"

#include "bifree/error.hpp"

#include <string>

namespace bifree {

namespace {

void check_kind(const QuotientKind& kind, const AlgebraMode& mode)
{
    const std::uint32_t bound = kind.side == Side::left ? mode.left_arity : mode.right_arity;
    if (kind.index == 0 || kind.index > bound)
        throw ValidationError("quotient target index " + std::to_string(kind.index) + " outside declared arity");
}

void add_word_dq(TensorPoly& out, const Word& w, const Rational& c, const QuotientKind& kind)
{
    const Letter target = kind.target();
    const Side same = kind.side;
    const Side other = opposite(kind.side);
    for (std::size_t q = 0; q < w.size(); ++q) {
        if (w[q] != target) continue;
        const Word before = w.slice(0, q);
        const Word after = w.slice(q + 1, w.size());
        if (!kind.flipped)
            out.add_term(before * after.side_part(other), after.side_part(same), c);
        else
            out.add_term(before.side_part(same), before.side_part(other) * after, c);
    }
}

TensorPoly straight(const TensorPoly& s, const TensorPoly& t, const AlgebraMode& mode)
{
    return tensor_mul(s, t, TensorConvention::straight, mode);
}

}  // namespace

TensorPoly free_dq(const NCPolynomial& p, const Letter& letter, const AlgebraMode& mode)
{
    if (!letter.is_variable() || !mode.admits(letter))
        throw ValidationError("unknown letter for difference quotient: " + to_string(letter));
    check_arity(p, mode);
    TensorPoly out;
    for (const auto& [w, c] : p.terms()) {
        if (mode.is_bipartite() && !w.is_one_sided(Side::left) && !w.is_one_sided(Side::right))
            throw ValidationError("free difference quotient of a mixed word is not defined in bipartite mode: " +
                                  to_string(w));
        for (std::size_t q = 0; q < w.size(); ++q)
            if (w[q] == letter) out.add_term(w.slice(0, q), w.slice(q + 1, w.size()), c);
    }
    return out;
}

TensorPoly bifree_dq(const NCPolynomial& p, const QuotientKind& kind, const AlgebraMode& mode)
{
    check_kind(kind, mode);
    check_arity(p, mode);
    TensorPoly out;
    const NCPolynomial source = normalize(p, mode);
    for (const auto& [w, c] : source.terms()) add_word_dq(out, w, c, kind);
    return normalize(out, mode);
}

TensorPoly scalar_identity_residual(const NCPolynomial& p, const AlgebraMode& mode)
{
    if (!mode.is_bipartite()) throw ValidationError("scalar identity requires bipartite mode");
    for (const auto& [w, c] : p.terms())
        for (const auto& l : w)
            if (!l.is_variable()) throw ValidationError("scalar identity is stated for polynomials in the variables only");
    check_arity(p, mode);

    TensorPoly left_sum;
    for (std::uint32_t i = 1; i <= mode.left_arity; ++i) {
        const TensorPoly d = bifree_dq(p, QuotientKind::left(i), mode);
        const TensorPoly x(Word{Letter::X(i)}, Word{});
        const TensorPoly one_x(Word{}, Word{Letter::X(i)});
        left_sum += straight(d, x, mode) - straight(one_x, d, mode);
    }
    TensorPoly right_sum;
    for (std::uint32_t j = 1; j <= mode.right_arity; ++j) {
        const TensorPoly d = bifree_dq(p, QuotientKind::right(j), mode);
        const TensorPoly y(Word{Letter::Y(j)}, Word{});
        const TensorPoly one_y(Word{}, Word{Letter::Y(j)});
        right_sum += straight(d, y, mode) - straight(one_y, d, mode);
    }
    const NCPolynomial pn = normalize(p, mode);
    const TensorPoly rhs = TensorPoly::elementary(pn, NCPolynomial::scalar(1)) -
                           TensorPoly::elementary(NCPolynomial::scalar(1), pn);
    return left_sum - swap_legs(right_sum) - rhs;
}

ConjugateReport conjugate_check(const MomentFunctional& phi, const QuotientKind& kind, const NCPolynomial& xi,
                                std::size_t max_degree)
{
    if (kind.flipped) throw ValidationError("conjugate_check takes a non-flipped quotient");
    const AlgebraMode& mode = phi.mode();
    check_kind(kind, mode);
    check_arity(xi, mode);
    if (max_degree + xi.degree() > phi.degree_bound())
        throw ValidationError("degree bound exceeded: max degree " + std::to_string(max_degree) + " plus deg(xi) " +
                              std::to_string(xi.degree()) + " > " + std::to_string(phi.degree_bound()));

    std::vector<Letter> alphabet;
    for (std::uint32_t i = 1; i <= mode.left_arity; ++i) alphabet.push_back(Letter::X(i));
    for (std::uint32_t j = 1; j <= mode.right_arity; ++j) alphabet.push_back(Letter::Y(j));

    ConjugateReport report;
    report.max_degree = max_degree;
    std::vector<Word> layer{Word{}};
    for (std::size_t degree = 0; degree <= max_degree; ++degree) {
        for (const auto& z : layer) {
            const NCPolynomial zp(z);
            ConjugateCheckItem item;
            item.word = z;
            item.lhs = phi(mul(zp, xi, mode));
            item.rhs = phi(bifree_dq(zp, kind, mode));
            item.pass = item.lhs == item.rhs;
            if (!item.pass && !report.first_failure) report.first_failure = item;
            report.items.push_back(std::move(item));
        }
        if (degree == max_degree) break;
        std::vector<Word> next;
        next.reserve(layer.size() * alphabet.size());
        for (const auto& z : layer)
            for (const auto& l : alphabet) {
                Word w = z;
                w.push_back(l);
                next.push_back(std::move(w));
            }
        layer = std::move(next);
    }
    return report;
}

Rational inner(const MomentFunctional& phi, const NCPolynomial& a, const NCPolynomial& b)
{
    return phi(mul(star(b), a, phi.mode()));
}

Rational inner(const MomentFunctional& phi, const TensorPoly& s, const TensorPoly& t)
{
    const AlgebraMode& mode = phi.mode();
    Rational total = 0;
    for (const auto& [ks, cs] : s.terms())
        for (const auto& [kt, ct] : t.terms()) {
            Rational first = phi(mul(star(NCPolynomial(kt.first)), NCPolynomial(ks.first), mode));
            if (first == 0) continue;
            total += cs * ct * first * phi(mul(star(NCPolynomial(kt.second)), NCPolynomial(ks.second), mode));
        }
    return total;
}

NCPolynomial phi_tensor_id(const MomentFunctional& phi, const TensorPoly& t)
{
    NCPolynomial out;
    for (const auto& [key, c] : t.terms()) {
        Rational v = phi(key.first);
        if (v != 0) out.add_term(key.second, c * v);
    }
    return out;
}

namespace {

struct Adjoint {
    const MomentFunctional& phi;
    const NCPolynomial& xi;
    QuotientKind kind;
    PeelOrder order;
    const AlgebraMode& mode;

    // (phi (x) id)(dhat(C*)^* (A' (x) B)).
    NCPolynomial correction(const Word& c, const Word& a_rest, const Word& b)
    {
        const TensorPoly d = componentwise_star(bifree_dq(star(NCPolynomial(c)), kind, mode));
        return phi_tensor_id(phi, straight(d, TensorPoly(a_rest, b), mode));
    }

    NCPolynomial left_mul(const Word& c, const NCPolynomial& p) { return mul(NCPolynomial(c), p, mode); }

    NCPolynomial apply(const Word& a, const Word& b)
    {
        if (a.empty() && b.empty()) return normalize(xi, mode);
        switch (order) {
        case PeelOrder::whole_left_factor:
            if (!a.empty()) return left_mul(a, apply(Word{}, b)) - correction(a, Word{}, b);
            return left_mul(b, apply(Word{}, Word{}));
        case PeelOrder::letter_by_letter:
            if (!a.empty()) {
                const Word c = a.slice(0, 1);
                const Word rest = a.slice(1, a.size());
                return left_mul(c, apply(rest, b)) - correction(c, rest, b);
            }
            return left_mul(b.slice(0, 1), apply(Word{}, b.slice(1, b.size())));
        case PeelOrder::right_first:
            if (!b.empty()) return left_mul(b, apply(a, Word{}));
            return left_mul(a, apply(Word{}, Word{})) - correction(a, Word{}, Word{});
        }
        return {};
    }
};

}  // namespace

NCPolynomial adjoint_apply(const MomentFunctional& phi, const NCPolynomial& xi, const TensorPoly& eta,
                           const QuotientKind& kind, PeelOrder order)
{
    if (!kind.flipped) throw ValidationError("adjoint_apply takes a flipped quotient");
    const AlgebraMode& mode = phi.mode();
    check_kind(kind, mode);
    check_arity(xi, mode);
    check_arity(eta, mode);
    const Side same = kind.side;
    const Side other = opposite(kind.side);
    Adjoint adj{phi, xi, kind, order, mode};
    NCPolynomial out;
    for (const auto& [key, c] : eta.terms()) {
        if (!key.first.is_one_sided(same) || !key.second.is_one_sided(other))
            throw ValidationError("tensor term " + to_string(key.first) + " ⊗ " + to_string(key.second) +
                                  " lies outside the reachable domain of the adjoint");
        out += adj.apply(key.first, key.second) * c;
    }
    return out;
}

}  // namespace bifree
