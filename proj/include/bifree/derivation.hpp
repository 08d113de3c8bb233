#pragma once

// Free and bi-free difference quotients, the conjugate-variable moment test
// and the adjoint recursion for the flipped quotients.

#include "bifree/cumulant.hpp"
#include "bifree/ncalg.hpp"

#include <optional>
#include <vector>

namespace bifree {

struct QuotientKind {
    Side side = Side::left;
    bool flipped = false;
    std::uint32_t index = 1;

    static QuotientKind left(std::uint32_t i) { return {Side::left, false, i}; }
    static QuotientKind right(std::uint32_t j) { return {Side::right, false, j}; }
    static QuotientKind flipped_left(std::uint32_t i) { return {Side::left, true, i}; }
    static QuotientKind flipped_right(std::uint32_t j) { return {Side::right, true, j}; }

    Letter target() const { return side == Side::left ? Letter::X(index) : Letter::Y(index); }
};

/// Sum over occurrences of `letter` of (prefix (x) suffix). In bipartite mode
/// every word of `p` must be one-sided.
TensorPoly free_dq(const NCPolynomial& p, const Letter& letter, const AlgebraMode& mode);

/// Left:          sum_q w_<q R(w_>q) (x) L(w_>q)
/// Right:         sum_q w_<q L(w_>q) (x) R(w_>q)
/// Flipped left:  sum_q L(w_<q) (x) R(w_<q) w_>q
/// Flipped right: sum_q R(w_<q) (x) L(w_<q) w_>q
/// where q runs over occurrences of the target letter, L and R keep the left
/// and right letters of a word. Outputs are normalized in bipartite mode.
TensorPoly bifree_dq(const NCPolynomial& p, const QuotientKind& kind, const AlgebraMode& mode);

/// sum_i [d_l,Xi(P)(Xi (x) 1) - (1 (x) Xi) d_l,Xi(P)]
///   - Theta_(1,2)(sum_j [d_r,Yj(P)(Yj (x) 1) - (1 (x) Yj) d_r,Yj(P)])
///   - (P (x) 1 - 1 (x) P), straight multiplication, bipartite mode.
TensorPoly scalar_identity_residual(const NCPolynomial& p, const AlgebraMode& mode);

struct ConjugateCheckItem {
    Word word;
    Rational lhs;   // phi(Z xi)
    Rational rhs;   // (phi (x) phi)(d(Z))
    bool pass = false;
};

struct ConjugateReport {
    std::size_t max_degree = 0;
    std::vector<ConjugateCheckItem> items;
    std::optional<ConjugateCheckItem> first_failure;
    bool passed() const { return !first_failure.has_value(); }
};

/// Compares phi(Z xi) with (phi (x) phi)(d(Z)) for every word Z over the
/// declared variables of degree <= max_degree, in degree-lex order.
ConjugateReport conjugate_check(const MomentFunctional& phi, const QuotientKind& kind, const NCPolynomial& xi,
                                std::size_t max_degree);

/// <a, b>_phi = phi(b* a).
Rational inner(const MomentFunctional& phi, const NCPolynomial& a, const NCPolynomial& b);
/// <a (x) b, c (x) d> = phi(c* a) phi(d* b), extended bilinearly.
Rational inner(const MomentFunctional& phi, const TensorPoly& s, const TensorPoly& t);

/// (phi (x) id)(t).
NCPolynomial phi_tensor_id(const MomentFunctional& phi, const TensorPoly& t);

enum class PeelOrder {
    whole_left_factor,   // A (x) B = (A (x) 1)(1 (x) B)
    letter_by_letter,    // one letter of A, then of B
    right_first,         // A (x) B = (1 (x) B)(A (x) 1)
};

/// The flipped adjoint applied to eta, given xi = adjoint(1 (x) 1), by
/// recursing on
///   adj((C (x) 1) eta) = C adj(eta) - (phi (x) id)(dhat(C*)^* eta)
///   adj((1 (x) D) eta) = D adj(eta)
/// Every term of eta must lie in (kind side) (x) (opposite side); anything
/// else is rejected with ValidationError.
NCPolynomial adjoint_apply(const MomentFunctional& phi, const NCPolynomial& xi, const TensorPoly& eta,
                           const QuotientKind& kind, PeelOrder order = PeelOrder::whole_left_factor);

}  // namespace bifree
