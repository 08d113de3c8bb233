#include "doctest.h"

#include "bifree/derivation.hpp"
#include "bifree/error.hpp"
#include "support/oracles.hpp"
#include "support/triple.hpp"

using namespace bifree;

namespace {

NCPolynomial P(const char* text) { return parse_polynomial(text); }
TensorPoly T(const char* text) { return parse_tensor(text); }

CumulantSpec gaussian_pair(const Rational& c)
{
    const Letter S = Letter::X(1), Tl = Letter::Y(1);
    CumulantSpec spec(1, 1);
    spec.set(Word{S, S}, 1);
    spec.set(Word{Tl, Tl}, 1);
    spec.set(Word{S, Tl}, c);
    spec.set(Word{Tl, S}, c);
    return spec;
}

NCPolynomial conjugate_for(const Rational& c)
{
    NCPolynomial xi = P("X1") - P("Y1") * c;
    return xi * Rational(1 / (1 - c * c));
}

}  // namespace

TEST_CASE("free difference quotient")
{
    auto fr = AlgebraMode::free_mode(1, 1);
    CHECK(free_dq(P("X1"), Letter::X(1), fr) == TensorPoly::unit());
    CHECK(free_dq(P("X1 X1"), Letter::X(1), fr) == T("1 ⊗ X1 + X1 ⊗ 1"));
    CHECK(free_dq(P("x1 X1 x2"), Letter::X(1), fr) == T("x1 ⊗ x2"));
    CHECK(free_dq(P("x1"), Letter::X(1), fr).is_zero());
    CHECK_THROWS_AS(free_dq(P("X1"), Letter::X(2), fr), ValidationError);
    CHECK_THROWS_AS(free_dq(P("X1 Y1"), Letter::X(1), AlgebraMode::bipartite(1, 1)), ValidationError);
    CHECK(free_dq(P("X1 X1"), Letter::X(1), AlgebraMode::bipartite(1, 1)) == T("1 ⊗ X1 + X1 ⊗ 1"));
}

TEST_CASE("worked examples of the bi-free quotients")
{
    auto fr = AlgebraMode::free_mode(1, 1);
    auto w1 = P("y1 X1 y1 x1 y2 X1 y3 y1 x2");
    auto w2 = P("Y1 x1 Y1 x2 y1 x1 y2 Y1 x3");
    CHECK(to_string(bifree_dq(w1, QuotientKind::left(1), fr)) ==
          "y1 y1 y2 y3 y1 ⊗ x1 X1 x2 + y1 X1 y1 x1 y2 y3 y1 ⊗ x2");
    CHECK(to_string(bifree_dq(w2, QuotientKind::right(1), fr)) ==
          "x1 x2 x1 x3 ⊗ Y1 y1 y2 Y1 + Y1 x1 x2 x1 x3 ⊗ y1 y2 Y1 + Y1 x1 Y1 x2 y1 x1 y2 x3 ⊗ 1");
    CHECK(to_string(bifree_dq(w1, QuotientKind::flipped_left(1), fr)) ==
          "1 ⊗ y1 y1 x1 y2 X1 y3 y1 x2 + X1 x1 ⊗ y1 y1 y2 y3 y1 x2");
    CHECK(to_string(bifree_dq(w2, QuotientKind::flipped_right(1), fr)) ==
          "1 ⊗ x1 Y1 x2 y1 x1 y2 Y1 x3 + Y1 ⊗ x1 x2 y1 x1 y2 Y1 x3 + Y1 Y1 y1 y2 ⊗ x1 x2 x1 x3");
    auto bip = AlgebraMode::bipartite(1, 1);
    CHECK(to_string(bifree_dq(P("X1 X1 Y1"), QuotientKind::left(1), bip)) == "Y1 ⊗ X1 + X1 Y1 ⊗ 1");
    CHECK_THROWS_AS(bifree_dq(P("X1"), QuotientKind::left(2), bip), ValidationError);
}

TEST_CASE("left quotient output has a pure-left second leg")
{
    auto fr = AlgebraMode::free_mode(2, 2);
    testsupport::RandomAlgebra gen(31, 2, 2, true);
    for (int i = 0; i < 200; ++i) {
        const auto dl = bifree_dq(gen.poly(3, 6), QuotientKind::left(1), fr);
        for (const auto& [key, c] : dl.terms()) CHECK(key.second.is_one_sided(Side::left));
        const auto dr = bifree_dq(gen.poly(3, 6), QuotientKind::right(2), fr);
        for (const auto& [key, c] : dr.terms()) CHECK(key.second.is_one_sided(Side::right));
    }
}

TEST_CASE("scalar identity residual")
{
    auto bip = AlgebraMode::bipartite(2, 2);
    CHECK(scalar_identity_residual(P("X1 Y1"), bip).is_zero());
    CHECK(scalar_identity_residual(P("1"), bip).is_zero());
    testsupport::RandomAlgebra gen(37, 2, 2);
    for (int i = 0; i < 200; ++i) CHECK(scalar_identity_residual(gen.poly(4, 5), bip).is_zero());
    CHECK_THROWS_AS(scalar_identity_residual(P("X1"), AlgebraMode::free_mode(1, 1)), ValidationError);
    // The free algebra has non-scalar elements with vanishing quotients.
    auto fr = AlgebraMode::free_mode(1, 1);
    CHECK(bifree_dq(P("X1 Y1 - Y1 X1"), QuotientKind::left(1), fr).is_zero());
    CHECK(bifree_dq(P("X1 Y1 - Y1 X1"), QuotientKind::right(1), fr).is_zero());
}

TEST_CASE("restriction to pure-left polynomials")
{
    auto fr = AlgebraMode::free_mode(2, 2);
    testsupport::RandomAlgebra gen(41, 2, 2, true);
    for (int i = 0; i < 200; ++i) {
        auto p = gen.poly(3, 5, 0);
        auto d = free_dq(p, Letter::X(1), fr);
        CHECK(bifree_dq(p, QuotientKind::left(1), fr) == d);
        CHECK(bifree_dq(p, QuotientKind::flipped_left(1), fr) == d);
        auto q = gen.poly(3, 5, 1);
        auto e = free_dq(q, Letter::Y(2), fr);
        CHECK(bifree_dq(q, QuotientKind::right(2), fr) == e);
        CHECK(bifree_dq(q, QuotientKind::flipped_right(2), fr) == e);
    }
}

TEST_CASE("flip law")
{
    testsupport::RandomAlgebra gen(43, 2, 2, true);
    for (auto mode : {AlgebraMode::free_mode(2, 2), AlgebraMode::bipartite(2, 2)}) {
        for (int i = 0; i < 500; ++i) {
            auto z = normalize(gen.poly(3, 6), mode);
            CHECK(bifree_dq(z, QuotientKind::flipped_left(1), mode) ==
                  normalize(tensor_star(bifree_dq(star(z), QuotientKind::left(1), mode)), mode));
            CHECK(bifree_dq(z, QuotientKind::flipped_right(2), mode) ==
                  normalize(tensor_star(bifree_dq(star(z), QuotientKind::right(2), mode)), mode));
        }
    }
}

TEST_CASE("composition identities")
{
    using testsupport::on_first;
    using testsupport::on_second;
    using testsupport::theta_1_23;
    for (auto mode : {AlgebraMode::free_mode(2, 2), AlgebraMode::bipartite(2, 2)}) {
        testsupport::Quotient dl = [&](const NCPolynomial& p) { return bifree_dq(p, QuotientKind::left(1), mode); };
        testsupport::Quotient dr = [&](const NCPolynomial& p) { return bifree_dq(p, QuotientKind::right(1), mode); };
        testsupport::RandomAlgebra gen(47, 2, 2, true);
        for (int i = 0; i < 500; ++i) {
            auto z = normalize(gen.poly(3, 5), mode);
            CHECK(on_first(dl(z), dl) == on_second(dl(z), dl));
            CHECK(on_first(dr(z), dr) == on_second(dr(z), dr));
            CHECK(on_first(dr(z), dl) == theta_1_23(on_first(dl(z), dr)));
        }
    }
}

TEST_CASE("Leibniz rules for the flipped quotient")
{
    auto fr = AlgebraMode::free_mode(2, 2);
    testsupport::RandomAlgebra gen(53, 2, 2, true);
    auto dh = [&](const NCPolynomial& p) { return bifree_dq(p, QuotientKind::flipped_left(1), fr); };
    auto st = [&](const TensorPoly& a, const TensorPoly& b) { return tensor_mul(a, b, TensorConvention::straight, fr); };
    auto one = NCPolynomial::scalar(1);
    for (int i = 0; i < 300; ++i) {
        auto c = gen.poly(2, 3, 0);
        auto m = gen.poly(3, 4);
        auto d1 = gen.poly(2, 3, 1);
        auto d2 = gen.poly(2, 3, 1);
        CHECK(dh(c * m) == st(dh(c), TensorPoly::elementary(one, m)) + st(TensorPoly::elementary(c, one), dh(m)));
        CHECK(dh(d1 * m * d2) ==
              st(st(TensorPoly::elementary(one, d1), dh(m)), TensorPoly::elementary(one, d2)));
    }
}

TEST_CASE("bipartite invariance of the left quotient")
{
    auto fr = AlgebraMode::free_mode(2, 2);
    auto bip = AlgebraMode::bipartite(2, 2);
    testsupport::RandomAlgebra gen(59, 2, 2, true);
    for (int i = 0; i < 300; ++i) {
        Word z1 = gen.word(3), z2 = gen.word(3);
        Letter x = gen.letter(0), y = gen.letter(1);
        Word a = z1 * Word{x, y} * z2;
        Word b = z1 * Word{y, x} * z2;
        for (auto kind : {QuotientKind::left(1), QuotientKind::right(1), QuotientKind::flipped_left(2),
                          QuotientKind::flipped_right(2)})
            CHECK(normalize(bifree_dq(NCPolynomial(a), kind, fr), bip) ==
                  normalize(bifree_dq(NCPolynomial(b), kind, fr), bip));
    }
}

TEST_CASE("conjugate check on the Gaussian pair")
{
    Rational c(1, 2);
    auto phi = MomentFunctional::from_cumulants(gaussian_pair(c), AlgebraMode::bipartite(1, 1));
    auto report = conjugate_check(phi, QuotientKind::left(1), conjugate_for(c), 6);
    CHECK(report.passed());
    CHECK(report.items.size() == 127);

    auto bad = conjugate_check(phi, QuotientKind::left(1), P("X1"), 6);
    REQUIRE_FALSE(bad.passed());
    CHECK(bad.first_failure->word == parse_word("Y1"));
    CHECK(bad.first_failure->lhs == Rational(1, 2));
    CHECK(bad.first_failure->rhs == 0);

    NCPolynomial eta = (P("Y1") - P("X1") * c) * Rational(1 / (1 - c * c));
    CHECK(conjugate_check(phi, QuotientKind::right(1), eta, 6).passed());
    CHECK_THROWS_AS(conjugate_check(phi, QuotientKind::flipped_left(1), eta, 2), ValidationError);
    CHECK_THROWS_AS(conjugate_check(phi, QuotientKind::left(1), eta, 10), ValidationError);
}

TEST_CASE("conjugate check for an independent pair")
{
    // X semicircular with variance 2, Y semicircular, independent: J(X) = X/2 as a pure-left polynomial.
    CumulantSpec spec(1, 1);
    spec.set(parse_word("X1 X1"), 2);
    spec.set(parse_word("Y1 Y1"), 1);
    auto phi = MomentFunctional::from_cumulants(spec, AlgebraMode::bipartite(1, 1));
    CHECK(conjugate_check(phi, QuotientKind::left(1), P("1/2*X1"), 6).passed());
    CHECK(conjugate_check(phi, QuotientKind::right(1), P("Y1"), 6).passed());
}

TEST_CASE("adjoint recursion examples")
{
    Rational c(1, 2);
    auto mode = AlgebraMode::bipartite(1, 1);
    auto phi = MomentFunctional::from_cumulants(gaussian_pair(c), mode);
    auto xi = conjugate_for(c);
    auto kind = QuotientKind::flipped_left(1);
    CHECK(adjoint_apply(phi, xi, TensorPoly::unit(), kind) == xi);
    CHECK(adjoint_apply(phi, xi, T("1 ⊗ Y1"), kind) == mul(P("Y1"), xi, mode));
    CHECK(adjoint_apply(phi, xi, T("1 ⊗ Y1"), kind) == P("4/3*X1 Y1 - 2/3*Y1 Y1"));
    CHECK(adjoint_apply(phi, xi, T("X1 ⊗ 1"), kind) == mul(P("X1"), xi, mode) - P("1"));
    CHECK_THROWS_AS(adjoint_apply(phi, xi, T("1 ⊗ X1"), kind), ValidationError);
    CHECK_THROWS_AS(adjoint_apply(phi, xi, T("X1 Y1 ⊗ 1"), kind), ValidationError);
    CHECK_THROWS_AS(adjoint_apply(phi, xi, TensorPoly::unit(), QuotientKind::left(1)), ValidationError);
}

TEST_CASE("adjoint pairing and peel-order independence")
{
    auto mode = AlgebraMode::bipartite(1, 1);
    for (Rational c : {Rational(1, 2), Rational(-1, 3)}) {
        auto phi = MomentFunctional::from_cumulants(gaussian_pair(c), mode);
        NCPolynomial xi = conjugate_for(c);
        NCPolynomial eta_r = (P("Y1") - P("X1") * c) * Rational(1 / (1 - c * c));
        std::vector<Word> tests;
        std::vector<Word> layer{Word{}};
        for (int d = 0; d <= 6; ++d) {
            tests.insert(tests.end(), layer.begin(), layer.end());
            std::vector<Word> next;
            for (const auto& w : layer)
                for (auto l : {Letter::X(1), Letter::Y(1)}) {
                    Word v = w;
                    v.push_back(l);
                    next.push_back(v);
                }
            layer = next;
        }
        testsupport::RandomAlgebra gen(61, 1, 1);
        for (int trial = 0; trial < 6; ++trial) {
            TensorPoly eta;
            for (int t = 0; t < 2; ++t) eta.add_term(gen.word(2, 0), gen.word(2, 1), gen.coeff());
            auto kind = QuotientKind::flipped_left(1);
            auto a = adjoint_apply(phi, xi, eta, kind);
            CHECK(a == adjoint_apply(phi, xi, eta, kind, PeelOrder::letter_by_letter));
            CHECK(a == adjoint_apply(phi, xi, eta, kind, PeelOrder::right_first));
            for (const auto& p : tests) {
                if (p.size() + a.degree() > 10) continue;
                NCPolynomial pp(p);
                CHECK(inner(phi, a, pp) == inner(phi, eta, bifree_dq(pp, kind, mode)));
            }
            TensorPoly eta_flip;
            for (const auto& [k, v] : eta.terms()) eta_flip.add_term(k.second, k.first, v);
            auto rkind = QuotientKind::flipped_right(1);
            auto b = adjoint_apply(phi, eta_r, eta_flip, rkind);
            CHECK(b == adjoint_apply(phi, eta_r, eta_flip, rkind, PeelOrder::letter_by_letter));
            for (const auto& p : tests) {
                if (p.size() + b.degree() > 10) continue;
                NCPolynomial pp(p);
                CHECK(inner(phi, b, pp) == inner(phi, eta_flip, bifree_dq(pp, rkind, mode)));
            }
        }
    }
}
