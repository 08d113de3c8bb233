#include "bifree/bipartite.hpp"
#include "bifree/bnclattice.hpp"
#include "bifree/cli/cli.hpp"
#include "bifree/cli/io.hpp"
#include "bifree/cumulant.hpp"
#include "bifree/derivation.hpp"
#include "bifree/gaussfam.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

namespace bifree::cli {

namespace {

using Check = std::function<std::string()>;  // empty string: pass

std::string expect_equal(const std::string& got, const std::string& want)
{
    return got == want ? std::string() : "got \"" + got + "\", want \"" + want + "\"";
}

std::string expect_close(double got, double want, double tol)
{
    if (std::abs(got - want) <= tol || (std::isinf(got) && got == want)) return {};
    return "got " + io::format_double(got) + ", want " + io::format_double(want);
}

RationalMatrix pair_matrix(const Rational& c) { return {{1, c}, {c, 1}}; }

Covariance pair_cov(double c)
{
    Eigen::MatrixXd a(2, 2);
    a << 1.0, c, c, 1.0;
    return Covariance(1, 1, a);
}

MomentFunctional gaussian_phi(const Rational& c)
{
    return MomentFunctional::from_cumulants(gaussian_spec(1, 1, pair_matrix(c)), AlgebraMode::bipartite(1, 1));
}

NCPolynomial conjugate_for(const Rational& c)
{
    return (parse_polynomial("X1") - parse_polynomial("Y1") * c) * Rational(1 / (1 - c * c));
}

std::vector<std::pair<std::string, Check>> golden()
{
    const auto free11 = AlgebraMode::free_mode(1, 1);
    const auto w1 = parse_polynomial("y1 X1 y1 x1 y2 X1 y3 y1 x2");
    const auto w2 = parse_polynomial("Y1 x1 Y1 x2 y1 x1 y2 Y1 x3");
    std::vector<std::pair<std::string, Check>> items;

    items.emplace_back("tensor star (A x B)* = B* x A*", [] {
        return expect_equal(to_string(tensor_star(parse_tensor("X1 Y1 ⊗ Y1 X1 X1"))), "X1 X1 Y1 ⊗ Y1 X1");
    });
    items.emplace_back("hat embedding of 1_chi is 1_chi-hat", [] {
        const ChiSeq chi = ChiSeq::parse("lrl");
        const ChiSeq tail = ChiSeq::parse("lr");
        return BNCPartition::one(hat_chi(chi, tail)) == hat_embed(BNCPartition::one(chi), tail) ? std::string()
                                                                                                : "mismatch";
    });
    items.emplace_back("hat zero for p = 2, q = 3", [] {
        return expect_equal(to_string(hat_zero(ChiSeq::parse("ll"), ChiSeq::parse("lr"))), "{{1},{2,3}}");
    });
    items.emplace_back("Gaussian pair cumulant kappa(S, T) = c", [] {
        const Rational c(1, 2);
        const auto phi = gaussian_phi(c);
        const std::vector<Word> args{parse_word("X1"), parse_word("Y1")};
        return expect_equal(to_string(cumulant_chi(phi, ChiSeq::parse("lr"), args)), "1/2");
    });
    items.emplace_back("Gaussian cumulants of order 3 vanish", [] {
        const auto phi = gaussian_phi(Rational(1, 2));
        const std::vector<Word> args{parse_word("X1"), parse_word("Y1"), parse_word("X1")};
        for (const char* chi : {"lrl", "lll", "rrl", "rlr"}) {
            const auto v = cumulant_chi(phi, ChiSeq::parse(chi), args);
            if (v != 0) return "chi " + std::string(chi) + ": " + to_string(v);
        }
        return std::string();
    });
    items.emplace_back("left quotient worked example", [=] {
        return expect_equal(to_string(bifree_dq(w1, QuotientKind::left(1), free11)),
                            "y1 y1 y2 y3 y1 ⊗ x1 X1 x2 + y1 X1 y1 x1 y2 y3 y1 ⊗ x2");
    });
    items.emplace_back("right quotient worked example", [=] {
        return expect_equal(to_string(bifree_dq(w2, QuotientKind::right(1), free11)),
                            "x1 x2 x1 x3 ⊗ Y1 y1 y2 Y1 + Y1 x1 x2 x1 x3 ⊗ y1 y2 Y1 + Y1 x1 Y1 x2 y1 x1 y2 x3 ⊗ 1");
    });
    items.emplace_back("flipped left quotient worked example", [=] {
        return expect_equal(to_string(bifree_dq(w1, QuotientKind::flipped_left(1), free11)),
                            "1 ⊗ y1 y1 x1 y2 X1 y3 y1 x2 + X1 x1 ⊗ y1 y1 y2 y3 y1 x2");
    });
    items.emplace_back("flipped right quotient worked example", [=] {
        return expect_equal(to_string(bifree_dq(w2, QuotientKind::flipped_right(1), free11)),
                            "1 ⊗ x1 Y1 x2 y1 x1 y2 Y1 x3 + Y1 ⊗ x1 x2 y1 x1 y2 Y1 x3 + Y1 Y1 y1 y2 ⊗ x1 x2 x1 x3");
    });
    items.emplace_back("conjugate variable of the Gaussian pair, c = 1/2", [] {
        const Rational c(1, 2);
        const auto r = conjugate_check(gaussian_phi(c), QuotientKind::left(1), conjugate_for(c), 6);
        return r.passed() ? std::string() : "fails at " + to_string(r.first_failure->word);
    });
    items.emplace_back("conjugate variable of an independent pair", [] {
        CumulantSpec spec(1, 1);
        spec.set(parse_word("X1 X1"), 2);
        spec.set(parse_word("Y1 Y1"), 1);
        const auto phi = MomentFunctional::from_cumulants(spec, AlgebraMode::bipartite(1, 1));
        const auto r = conjugate_check(phi, QuotientKind::left(1), parse_polynomial("1/2*X1"), 6);
        return r.passed() ? std::string() : "fails at " + to_string(r.first_failure->word);
    });
    items.emplace_back("adjoint of 1 x 1 is xi", [=] {
        const Rational c(1, 2);
        const auto xi = conjugate_for(c);
        const auto a = adjoint_apply(gaussian_phi(c), xi, TensorPoly::unit(), QuotientKind::flipped_left(1));
        return expect_equal(to_string(a), to_string(xi));
    });
    items.emplace_back("Gaussian moment recursion", [] {
        const Rational c(1, 2);
        const auto a = pair_matrix(c);
        auto phi = [&](int n, int m) {
            Word w;
            for (int i = 0; i < n; ++i) w.push_back(Letter::X(1));
            for (int j = 0; j < m; ++j) w.push_back(Letter::Y(1));
            return gaussian_moment(1, 1, a, w);
        };
        for (int n = 0; n <= 3; ++n)
            for (int m = 0; m <= 3; ++m) {
                Rational rhs = 0;
                for (int i = 0; i < n; ++i) rhs += phi(i, m) * phi(n - i - 1, 0);
                for (int j = 0; j < m; ++j) rhs += c * phi(n, j) * phi(0, m - j - 1);
                Word w;
                for (int i = 0; i < n; ++i) w.push_back(Letter::X(1));
                for (int j = 0; j < m; ++j) w.push_back(Letter::Y(1));
                w.push_back(Letter::X(1));
                if (gaussian_moment(1, 1, a, w) != rhs) return "fails at n=" + std::to_string(n) + ", m=" + std::to_string(m);
            }
        return std::string();
    });
    items.emplace_back("conjugate coefficients 1/(1-c^2), -c/(1-c^2)", [] {
        const auto b = conjugate_coeffs(pair_matrix(Rational(1, 2)), 1);
        if (!b) return std::string("singular");
        return expect_equal(to_string((*b)[0]) + " " + to_string((*b)[1]), "4/3 -2/3");
    });
    items.emplace_back("Fisher information 2/(1-c^2)", [] { return expect_close(fisher(pair_cov(0.5)), 8.0 / 3.0, 1e-14); });
    items.emplace_back("Fisher information of singular A is infinite", [] {
        return expect_close(fisher(pair_cov(1.0)), std::numeric_limits<double>::infinity(), 0.0);
    });
    items.emplace_back("entropy log(2 pi e) + log(3/4)/2", [] {
        return expect_close(entropy_closed(pair_cov(0.5)),
                            std::log(2 * std::numbers::pi * std::numbers::e) + 0.5 * std::log(0.75), 1e-13);
    });
    items.emplace_back("entropy of rank-deficient A is -inf", [] {
        return expect_close(entropy_closed(pair_cov(1.0)), -std::numeric_limits<double>::infinity(), 0.0);
    });
    items.emplace_back("entropy dimension 2 at c = 1/2 and 1 at c = 1", [] {
        const auto a = entropy_dimension(pair_cov(0.5)).rank;
        const auto b = entropy_dimension(pair_cov(1.0)).rank;
        return expect_equal(std::to_string(a) + " " + std::to_string(b), "2 1");
    });
    items.emplace_back("independent grid: left field is 2 h_X", [] {
        GridSpec s;
        s.nx = s.ny = 128;
        std::vector<double> v(s.nx * s.ny);
        for (std::size_t i = 0; i < s.nx; ++i)
            for (std::size_t j = 0; j < s.ny; ++j)
                v[i * s.ny + j] = semicircular_pdf(0.0, s.x(i), 0.0) * (1.0 + 0.5 * std::sin(s.y(j)));
        const DensityGrid g(s, v);
        const auto field = conjugate_field(g);
        const auto h = hilbert_pv(marginals(g).first, s.hx());
        double worst = 0.0;
        for (std::size_t i = 1; i + 1 < s.nx; ++i)
            for (std::size_t j = 0; j < s.ny; ++j) worst = std::max(worst, std::abs(field.left[i * s.ny + j] - 2 * h[i]));
        return worst < 1e-9 ? std::string() : "deviation " + io::format_double(worst, 3);
    });
    items.emplace_back("mu_1/2 left field (x - y/2)/(3/4) within 2%", [] {
        const double c = 0.5;
        const auto g = semicircular_density(c, 512);
        const auto field = conjugate_field(g);
        const GridSpec& s = g.spec();
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < s.nx; ++i)
            for (std::size_t j = 0; j < s.ny; ++j) {
                const double w = g.value(i, j) * g.weight(i, j);
                const double target = (s.x(i) - c * s.y(j)) / (1 - c * c);
                num += std::pow(field.left[i * s.ny + j] - target, 2) * w;
                den += target * target * w;
            }
        const double rel = std::sqrt(num / den);
        return rel < 0.02 ? std::string() : "relative L2 error " + io::format_double(rel, 3);
    });
    items.emplace_back("numerical Fisher of mu_0 is 2 within 2%", [] {
        return expect_close(fisher_numeric(semicircular_density(0.0, 512)).value, 2.0, 0.04);
    });
    items.emplace_back("numerical Fisher of mu_1/2 is 8/3 within 2%", [] {
        return expect_close(fisher_numeric(semicircular_density(0.5, 512)).value, 8.0 / 3.0, 0.02 * 8.0 / 3.0);
    });
    items.emplace_back("gaussian fisher prints 2.6666666667", [] {
        std::ostringstream out, err;
        const int code = run_cli({"gaussian", "fisher", "--matrix", "[[1,0.5],[0.5,1]]"}, out, err);
        if (code != 0) return "exit " + std::to_string(code) + ": " + err.str();
        return expect_equal(out.str(), "2.6666666667\n");
    });
    return items;
}

}  // namespace

std::vector<SelftestItem> run_selftest()
{
    std::vector<SelftestItem> out;
    for (auto& [name, check] : golden()) {
        SelftestItem item;
        item.name = name;
        try {
            item.detail = check();
            item.pass = item.detail.empty();
        } catch (const std::exception& e) {
            item.detail = std::string("threw: ") + e.what();
        }
        out.push_back(std::move(item));
    }
    return out;
}

}  // namespace bifree::cli
