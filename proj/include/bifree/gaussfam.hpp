#pragma once

// Bi-free central limit families given by a covariance matrix.

#include "bifree/cumulant.hpp"
#include "bifree/ncalg.hpp"
#include "bifree/quadrature.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <optional>
#include <vector>

namespace bifree {

inline constexpr std::size_t kDefaultGaussianCap = 16;
inline constexpr double kPsdTolerance = 1e-10;
inline constexpr double kRankTolerance = 1e-8;

using RationalMatrix = std::vector<std::vector<Rational>>;

/// Rows and columns are ordered X1..Xn, Y1..Ym.
class Covariance {
public:
    /// Throws ValidationError unless `a` is (n+m)x(n+m), symmetric and PSD
    /// up to kPsdTolerance.
    Covariance(std::uint32_t n, std::uint32_t m, Eigen::MatrixXd a);

    std::uint32_t left_count() const { return n_; }
    std::uint32_t right_count() const { return m_; }
    std::size_t size() const { return n_ + m_; }
    const Eigen::MatrixXd& matrix() const { return a_; }

    /// Row of a variable letter.
    std::size_t row(const Letter& letter) const;

private:
    std::uint32_t n_;
    std::uint32_t m_;
    Eigen::MatrixXd a_;
};

Eigen::MatrixXd to_matrix(const RationalMatrix& a);

/// Sum over bi-non-crossing pair partitions of the pattern of the product of
/// covariance entries; 0 for odd length. Pattern letters must be variables.
double gaussian_moment(const Covariance& cov, const Word& pattern, std::size_t cap = kDefaultGaussianCap);
Rational gaussian_moment(std::uint32_t n, std::uint32_t m, const RationalMatrix& a, const Word& pattern,
                         std::size_t cap = kDefaultGaussianCap);

/// Exact cumulant spec: kappa(u, v) = a_uv for variable letters, all other cumulants zero.
CumulantSpec gaussian_spec(std::uint32_t n, std::uint32_t m, const RationalMatrix& a,
                           std::size_t degree_bound = kDefaultDegreeBound);

/// Left fields l(e_i) + l*(e_i), right fields r(e_j) + r*(e_j) on the full
/// Fock space over R^(n+m) with Gram matrix A, truncated at tensor length
/// `depth`. Basis vectors are tensor words; the matrices are sparse.
class FockModel {
public:
    FockModel(const Covariance& cov, std::size_t depth);

    std::size_t depth() const { return depth_; }
    std::size_t dimension() const { return dimension_; }
    const Eigen::SparseMatrix<double>& field(const Letter& letter) const;

    /// Vacuum coefficient of op(w_1)...op(w_k) Omega.
    double moment(const Word& pattern) const;

private:
    Covariance cov_;
    std::size_t depth_;
    std::size_t dimension_ = 0;
    std::vector<Eigen::SparseMatrix<double>> fields_;
};

double fock_moment(const FockModel& model, const Word& pattern);

struct RankInfo {
    std::size_t rank = 0;
    bool ambiguous = false;      // a singular value within a factor 10 of the threshold
    double threshold = 0.0;
    Eigen::VectorXd singular_values;
};

/// Singular values below kRankTolerance * sigma_max count as zero.
RankInfo numerical_rank(const Eigen::MatrixXd& a);

/// Column k (1-based over X1..Xn, Y1..Ym) of A^-1, or nullopt when A is singular.
std::optional<Eigen::VectorXd> conjugate_coeffs(const Covariance& cov, std::size_t k);
/// Exact variant by rational elimination.
std::optional<std::vector<Rational>> conjugate_coeffs(const RationalMatrix& a, std::size_t k);
/// sum_i b_i S_i with S_i = X_i (i <= n) or Y_(i-n).
NCPolynomial conjugate_polynomial(std::uint32_t n, std::uint32_t m, const std::vector<Rational>& b);

/// Tr(A^-1), or +infinity for singular A.
double fisher(const Covariance& cov);
/// Tr((A + tI)^-1); t >= 0.
double fisher_perturbed(const Covariance& cov, double t);
/// t -> Tr((A + tI)^-1).
std::function<double(double)> fisher_curve(const Covariance& cov);

/// (n+m)/2 log(2 pi e) + 1/2 log det A, or -infinity for singular A.
double entropy_closed(const Covariance& cov);

struct EntropyQuadConfig {
    double tol = 1e-10;           // absolute tolerance of the finite part
    double tail_tol = 1e-9;       // bound on the neglected tail
    int max_depth = 48;
    double max_cut = 1e15;
};

struct EntropyQuadResult {
    double value = 0.0;
    double error = 0.0;
    double cut = 0.0;             // T where the analytic tail starts
    std::size_t evaluations = 0;
};

/// (n+m)/2 log(2 pi e) + 1/2 int_0^inf ((n+m)/(1+t) - fisher_fn(t)) dt.
/// t = u/(1-u) up to min(T, 1e4), t = e^s from there to T, and past T the
/// tail of fisher ~ (n+m)/t - c/t^2 with c fitted at T.
EntropyQuadResult entropy_quadrature(const std::function<double(double)>& fisher_fn, std::size_t n_plus_m,
                                     const EntropyQuadConfig& cfg = {});

/// rank(A) with the ambiguity flag.
RankInfo entropy_dimension(const Covariance& cov);

struct LimitResult {
    double value = 0.0;
    double error = 0.0;
};

/// (n+m) - lim_{eps->0} eps * fisher_fn(eps), by Neville extrapolation to 0
/// over a strictly decreasing positive eps sequence.
LimitResult entropy_dimension_limit(const std::function<double(double)>& fisher_fn, std::size_t n_plus_m,
                                    const std::vector<double>& eps_seq);
std::vector<double> default_eps_sequence();

}  // namespace bifree
