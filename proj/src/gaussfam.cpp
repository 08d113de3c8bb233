#include "bifree/gaussfam.hpp"

#include "bifree/bnclattice.hpp"
#include "bifree/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace bifree {

namespace {

void check_pattern(const Word& pattern, std::uint32_t n, std::uint32_t m, std::size_t cap)
{
    if (pattern.size() > cap)
        throw ValidationError("pattern length " + std::to_string(pattern.size()) + " exceeds cap " +
                              std::to_string(cap));
    const AlgebraMode mode = AlgebraMode::free_mode(n, m);
    for (const auto& l : pattern)
        if (!l.is_variable() || !mode.admits(l)) throw ValidationError("pattern letter outside the family: " + to_string(l));
}

std::size_t row_of(const Letter& l, std::uint32_t n)
{
    return l.side == Side::left ? l.index - 1 : n + l.index - 1;
}

// Non-crossing pairings of the pattern read in s_chi order.
template <class T, class Entry>
T pair_partition_sum(const Word& pattern, std::uint32_t n, Entry entry)
{
    const std::size_t k = pattern.size();
    if (k == 0) return T(1);
    if (k % 2 == 1) return T(0);
    const Permutation s = sigma_chi(ChiSeq::of_word(pattern));
    std::vector<std::size_t> rows(k);
    for (std::size_t j = 0; j < k; ++j) rows[j] = row_of(pattern[static_cast<std::size_t>(s(static_cast<int>(j) + 1) - 1)], n);

    // sums[i][j]: pairings of the half-open slot range [i, j).
    std::vector<std::vector<T>> sums(k + 1, std::vector<T>(k + 1, T(0)));
    for (std::size_t i = 0; i <= k; ++i) sums[i][i] = T(1);
    for (std::size_t len = 2; len <= k; len += 2) {
        for (std::size_t i = 0; i + len <= k; ++i) {
            const std::size_t j = i + len;
            T total(0);
            for (std::size_t p = i + 1; p < j; p += 2) {
                const T& inner = sums[i + 1][p];
                const T& outer = sums[p + 1][j];
                if (inner == T(0) || outer == T(0)) continue;
                total += entry(rows[i], rows[p]) * inner * outer;
            }
            sums[i][j] = total;
        }
    }
    return sums[0][k];
}

std::size_t int_pow(std::size_t base, std::size_t e)
{
    std::size_t r = 1;
    for (std::size_t i = 0; i < e; ++i) r *= base;
    return r;
}

}  // namespace

// ---------------------------------------------------------------- Covariance

Covariance::Covariance(std::uint32_t n, std::uint32_t m, Eigen::MatrixXd a) : n_(n), m_(m), a_(std::move(a))
{
    const auto size = static_cast<Eigen::Index>(n + m);
    if (size == 0) throw ValidationError("covariance must have at least one variable");
    if (a_.rows() != size || a_.cols() != size)
        throw ValidationError("covariance must be " + std::to_string(size) + "x" + std::to_string(size));
    if (!a_.allFinite()) throw ValidationError("covariance has non-finite entries");
    const double scale = std::max(1.0, a_.cwiseAbs().maxCoeff());
    if ((a_ - a_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw ValidationError("covariance is not symmetric");
    a_ = 0.5 * (a_ + a_.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a_, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (lo < -kPsdTolerance * std::max(1.0, hi))
        throw ValidationError("covariance is not positive semidefinite (eigenvalue " + std::to_string(lo) + ")");
}

std::size_t Covariance::row(const Letter& letter) const
{
    const AlgebraMode mode = AlgebraMode::free_mode(n_, m_);
    if (!letter.is_variable() || !mode.admits(letter)) throw ValidationError("letter outside the family: " + to_string(letter));
    return row_of(letter, n_);
}

Eigen::MatrixXd to_matrix(const RationalMatrix& a)
{
    Eigen::MatrixXd out(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != a.size()) throw ValidationError("matrix is not square");
        for (std::size_t j = 0; j < a.size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a[i][j].get_d();
    }
    return out;
}

// ---------------------------------------------------------------- moments

double gaussian_moment(const Covariance& cov, const Word& pattern, std::size_t cap)
{
    check_pattern(pattern, cov.left_count(), cov.right_count(), cap);
    const Eigen::MatrixXd& a = cov.matrix();
    return pair_partition_sum<double>(pattern, cov.left_count(), [&](std::size_t u, std::size_t v) {
        return a(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v));
    });
}

Rational gaussian_moment(std::uint32_t n, std::uint32_t m, const RationalMatrix& a, const Word& pattern,
                         std::size_t cap)
{
    if (a.size() != n + m) throw ValidationError("covariance size does not match n + m");
    check_pattern(pattern, n, m, cap);
    return pair_partition_sum<Rational>(pattern, n, [&](std::size_t u, std::size_t v) { return a[u][v]; });
}

CumulantSpec gaussian_spec(std::uint32_t n, std::uint32_t m, const RationalMatrix& a, std::size_t degree_bound)
{
    if (a.size() != n + m) throw ValidationError("covariance size does not match n + m");
    std::vector<Letter> letters;
    for (std::uint32_t i = 1; i <= n; ++i) letters.push_back(Letter::X(i));
    for (std::uint32_t j = 1; j <= m; ++j) letters.push_back(Letter::Y(j));
    CumulantSpec spec(n, m, degree_bound);
    for (std::size_t u = 0; u < letters.size(); ++u) {
        if (a[u].size() != a.size()) throw ValidationError("matrix is not square");
        for (std::size_t v = 0; v < letters.size(); ++v) {
            if (a[u][v] != a[v][u]) throw ValidationError("covariance is not symmetric");
            spec.set(Word{letters[u], letters[v]}, a[u][v]);
        }
    }
    return spec;
}

// ---------------------------------------------------------------- Fock model

FockModel::FockModel(const Covariance& cov, std::size_t depth) : cov_(cov), depth_(depth)
{
    const std::size_t d = cov.size();
    std::vector<std::size_t> offset(depth + 2, 0);
    for (std::size_t len = 0; len <= depth; ++len) offset[len + 1] = offset[len] + int_pow(d, len);
    dimension_ = offset[depth + 1];
    if (dimension_ > 5'000'000) throw ValidationError("Fock space truncation too large");
    const Eigen::MatrixXd& a = cov.matrix();

    for (std::size_t f = 0; f < d; ++f) {
        const bool left = f < cov.left_count();
        std::vector<Eigen::Triplet<double>> entries;
        for (std::size_t len = 0; len <= depth; ++len) {
            const std::size_t count = int_pow(d, len);
            const std::size_t lead = len == 0 ? 0 : int_pow(d, len - 1);
            for (std::size_t code = 0; code < count; ++code) {
                const auto src = static_cast<int>(offset[len] + code);
                if (len < depth) {
                    // creation: f (x) w on the left, w (x) f on the right
                    const std::size_t target = left ? f * count + code : code * d + f;
                    entries.emplace_back(static_cast<int>(offset[len + 1] + target), src, 1.0);
                }
                if (len > 0) {
                    // annihilation pairs f with the first (left) or last (right) tensor factor
                    const std::size_t edge = left ? code / lead : code % d;
                    const std::size_t rest = left ? code % lead : code / d;
                    const double w = a(static_cast<Eigen::Index>(edge), static_cast<Eigen::Index>(f));
                    if (w != 0.0) entries.emplace_back(static_cast<int>(offset[len - 1] + rest), src, w);
                }
            }
        }
        Eigen::SparseMatrix<double> op(static_cast<Eigen::Index>(dimension_), static_cast<Eigen::Index>(dimension_));
        op.setFromTriplets(entries.begin(), entries.end());
        fields_.push_back(std::move(op));
    }
}

const Eigen::SparseMatrix<double>& FockModel::field(const Letter& letter) const
{
    return fields_.at(cov_.row(letter));
}

double FockModel::moment(const Word& pattern) const
{
    if (pattern.size() > depth_)
        throw ValidationError("depth insufficient: pattern length " + std::to_string(pattern.size()) + " > depth " +
                              std::to_string(depth_));
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension_));
    v(0) = 1.0;
    for (std::size_t i = pattern.size(); i-- > 0;) v = field(pattern[i]) * v;
    return v(0);
}

double fock_moment(const FockModel& model, const Word& pattern) { return model.moment(pattern); }

// ---------------------------------------------------------------- rank, Fisher, entropy

RankInfo numerical_rank(const Eigen::MatrixXd& a)
{
    RankInfo info;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    info.singular_values = svd.singularValues();
    const double top = info.singular_values.size() ? info.singular_values.maxCoeff() : 0.0;
    info.threshold = kRankTolerance * top;
    for (Eigen::Index i = 0; i < info.singular_values.size(); ++i) {
        const double s = info.singular_values(i);
        if (top > 0.0 && s > info.threshold) ++info.rank;
        if (top > 0.0 && s >= info.threshold / 10.0 && s <= info.threshold * 10.0) info.ambiguous = true;
    }
    return info;
}

std::optional<Eigen::VectorXd> conjugate_coeffs(const Covariance& cov, std::size_t k)
{
    if (k == 0 || k > cov.size()) throw ValidationError("conjugate index outside 1.." + std::to_string(cov.size()));
    if (numerical_rank(cov.matrix()).rank < cov.size()) return std::nullopt;
    Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cov.size()));
    e(static_cast<Eigen::Index>(k - 1)) = 1.0;
    return Eigen::VectorXd(cov.matrix().ldlt().solve(e));
}

std::optional<std::vector<Rational>> conjugate_coeffs(const RationalMatrix& a, std::size_t k)
{
    const std::size_t size = a.size();
    if (k == 0 || k > size) throw ValidationError("conjugate index outside 1.." + std::to_string(size));
    RationalMatrix work = a;
    for (std::size_t i = 0; i < size; ++i) {
        if (work[i].size() != size) throw ValidationError("matrix is not square");
        work[i].push_back(i == k - 1 ? Rational(1) : Rational(0));
    }
    for (std::size_t col = 0; col < size; ++col) {
        std::size_t pivot = col;
        while (pivot < size && work[pivot][col] == 0) ++pivot;
        if (pivot == size) return std::nullopt;
        std::swap(work[col], work[pivot]);
        const Rational inv = 1 / work[col][col];
        for (auto& x : work[col]) x *= inv;
        for (std::size_t r = 0; r < size; ++r) {
            if (r == col || work[r][col] == 0) continue;
            const Rational factor = work[r][col];
            for (std::size_t c = col; c <= size; ++c) work[r][c] -= factor * work[col][c];
        }
    }
    std::vector<Rational> b(size);
    for (std::size_t i = 0; i < size; ++i) b[i] = work[i][size];
    return b;
}

NCPolynomial conjugate_polynomial(std::uint32_t n, std::uint32_t m, const std::vector<Rational>& b)
{
    if (b.size() != n + m) throw ValidationError("coefficient count does not match n + m");
    NCPolynomial xi;
    for (std::size_t i = 0; i < b.size(); ++i) {
        const Letter l = i < n ? Letter::X(static_cast<std::uint32_t>(i + 1))
                               : Letter::Y(static_cast<std::uint32_t>(i - n + 1));
        xi.add_term(Word{l}, b[i]);
    }
    return xi;
}

double fisher(const Covariance& cov)
{
    if (numerical_rank(cov.matrix()).rank < cov.size()) return std::numeric_limits<double>::infinity();
    const auto size = static_cast<Eigen::Index>(cov.size());
    return cov.matrix().ldlt().solve(Eigen::MatrixXd::Identity(size, size)).trace();
}

double fisher_perturbed(const Covariance& cov, double t)
{
    if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("perturbation time must be a finite t >= 0");
    if (t == 0.0) return fisher(cov);
    const auto size = static_cast<Eigen::Index>(cov.size());
    const Eigen::MatrixXd shifted = cov.matrix() + t * Eigen::MatrixXd::Identity(size, size);
    return shifted.ldlt().solve(Eigen::MatrixXd::Identity(size, size)).trace();
}

std::function<double(double)> fisher_curve(const Covariance& cov)
{
    return [cov](double t) { return fisher_perturbed(cov, t); };
}

double entropy_closed(const Covariance& cov)
{
    if (numerical_rank(cov.matrix()).rank < cov.size()) return -std::numeric_limits<double>::infinity();
    const Eigen::LLT<Eigen::MatrixXd> llt(cov.matrix());
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < llt.matrixL().rows(); ++i) log_det += 2.0 * std::log(llt.matrixLLT()(i, i));
    const double size = static_cast<double>(cov.size());
    return 0.5 * size * std::log(2.0 * std::numbers::pi * std::numbers::e) + 0.5 * log_det;
}

EntropyQuadResult entropy_quadrature(const std::function<double(double)>& fisher_fn, std::size_t n_plus_m,
                                     const EntropyQuadConfig& cfg)
{
    if (n_plus_m == 0) throw ValidationError("n + m must be positive");
    const double size = static_cast<double>(n_plus_m);
    auto deficit = [&](double t) { return size / (1.0 + t) - fisher_fn(t); };

    // Cut T: the neglected tail int_T^inf (N/t - fisher) dt is estimated by
    // T * (N/T - fisher(T)), exact for a c/t^2 remainder.
    double cut = 1e2;
    double tail_estimate = 0.0;
    double remainder = 0.0;
    for (;;) {
        const double r = size / cut - fisher_fn(cut);
        if (!std::isfinite(r)) throw ConvergenceError("Fisher curve is not finite at t = " + std::to_string(cut));
        remainder = r * cut;
        tail_estimate = std::abs(remainder);
        if (tail_estimate < cfg.tail_tol) break;
        cut *= 4.0;
        if (cut > cfg.max_cut) throw ConvergenceError("entropy tail does not decay; Fisher curve may not approach (n+m)/t");
    }

    // u-substitution on [0, T1]; beyond T1 the deficit is a difference of
    // nearly equal small numbers, so the rest goes through t = e^s.
    const double near_cut = std::min(cut, 1e4);
    const double u_max = near_cut / (1.0 + near_cut);
    auto in_u = [&](double u) {
        const double one_minus = 1.0 - u;
        return deficit(u / one_minus) / (one_minus * one_minus);
    };
    const QuadResult body = adaptive_simpson(in_u, 0.0, u_max, 0.5 * cfg.tol, cfg.max_depth);
    QuadResult far;
    if (cut > near_cut) {
        auto in_s = [&](double s) {
            const double t = std::exp(s);
            return deficit(t) * t;
        };
        far = adaptive_simpson(in_s, std::log(near_cut), std::log(cut), 0.5 * cfg.tol, cfg.max_depth);
    }
    // Beyond T: fisher ~ N/t - c/t^2 with c fitted at T.
    const double tail = -size * std::log1p(1.0 / cut) + remainder;

    EntropyQuadResult out;
    out.value = 0.5 * size * std::log(2.0 * std::numbers::pi * std::numbers::e) +
                0.5 * (body.value + far.value + tail);
    out.error = 0.5 * (body.error + far.error + tail_estimate);
    out.cut = cut;
    out.evaluations = body.evaluations + far.evaluations;
    return out;
}

RankInfo entropy_dimension(const Covariance& cov) { return numerical_rank(cov.matrix()); }

std::vector<double> default_eps_sequence()
{
    std::vector<double> eps;
    double e = 1e-3;
    for (int k = 0; k < 8; ++k, e *= 0.5) eps.push_back(e);
    return eps;
}

LimitResult entropy_dimension_limit(const std::function<double(double)>& fisher_fn, std::size_t n_plus_m,
                                    const std::vector<double>& eps_seq)
{
    if (eps_seq.size() < 2) throw ValidationError("need at least two eps values");
    for (std::size_t i = 0; i < eps_seq.size(); ++i) {
        if (!(eps_seq[i] > 0.0)) throw ValidationError("eps values must be positive");
        if (i > 0 && !(eps_seq[i] < eps_seq[i - 1])) throw ValidationError("eps sequence must be strictly decreasing");
    }
    const std::size_t k = eps_seq.size();
    std::vector<double> p(k);
    for (std::size_t i = 0; i < k; ++i) {
        p[i] = eps_seq[i] * fisher_fn(eps_seq[i]);
        if (!std::isfinite(p[i])) throw ConvergenceError("Fisher curve is not finite at eps = " + std::to_string(eps_seq[i]));
    }
    // Neville tableau evaluated at 0; after `level` passes p[i] = P_{i..i+level}(0).
    double runner_up = p[k - 1];
    for (std::size_t level = 1; level < k; ++level) {
        if (level == k - 1) runner_up = p[1];
        for (std::size_t i = 0; i + level < k; ++i) {
            const double xi = eps_seq[i];
            const double xj = eps_seq[i + level];
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    LimitResult out;
    out.value = static_cast<double>(n_plus_m) - p[0];
    out.error = std::abs(p[0] - runner_up);
    return out;
}

}  // namespace bifree
