#pragma once

// Moment functionals on words, partitioned moments, and chi-bi-free
// cumulants obtained by Moebius inversion over BNC(chi).

#include "bifree/bnclattice.hpp"
#include "bifree/ncalg.hpp"
#include "bifree/rational.hpp"

#include <map>
#include <memory>
#include <span>
#include <vector>

namespace bifree {

inline constexpr std::size_t kDefaultDegreeBound = 10;

/// Cumulant values keyed by letter pattern; the chi of a pattern is the
/// sequence of its letters' sides. Missing patterns have cumulant 0.
class CumulantSpec {
public:
    CumulantSpec(std::uint32_t left_arity, std::uint32_t right_arity,
                 std::size_t degree_bound = kDefaultDegreeBound);

    std::uint32_t left_arity() const { return n_; }
    std::uint32_t right_arity() const { return m_; }
    std::size_t degree_bound() const { return degree_bound_; }
    const std::map<Word, Rational>& entries() const { return entries_; }

    void set(const Word& pattern, const Rational& value);
    Rational value(const Word& pattern) const;

private:
    std::uint32_t n_;
    std::uint32_t m_;
    std::size_t degree_bound_;
    std::map<Word, Rational> entries_;
};

/// A state on words. Either backed by a cumulant spec (moments computed on
/// demand and memoized) or by an explicit table. phi(1) = 1 always. In
/// bipartite mode words are evaluated through their normal form, so phi is
/// constant on commutation classes.
class MomentFunctional {
public:
    static MomentFunctional from_cumulants(CumulantSpec spec, AlgebraMode mode);
    static MomentFunctional from_table(std::map<Word, Rational> table, AlgebraMode mode,
                                       std::size_t degree_bound = kDefaultDegreeBound);

    Rational operator()(const Word& word) const;
    /// Linear extension.
    Rational operator()(const NCPolynomial& p) const;
    /// (phi (x) phi).
    Rational operator()(const TensorPoly& t) const;

    const AlgebraMode& mode() const;
    std::size_t degree_bound() const;
    /// Non-null when cumulant-backed.
    const CumulantSpec* cumulant_spec() const;

private:
    struct State;
    explicit MomentFunctional(std::shared_ptr<State> state) : state_(std::move(state)) {}
    std::shared_ptr<State> state_;
};

/// phi_pi(Z_1..Z_k): product over blocks of phi of the in-block product taken
/// in increasing index order.
Rational moment_pi(const MomentFunctional& phi, const BNCPartition& pi, std::span<const Word> args);

/// kappa_chi(Z_1..Z_k) = sum_{pi in BNC(chi)} phi_pi(Z) mu(pi, 1_chi).
Rational cumulant_chi(const MomentFunctional& phi, const ChiSeq& chi, std::span<const Word> args);

/// kappa_pi of single letters straight from the spec.
Rational cumulant_pi(const CumulantSpec& spec, const BNCPartition& pi, const Word& letters);

/// phi(w_1 ... w_k) = sum_{pi in BNC(chi)} kappa_pi(w_1..w_k) with chi the
/// sides of the letters of `letters`.
Rational moments_from_cumulants(const CumulantSpec& spec, const Word& letters);
/// As above; `chi` must match the sides of `letters`.
Rational moments_from_cumulants(const CumulantSpec& spec, const ChiSeq& chi, const Word& letters);

/// {sigma in BNC(chi-hat) : sigma v 0-hat = pi-hat}. Summing kappa_sigma over
/// the result gives kappa_pi with the entries p..q multiplied in the last slot.
std::vector<BNCPartition> expand_product_last_entry(const BNCPartition& pi, const ChiSeq& chi_prime);

struct MixedCumulantFinding {
    std::vector<Word> args;   // Z_1..Z_{p-1} single letters, Z_p the product
    Rational value;
};

struct MixedVanishingReport {
    std::size_t checked = 0;
    std::vector<MixedCumulantFinding> violations;
    bool passed() const { return violations.empty(); }
};

/// For every kappa(Z_1, ..., Z_{p-1}, Z_p) where Z_1..Z_{p-1} are letters
/// and Z_p is a product of letters from one group, with some earlier letter
/// from another group and total degree <= max_degree, evaluates the cumulant
/// through the last-entry expansion and records nonzero values.
MixedVanishingReport check_mixed_vanishing(const CumulantSpec& spec, const std::map<Letter, int>& grouping,
                                           std::size_t max_degree);

}  // namespace bifree
