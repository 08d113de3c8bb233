#pragma once

// Bi-non-crossing partitions BNC(chi). A partition of {1..k} is
// bi-non-crossing for chi when it becomes non-crossing after listing the
// positions in the order s_chi (left positions ascending, then right
// positions descending). All lattice operations go through that relabelling,
// so BNC(chi) inherits the lattice structure of NC(k).

#include "bifree/ncalg.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bifree {

inline constexpr std::size_t kDefaultLatticeCap = 12;

class ChiSeq {
public:
    ChiSeq() = default;
    explicit ChiSeq(std::vector<Side> labels) : labels_(std::move(labels)) {}
    /// "lrlr"-style labels.
    static ChiSeq parse(std::string_view text);
    /// Sides of the letters of `word`.
    static ChiSeq of_word(const Word& word);

    std::size_t size() const { return labels_.size(); }
    bool empty() const { return labels_.empty(); }
    /// 1-based position.
    Side at(std::size_t position) const { return labels_.at(position - 1); }
    const std::vector<Side>& labels() const { return labels_; }

    friend bool operator==(const ChiSeq&, const ChiSeq&) = default;

private:
    std::vector<Side> labels_;
};

std::string to_string(const ChiSeq& chi);

/// Images are 1-based and `images()[j-1]` is the image of j.
class Permutation {
public:
    explicit Permutation(std::vector<int> images);
    const std::vector<int>& images() const { return images_; }
    int operator()(int j) const { return images_.at(static_cast<std::size_t>(j - 1)); }
    Permutation inverse() const;

    friend bool operator==(const Permutation&, const Permutation&) = default;

private:
    std::vector<int> images_;
};

/// j-th entry of [chi^-1(l) ascending, chi^-1(r) descending].
Permutation sigma_chi(const ChiSeq& chi);

/// True when `labels` (block id per position, 0-based positions) has no
/// crossing a < b < c < d with a, c in one block and b, d in another.
/// Negative labels are treated as absent positions.
bool is_noncrossing(const std::vector<int>& labels);

class BNCPartition {
public:
    /// Blocks are 1-based element sets covering {1..|chi|}. Throws
    /// ValidationError when not a partition or not bi-non-crossing.
    BNCPartition(const std::vector<std::vector<int>>& blocks, ChiSeq chi);

    /// Block id per 0-based position, ids numbered by first appearance.
    static BNCPartition from_labels(const std::vector<int>& labels, ChiSeq chi);
    static BNCPartition zero(const ChiSeq& chi);
    static BNCPartition one(const ChiSeq& chi);

    const ChiSeq& chi() const { return chi_; }
    std::size_t size() const { return labels_.size(); }
    std::size_t block_count() const { return block_count_; }
    const std::vector<int>& labels() const { return labels_; }
    /// 1-based blocks, each ascending, ordered by minimum.
    std::vector<std::vector<int>> blocks() const;

    /// The same partition relabelled through s_chi into NC(k).
    std::vector<int> nc_labels() const;

    friend bool operator==(const BNCPartition&, const BNCPartition&) = default;

private:
    BNCPartition(std::vector<int> canonical_labels, ChiSeq chi, std::size_t blocks);

    std::vector<int> labels_;
    ChiSeq chi_;
    std::size_t block_count_ = 0;
};

std::string to_string(const BNCPartition& pi);

bool is_bnc(const std::vector<std::vector<int>>& blocks, const ChiSeq& chi);

/// All of BNC(chi): NC(k) in lexicographic restricted-growth order,
/// relabelled through s_chi.
std::vector<BNCPartition> enumerate_bnc(const ChiSeq& chi, std::size_t cap = kDefaultLatticeCap);

/// Block refinement order.
bool leq(const BNCPartition& sigma, const BNCPartition& pi);
/// Least upper bound in BNC(chi).
BNCPartition join(const BNCPartition& sigma, const BNCPartition& pi);
/// All rho with lower <= rho <= upper.
std::vector<BNCPartition> interval(const BNCPartition& lower, const BNCPartition& upper);

/// Moebius function of BNC(chi) from the defining recursion
/// sum_{sigma <= rho <= pi} mu(rho, pi) = [sigma == pi]. Memoized on NC(k)
/// shapes; safe for concurrent callers.
long long mobius(const BNCPartition& sigma, const BNCPartition& pi);

/// chi-hat on {1..q}: chi below p, chi_prime on {p..q}. `chi_prime` carries
/// the labels of positions p..q in order, so q = p + |chi_prime| - 1.
ChiSeq hat_chi(const ChiSeq& chi, const ChiSeq& chi_prime);
/// Adds p+1..q to the block containing p.
BNCPartition hat_embed(const BNCPartition& pi, const ChiSeq& chi_prime);
/// {{1},...,{p-1},{p,...,q}}.
BNCPartition hat_zero(const ChiSeq& chi, const ChiSeq& chi_prime);

}  // namespace bifree
