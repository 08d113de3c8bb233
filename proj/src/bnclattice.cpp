#include "bifree/bnclattice.hpp"

#include "bifree/error.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <shared_mutex>

namespace bifree {

namespace {

using Labels = std::vector<int>;

Labels canonicalize(const Labels& labels)
{
    std::map<int, int> renumber;
    Labels out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [it, inserted] = renumber.try_emplace(labels[i], static_cast<int>(renumber.size()));
        out[i] = it->second;
    }
    return out;
}

std::size_t count_blocks(const Labels& canonical)
{
    return canonical.empty() ? 0 : static_cast<std::size_t>(*std::max_element(canonical.begin(), canonical.end()) + 1);
}

Labels to_nc(const Labels& labels, const Permutation& s)
{
    Labels nc(labels.size());
    for (std::size_t j = 0; j < labels.size(); ++j) nc[j] = labels[static_cast<std::size_t>(s(static_cast<int>(j) + 1) - 1)];
    return canonicalize(nc);
}

Labels from_nc(const Labels& nc, const Permutation& s)
{
    Labels labels(nc.size());
    for (std::size_t j = 0; j < nc.size(); ++j) labels[static_cast<std::size_t>(s(static_cast<int>(j) + 1) - 1)] = nc[j];
    return canonicalize(labels);
}

// Returns a pair of crossing block labels, or {-1, -1}.
std::pair<int, int> find_crossing(const Labels& labels)
{
    int max_label = -1;
    for (int b : labels) max_label = std::max(max_label, b);
    if (max_label < 1) return {-1, -1};
    std::vector<std::size_t> last(static_cast<std::size_t>(max_label) + 1, 0);
    std::vector<char> started(last.size(), 0);
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] >= 0) last[static_cast<std::size_t>(labels[i])] = i;
    std::vector<int> open;
    open.reserve(last.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int b = labels[i];
        if (b < 0) continue;
        const auto ub = static_cast<std::size_t>(b);
        if (started[ub]) {
            if (open.back() != b) return {b, open.back()};
        } else {
            started[ub] = 1;
            open.push_back(b);
        }
        if (last[ub] == i) open.pop_back();
    }
    return {-1, -1};
}

bool leq_labels(const Labels& finer, const Labels& coarser)
{
    std::map<int, int> image;
    for (std::size_t i = 0; i < finer.size(); ++i) {
        auto [it, inserted] = image.try_emplace(finer[i], coarser[i]);
        if (!inserted && it->second != coarser[i]) return false;
    }
    return true;
}

// Enumerates NC partitions rho with lower <= rho <= upper by grouping the
// blocks of `lower` (ordered by minimum) in restricted-growth fashion.
class IntervalWalker {
public:
    IntervalWalker(const Labels& lower, const Labels& upper) : partial_(lower.size(), -1)
    {
        const std::size_t b = count_blocks(lower);
        members_.resize(b);
        for (std::size_t i = 0; i < lower.size(); ++i) members_[static_cast<std::size_t>(lower[i])].push_back(i);
        block_upper_.resize(b);
        for (std::size_t blk = 0; blk < b; ++blk) block_upper_[blk] = upper[members_[blk].front()];
    }

    std::vector<Labels> run()
    {
        recurse(0);
        return std::move(out_);
    }

private:
    void recurse(std::size_t block)
    {
        if (block == members_.size()) {
            out_.push_back(partial_);
            return;
        }
        const int upper_id = block_upper_[block];
        const int fresh = static_cast<int>(group_upper_.size());
        for (int g = 0; g <= fresh; ++g) {
            if (g < fresh && group_upper_[static_cast<std::size_t>(g)] != upper_id) continue;
            if (g == fresh) group_upper_.push_back(upper_id);
            for (auto e : members_[block]) partial_[e] = g;
            if (find_crossing(partial_).first < 0) recurse(block + 1);
            for (auto e : members_[block]) partial_[e] = -1;
            if (g == fresh) group_upper_.pop_back();
        }
    }

    std::vector<std::vector<std::size_t>> members_;
    std::vector<int> block_upper_;
    std::vector<int> group_upper_;
    Labels partial_;
    std::vector<Labels> out_;
};

std::vector<Labels> nc_interval(const Labels& lower, const Labels& upper)
{
    return IntervalWalker(lower, upper).run();
}

const std::vector<Labels>& nc_lattice(std::size_t k)
{
    static std::shared_mutex mutex;
    static std::map<std::size_t, std::vector<Labels>> cache;
    {
        std::shared_lock lock(mutex);
        if (auto it = cache.find(k); it != cache.end()) return it->second;
    }
    Labels singletons(k);
    std::iota(singletons.begin(), singletons.end(), 0);
    auto all = nc_interval(singletons, Labels(k, 0));
    std::unique_lock lock(mutex);
    return cache.try_emplace(k, std::move(all)).first->second;
}

class MobiusCache {
public:
    long long get(const Labels& lower, const Labels& upper)
    {
        if (lower == upper) return 1;
        Key key{lower, upper};
        {
            std::shared_lock lock(mutex_);
            if (auto it = table_.find(key); it != table_.end()) return it->second;
        }
        long long sum = 0;
        for (const auto& rho : nc_interval(lower, upper))
            if (rho != lower) sum += get(rho, upper);
        std::unique_lock lock(mutex_);
        table_.try_emplace(std::move(key), -sum);
        return -sum;
    }

private:
    using Key = std::pair<Labels, Labels>;
    std::shared_mutex mutex_;
    std::map<Key, long long> table_;
};

MobiusCache& mobius_cache()
{
    static MobiusCache cache;
    return cache;
}

void require_same_chi(const BNCPartition& a, const BNCPartition& b)
{
    if (a.chi() != b.chi()) throw ValidationError("chi mismatch between partitions");
}

}  // namespace

// ---------------------------------------------------------------- ChiSeq

ChiSeq ChiSeq::parse(std::string_view text)
{
    std::vector<Side> labels;
    for (char c : text) {
        if (c == 'l' || c == 'L') {
            labels.push_back(Side::left);
        } else if (c == 'r' || c == 'R') {
            labels.push_back(Side::right);
        } else if (c == ',' || c == ' ') {
            continue;
        } else {
            throw ValidationError("bad chi label '" + std::string(1, c) + "' (expected l or r)");
        }
    }
    return ChiSeq(std::move(labels));
}

ChiSeq ChiSeq::of_word(const Word& word)
{
    std::vector<Side> labels;
    for (const auto& l : word) labels.push_back(l.side);
    return ChiSeq(std::move(labels));
}

std::string to_string(const ChiSeq& chi)
{
    std::string out;
    for (auto s : chi.labels()) out += s == Side::left ? 'l' : 'r';
    return out;
}

// ---------------------------------------------------------------- Permutation

Permutation::Permutation(std::vector<int> images) : images_(std::move(images))
{
    std::vector<bool> seen(images_.size(), false);
    for (int v : images_) {
        if (v < 1 || static_cast<std::size_t>(v) > images_.size() || seen[static_cast<std::size_t>(v - 1)])
            throw ValidationError("not a permutation");
        seen[static_cast<std::size_t>(v - 1)] = true;
    }
}

Permutation Permutation::inverse() const
{
    std::vector<int> inv(images_.size());
    for (std::size_t j = 0; j < images_.size(); ++j) inv[static_cast<std::size_t>(images_[j] - 1)] = static_cast<int>(j) + 1;
    return Permutation(std::move(inv));
}

Permutation sigma_chi(const ChiSeq& chi)
{
    std::vector<int> images;
    images.reserve(chi.size());
    for (std::size_t i = 1; i <= chi.size(); ++i)
        if (chi.at(i) == Side::left) images.push_back(static_cast<int>(i));
    for (std::size_t i = chi.size(); i >= 1; --i)
        if (chi.at(i) == Side::right) images.push_back(static_cast<int>(i));
    return Permutation(std::move(images));
}

bool is_noncrossing(const std::vector<int>& labels)
{
    return find_crossing(labels).first < 0;
}

// ---------------------------------------------------------------- BNCPartition

BNCPartition::BNCPartition(std::vector<int> canonical_labels, ChiSeq chi, std::size_t blocks)
    : labels_(std::move(canonical_labels)), chi_(std::move(chi)), block_count_(blocks)
{
}

BNCPartition::BNCPartition(const std::vector<std::vector<int>>& blocks, ChiSeq chi) : chi_(std::move(chi))
{
    const std::size_t k = chi_.size();
    Labels labels(k, -1);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (blocks[b].empty()) throw ValidationError("empty block");
        for (int e : blocks[b]) {
            if (e < 1 || static_cast<std::size_t>(e) > k) throw ValidationError("block element out of range");
            if (labels[static_cast<std::size_t>(e - 1)] >= 0) throw ValidationError("blocks overlap");
            labels[static_cast<std::size_t>(e - 1)] = static_cast<int>(b);
        }
    }
    if (std::find(labels.begin(), labels.end(), -1) != labels.end()) throw ValidationError("blocks do not cover");
    labels_ = canonicalize(labels);
    block_count_ = count_blocks(labels_);
    if (!is_noncrossing(to_nc(labels_, sigma_chi(chi_))))
        throw ValidationError("partition is not bi-non-crossing for chi = " + to_string(chi_));
}

BNCPartition BNCPartition::from_labels(const std::vector<int>& labels, ChiSeq chi)
{
    if (labels.size() != chi.size()) throw ValidationError("label count does not match chi");
    auto canonical = canonicalize(labels);
    if (!is_noncrossing(to_nc(canonical, sigma_chi(chi))))
        throw ValidationError("partition is not bi-non-crossing for chi = " + to_string(chi));
    const auto blocks = count_blocks(canonical);
    return BNCPartition(std::move(canonical), std::move(chi), blocks);
}

BNCPartition BNCPartition::zero(const ChiSeq& chi)
{
    Labels labels(chi.size());
    std::iota(labels.begin(), labels.end(), 0);
    return BNCPartition(std::move(labels), chi, chi.size());
}

BNCPartition BNCPartition::one(const ChiSeq& chi)
{
    return BNCPartition(Labels(chi.size(), 0), chi, chi.empty() ? 0 : 1);
}

std::vector<std::vector<int>> BNCPartition::blocks() const
{
    std::vector<std::vector<int>> out(block_count_);
    for (std::size_t i = 0; i < labels_.size(); ++i) out[static_cast<std::size_t>(labels_[i])].push_back(static_cast<int>(i) + 1);
    return out;
}

std::vector<int> BNCPartition::nc_labels() const
{
    return to_nc(labels_, sigma_chi(chi_));
}

std::string to_string(const BNCPartition& pi)
{
    std::string out = "{";
    bool first_block = true;
    for (const auto& block : pi.blocks()) {
        if (!first_block) out += ",";
        out += "{";
        for (std::size_t i = 0; i < block.size(); ++i) {
            if (i) out += ",";
            out += std::to_string(block[i]);
        }
        out += "}";
        first_block = false;
    }
    return out + "}";
}

bool is_bnc(const std::vector<std::vector<int>>& blocks, const ChiSeq& chi)
{
    try {
        BNCPartition p(blocks, chi);
        return true;
    } catch (const ValidationError&) {
        return false;
    }
}

std::vector<BNCPartition> enumerate_bnc(const ChiSeq& chi, std::size_t cap)
{
    if (chi.empty()) throw ValidationError("chi must have at least one position");
    if (chi.size() > cap)
        throw ValidationError("lattice cap exceeded: |chi| = " + std::to_string(chi.size()) + " > " +
                              std::to_string(cap));
    const auto s = sigma_chi(chi);
    std::vector<BNCPartition> out;
    const auto& nc = nc_lattice(chi.size());
    out.reserve(nc.size());
    for (const auto& rgs : nc) {
        out.push_back(BNCPartition::from_labels(from_nc(rgs, s), chi));
    }
    return out;
}

bool leq(const BNCPartition& sigma, const BNCPartition& pi)
{
    require_same_chi(sigma, pi);
    return leq_labels(sigma.labels(), pi.labels());
}

BNCPartition join(const BNCPartition& sigma, const BNCPartition& pi)
{
    require_same_chi(sigma, pi);
    const auto s = sigma_chi(sigma.chi());
    const Labels a = sigma.nc_labels();
    const Labels b = pi.nc_labels();
    const std::size_t k = a.size();

    // Ordinary join by union-find over positions.
    std::vector<std::size_t> parent(k);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite_by = [&](const Labels& labels) {
        std::map<int, std::size_t> first;
        for (std::size_t i = 0; i < k; ++i) {
            auto [it, inserted] = first.try_emplace(labels[i], i);
            if (!inserted) parent[find(i)] = find(it->second);
        }
    };
    unite_by(a);
    unite_by(b);

    Labels joined(k);
    for (std::size_t i = 0; i < k; ++i) joined[i] = static_cast<int>(find(i));
    // Coarsen minimally: any non-crossing upper bound must merge crossing blocks.
    for (auto crossing = find_crossing(joined); crossing.first >= 0; crossing = find_crossing(joined))
        std::replace(joined.begin(), joined.end(), crossing.second, crossing.first);

    return BNCPartition::from_labels(from_nc(canonicalize(joined), s), sigma.chi());
}

std::vector<BNCPartition> interval(const BNCPartition& lower, const BNCPartition& upper)
{
    require_same_chi(lower, upper);
    if (!leq(lower, upper)) throw ValidationError("interval bounds are not comparable");
    const auto s = sigma_chi(lower.chi());
    std::vector<BNCPartition> out;
    for (const auto& rho : nc_interval(lower.nc_labels(), upper.nc_labels()))
        out.push_back(BNCPartition::from_labels(from_nc(rho, s), lower.chi()));
    return out;
}

long long mobius(const BNCPartition& sigma, const BNCPartition& pi)
{
    require_same_chi(sigma, pi);
    if (!leq(sigma, pi)) throw ValidationError("mobius: partitions are not comparable");
    return mobius_cache().get(sigma.nc_labels(), pi.nc_labels());
}

ChiSeq hat_chi(const ChiSeq& chi, const ChiSeq& chi_prime)
{
    if (chi.empty()) throw ValidationError("hat embedding needs p >= 1");
    if (chi_prime.size() < 2) throw ValidationError("hat embedding needs p < q (chi_prime covers p..q)");
    std::vector<Side> labels(chi.labels().begin(), chi.labels().end() - 1);
    labels.insert(labels.end(), chi_prime.labels().begin(), chi_prime.labels().end());
    return ChiSeq(std::move(labels));
}

BNCPartition hat_embed(const BNCPartition& pi, const ChiSeq& chi_prime)
{
    ChiSeq chi_hat = hat_chi(pi.chi(), chi_prime);
    Labels labels = pi.labels();
    const int block_of_p = labels.back();
    labels.resize(chi_hat.size(), block_of_p);
    return BNCPartition::from_labels(labels, std::move(chi_hat));
}

BNCPartition hat_zero(const ChiSeq& chi, const ChiSeq& chi_prime)
{
    return hat_embed(BNCPartition::zero(chi), chi_prime);
}

}  // namespace bifree
