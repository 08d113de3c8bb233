#include "bifree/cumulant.hpp"

#include "bifree/error.hpp"

#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>

namespace bifree {

namespace {

void check_letters(const Word& w, std::uint32_t n, std::uint32_t m)
{
    AlgebraMode mode = AlgebraMode::free_mode(n, m);
    for (const auto& l : w)
        if (!mode.admits(l)) throw ValidationError("arity mismatch: letter " + to_string(l));
}

Word block_word(const std::vector<int>& block, std::span<const Word> args)
{
    Word w;
    for (int q : block) w = w * args[static_cast<std::size_t>(q - 1)];
    return w;
}

}  // namespace

// ---------------------------------------------------------------- CumulantSpec

CumulantSpec::CumulantSpec(std::uint32_t left_arity, std::uint32_t right_arity, std::size_t degree_bound)
    : n_(left_arity), m_(right_arity), degree_bound_(degree_bound)
{
    if (degree_bound_ == 0) throw ValidationError("degree bound must be positive");
}

void CumulantSpec::set(const Word& pattern, const Rational& value)
{
    if (pattern.empty()) throw ValidationError("empty cumulant pattern");
    if (pattern.size() > degree_bound_) throw ValidationError("cumulant pattern exceeds degree bound");
    check_letters(pattern, n_, m_);
    if (value == 0) {
        entries_.erase(pattern);
        return;
    }
    Rational v = value;
    v.canonicalize();
    entries_[pattern] = v;
}

Rational CumulantSpec::value(const Word& pattern) const
{
    auto it = entries_.find(pattern);
    return it == entries_.end() ? Rational(0) : it->second;
}

// ---------------------------------------------------------------- MomentFunctional

struct MomentFunctional::State {
    AlgebraMode mode;
    std::size_t degree_bound = kDefaultDegreeBound;
    std::optional<CumulantSpec> spec;
    std::map<Word, Rational> table;
    mutable std::shared_mutex mutex;
    mutable std::map<Word, Rational> memo;
};

MomentFunctional MomentFunctional::from_cumulants(CumulantSpec spec, AlgebraMode mode)
{
    if (spec.left_arity() != mode.left_arity || spec.right_arity() != mode.right_arity)
        throw ValidationError("arity mismatch between cumulant spec and algebra mode");
    auto state = std::make_shared<State>();
    state->mode = mode;
    state->degree_bound = spec.degree_bound();
    state->spec = std::move(spec);
    return MomentFunctional(std::move(state));
}

MomentFunctional MomentFunctional::from_table(std::map<Word, Rational> table, AlgebraMode mode,
                                              std::size_t degree_bound)
{
    auto state = std::make_shared<State>();
    state->mode = mode;
    state->degree_bound = degree_bound;
    for (auto& [w, v] : table) {
        check_letters(w, mode.left_arity, mode.right_arity);
        if (w.size() > degree_bound) throw ValidationError("moment table word exceeds degree bound: " + to_string(w));
        Word key = mode.is_bipartite() ? normal_form(w, mode) : w;
        v.canonicalize();
        auto [it, inserted] = state->table.emplace(key, v);
        if (!inserted && it->second != v)
            throw ValidationError("moment table is inconsistent on commutation class of " + to_string(w));
    }
    return MomentFunctional(std::move(state));
}

Rational MomentFunctional::operator()(const Word& word) const
{
    if (word.empty()) return 1;
    if (word.size() > state_->degree_bound)
        throw ValidationError("degree bound exceeded: word of length " + std::to_string(word.size()) +
                              " > " + std::to_string(state_->degree_bound));
    check_letters(word, state_->mode.left_arity, state_->mode.right_arity);
    const Word key = state_->mode.is_bipartite() ? normal_form(word, state_->mode) : word;

    if (!state_->spec) {
        auto it = state_->table.find(key);
        if (it == state_->table.end()) throw ValidationError("moment table has no entry for " + to_string(key));
        return it->second;
    }
    {
        std::shared_lock lock(state_->mutex);
        if (auto it = state_->memo.find(key); it != state_->memo.end()) return it->second;
    }
    Rational value = moments_from_cumulants(*state_->spec, key);
    std::unique_lock lock(state_->mutex);
    state_->memo.emplace(key, value);
    return value;
}

Rational MomentFunctional::operator()(const NCPolynomial& p) const
{
    Rational total = 0;
    for (const auto& [w, c] : p.terms()) total += c * (*this)(w);
    return total;
}

Rational MomentFunctional::operator()(const TensorPoly& t) const
{
    Rational total = 0;
    for (const auto& [key, c] : t.terms()) total += c * (*this)(key.first) * (*this)(key.second);
    return total;
}

const AlgebraMode& MomentFunctional::mode() const { return state_->mode; }

std::size_t MomentFunctional::degree_bound() const { return state_->degree_bound; }

const CumulantSpec* MomentFunctional::cumulant_spec() const
{
    return state_->spec ? &*state_->spec : nullptr;
}

// ---------------------------------------------------------------- moments and cumulants

Rational moment_pi(const MomentFunctional& phi, const BNCPartition& pi, std::span<const Word> args)
{
    if (args.size() != pi.size()) throw ValidationError("argument count does not match partition size");
    Rational result = 1;
    for (const auto& block : pi.blocks()) {
        result *= phi(block_word(block, args));
        if (result == 0) break;
    }
    return result;
}

Rational cumulant_chi(const MomentFunctional& phi, const ChiSeq& chi, std::span<const Word> args)
{
    if (args.size() != chi.size()) throw ValidationError("argument count does not match chi");
    const auto top = BNCPartition::one(chi);
    Rational total = 0;
    for (const auto& pi : enumerate_bnc(chi)) {
        Rational m = moment_pi(phi, pi, args);
        if (m != 0) total += m * Rational(static_cast<long>(mobius(pi, top)));
    }
    return total;
}

Rational cumulant_pi(const CumulantSpec& spec, const BNCPartition& pi, const Word& letters)
{
    if (letters.size() != pi.size()) throw ValidationError("letter count does not match partition size");
    Rational result = 1;
    for (const auto& block : pi.blocks()) {
        Word w;
        for (int q : block) w.push_back(letters[static_cast<std::size_t>(q - 1)]);
        result *= spec.value(w);
        if (result == 0) break;
    }
    return result;
}

Rational moments_from_cumulants(const CumulantSpec& spec, const Word& letters)
{
    return moments_from_cumulants(spec, ChiSeq::of_word(letters), letters);
}

Rational moments_from_cumulants(const CumulantSpec& spec, const ChiSeq& chi, const Word& letters)
{
    if (letters.empty()) return 1;
    if (letters.size() > spec.degree_bound())
        throw ValidationError("degree bound exceeded: word of length " + std::to_string(letters.size()));
    if (!(chi == ChiSeq::of_word(letters))) throw ValidationError("chi does not match the sides of the letters");
    check_letters(letters, spec.left_arity(), spec.right_arity());
    Rational total = 0;
    for (const auto& pi : enumerate_bnc(chi)) total += cumulant_pi(spec, pi, letters);
    return total;
}

std::vector<BNCPartition> expand_product_last_entry(const BNCPartition& pi, const ChiSeq& chi_prime)
{
    const ChiSeq chi_hat = hat_chi(pi.chi(), chi_prime);
    const BNCPartition target = hat_embed(pi, chi_prime);
    const BNCPartition bottom = hat_zero(pi.chi(), chi_prime);
    std::vector<BNCPartition> out;
    for (auto& sigma : enumerate_bnc(chi_hat))
        if (join(sigma, bottom) == target) out.push_back(std::move(sigma));
    return out;
}

// ---------------------------------------------------------------- mixed cumulants

namespace {

struct MixedSearch {
    const CumulantSpec& spec;
    const std::map<Letter, int>& grouping;
    std::vector<Letter> letters;
    std::size_t max_degree;
    MixedVanishingReport report;

    void evaluate(const Word& prefix, const Word& last)
    {
        std::vector<Side> labels;
        for (const auto& l : prefix) labels.push_back(l.side);
        labels.push_back(last[0].side);
        std::vector<Side> prime_labels;
        for (const auto& l : last) prime_labels.push_back(l.side);
        const ChiSeq chi(labels);
        const ChiSeq chi_prime(prime_labels);

        const Word all = prefix * last;
        Rational value = 0;
        if (last.size() == 1) {
            value = spec.value(all);
        } else {
            for (const auto& sigma : expand_product_last_entry(BNCPartition::one(chi), chi_prime))
                value += cumulant_pi(spec, sigma, all);
        }
        ++report.checked;
        if (value != 0) {
            MixedCumulantFinding f;
            for (const auto& l : prefix) f.args.push_back(Word{l});
            f.args.push_back(last);
            f.value = value;
            report.violations.push_back(std::move(f));
        }
    }

    void lasts(const Word& prefix, Word& last, int group, bool mixed)
    {
        if (!last.empty() && mixed) evaluate(prefix, last);
        if (prefix.size() + last.size() >= max_degree) return;
        for (const auto& l : letters) {
            if (grouping.at(l) != group) continue;
            last.push_back(l);
            lasts(prefix, last, group, mixed);
            last = last.slice(0, last.size() - 1);
        }
    }

    void prefixes(Word& prefix)
    {
        if (!prefix.empty() && prefix.size() < max_degree) {
            std::set<int> groups;
            for (const auto& l : letters) groups.insert(grouping.at(l));
            for (int g : groups) {
                bool mixed = false;
                for (const auto& l : prefix) mixed = mixed || grouping.at(l) != g;
                Word last;
                lasts(prefix, last, g, mixed);
            }
        }
        if (prefix.size() + 1 >= max_degree) return;
        for (const auto& l : letters) {
            prefix.push_back(l);
            prefixes(prefix);
            prefix = prefix.slice(0, prefix.size() - 1);
        }
    }
};

}  // namespace

MixedVanishingReport check_mixed_vanishing(const CumulantSpec& spec, const std::map<Letter, int>& grouping,
                                           std::size_t max_degree)
{
    if (max_degree > spec.degree_bound()) throw ValidationError("max degree exceeds the spec degree bound");
    if (max_degree > kDefaultLatticeCap) throw ValidationError("max degree exceeds the lattice cap");
    MixedSearch search{spec, grouping, {}, max_degree, {}};
    for (const auto& [l, g] : grouping) {
        (void)g;
        check_letters(Word{l}, spec.left_arity(), spec.right_arity());
        search.letters.push_back(l);
    }
    Word prefix;
    search.prefixes(prefix);
    return search.report;
}

}  // namespace bifree
