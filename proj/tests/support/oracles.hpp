#pragma once

// Independent reference implementations used only by the tests.

#include "bifree/ncalg.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace testsupport {

using Blocks = std::vector<std::vector<int>>;

// All set partitions of {1..k}, generated by inserting k into each block or a new one.
inline std::vector<Blocks> all_set_partitions(int k)
{
    std::vector<Blocks> out{Blocks{}};
    for (int e = 1; e <= k; ++e) {
        std::vector<Blocks> next;
        for (const auto& p : out) {
            for (std::size_t b = 0; b < p.size(); ++b) {
                Blocks q = p;
                q[b].push_back(e);
                next.push_back(std::move(q));
            }
            Blocks q = p;
            q.push_back({e});
            next.push_back(std::move(q));
        }
        out = std::move(next);
    }
    return out;
}

// Direct crossing test on positions after applying `order` (order[j] = element at slot j).
inline bool crosses_under(const Blocks& blocks, const std::vector<int>& order)
{
    std::vector<int> slot(order.size() + 1);
    for (std::size_t j = 0; j < order.size(); ++j) slot[static_cast<std::size_t>(order[j])] = static_cast<int>(j);
    for (std::size_t u = 0; u < blocks.size(); ++u)
        for (std::size_t v = 0; v < blocks.size(); ++v) {
            if (u == v) continue;
            for (int a : blocks[u])
                for (int c : blocks[u])
                    for (int b : blocks[v])
                        for (int d : blocks[v]) {
                            int sa = slot[a], sb = slot[b], sc = slot[c], sd = slot[d];
                            if (sa < sb && sb < sc && sc < sd) return true;
                        }
        }
    return false;
}

// s_chi computed literally: lefts ascending then rights descending.
inline std::vector<int> order_for(const std::vector<bool>& is_left)
{
    std::vector<int> order;
    for (std::size_t i = 0; i < is_left.size(); ++i)
        if (is_left[i]) order.push_back(static_cast<int>(i) + 1);
    for (std::size_t i = is_left.size(); i-- > 0;)
        if (!is_left[i]) order.push_back(static_cast<int>(i) + 1);
    return order;
}

inline Blocks sorted_blocks(Blocks b)
{
    for (auto& x : b) std::sort(x.begin(), x.end());
    std::sort(b.begin(), b.end());
    return b;
}

inline long long catalan(int k)
{
    long long c = 1;
    for (int i = 0; i < k; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
    return c;
}

struct RandomAlgebra {
    std::mt19937_64 rng;
    std::uint32_t n = 2;
    std::uint32_t m = 2;
    bool symbols = false;

    explicit RandomAlgebra(std::uint64_t seed, std::uint32_t n_ = 2, std::uint32_t m_ = 2, bool with_symbols = false)
        : rng(seed), n(n_), m(m_), symbols(with_symbols) {}

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

    bifree::Letter letter(int side_filter = -1)
    {
        using bifree::Letter;
        bool left = side_filter == -1 ? uniform(0, 1) == 0 : side_filter == 0;
        bool sym = symbols && uniform(0, 2) == 0;
        std::uint32_t bound = left ? n : m;
        auto idx = static_cast<std::uint32_t>(uniform(1, static_cast<int>(bound)));
        if (left) return sym ? Letter::left_symbol(idx) : Letter::X(idx);
        return sym ? Letter::right_symbol(idx) : Letter::Y(idx);
    }

    bifree::Word word(int max_len, int side_filter = -1)
    {
        bifree::Word w;
        int len = uniform(0, max_len);
        for (int i = 0; i < len; ++i) w.push_back(letter(side_filter));
        return w;
    }

    bifree::Rational coeff()
    {
        int num = uniform(-5, 5);
        if (num == 0) num = 1;
        bifree::Rational r(num, uniform(1, 4));
        r.canonicalize();
        return r;
    }

    bifree::NCPolynomial poly(int max_terms, int max_len, int side_filter = -1)
    {
        bifree::NCPolynomial p;
        int terms = uniform(1, max_terms);
        for (int i = 0; i < terms; ++i) p.add_term(word(max_len, side_filter), coeff());
        return p;
    }

    bifree::TensorPoly tensor(int max_terms, int max_len)
    {
        bifree::TensorPoly t;
        int terms = uniform(1, max_terms);
        for (int i = 0; i < terms; ++i) t.add_term(word(max_len), word(max_len), coeff());
        return t;
    }
};

}  // namespace testsupport
