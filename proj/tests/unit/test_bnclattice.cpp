#include "doctest.h"

#include "bifree/bnclattice.hpp"
#include "bifree/error.hpp"
#include "support/oracles.hpp"

#include <map>
#include <random>
#include <set>

using namespace bifree;
using testsupport::Blocks;

namespace {

std::vector<ChiSeq> all_chis(int k)
{
    std::vector<ChiSeq> out;
    for (int mask = 0; mask < (1 << k); ++mask) {
        std::vector<Side> labels;
        for (int i = 0; i < k; ++i) labels.push_back((mask >> i) & 1 ? Side::right : Side::left);
        out.emplace_back(labels);
    }
    return out;
}

std::vector<bool> left_flags(const ChiSeq& chi)
{
    std::vector<bool> f;
    for (auto s : chi.labels()) f.push_back(s == Side::left);
    return f;
}

bool brute_leq(const Blocks& a, const Blocks& b)
{
    for (const auto& blk : a) {
        bool found = false;
        for (const auto& big : b) {
            std::set<int> s(big.begin(), big.end());
            if (std::all_of(blk.begin(), blk.end(), [&](int e) { return s.count(e) > 0; })) found = true;
        }
        if (!found) return false;
    }
    return true;
}

long long signed_catalan(std::size_t size)
{
    long long c = testsupport::catalan(static_cast<int>(size) - 1);
    return size % 2 == 1 ? c : -c;
}

// Kreweras complement by brute force on 2k interleaved points.
Blocks kreweras(const Blocks& sigma, int k)
{
    Blocks best;
    std::size_t best_count = 1000;
    std::vector<int> order;
    for (int i = 1; i <= 2 * k; ++i) order.push_back(i);
    for (const auto& tau : testsupport::all_set_partitions(k)) {
        Blocks joint;
        for (const auto& b : sigma) {
            std::vector<int> v;
            for (int e : b) v.push_back(2 * e - 1);
            joint.push_back(v);
        }
        for (const auto& b : tau) {
            std::vector<int> v;
            for (int e : b) v.push_back(2 * e);
            joint.push_back(v);
        }
        if (testsupport::crosses_under(joint, order)) continue;
        if (tau.size() < best_count) {
            best_count = tau.size();
            best = tau;
        }
    }
    return best;
}

}  // namespace

TEST_CASE("sigma_chi examples")
{
    CHECK(sigma_chi(ChiSeq::parse("lr")).images() == std::vector<int>{1, 2});
    CHECK(sigma_chi(ChiSeq::parse("rl")).images() == std::vector<int>{2, 1});
    CHECK(sigma_chi(ChiSeq::parse("lrlr")).images() == std::vector<int>{1, 3, 4, 2});
    auto s = sigma_chi(ChiSeq::parse("rllrr"));
    CHECK(s.inverse()(s(4)) == 4);
    CHECK_THROWS_AS(Permutation({1, 1}), ValidationError);
}

TEST_CASE("enumeration counts")
{
    CHECK(enumerate_bnc(ChiSeq::parse("l")).size() == 1);
    for (const auto& chi : all_chis(3)) CHECK(enumerate_bnc(chi).size() == 5);
    for (const auto& chi : all_chis(4)) CHECK(enumerate_bnc(chi).size() == 14);
    for (int k = 1; k <= 7; ++k)
        for (const auto& chi : all_chis(k))
            CHECK(static_cast<long long>(enumerate_bnc(chi).size()) == testsupport::catalan(k));
    CHECK_THROWS_AS(enumerate_bnc(ChiSeq::parse("lllllllllllll")), ValidationError);
    CHECK_THROWS_AS(enumerate_bnc(ChiSeq{}), ValidationError);
}

TEST_CASE("enumeration matches brute force crossing check")
{
    for (int k = 1; k <= 6; ++k) {
        for (const auto& chi : all_chis(k)) {
            auto order = testsupport::order_for(left_flags(chi));
            std::set<Blocks> expected;
            for (const auto& p : testsupport::all_set_partitions(k))
                if (!testsupport::crosses_under(p, order)) expected.insert(testsupport::sorted_blocks(p));
            std::set<Blocks> got;
            for (const auto& pi : enumerate_bnc(chi)) {
                got.insert(testsupport::sorted_blocks(pi.blocks()));
                CHECK(is_bnc(pi.blocks(), chi));
            }
            CHECK(got == expected);
        }
    }
}

TEST_CASE("enumeration order is deterministic")
{
    auto chi = ChiSeq::parse("lrrl");
    auto a = enumerate_bnc(chi);
    auto b = enumerate_bnc(chi);
    CHECK(a == b);
    CHECK(a.front() == BNCPartition::one(chi));
    CHECK(a.back() == BNCPartition::zero(chi));
}

TEST_CASE("construction rejects crossing partitions")
{
    auto chi = ChiSeq::parse("llll");
    CHECK_THROWS_AS(BNCPartition({{1, 3}, {2, 4}}, chi), ValidationError);
    CHECK_NOTHROW(BNCPartition({{1, 3}, {2, 4}}, ChiSeq::parse("lrlr")));
    CHECK_THROWS_AS(BNCPartition({{1, 2}, {2, 3}}, ChiSeq::parse("lll")), ValidationError);
    CHECK(to_string(BNCPartition({{2}, {3, 1}}, ChiSeq::parse("lll"))) == "{{1,3},{2}}");
}

TEST_CASE("join examples")
{
    auto chi = ChiSeq::parse("lrlr");
    BNCPartition a({{1, 3}, {2}, {4}}, chi);
    BNCPartition b({{2, 4}, {1}, {3}}, chi);
    auto j = join(a, b);
    CHECK(testsupport::sorted_blocks(j.blocks()) == Blocks{{1, 3}, {2, 4}});
    CHECK(is_bnc(j.blocks(), chi));
    for (const auto& pi : enumerate_bnc(chi)) {
        CHECK(join(BNCPartition::zero(chi), pi) == pi);
        CHECK(join(pi, pi) == pi);
    }
    CHECK_THROWS_AS(join(a, BNCPartition::zero(ChiSeq::parse("llll"))), ValidationError);
}

TEST_CASE("join is the least upper bound")
{
    for (int k = 2; k <= 5; ++k) {
        for (const auto& chi : all_chis(k)) {
            auto all = enumerate_bnc(chi);
            for (const auto& s : all)
                for (const auto& p : all) {
                    auto j = join(s, p);
                    CHECK(brute_leq(s.blocks(), j.blocks()));
                    CHECK(brute_leq(p.blocks(), j.blocks()));
                    for (const auto& u : all)
                        if (brute_leq(s.blocks(), u.blocks()) && brute_leq(p.blocks(), u.blocks()))
                            CHECK(brute_leq(j.blocks(), u.blocks()));
                }
        }
    }
}

TEST_CASE("leq agrees with block refinement")
{
    for (const auto& chi : all_chis(4)) {
        auto all = enumerate_bnc(chi);
        for (const auto& s : all)
            for (const auto& p : all) CHECK(leq(s, p) == brute_leq(s.blocks(), p.blocks()));
    }
}

TEST_CASE("mobius examples")
{
    auto c2 = ChiSeq::parse("lr");
    CHECK(mobius(BNCPartition::zero(c2), BNCPartition::one(c2)) == -1);
    auto c3 = ChiSeq::parse("lrl");
    CHECK(mobius(BNCPartition::zero(c3), BNCPartition::one(c3)) == 2);
    for (const auto& pi : enumerate_bnc(c3)) CHECK(mobius(pi, pi) == 1);
    BNCPartition a({{1, 2}, {3}}, c3);
    BNCPartition b({{1, 3}, {2}}, c3);
    CHECK_THROWS_AS(mobius(a, b), ValidationError);
}

TEST_CASE("mobius defining identity")
{
    for (int k = 1; k <= 6; ++k) {
        for (const auto& chi : all_chis(k)) {
            if (k == 6 && chi.at(1) == Side::right) continue;
            auto all = enumerate_bnc(chi);
            for (const auto& s : all)
                for (const auto& p : all) {
                    if (!leq(s, p)) continue;
                    long long total = 0;
                    for (const auto& r : all)
                        if (leq(s, r) && leq(r, p)) total += mobius(r, p);
                    CHECK(total == (s == p ? 1 : 0));
                }
        }
    }
}

TEST_CASE("mobius matches the Kreweras product formula")
{
    for (int k = 1; k <= 6; ++k) {
        auto chi = ChiSeq(std::vector<Side>(static_cast<std::size_t>(k), Side::left));
        auto top = BNCPartition::one(chi);
        for (const auto& s : enumerate_bnc(chi)) {
            long long expected = 1;
            for (const auto& b : kreweras(s.blocks(), k)) expected *= signed_catalan(b.size());
            CHECK(mobius(s, top) == expected);
            long long from_zero = 1;
            for (const auto& b : s.blocks()) from_zero *= signed_catalan(b.size());
            CHECK(mobius(BNCPartition::zero(chi), s) == from_zero);
        }
    }
}

TEST_CASE("interval lists exactly the elements between")
{
    auto chi = ChiSeq::parse("lrrl");
    auto all = enumerate_bnc(chi);
    for (const auto& s : all)
        for (const auto& p : all) {
            if (!leq(s, p)) continue;
            std::size_t count = 0;
            for (const auto& r : all)
                if (leq(s, r) && leq(r, p)) ++count;
            auto iv = interval(s, p);
            CHECK(iv.size() == count);
            for (const auto& r : iv) CHECK((leq(s, r) && leq(r, p)));
        }
}

TEST_CASE("partial mobius inversion")
{
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> dist(-9, 9);
    for (int k = 1; k <= 5; ++k) {
        for (const auto& chi : all_chis(k)) {
            auto all = enumerate_bnc(chi);
            std::vector<long long> g(all.size());
            for (auto& v : g) v = dist(rng);
            std::vector<long long> f(all.size(), 0);
            for (std::size_t r = 0; r < all.size(); ++r)
                for (std::size_t w = 0; w < all.size(); ++w)
                    if (leq(all[w], all[r])) f[r] += g[w];
            for (const auto& s : all)
                for (const auto& p : all) {
                    if (!leq(s, p)) continue;
                    long long lhs = 0, rhs = 0;
                    for (std::size_t r = 0; r < all.size(); ++r)
                        if (leq(s, all[r]) && leq(all[r], p)) lhs += f[r] * mobius(all[r], p);
                    for (std::size_t w = 0; w < all.size(); ++w)
                        if (join(all[w], s) == p) rhs += g[w];
                    CHECK(lhs == rhs);
                }
        }
    }
}

TEST_CASE("hat embedding examples")
{
    auto chi = ChiSeq::parse("lr");
    auto chi_prime = ChiSeq::parse("rl");
    CHECK(hat_chi(chi, chi_prime) == ChiSeq::parse("lrl"));
    CHECK(hat_embed(BNCPartition::one(chi), chi_prime) == BNCPartition::one(hat_chi(chi, chi_prime)));
    auto z = hat_embed(BNCPartition::zero(chi), chi_prime);
    CHECK(testsupport::sorted_blocks(z.blocks()) == Blocks{{1}, {2, 3}});
    CHECK(z == hat_zero(chi, chi_prime));
    CHECK_THROWS_AS(hat_embed(BNCPartition::one(chi), ChiSeq::parse("l")), ValidationError);
}

TEST_CASE("hat embedding preserves order and mobius values")
{
    for (int p = 1; p <= 4; ++p) {
        for (const auto& chi : all_chis(p)) {
            for (int extra = 1; extra <= 2; ++extra) {
                for (const auto& chi_prime : all_chis(extra + 1)) {
                    auto all = enumerate_bnc(chi);
                    for (const auto& s : all)
                        for (const auto& q : all) {
                            auto sh = hat_embed(s, chi_prime);
                            auto qh = hat_embed(q, chi_prime);
                            CHECK(leq(s, q) == leq(sh, qh));
                            if (leq(s, q)) CHECK(mobius(s, q) == mobius(sh, qh));
                        }
                }
            }
        }
    }
}
