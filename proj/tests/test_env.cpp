#include <doctest.h>

#include <algorithm>
#include <array>
#include <map>
#include <vector>
#include <stdexcept>

#include "lewis/env.hpp"

using namespace lewis;

namespace {

// Counts bijections of {0..n-1} by brute force over all n^n maps.
std::size_t count_bijections(std::size_t n) {
    std::vector<std::size_t> f(n, 0);
    std::size_t count = 0;
    while (true) {
        std::vector<bool> hit(n, false);
        bool ok = true;
        for (auto v : f) {
            if (hit[v]) ok = false;
            hit[v] = true;
        }
        if (ok) ++count;
        std::size_t k = 0;
        while (k < n && ++f[k] == n) f[k++] = 0;
        if (k == n) break;
    }
    return count;
}

} // namespace

TEST_CASE("permutation rewards") {
    auto r1 = make_permutation_reward(2, 2, {0, 1});
    CHECK(r1.cell(0, 0) == 1);
    CHECK(r1.cell(0, 1) == -1);
    CHECK(r1.cell(1, 0) == -1);
    CHECK(r1.cell(1, 1) == 1);
    CHECK(r1.tag() == "R1");

    auto r2 = make_permutation_reward(2, 2, {1, 0});
    CHECK(r2.cell(0, 1) == 1);
    CHECK(r2.cell(1, 0) == 1);
    CHECK(r2.cell(0, 0) == -1);
    CHECK(r2.tag() == "R2");

    auto rot = make_permutation_reward(3, 3, {1, 2, 0});
    for (std::size_t s = 0; s < 3; ++s) {
        int pos = 0;
        for (std::size_t a = 0; a < 3; ++a) pos += rot.cell(s, a) > 0;
        CHECK(pos == 1);
    }
    CHECK(rot.rewarded_action(StateId{2}) == ActionId{0});
    CHECK(rot.tag() == "R_3x3_perm120");
}

TEST_CASE("permutation reward rejects bad input") {
    CHECK_THROWS_AS(make_permutation_reward(2, 2, {0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(make_permutation_reward(2, 2, {0, 1}, 0.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_permutation_reward(2, 2, {0, 1}, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_permutation_reward(2, 3, {0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(RewardMatrix({{1, 1}, {-1, 1}}, "x"), std::invalid_argument);
    CHECK_THROWS_AS(RewardMatrix({{1, 0}, {-1, 1}}, "x"), std::invalid_argument);
}

TEST_CASE("enumeration matches a brute-force count") {
    CHECK(enumerate_reward_functions(1, 1).size() == 1);
    CHECK(enumerate_reward_functions(2, 2).size() == 2);
    for (std::size_t n = 1; n <= 5; ++n) {
        auto all = enumerate_reward_functions(n, n);
        CHECK(all.size() == count_bijections(n));
        for (std::size_t i = 0; i < all.size(); ++i)
            for (std::size_t j = i + 1; j < all.size(); ++j) CHECK_FALSE(all[i] == all[j]);
    }
    auto two = enumerate_reward_functions(2, 2);
    CHECK(two[0].tag() == "R1");
    CHECK(two[1].tag() == "R2");
    CHECK_THROWS(enumerate_reward_functions(2, 3));
}

TEST_CASE("sampling a reward function") {
    RandomStream rng(3);
    auto fam = enumerate_reward_functions(2, 2);
    int r1 = 0;
    for (int i = 0; i < 10000; ++i) r1 += sample_reward_function(rng, fam).tag() == "R1";
    CHECK(r1 / 10000.0 == doctest::Approx(0.5).epsilon(0.04));

    RewardFamily one{make_permutation_reward(2, 2, {1, 0})};
    for (int i = 0; i < 10; ++i) CHECK(sample_reward_function(rng, one).tag() == "R2");

    auto six = enumerate_reward_functions(3, 3);
    std::map<std::string, int> counts;
    for (int i = 0; i < 6000; ++i) counts[sample_reward_function(rng, six).tag()]++;
    REQUIRE(counts.size() == 6);
    double chi2 = 0;
    for (auto& [tag, c] : counts) chi2 += (c - 1000.0) * (c - 1000.0) / 1000.0;
    CHECK(chi2 < 20.52);  // 5 dof, p = 0.001

    RewardFamily empty;
    CHECK_THROWS(sample_reward_function(rng, empty));
}

TEST_CASE("sampling states") {
    RandomStream rng(8);
    int zero = 0;
    for (int i = 0; i < 10000; ++i) zero += sample_state(rng, 2).index == 0;
    CHECK(std::abs(zero / 10000.0 - 0.5) < 0.02);
    for (int i = 0; i < 20; ++i) CHECK(sample_state(rng, 1).index == 0);
    std::array<int, 3> c{};
    for (int i = 0; i < 30000; ++i) c[sample_state(rng, 3).index]++;
    for (int k : c) CHECK(std::abs(k / 30000.0 - 1.0 / 3) < 0.015);
}

TEST_CASE("reward lookup") {
    auto r1 = make_permutation_reward(2, 2, {0, 1});
    CHECK(reward(r1, StateId{0}, ActionId{0}) == 1);
    CHECK(reward(r1, StateId{0}, ActionId{1}) == -1);
    auto asym = default_asymmetric_family();
    REQUIRE(asym.size() == 2);
    CHECK(reward(asym[0], StateId{1}, ActionId{0}) == -3);
    CHECK(reward(asym[0], StateId{1}, ActionId{0}) == reward(asym[0], StateId{1}, ActionId{0}));
    CHECK(asym[0].min_cell() == -3);
    CHECK(asym[0].max_cell() == 1);
}
