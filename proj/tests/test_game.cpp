#include <doctest.h>

#include <map>
#include <vector>
#include <stdexcept>

#include "lewis/game.hpp"
#include "properties.hpp"

using namespace lewis;

namespace {

std::string join(const props::Failures& f) {
    std::string out;
    for (const auto& s : f) out += s + "\n";
    return out;
}

} // namespace

TEST_CASE("allowed pairs") {
    PairingPolicy open{{0, 1, 2}, {}, PairingMode::Unrestricted};
    CHECK(allowed_pairs(open) == std::vector<AgentPair>{{0, 1}, {0, 2}, {1, 2}});

    PairingPolicy three{{0, 1, 2}, {{0, 1}, {2}}, PairingMode::CrossGroupOnly};
    CHECK(allowed_pairs(three) == std::vector<AgentPair>{{0, 2}, {1, 2}});

    PairingPolicy four{{0, 1, 2, 3}, {{0, 1}, {2, 3}}, PairingMode::CrossGroupOnly};
    CHECK(allowed_pairs(four) == std::vector<AgentPair>{{0, 2}, {0, 3}, {1, 2}, {1, 3}});

    PairingPolicy lonely{{0, 1, 2}, {{0, 1, 2}}, PairingMode::CrossGroupOnly};
    CHECK_THROWS_AS(allowed_pairs(lonely), std::invalid_argument);
    PairingPolicy overlap{{0, 1, 2}, {{0, 1}, {1, 2}}, PairingMode::CrossGroupOnly};
    CHECK_THROWS_AS(allowed_pairs(overlap), std::invalid_argument);
    PairingPolicy tiny{{0}, {}, PairingMode::Unrestricted};
    CHECK_THROWS_AS(allowed_pairs(tiny), std::invalid_argument);
}

TEST_CASE("pair and role selection frequencies") {
    RandomStream rng(17);
    std::vector<AgentPair> two{{0, 1}};
    int zero_sends = 0;
    for (int i = 0; i < 10000; ++i) zero_sends += select_pair_and_roles(two, rng).first == 0;
    CHECK(std::abs(zero_sends / 10000.0 - 0.5) < 0.02);

    PairingPolicy open{{0, 1, 2}, {}, PairingMode::Unrestricted};
    auto pairs = allowed_pairs(open);
    std::map<AgentPair, int> counts;
    const int n = 30000;
    for (int i = 0; i < n; ++i) counts[select_pair_and_roles(pairs, rng)]++;
    REQUIRE(counts.size() == 6);
    double chi2 = 0;
    for (auto& [p, c] : counts) chi2 += (c - n / 6.0) * (c - n / 6.0) / (n / 6.0);
    CHECK(chi2 < 20.52);  // 5 dof, p = 0.001

    RandomStream a(3), b(3);
    select_pair_and_roles(pairs, a);
    b.next();
    b.next();
    CHECK(a == b);
}

TEST_CASE("epsilon schedule") {
    EpsilonSchedule eps;
    CHECK(eps.at(0) == doctest::Approx(0.2));
    CHECK(eps.at(2500) == doctest::Approx(0.1));
    CHECK(eps.at(5000) == 0.0);
    CHECK(eps.at(12345) == 0.0);
    EpsilonSchedule flat{0.3, 0, EpsilonClock::Global};
    CHECK(flat.at(0) == 0.0);
}

TEST_CASE("episode with naive agents") {
    const auto env = make_permutation_reward(2, 2, {0, 1});
    RandomStream rng(12);
    int positive = 0;
    for (int i = 0; i < 4000; ++i) {
        Agent s(0, 2, 2), r(1, 2, 2);
        auto rec = play_episode(env, s, r, 0.2, rng, 0);
        CHECK(rec.minted);
        CHECK(rec.signal == SignalId{0, 0});
        CHECK_FALSE(rec.intent.has_value());
        CHECK_FALSE(rec.intent_met);
        CHECK(rec.reward == reward(env, rec.state, rec.action));
        positive += rec.reward > 0;
    }
    CHECK(std::abs(positive / 4000.0 - 0.5) < 0.03);

    Agent s(0, 2, 2);
    CHECK_THROWS(play_episode(env, s, s, 0.0, rng, 0));
}

TEST_CASE("episode with an aligned converged pair") {
    const auto env = make_permutation_reward(2, 2, {0, 1});
    const SignalId x{0, 0}, y{0, 1};
    Agent s(0, 2, 2), r(1, 2, 2);
    for (Agent* a : {&s, &r}) {
        a->set_sender_utilities(x, {50, -50});
        a->set_sender_utilities(y, {-50, 50});
        a->set_receiver_utilities(x, {50, -50});
        a->set_receiver_utilities(y, {-50, 50});
    }
    RandomStream rng(5);
    for (int i = 0; i < 200; ++i) {
        auto rec = play_episode(env, s, r, 0.0, rng, static_cast<std::uint64_t>(i));
        CHECK(rec.reward == 1);
        CHECK(rec.intent_met);
    }
}

TEST_CASE("episode replay is bit-identical") {
    const auto env = make_permutation_reward(2, 2, {1, 0});
    auto play = [&] {
        std::vector<Agent> pop;
        for (AgentId i = 0; i < 3; ++i) pop.emplace_back(i, 2, 2);
        PairingPolicy open{{0, 1, 2}, {}, PairingMode::Unrestricted};
        auto pairs = allowed_pairs(open);
        RandomStream rng(77);
        std::vector<EpisodeRecord> recs;
        for (std::uint64_t e = 0; e < 2000; ++e) {
            auto [s, r] = select_pair_and_roles(pairs, rng);
            recs.push_back(play_episode(env, pop[s], pop[r], EpsilonSchedule{}.at(e), rng, e));
        }
        return recs;
    };
    auto a = play(), b = play();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].signal == b[i].signal);
        CHECK(a[i].action == b[i].action);
        CHECK(a[i].state == b[i].state);
        CHECK(a[i].sender == b[i].sender);
    }
}

TEST_CASE("property: one cell per role per episode") {
    auto f = props::one_cell_per_role(101, 20000);
    CHECK_MESSAGE(f.empty(), join(f));
}

TEST_CASE("property: staleness stays within the forgetting bound") {
    auto f = props::staleness_bound(102, 20000);
    CHECK_MESSAGE(f.empty(), join(f));
}

TEST_CASE("property: minted ids never collide") {
    auto f = props::minted_uniqueness(103, 20000);
    CHECK_MESSAGE(f.empty(), join(f));
}

TEST_CASE("property: restricted mode never pairs a group with itself") {
    auto f = props::restricted_pair_exclusion(104, 5);
    CHECK_MESSAGE(f.empty(), join(f));
}

TEST_CASE("property: softmax laws") {
    auto f = props::softmax_laws(105, 5000);
    CHECK_MESSAGE(f.empty(), join(f));
}

TEST_CASE("frozen anti-aligned tables: every episode is a successful misunderstanding") {
    auto f = props::anti_aligned_oracle();
    CHECK_MESSAGE(f.empty(), join(f));
}
