#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "lewis/agent.hpp"
#include "lewis/env.hpp"
#include "lewis/rng.hpp"

namespace lewis {

enum class PairingMode { Unrestricted, CrossGroupOnly };

struct PairingPolicy {
    std::vector<AgentId> population;
    // Disjoint groups covering a subset of the population. Only consulted in
    // CrossGroupOnly mode.
    std::vector<std::vector<AgentId>> groups;
    PairingMode mode = PairingMode::Unrestricted;
};

using AgentPair = std::pair<AgentId, AgentId>;

// Throws std::invalid_argument on an ill-formed policy.
void validate(const PairingPolicy& policy);

// Unordered pairs (first < second in population order) allowed to meet.
std::vector<AgentPair> allowed_pairs(const PairingPolicy& policy);

// Uniform pair, then uniform role flip. Returns (sender, receiver).
AgentPair select_pair_and_roles(std::span<const AgentPair> pairs, RandomStream& rng);

enum class EpsilonClock {
    // The schedule restarts at the start of every phase.
    PerPhase,
    // One clock over the whole experiment.
    Global,
};

struct EpsilonSchedule {
    double start = 0.2;
    std::uint64_t decay_episodes = 5000;
    EpsilonClock clock = EpsilonClock::PerPhase;

    // Linear decay from start to 0 over decay_episodes, then 0.
    double at(std::uint64_t episode_index) const;
};

struct EpisodeRecord {
    std::uint64_t episode_index = 0;
    AgentId sender = 0;
    AgentId receiver = 0;
    StateId state;
    SignalId signal;
    bool minted = false;
    ActionId action;
    Reward reward = 0;
    std::optional<ActionId> intent;
    bool intent_met = false;
};

// One round of the game: state, signal, sender intent (read before any
// update), action, reward, both updates, then forgetting on both agents.
EpisodeRecord play_episode(const RewardMatrix& env, Agent& sender, Agent& receiver, double epsilon,
                           RandomStream& rng, std::uint64_t episode_index);

} // namespace lewis
