#include "lewis/game.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace lewis {

void validate(const PairingPolicy& policy) {
    if (policy.population.size() < 2) throw std::invalid_argument("pairing needs at least two agents");
    auto sorted = policy.population;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("population lists an agent twice");
    if (policy.mode == PairingMode::Unrestricted) return;

    std::vector<AgentId> grouped;
    std::size_t non_empty = 0;
    for (const auto& g : policy.groups) {
        if (!g.empty()) ++non_empty;
        for (AgentId a : g) {
            if (!std::binary_search(sorted.begin(), sorted.end(), a))
                throw std::invalid_argument(fmt::format("group member {} is not in the population", a));
            grouped.push_back(a);
        }
    }
    std::sort(grouped.begin(), grouped.end());
    if (std::adjacent_find(grouped.begin(), grouped.end()) != grouped.end())
        throw std::invalid_argument("groups are not disjoint");
    if (non_empty < 2) throw std::invalid_argument("cross-group pairing requires at least two non-empty groups");
}

std::vector<AgentPair> allowed_pairs(const PairingPolicy& policy) {
    validate(policy);
    auto group_of = [&](AgentId a) -> std::optional<std::size_t> {
        for (std::size_t g = 0; g < policy.groups.size(); ++g)
            if (std::find(policy.groups[g].begin(), policy.groups[g].end(), a) != policy.groups[g].end()) return g;
        return std::nullopt;
    };
    std::vector<AgentPair> out;
    const auto& pop = policy.population;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        for (std::size_t j = i + 1; j < pop.size(); ++j) {
            if (policy.mode == PairingMode::CrossGroupOnly) {
                // Agents outside every group never meet in restricted mode.
                auto gi = group_of(pop[i]);
                auto gj = group_of(pop[j]);
                if (!gi || !gj || *gi == *gj) continue;
            }
            out.emplace_back(pop[i], pop[j]);
        }
    }
    return out;
}

AgentPair select_pair_and_roles(std::span<const AgentPair> pairs, RandomStream& rng) {
    if (pairs.empty()) throw std::invalid_argument("no allowed pairs");
    const auto& p = pairs[rng.uniform_index(pairs.size())];
    return rng.uniform_index(2) == 0 ? p : AgentPair{p.second, p.first};
}

double EpsilonSchedule::at(std::uint64_t episode_index) const {
    if (decay_episodes == 0 || episode_index >= decay_episodes) return 0.0;
    return start * (1.0 - static_cast<double>(episode_index) / static_cast<double>(decay_episodes));
}

EpisodeRecord play_episode(const RewardMatrix& env, Agent& sender, Agent& receiver, double epsilon,
                           RandomStream& rng, std::uint64_t episode_index) {
    if (&sender == &receiver || sender.id() == receiver.id())
        throw std::invalid_argument("sender and receiver must be different agents");
    EpisodeRecord rec;
    rec.episode_index = episode_index;
    rec.sender = sender.id();
    rec.receiver = receiver.id();
    rec.state = sample_state(rng, env.num_states());
    const auto choice = sender.select_signal(rec.state, epsilon, rng);
    rec.signal = choice.signal;
    rec.minted = choice.minted;
    rec.intent = sender.intended_action(rec.signal);
    rec.action = receiver.select_action(rec.signal, epsilon, rng);
    rec.reward = reward(env, rec.state, rec.action);
    rec.intent_met = rec.intent.has_value() && *rec.intent == rec.action;

    sender.update_sender(rec.signal, rec.state, rec.reward);
    receiver.update_receiver(rec.signal, rec.action, rec.reward);
    sender.note_participation(rec.signal);
    receiver.note_participation(rec.signal);
    return rec;
}

} // namespace lewis
