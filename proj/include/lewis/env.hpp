#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

#include "lewis/rng.hpp"

namespace lewis {

struct StateId {
    std::size_t index = 0;
    auto operator<=>(const StateId&) const = default;
};

struct ActionId {
    std::size_t index = 0;
    auto operator<=>(const ActionId&) const = default;
};

using Reward = double;

// Dense reward table R(s, a). Every row has exactly one strictly positive
// cell; all other cells are strictly negative. Immutable once built.
class RewardMatrix {
public:
    // Row-major rows; throws std::invalid_argument if the row invariant fails.
    RewardMatrix(std::vector<std::vector<Reward>> rows, std::string tag);

    std::size_t num_states() const { return num_states_; }
    std::size_t num_actions() const { return num_actions_; }
    const std::string& tag() const { return tag_; }

    Reward cell(std::size_t s, std::size_t a) const { return cells_[s * num_actions_ + a]; }
    // The action with positive reward in state s.
    ActionId rewarded_action(StateId s) const;

    std::vector<std::vector<Reward>> rows() const;
    Reward min_cell() const;
    Reward max_cell() const;

    bool operator==(const RewardMatrix&) const = default;

private:
    std::size_t num_states_ = 0;
    std::size_t num_actions_ = 0;
    std::vector<Reward> cells_;
    std::string tag_;
};

// cell(s, a) = pos iff a == sigma[s], else neg.
RewardMatrix make_permutation_reward(std::size_t num_states, std::size_t num_actions,
                                     const std::vector<std::size_t>& sigma, Reward pos = 1.0,
                                     Reward neg = -1.0);

// One matrix per permutation of the actions, in lexicographic order of sigma
// (so for 2x2 the list is {R1 = identity, R2 = swap}).
std::vector<RewardMatrix> enumerate_reward_functions(std::size_t num_states, std::size_t num_actions);

std::string permutation_tag(const std::vector<std::size_t>& sigma);

using RewardFamily = std::vector<RewardMatrix>;

// Two-matrix asymmetric 2x2 family. A wrong a0 costs -3 and a wrong a1 costs
// -1, which biases a receiver toward a1. This is a configurable stand-in.
RewardFamily default_asymmetric_family();

// Uniform draw over the family; one decision from the stream.
const RewardMatrix& sample_reward_function(RandomStream& rng, const RewardFamily& family);

StateId sample_state(RandomStream& rng, std::size_t num_states);

inline Reward reward(const RewardMatrix& r, StateId s, ActionId a) { return r.cell(s.index, a.index); }

} // namespace lewis
