#include "lewis/env.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace lewis {

RewardMatrix::RewardMatrix(std::vector<std::vector<Reward>> rows, std::string tag)
    : tag_(std::move(tag)) {
    if (rows.empty() || rows.front().empty())
        throw std::invalid_argument("reward matrix must have at least one state and one action");
    num_states_ = rows.size();
    num_actions_ = rows.front().size();
    cells_.reserve(num_states_ * num_actions_);
    for (std::size_t s = 0; s < rows.size(); ++s) {
        const auto& row = rows[s];
        if (row.size() != num_actions_)
            throw std::invalid_argument(fmt::format("reward matrix row {} has {} cells, expected {}", s,
                                                    row.size(), num_actions_));
        std::size_t positives = 0;
        for (Reward v : row) {
            if (v > 0) ++positives;
            else if (!(v < 0))
                throw std::invalid_argument(
                    fmt::format("reward matrix row {}: non-positive cells must be strictly negative", s));
        }
        if (positives != 1)
            throw std::invalid_argument(
                fmt::format("reward matrix row {} has {} positive cells, expected exactly one", s, positives));
        cells_.insert(cells_.end(), row.begin(), row.end());
    }
}

ActionId RewardMatrix::rewarded_action(StateId s) const {
    for (std::size_t a = 0; a < num_actions_; ++a)
        if (cell(s.index, a) > 0) return ActionId{a};
    throw std::logic_error("unreachable: row without positive cell");
}

std::vector<std::vector<Reward>> RewardMatrix::rows() const {
    std::vector<std::vector<Reward>> out(num_states_);
    for (std::size_t s = 0; s < num_states_; ++s)
        out[s].assign(cells_.begin() + s * num_actions_, cells_.begin() + (s + 1) * num_actions_);
    return out;
}

Reward RewardMatrix::min_cell() const { return *std::min_element(cells_.begin(), cells_.end()); }
Reward RewardMatrix::max_cell() const { return *std::max_element(cells_.begin(), cells_.end()); }

std::string permutation_tag(const std::vector<std::size_t>& sigma) {
    const std::size_t n = sigma.size();
    bool identity = true;
    for (std::size_t i = 0; i < n; ++i) identity = identity && sigma[i] == i;
    if (n == 2) return identity ? "R1" : "R2";
    std::string digits;
    for (std::size_t i = 0; i < n; ++i) {
        if (n > 10 && i > 0) digits += '-';
        digits += std::to_string(sigma[i]);
    }
    return fmt::format("R_{}x{}_perm{}", n, n, digits);
}

RewardMatrix make_permutation_reward(std::size_t num_states, std::size_t num_actions,
                                     const std::vector<std::size_t>& sigma, Reward pos, Reward neg) {
    if (num_states != num_actions)
        throw std::invalid_argument("permutation reward requires num_states == num_actions");
    if (!(pos > 0)) throw std::invalid_argument("positive reward must be > 0");
    if (!(neg < 0)) throw std::invalid_argument("negative reward must be < 0");
    if (sigma.size() != num_states) throw std::invalid_argument("sigma must map every state");
    std::vector<bool> seen(num_actions, false);
    for (std::size_t a : sigma) {
        if (a >= num_actions || seen[a]) throw std::invalid_argument("sigma is not a bijection");
        seen[a] = true;
    }
    std::vector<std::vector<Reward>> rows(num_states, std::vector<Reward>(num_actions, neg));
    for (std::size_t s = 0; s < num_states; ++s) rows[s][sigma[s]] = pos;
    return RewardMatrix(std::move(rows), permutation_tag(sigma));
}

std::vector<RewardMatrix> enumerate_reward_functions(std::size_t num_states, std::size_t num_actions) {
    if (num_states != num_actions)
        throw std::invalid_argument("enumeration requires num_states == num_actions");
    if (num_states == 0) throw std::invalid_argument("enumeration requires at least one state");
    std::vector<std::size_t> sigma(num_states);
    std::iota(sigma.begin(), sigma.end(), std::size_t{0});
    std::vector<RewardMatrix> out;
    do {
        out.push_back(make_permutation_reward(num_states, num_actions, sigma));
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return out;
}

RewardFamily default_asymmetric_family() {
    return {RewardMatrix({{1, -1}, {-3, 1}}, "R_asym1"), RewardMatrix({{-3, 1}, {1, -1}}, "R_asym2")};
}

const RewardMatrix& sample_reward_function(RandomStream& rng, const RewardFamily& family) {
    if (family.empty()) throw std::invalid_argument("reward family is empty");
    return family[rng.uniform_index(family.size())];
}

StateId sample_state(RandomStream& rng, std::size_t num_states) {
    if (num_states == 0) throw std::invalid_argument("num_states must be >= 1");
    return StateId{rng.uniform_index(num_states)};
}

} // namespace lewis
