#include "lewis/agent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace lewis {

std::string to_string(SignalId id) { return fmt::format("{}-{}", id.creator, id.serial); }

// --- UtilityTable -----------------------------------------------------------

std::vector<UtilityTable::Entry>::iterator UtilityTable::lower(SignalId c) {
    return std::lower_bound(entries_.begin(), entries_.end(), c,
                            [](const Entry& e, SignalId id) { return e.first < id; });
}

std::vector<UtilityTable::Entry>::const_iterator UtilityTable::lower(SignalId c) const {
    return std::lower_bound(entries_.begin(), entries_.end(), c,
                            [](const Entry& e, SignalId id) { return e.first < id; });
}

const std::vector<Reward>* UtilityTable::find(SignalId c) const {
    auto it = lower(c);
    return (it != entries_.end() && it->first == c) ? &it->second : nullptr;
}

std::vector<Reward>& UtilityTable::ensure(SignalId c) {
    auto it = lower(c);
    if (it == entries_.end() || it->first != c) it = entries_.emplace(it, c, std::vector<Reward>(width_, 0.0));
    return it->second;
}

void UtilityTable::add(SignalId c, std::size_t slot, Reward r) {
    auto it = lower(c);
    if (it == entries_.end() || it->first != c)
        throw std::logic_error(fmt::format("utility update for unknown signal {}", to_string(c)));
    if (slot >= width_) throw std::out_of_range("utility slot out of range");
    it->second[slot] += r;
}

bool UtilityTable::erase(SignalId c) {
    auto it = lower(c);
    if (it == entries_.end() || it->first != c) return false;
    entries_.erase(it);
    return true;
}

// --- policies ---------------------------------------------------------------

std::vector<double> softmax_with_epsilon(std::span<const double> values, double epsilon) {
    if (values.empty()) throw std::invalid_argument("softmax_with_epsilon: empty input");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
    const double top = *std::max_element(values.begin(), values.end());
    std::vector<double> p(values.size());
    double z = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        p[i] = std::exp(values[i] - top);
        z += p[i];
    }
    const double uniform = epsilon / static_cast<double>(values.size());
    for (double& x : p) x = (1.0 - epsilon) * (x / z) + uniform;
    return p;
}

std::optional<std::size_t> unique_argmax(std::span<const Reward> values) {
    if (values.empty()) return std::nullopt;
    std::size_t best = 0;
    bool tied = false;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) {
            best = i;
            tied = false;
        } else if (values[i] == values[best]) {
            tied = true;
        }
    }
    if (tied) return std::nullopt;
    return best;
}

// --- Agent ------------------------------------------------------------------

Agent::Agent(AgentId id, std::size_t num_states, std::size_t num_actions, AgentParams params)
    : id_(id), params_(params), num_states_(num_states), num_actions_(num_actions), sender_(num_states),
      receiver_(num_actions) {
    if (num_states == 0 || num_actions == 0) throw std::invalid_argument("agent needs states and actions");
}

std::optional<std::uint64_t> Agent::last_used(SignalId c) const {
    auto it = std::lower_bound(last_used_.begin(), last_used_.end(), c,
                               [](const auto& e, SignalId id) { return e.first < id; });
    if (it == last_used_.end() || it->first != c) return std::nullopt;
    return it->second;
}

void Agent::touch(SignalId c) {
    auto it = std::lower_bound(last_used_.begin(), last_used_.end(), c,
                               [](const auto& e, SignalId id) { return e.first < id; });
    if (it == last_used_.end() || it->first != c) last_used_.emplace(it, c, participation_);
}

namespace {

bool dominates(std::span<const Reward> v, std::size_t s, bool strict) {
    for (std::size_t t = 0; t < v.size(); ++t) {
        if (t == s) continue;
        if (strict ? !(v[s] > v[t]) : !(v[s] >= v[t])) return false;
    }
    return true;
}

} // namespace

std::vector<SignalId> Agent::candidate_signals(StateId s) const {
    if (s.index >= num_states_) throw std::out_of_range("state out of range");
    std::vector<SignalId> out;
    if (params_.candidate_rule == CandidateRule::Strict) {
        for (const auto& [c, v] : sender_.entries())
            if (dominates(v, s.index, true)) out.push_back(c);
        return out;
    }
    // Weak rule: walk the merged vocabulary in id order. Receiver-only signals
    // have an all-zero sender vector, which ties everywhere and qualifies.
    auto se = sender_.entries();
    auto re = receiver_.entries();
    std::size_t i = 0, j = 0;
    while (i < se.size() || j < re.size()) {
        if (j == re.size() || (i < se.size() && se[i].first <= re[j].first)) {
            if (j < re.size() && se[i].first == re[j].first) ++j;
            if (dominates(se[i].second, s.index, false)) out.push_back(se[i].first);
            ++i;
        } else {
            out.push_back(re[j].first);
            ++j;
        }
    }
    return out;
}

SignalChoice Agent::select_signal(StateId s, double epsilon, RandomStream& rng) {
    auto candidates = candidate_signals(s);
    if (candidates.empty()) {
        const SignalId fresh{id_, mint_serial_++};
        sender_.ensure(fresh);
        touch(fresh);
        return {fresh, true};
    }
    std::vector<double> values(candidates.size(), 0.0);
    for (std::size_t k = 0; k < candidates.size(); ++k)
        if (const auto* v = sender_.find(candidates[k])) values[k] = (*v)[s.index];
    const auto probs = softmax_with_epsilon(values, epsilon);
    const SignalId chosen = candidates[rng.categorical(probs)];
    sender_.ensure(chosen);
    touch(chosen);
    return {chosen, false};
}

ActionId Agent::select_action(SignalId c, double epsilon, RandomStream& rng) {
    const auto& v = receiver_.ensure(c);
    touch(c);
    const auto probs = softmax_with_epsilon(v, epsilon);
    return ActionId{rng.categorical(probs)};
}

void Agent::update_sender(SignalId c, StateId s, Reward r) { sender_.add(c, s.index, r); }

void Agent::update_receiver(SignalId c, ActionId a, Reward r) { receiver_.add(c, a.index, r); }

std::vector<SignalId> Agent::note_participation(SignalId c) {
    ++participation_;
    auto it = std::lower_bound(last_used_.begin(), last_used_.end(), c,
                               [](const auto& e, SignalId id) { return e.first < id; });
    if (it != last_used_.end() && it->first == c) it->second = participation_;
    else last_used_.emplace(it, c, participation_);

    std::vector<SignalId> purged;
    std::erase_if(last_used_, [&](const auto& e) {
        if (participation_ - e.second > params_.forget_after) {
            purged.push_back(e.first);
            return true;
        }
        return false;
    });
    for (SignalId p : purged) {
        sender_.erase(p);
        receiver_.erase(p);
    }
    return purged;
}

std::optional<StateId> Agent::sender_interpretation(SignalId c) const {
    const auto* v = sender_.find(c);
    if (!v) return std::nullopt;
    if (auto i = unique_argmax(*v)) return StateId{*i};
    return std::nullopt;
}

std::optional<ActionId> Agent::receiver_interpretation(SignalId c) const {
    const auto* v = receiver_.find(c);
    if (!v) return std::nullopt;
    if (auto i = unique_argmax(*v)) return ActionId{*i};
    return std::nullopt;
}

std::vector<SignalId> Agent::vocabulary() const {
    std::vector<SignalId> out;
    out.reserve(sender_.size() + receiver_.size());
    for (const auto& e : sender_.entries()) out.push_back(e.first);
    for (const auto& e : receiver_.entries()) out.push_back(e.first);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::size_t Agent::vocabulary_size() const {
    auto se = sender_.entries();
    auto re = receiver_.entries();
    std::size_t i = 0, j = 0, n = 0;
    while (i < se.size() && j < re.size()) {
        if (se[i].first < re[j].first) ++i;
        else if (re[j].first < se[i].first) ++j;
        else { ++i; ++j; }
        ++n;
    }
    return n + (se.size() - i) + (re.size() - j);
}

void Agent::set_sender_utilities(SignalId c, std::vector<Reward> values) {
    if (values.size() != num_states_) throw std::invalid_argument("sender vector size mismatch");
    sender_.ensure(c) = std::move(values);
    touch(c);
}

void Agent::set_receiver_utilities(SignalId c, std::vector<Reward> values) {
    if (values.size() != num_actions_) throw std::invalid_argument("receiver vector size mismatch");
    receiver_.ensure(c) = std::move(values);
    touch(c);
}

} // namespace lewis
