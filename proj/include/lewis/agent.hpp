#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lewis/env.hpp"
#include "lewis/rng.hpp"

namespace lewis {

using AgentId = std::uint32_t;

// A signal is named by the agent that minted it and that agent's mint counter,
// so ids never collide within a run. Ordering is (creator, serial).
struct SignalId {
    AgentId creator = 0;
    std::uint32_t serial = 0;
    auto operator<=>(const SignalId&) const = default;
};

std::string to_string(SignalId id);

// Accumulated reward totals per signal, one slot per state (sender role) or
// per action (receiver role). Entries are kept sorted by SignalId.
class UtilityTable {
public:
    using Entry = std::pair<SignalId, std::vector<Reward>>;

    explicit UtilityTable(std::size_t width = 0) : width_(width) {}

    std::size_t width() const { return width_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    bool contains(SignalId c) const { return find(c) != nullptr; }

    const std::vector<Reward>* find(SignalId c) const;
    // Inserts a zero vector if c is absent.
    std::vector<Reward>& ensure(SignalId c);
    // Throws std::logic_error if c is absent.
    void add(SignalId c, std::size_t slot, Reward r);
    bool erase(SignalId c);

    std::span<const Entry> entries() const { return entries_; }

    bool operator==(const UtilityTable&) const = default;

private:
    std::vector<Entry>::iterator lower(SignalId c);
    std::vector<Entry>::const_iterator lower(SignalId c) const;

    std::size_t width_;
    std::vector<Entry> entries_;
};

enum class CandidateRule {
    // A signal qualifies for state s if V_s(c, s) > V_s(c, s') for all s' != s.
    Strict,
    // A signal from the whole vocabulary qualifies if V_s(c, s) >= V_s(c, s')
    // for all s' != s; signals known only as a receiver count as all-zero.
    Weak,
};

struct AgentParams {
    CandidateRule candidate_rule = CandidateRule::Weak;
    // Purge a signal once more than this many participated episodes have
    // passed since its last use.
    std::uint64_t forget_after = 20;
};

// (1 - epsilon) * softmax(values) + epsilon / n. Temperature 1.
std::vector<double> softmax_with_epsilon(std::span<const double> values, double epsilon);

struct SignalChoice {
    SignalId signal;
    bool minted = false;
};

class Agent {
public:
    Agent(AgentId id, std::size_t num_states, std::size_t num_actions, AgentParams params = {});

    AgentId id() const { return id_; }
    const AgentParams& params() const { return params_; }
    const UtilityTable& sender_table() const { return sender_; }
    const UtilityTable& receiver_table() const { return receiver_; }
    std::uint64_t participation_count() const { return participation_; }
    std::uint32_t mint_serial() const { return mint_serial_; }
    std::optional<std::uint64_t> last_used(SignalId c) const;
    std::span<const std::pair<SignalId, std::uint64_t>> last_used_entries() const { return last_used_; }

    // Signals eligible for state s under the agent's candidate rule, sorted.
    std::vector<SignalId> candidate_signals(StateId s) const;

    // Samples among candidates by softmax_with_epsilon over V_s(., s); mints a
    // fresh signal when there are none. Minting consumes no randomness.
    SignalChoice select_signal(StateId s, double epsilon, RandomStream& rng);

    // Inserts a zero receiver vector for unknown signals, then samples an action.
    ActionId select_action(SignalId c, double epsilon, RandomStream& rng);

    void update_sender(SignalId c, StateId s, Reward r);
    void update_receiver(SignalId c, ActionId a, Reward r);

    // Marks c as used in one more participated episode and forgets stale
    // signals. Returns the purged signals in id order.
    std::vector<SignalId> note_participation(SignalId c);

    std::optional<StateId> sender_interpretation(SignalId c) const;
    std::optional<ActionId> receiver_interpretation(SignalId c) const;
    // Greedy action this agent would take for c as a receiver.
    std::optional<ActionId> intended_action(SignalId c) const { return receiver_interpretation(c); }

    // Union of both tables, sorted.
    std::vector<SignalId> vocabulary() const;
    std::size_t vocabulary_size() const;

    // Test hook: overwrite a whole utility vector (inserting if needed).
    void set_sender_utilities(SignalId c, std::vector<Reward> values);
    void set_receiver_utilities(SignalId c, std::vector<Reward> values);

    bool operator==(const Agent&) const = default;

private:
    void touch(SignalId c);

    AgentId id_;
    AgentParams params_;
    std::size_t num_states_;
    std::size_t num_actions_;
    UtilityTable sender_;
    UtilityTable receiver_;
    std::uint64_t participation_ = 0;
    std::vector<std::pair<SignalId, std::uint64_t>> last_used_;
    std::uint32_t mint_serial_ = 0;
};

// Index of the unique maximum, or nullopt on a tie.
std::optional<std::size_t> unique_argmax(std::span<const Reward> values);

} // namespace lewis
