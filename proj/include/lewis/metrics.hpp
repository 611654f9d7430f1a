#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "lewis/agent.hpp"
#include "lewis/env.hpp"

namespace lewis {

struct EpisodeSample {
    Reward reward = 0;
    bool intent_met = false;
    bool positive = false;  // reward > 0
};

// Fixed-capacity ring over the most recent episodes.
class WindowAccumulator {
public:
    explicit WindowAccumulator(std::size_t capacity = 100);

    void push(EpisodeSample s);
    void clear();
    std::size_t capacity() const { return ring_.size(); }
    std::size_t size() const { return count_ < ring_.size() ? count_ : ring_.size(); }
    std::uint64_t seen() const { return count_; }

    // Visits the live samples, oldest first.
    template <class F>
    void for_each(F&& f) const {
        const std::size_t n = size();
        const std::size_t start = count_ < ring_.size() ? 0 : head_;
        for (std::size_t k = 0; k < n; ++k) f(ring_[(start + k) % ring_.size()]);
    }

private:
    std::vector<EpisodeSample> ring_;
    std::size_t head_ = 0;
    std::uint64_t count_ = 0;
};

// All three throw std::invalid_argument on an empty window.
double windowed_reward(const WindowAccumulator& acc);
double intent_met_ratio(const WindowAccumulator& acc);
double successful_misunderstanding_ratio(const WindowAccumulator& acc);
double positive_reward_ratio(const WindowAccumulator& acc);

// Read-only view of a population's vocabularies and greedy interpretations.
struct AgentView {
    AgentId id = 0;
    std::size_t vocabulary_size = 0;
    std::vector<std::pair<SignalId, std::size_t>> sender_interpretations;
    std::vector<std::pair<SignalId, std::size_t>> receiver_interpretations;
};

struct PopulationSnapshot {
    std::vector<AgentView> agents;
};

PopulationSnapshot take_snapshot(std::span<const Agent> agents);

double mean_vocabulary(const PopulationSnapshot& pop);

// Mean over qualifying (signal, role) combinations of
// (|majority| - 1) / (|population| - 1). A combination qualifies when at least
// min_holders agents hold a non-tied interpretation; with none qualifying the
// result is 1. min_holders = 1 scores a signal only one agent interprets as 0.
double alignment(const PopulationSnapshot& pop, std::size_t min_holders = 2);

// Alignment restricted to the listed agents, as if they were the whole
// population. Requires at least two ids.
double group_alignment(const PopulationSnapshot& pop, std::span<const AgentId> subset,
                       std::size_t min_holders = 2);

struct MetricsCheckpoint {
    std::uint64_t episode = 0;
    double reward = 0;
    double vocabulary = 0;
    double alignment = 0;
    double intent_met = 0;
    double suc_mis = 0;
    double success = 0;  // share of positive-reward episodes
    std::optional<double> group_alignment;
};

enum class RunLabel { Aligned, SuccessfulMisunderstanding, Unconverged };

std::string_view to_string(RunLabel label);
RunLabel parse_run_label(std::string_view text);

RunLabel classify_run(const MetricsCheckpoint& phase_end);

// Fixed equal-width bins over [lo, hi]; values on an inner edge go to the bin
// starting there, and hi goes to the top bin.
std::vector<std::size_t> histogram(std::span<const double> values, std::size_t bins = 10, double lo = 0.0,
                                   double hi = 1.0);

} // namespace lewis
