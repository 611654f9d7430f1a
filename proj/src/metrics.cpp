#include "lewis/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lewis {

WindowAccumulator::WindowAccumulator(std::size_t capacity) : ring_(capacity) {
    if (capacity == 0) throw std::invalid_argument("window capacity must be positive");
}

void WindowAccumulator::push(EpisodeSample s) {
    ring_[head_] = s;
    head_ = (head_ + 1) % ring_.size();
    ++count_;
}

void WindowAccumulator::clear() {
    head_ = 0;
    count_ = 0;
}

namespace {

void require_samples(const WindowAccumulator& acc) {
    if (acc.size() == 0) throw std::invalid_argument("metric over an empty window");
}

template <class Pred>
double window_ratio(const WindowAccumulator& acc, Pred pred) {
    require_samples(acc);
    std::size_t hits = 0;
    acc.for_each([&](const EpisodeSample& s) { hits += pred(s) ? 1 : 0; });
    return static_cast<double>(hits) / static_cast<double>(acc.size());
}

} // namespace

double windowed_reward(const WindowAccumulator& acc) {
    require_samples(acc);
    double sum = 0;
    acc.for_each([&](const EpisodeSample& s) { sum += s.reward; });
    return sum / static_cast<double>(acc.size());
}

double intent_met_ratio(const WindowAccumulator& acc) {
    return window_ratio(acc, [](const EpisodeSample& s) { return s.intent_met; });
}

double successful_misunderstanding_ratio(const WindowAccumulator& acc) {
    return window_ratio(acc, [](const EpisodeSample& s) { return s.positive && !s.intent_met; });
}

double positive_reward_ratio(const WindowAccumulator& acc) {
    return window_ratio(acc, [](const EpisodeSample& s) { return s.positive; });
}

PopulationSnapshot take_snapshot(std::span<const Agent> agents) {
    PopulationSnapshot pop;
    pop.agents.reserve(agents.size());
    for (const auto& a : agents) {
        AgentView v;
        v.id = a.id();
        v.vocabulary_size = a.vocabulary_size();
        for (const auto& [c, vals] : a.sender_table().entries())
            if (auto i = unique_argmax(vals)) v.sender_interpretations.emplace_back(c, *i);
        for (const auto& [c, vals] : a.receiver_table().entries())
            if (auto i = unique_argmax(vals)) v.receiver_interpretations.emplace_back(c, *i);
        pop.agents.push_back(std::move(v));
    }
    return pop;
}

double mean_vocabulary(const PopulationSnapshot& pop) {
    if (pop.agents.empty()) throw std::invalid_argument("mean_vocabulary of an empty population");
    double sum = 0;
    for (const auto& a : pop.agents) sum += static_cast<double>(a.vocabulary_size);
    return sum / static_cast<double>(pop.agents.size());
}

namespace {

using Interp = std::pair<SignalId, std::size_t>;

// Accumulates the per-combination scores of one role into (sum, count).
void score_role(std::vector<Interp>& held, std::size_t population, std::size_t min_holders, double& sum,
                std::size_t& count) {
    std::sort(held.begin(), held.end());
    const double denom = static_cast<double>(population - 1);
    std::size_t i = 0;
    while (i < held.size()) {
        std::size_t j = i;
        std::size_t holders = 0, majority = 0;
        while (j < held.size() && held[j].first == held[i].first) {
            std::size_t k = j;
            while (k < held.size() && held[k] == held[j]) ++k;
            majority = std::max(majority, k - j);
            holders += k - j;
            j = k;
        }
        if (holders >= min_holders) {
            sum += static_cast<double>(majority - 1) / denom;
            ++count;
        }
        i = j;
    }
}

double alignment_of(const std::vector<const AgentView*>& members, std::size_t min_holders) {
    if (members.size() < 2) throw std::invalid_argument("alignment needs at least two agents");
    std::vector<Interp> senders, receivers;
    for (const auto* a : members) {
        senders.insert(senders.end(), a->sender_interpretations.begin(), a->sender_interpretations.end());
        receivers.insert(receivers.end(), a->receiver_interpretations.begin(), a->receiver_interpretations.end());
    }
    double sum = 0;
    std::size_t count = 0;
    score_role(senders, members.size(), min_holders, sum, count);
    score_role(receivers, members.size(), min_holders, sum, count);
    return count == 0 ? 1.0 : sum / static_cast<double>(count);
}

} // namespace

double alignment(const PopulationSnapshot& pop, std::size_t min_holders) {
    if (min_holders < 1) throw std::invalid_argument("alignment: min_holders must be at least 1");
    std::vector<const AgentView*> members;
    for (const auto& a : pop.agents) members.push_back(&a);
    return alignment_of(members, min_holders);
}

double group_alignment(const PopulationSnapshot& pop, std::span<const AgentId> subset, std::size_t min_holders) {
    if (min_holders < 1) throw std::invalid_argument("alignment: min_holders must be at least 1");
    if (subset.size() < 2) throw std::invalid_argument("group alignment needs at least two agents");
    std::vector<const AgentView*> members;
    for (AgentId id : subset) {
        auto it = std::find_if(pop.agents.begin(), pop.agents.end(), [&](const AgentView& a) { return a.id == id; });
        if (it == pop.agents.end()) throw std::invalid_argument("group member not in snapshot");
        members.push_back(&*it);
    }
    return alignment_of(members, min_holders);
}

std::string_view to_string(RunLabel label) {
    switch (label) {
    case RunLabel::Aligned: return "aligned";
    case RunLabel::SuccessfulMisunderstanding: return "successful_misunderstanding";
    case RunLabel::Unconverged: return "unconverged";
    }
    return "unconverged";
}

RunLabel parse_run_label(std::string_view text) {
    if (text == "aligned") return RunLabel::Aligned;
    if (text == "successful_misunderstanding") return RunLabel::SuccessfulMisunderstanding;
    if (text == "unconverged") return RunLabel::Unconverged;
    throw std::invalid_argument("unknown run label: " + std::string(text));
}

RunLabel classify_run(const MetricsCheckpoint& phase_end) {
    if (phase_end.reward >= 0.9) {
        if (phase_end.intent_met >= 0.9) return RunLabel::Aligned;
        if (phase_end.intent_met <= 0.1) return RunLabel::SuccessfulMisunderstanding;
    }
    return RunLabel::Unconverged;
}

std::vector<std::size_t> histogram(std::span<const double> values, std::size_t bins, double lo, double hi) {
    if (bins == 0 || !(hi > lo)) throw std::invalid_argument("histogram needs bins > 0 and hi > lo");
    std::vector<std::size_t> counts(bins, 0);
    const double width = hi - lo;
    for (double v : values) {
        if (!(v >= lo && v <= hi)) throw std::invalid_argument("histogram value out of range: " + std::to_string(v));
        // Small slack so decimal edges such as 0.3 land in the bin they open.
        auto b = static_cast<std::size_t>(std::floor((v - lo) / width * static_cast<double>(bins) + 1e-9));
        counts[std::min(b, bins - 1)]++;
    }
    return counts;
}

} // namespace lewis
