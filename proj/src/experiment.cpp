#include "lewis/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <omp.h>

namespace lewis {

namespace {

struct WindowPopulationSums {
    double vocabulary = 0;
    double alignment = 0;
    double group_alignment = 0;
    std::size_t episodes = 0;
};

struct PhaseSetup {
    int phase = 1;
    std::uint64_t episodes = 0;
    std::uint64_t first_episode = 0;  // absolute index of the episode before the phase
    std::vector<AgentPair> pairs;
    std::vector<std::vector<AgentId>> groups;  // for within-group alignment
};

PhaseResult run_phase(const ExperimentConfig& config, const PhaseSetup& setup, const RewardMatrix& env,
                      std::vector<Agent>& agents, RandomStream& rng, std::vector<TracedEpisode>* trace) {
    const auto& cps = config.checkpoints;
    WindowAccumulator window(config.window);
    std::vector<WindowPopulationSums> sums(cps.size());
    PhaseResult result;
    result.checkpoints.reserve(cps.size());
    std::size_t next_cp = 0;

    for (std::uint64_t e = 0; e < setup.episodes; ++e) {
        const std::uint64_t clock = config.epsilon.clock == EpsilonClock::PerPhase ? e : setup.first_episode + e;
        const double eps = config.epsilon.at(clock);
        const auto [s, r] = select_pair_and_roles(setup.pairs, rng);
        const auto rec = play_episode(env, agents[s], agents[r], eps, rng, setup.first_episode + e + 1);
        window.push({rec.reward, rec.intent_met, rec.reward > 0});
        if (trace) trace->push_back({setup.phase, rec});

        // Population metrics are only needed inside checkpoint windows.
        const std::uint64_t n = e + 1;
        bool snap_needed = false;
        for (std::size_t k = next_cp; k < cps.size(); ++k)
            snap_needed = snap_needed || (n + config.window > cps[k] && n <= cps[k]);
        if (snap_needed) {
            const auto pop = take_snapshot(agents);
            const double voc = mean_vocabulary(pop);
            const double al = alignment(pop, config.alignment_min_holders);
            double gal = 0;
            std::size_t ng = 0;
            for (const auto& g : setup.groups) {
                if (g.size() < 2) continue;
                gal += group_alignment(pop, g, config.alignment_min_holders);
                ++ng;
            }
            if (ng > 0) gal /= static_cast<double>(ng);
            for (std::size_t k = next_cp; k < cps.size(); ++k) {
                if (n + config.window > cps[k] && n <= cps[k]) {
                    sums[k].vocabulary += voc;
                    sums[k].alignment += al;
                    sums[k].group_alignment += gal;
                    sums[k].episodes++;
                }
            }
        }

        while (next_cp < cps.size() && cps[next_cp] == n) {
            const auto& w = sums[next_cp];
            MetricsCheckpoint cp;
            cp.episode = setup.first_episode + n;
            cp.reward = windowed_reward(window);
            cp.intent_met = intent_met_ratio(window);
            cp.suc_mis = successful_misunderstanding_ratio(window);
            cp.success = positive_reward_ratio(window);
            const double m = static_cast<double>(w.episodes);
            cp.vocabulary = w.vocabulary / m;
            cp.alignment = w.alignment / m;
            if (std::any_of(setup.groups.begin(), setup.groups.end(), [](const auto& g) { return g.size() >= 2; }))
                cp.group_alignment = w.group_alignment / m;
            result.checkpoints.push_back(cp);
            ++next_cp;
        }
    }
    result.label = classify_run(result.end());
    return result;
}

} // namespace

RunTrace run_repetition(const ExperimentConfig& config, std::size_t rep, bool trace) {
    RunTrace out;
    out.rep = rep;
    RandomStream rng = RandomStream::derive(config.master_seed, rep);
    const RewardMatrix& env = sample_reward_function(rng, config.environment.family);
    out.reward_tag = env.tag();

    const std::size_t ns = env.num_states(), na = env.num_actions();
    std::vector<Agent> agents;
    for (std::size_t i = 0; i < config.phase1.agents; ++i)
        agents.emplace_back(static_cast<AgentId>(i), ns, na, config.agent);

    PairingPolicy policy;
    for (const auto& a : agents) policy.population.push_back(a.id());
    if (!config.phase1.groups.empty()) {
        policy.groups = config.phase1.groups;
        policy.mode = PairingMode::CrossGroupOnly;
    }
    PhaseSetup p1{1, config.phase1.episodes, 0, allowed_pairs(policy), config.phase1.groups};
    auto* sink = trace ? &out.episodes : nullptr;
    out.phases[0] = run_phase(config, p1, env, agents, rng, sink);

    // Intervention: new naive agents join, restrictions are lifted.
    if (config.intervention == Intervention::PopulationIncrease) {
        for (std::size_t i = 0; i < config.new_agents; ++i) {
            const auto id = static_cast<AgentId>(agents.size());
            agents.emplace_back(id, ns, na, config.agent);
            policy.population.push_back(id);
        }
    }
    policy.groups.clear();
    policy.mode = PairingMode::Unrestricted;
    PhaseSetup p2{2, config.phase2_episodes, config.phase1.episodes, allowed_pairs(policy), {}};
    out.phases[1] = run_phase(config, p2, env, agents, rng, sink);
    return out;
}

BatchResult run_batch(const ExperimentConfig& config, int workers, std::optional<std::size_t> trace_rep) {
    BatchResult result;
    result.runs.resize(config.repetitions);
    const auto n = static_cast<std::int64_t>(config.repetitions);
    const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto rep = static_cast<std::size_t>(i);
        result.runs[rep] = run_repetition(config, rep, trace_rep && *trace_rep == rep);
    }
    result.summary = summarize(config, result.runs);
    return result;
}

BatchResult run_batch_serial(const ExperimentConfig& config, std::optional<std::size_t> trace_rep) {
    BatchResult result;
    result.runs.reserve(config.repetitions);
    for (std::size_t rep = 0; rep < config.repetitions; ++rep)
        result.runs.push_back(run_repetition(config, rep, trace_rep && *trace_rep == rep));
    result.summary = summarize(config, result.runs);
    return result;
}

MetricStats mean_and_sd(const std::vector<double>& values) {
    if (values.empty()) return {};
    double sum = 0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double ss = 0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(values.size()))};
}

const std::vector<std::string>& histogram_metrics() {
    static const std::vector<std::string> names{"success", "intent_met", "suc_mis"};
    return names;
}

double histogram_value(const MetricsCheckpoint& cp, const std::string& metric) {
    if (metric == "success") return cp.success;
    if (metric == "intent_met") return cp.intent_met;
    if (metric == "suc_mis") return cp.suc_mis;
    throw std::invalid_argument("unknown histogram metric: " + metric);
}

std::size_t label_index(RunLabel label) {
    switch (label) {
    case RunLabel::Aligned: return 0;
    case RunLabel::SuccessfulMisunderstanding: return 1;
    case RunLabel::Unconverged: return 2;
    }
    return 2;
}

Crosstab persistence_crosstab(const std::vector<std::pair<RunLabel, RunLabel>>& labels) {
    Crosstab t{};
    for (const auto& [a, b] : labels) t[label_index(a)][label_index(b)]++;
    return t;
}

BatchSummary summarize(const ExperimentConfig& config, const std::vector<RunTrace>& runs) {
    BatchSummary s;
    s.experiment = config.name;
    s.repetitions = runs.size();
    if (runs.empty()) return s;

    for (int ph = 0; ph < 2; ++ph) {
        for (std::size_t k = 0; k < config.checkpoints.size(); ++k) {
            std::vector<double> rw, vo, al, im, sm, su, ga;
            for (const auto& run : runs) {
                const auto& cp = run.phases[ph].checkpoints.at(k);
                rw.push_back(cp.reward);
                vo.push_back(cp.vocabulary);
                al.push_back(cp.alignment);
                im.push_back(cp.intent_met);
                sm.push_back(cp.suc_mis);
                su.push_back(cp.success);
                if (cp.group_alignment) ga.push_back(*cp.group_alignment);
            }
            CheckpointSummary c;
            c.phase = ph + 1;
            c.episode = runs.front().phases[ph].checkpoints.at(k).episode;
            c.reward = mean_and_sd(rw);
            c.vocabulary = mean_and_sd(vo);
            c.alignment = mean_and_sd(al);
            c.intent_met = mean_and_sd(im);
            c.suc_mis = mean_and_sd(sm);
            c.success = mean_and_sd(su);
            if (ga.size() == runs.size()) c.group_alignment = mean_and_sd(ga);
            s.checkpoints.push_back(c);
        }
        for (const auto& metric : histogram_metrics()) {
            std::vector<double> values;
            for (const auto& run : runs) values.push_back(histogram_value(run.phases[ph].end(), metric));
            s.histograms.push_back({ph + 1, metric, histogram(values)});
        }
        for (const auto& run : runs) s.label_counts[ph][label_index(run.phases[ph].label)]++;
    }
    std::vector<std::pair<RunLabel, RunLabel>> labels;
    for (const auto& run : runs) labels.emplace_back(run.phases[0].label, run.phases[1].label);
    s.crosstab = persistence_crosstab(labels);
    return s;
}

} // namespace lewis
