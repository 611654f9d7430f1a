#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lewis/config.hpp"
#include "lewis/game.hpp"
#include "lewis/metrics.hpp"

namespace lewis {

struct TracedEpisode {
    int phase = 1;
    EpisodeRecord record;
};

struct PhaseResult {
    std::vector<MetricsCheckpoint> checkpoints;  // one per config checkpoint
    RunLabel label = RunLabel::Unconverged;      // from the last checkpoint

    const MetricsCheckpoint& end() const { return checkpoints.back(); }
};

struct RunTrace {
    std::size_t rep = 0;
    std::string reward_tag;
    std::array<PhaseResult, 2> phases;
    std::vector<TracedEpisode> episodes;  // filled only when tracing
};

struct MetricStats {
    double mean = 0;
    double sd = 0;  // population normalisation
};

struct CheckpointSummary {
    int phase = 1;
    std::uint64_t episode = 0;  // absolute episode index
    MetricStats reward, vocabulary, alignment, intent_met, suc_mis, success;
    std::optional<MetricStats> group_alignment;
};

using Crosstab = std::array<std::array<std::size_t, 3>, 3>;  // [phase-1 label][phase-2 label]

struct HistogramSet {
    int phase = 1;
    std::string metric;
    std::vector<std::size_t> counts;  // 10 bins over [0, 1]
};

struct BatchSummary {
    std::string experiment;
    std::size_t repetitions = 0;
    std::vector<CheckpointSummary> checkpoints;
    std::vector<HistogramSet> histograms;
    std::array<std::array<std::size_t, 3>, 2> label_counts{};  // [phase][label]
    Crosstab crosstab{};
};

struct BatchResult {
    std::vector<RunTrace> runs;
    BatchSummary summary;
};

// One seeded repetition of the two-phase protocol. Deterministic in
// (config.master_seed, rep).
RunTrace run_repetition(const ExperimentConfig& config, std::size_t rep, bool trace = false);

// Repetitions spread over `workers` OpenMP threads (0 = runtime default).
// Results are merged in repetition order, so the output does not depend on
// the thread count.
BatchResult run_batch(const ExperimentConfig& config, int workers = 0,
                      std::optional<std::size_t> trace_rep = std::nullopt);

// Single-threaded reference for run_batch.
BatchResult run_batch_serial(const ExperimentConfig& config, std::optional<std::size_t> trace_rep = std::nullopt);

BatchSummary summarize(const ExperimentConfig& config, const std::vector<RunTrace>& runs);

MetricStats mean_and_sd(const std::vector<double>& values);

// Per-run phase-end values in [0, 1] that get histogrammed.
const std::vector<std::string>& histogram_metrics();
double histogram_value(const MetricsCheckpoint& cp, const std::string& metric);

Crosstab persistence_crosstab(const std::vector<std::pair<RunLabel, RunLabel>>& labels);

std::size_t label_index(RunLabel label);

} // namespace lewis
