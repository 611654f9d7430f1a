#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "lewis/config.hpp"
#include "lewis/experiment.hpp"

namespace lewis {

// Fixed 4-decimal rendering used by every CSV and the printed summary.
std::string format_metric(double value);

// "100", "5k", "10k+100" style labels for checkpoint rows.
std::string episode_label(int phase, std::uint64_t phase1_episodes, std::uint64_t absolute_episode);

void write_aggregate_csv(std::ostream& out, const BatchSummary& summary);
void write_runs_csv(std::ostream& out, const std::vector<RunTrace>& runs);
void write_histogram_csv(std::ostream& out, const std::vector<HistogramSet>& histograms);
void write_crosstab_csv(std::ostream& out, const Crosstab& table);
void write_trace_csv(std::ostream& out, const std::vector<TracedEpisode>& episodes);

void print_summary(std::ostream& out, const ExperimentConfig& config, const BatchSummary& summary);

// Writes aggregate.csv, runs.csv, histograms.csv and, when a repetition was
// traced, trace_rep<N>.csv into dir (created if missing).
std::vector<std::filesystem::path> write_bundle(const std::filesystem::path& dir, const BatchResult& result);

// Phase-end values of one repetition as stored in runs.csv.
struct RunRow {
    std::size_t rep = 0;
    std::string reward_tag;
    std::array<MetricsCheckpoint, 2> phase_end;
    std::array<RunLabel, 2> labels{RunLabel::Unconverged, RunLabel::Unconverged};
};

// Throws std::runtime_error with the offending line on malformed input, and
// on a file without data rows.
std::vector<RunRow> parse_runs_csv(std::istream& in);

struct RunsReport {
    std::size_t runs = 0;
    std::vector<HistogramSet> histograms;
    Crosstab crosstab{};
};

RunsReport report_from_runs(const std::vector<RunRow>& rows);
void print_report(std::ostream& out, const RunsReport& report);

} // namespace lewis
