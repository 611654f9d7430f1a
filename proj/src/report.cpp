#include "lewis/report.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace lewis {

namespace fs = std::filesystem;

std::string format_metric(double value) {
    if (std::isnan(value)) return "";
    // Avoid "-0.0000" for tiny negative round-off.
    if (std::fabs(value) < 0.00005) value = 0.0;
    return fmt::format("{:.4f}", value);
}

std::string episode_label(int phase, std::uint64_t phase1_episodes, std::uint64_t absolute_episode) {
    auto short_count = [](std::uint64_t n) {
        return (n >= 1000 && n % 1000 == 0) ? fmt::format("{}k", n / 1000) : fmt::format("{}", n);
    };
    if (phase == 1) return short_count(absolute_episode);
    return short_count(phase1_episodes) + "+" + short_count(absolute_episode - phase1_episodes);
}

namespace {

constexpr const char* kMetricNames[] = {"reward", "vocabulary", "alignment", "intent_met", "suc_mis"};

std::array<const MetricStats*, 5> five(const CheckpointSummary& c) {
    return {&c.reward, &c.vocabulary, &c.alignment, &c.intent_met, &c.suc_mis};
}

std::string optional_metric(const std::optional<double>& v) { return v ? format_metric(*v) : std::string(); }

} // namespace

void write_aggregate_csv(std::ostream& out, const BatchSummary& summary) {
    out << "experiment,phase,episode";
    for (const char* m : kMetricNames) out << ',' << m << "_mean," << m << "_sd";
    out << ",success_mean,success_sd,group_alignment_mean,group_alignment_sd\n";
    for (const auto& c : summary.checkpoints) {
        out << summary.experiment << ',' << c.phase << ',' << c.episode;
        for (const auto* s : five(c)) out << ',' << format_metric(s->mean) << ',' << format_metric(s->sd);
        out << ',' << format_metric(c.success.mean) << ',' << format_metric(c.success.sd);
        if (c.group_alignment)
            out << ',' << format_metric(c.group_alignment->mean) << ',' << format_metric(c.group_alignment->sd);
        else
            out << ",,";
        out << '\n';
    }
}

namespace {

constexpr const char* kRunColumns[] = {"reward",  "vocabulary", "alignment",       "intent_met",
                                       "suc_mis", "success",    "group_alignment", "label"};

std::string runs_header() {
    std::string h = "rep,reward_tag";
    for (int ph = 1; ph <= 2; ++ph)
        for (const char* c : kRunColumns) h += fmt::format(",p{}_{}", ph, c);
    return h;
}

} // namespace

void write_runs_csv(std::ostream& out, const std::vector<RunTrace>& runs) {
    out << runs_header() << '\n';
    for (const auto& run : runs) {
        out << run.rep << ',' << run.reward_tag;
        for (const auto& phase : run.phases) {
            const auto& cp = phase.end();
            out << ',' << format_metric(cp.reward) << ',' << format_metric(cp.vocabulary) << ','
                << format_metric(cp.alignment) << ',' << format_metric(cp.intent_met) << ','
                << format_metric(cp.suc_mis) << ',' << format_metric(cp.success) << ','
                << optional_metric(cp.group_alignment) << ',' << to_string(phase.label);
        }
        out << '\n';
    }
}

void write_histogram_csv(std::ostream& out, const std::vector<HistogramSet>& histograms) {
    out << "phase,metric,bin_low,bin_high,count\n";
    for (const auto& h : histograms) {
        const double width = 1.0 / static_cast<double>(h.counts.size());
        for (std::size_t b = 0; b < h.counts.size(); ++b)
            out << h.phase << ',' << h.metric << ',' << format_metric(width * static_cast<double>(b)) << ','
                << format_metric(width * static_cast<double>(b + 1)) << ',' << h.counts[b] << '\n';
    }
}

void write_crosstab_csv(std::ostream& out, const Crosstab& table) {
    const RunLabel labels[] = {RunLabel::Aligned, RunLabel::SuccessfulMisunderstanding, RunLabel::Unconverged};
    out << "phase1_label,phase2_label,count\n";
    for (RunLabel a : labels)
        for (RunLabel b : labels)
            out << to_string(a) << ',' << to_string(b) << ',' << table[label_index(a)][label_index(b)] << '\n';
}

void write_trace_csv(std::ostream& out, const std::vector<TracedEpisode>& episodes) {
    out << "episode,phase,sender,receiver,state,signal,minted,action,reward,intent_met\n";
    for (const auto& t : episodes) {
        const auto& r = t.record;
        out << r.episode_index << ',' << t.phase << ',' << r.sender << ',' << r.receiver << ',' << r.state.index << ','
            << to_string(r.signal) << ',' << (r.minted ? 1 : 0) << ',' << r.action.index << ','
            << format_metric(r.reward) << ',' << (r.intent_met ? 1 : 0) << '\n';
    }
}

void print_summary(std::ostream& out, const ExperimentConfig& config, const BatchSummary& summary) {
    fmt::print(out, "Experiment {} ({} repetitions, environment {})\n", summary.experiment, summary.repetitions,
               config.environment.family_name);
    const bool grouped = std::any_of(summary.checkpoints.begin(), summary.checkpoints.end(),
                                     [](const auto& c) { return c.group_alignment.has_value(); });
    fmt::print(out, "{:<10} {:>17} {:>17} {:>17} {:>17} {:>17}", "Episodes", "Reward", "|Vocabulary|", "Alignment",
               "Intent Met", "Suc. Mis.");
    if (grouped) fmt::print(out, " {:>17}", "Group Align.");
    out << '\n';
    int current_phase = 0;
    for (const auto& c : summary.checkpoints) {
        if (c.phase != current_phase) {
            current_phase = c.phase;
            const std::size_t agents = c.phase == 1 ? config.phase1.agents : config.phase2_agents();
            const bool restricted = c.phase == 1 && !config.phase1.groups.empty();
            fmt::print(out, "-- {} phase: {} agents ({} partners)\n",
                       c.phase == 1 ? "Convergence" : "Robustness test", agents,
                       restricted ? "restricted" : "unrestricted");
        }
        fmt::print(out, "{:<10}", episode_label(c.phase, config.phase1.episodes, c.episode));
        for (const auto* s : five(c))
            fmt::print(out, " {:>17}", fmt::format("{} ({})", format_metric(s->mean), format_metric(s->sd)));
        if (grouped && c.group_alignment)
            fmt::print(out, " {:>17}",
                       fmt::format("{} ({})", format_metric(c.group_alignment->mean),
                                   format_metric(c.group_alignment->sd)));
        out << '\n';
    }
}

std::vector<fs::path> write_bundle(const fs::path& dir, const BatchResult& result) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw std::runtime_error(fmt::format("cannot create output directory '{}'", dir.string()));
    std::vector<fs::path> written;
    auto emit = [&](const std::string& name, auto&& writer) {
        const auto path = dir / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
        writer(out);
        out.flush();
        if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", path.string()));
        written.push_back(path);
    };
    emit("aggregate.csv", [&](std::ostream& o) { write_aggregate_csv(o, result.summary); });
    emit("runs.csv", [&](std::ostream& o) { write_runs_csv(o, result.runs); });
    emit("histograms.csv", [&](std::ostream& o) { write_histogram_csv(o, result.summary.histograms); });
    emit("crosstab.csv", [&](std::ostream& o) { write_crosstab_csv(o, result.summary.crosstab); });
    for (const auto& run : result.runs)
        if (!run.episodes.empty())
            emit(fmt::format("trace_rep{}.csv", run.rep), [&](std::ostream& o) { write_trace_csv(o, run.episodes); });
    return written;
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(fmt::format("runs CSV line {}: '{}' is not a number", line_no, s));
    }
}

} // namespace

std::vector<RunRow> parse_runs_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("runs CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != runs_header()) throw std::runtime_error("runs CSV has an unexpected header");
    const std::size_t expected = 2 + 2 * std::size(kRunColumns);
    std::vector<RunRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = split(line);
        if (f.size() != expected)
            throw std::runtime_error(
                fmt::format("runs CSV line {}: expected {} fields, found {}", line_no, expected, f.size()));
        RunRow row;
        try {
            row.rep = std::stoul(f[0]);
        } catch (const std::exception&) {
            throw std::runtime_error(fmt::format("runs CSV line {}: bad repetition index '{}'", line_no, f[0]));
        }
        row.reward_tag = f[1];
        for (std::size_t ph = 0; ph < 2; ++ph) {
            const std::size_t base = 2 + ph * std::size(kRunColumns);
            auto& cp = row.phase_end[ph];
            cp.reward = parse_double(f[base + 0], line_no);
            cp.vocabulary = parse_double(f[base + 1], line_no);
            cp.alignment = parse_double(f[base + 2], line_no);
            cp.intent_met = parse_double(f[base + 3], line_no);
            cp.suc_mis = parse_double(f[base + 4], line_no);
            cp.success = parse_double(f[base + 5], line_no);
            if (!f[base + 6].empty()) cp.group_alignment = parse_double(f[base + 6], line_no);
            try {
                row.labels[ph] = parse_run_label(f[base + 7]);
            } catch (const std::exception& e) {
                throw std::runtime_error(fmt::format("runs CSV line {}: {}", line_no, e.what()));
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("runs CSV has no data rows");
    return rows;
}

RunsReport report_from_runs(const std::vector<RunRow>& rows) {
    RunsReport r;
    r.runs = rows.size();
    for (int ph = 0; ph < 2; ++ph) {
        for (const auto& metric : histogram_metrics()) {
            std::vector<double> values;
            for (const auto& row : rows) values.push_back(histogram_value(row.phase_end[ph], metric));
            r.histograms.push_back({ph + 1, metric, histogram(values)});
        }
    }
    std::vector<std::pair<RunLabel, RunLabel>> labels;
    for (const auto& row : rows) labels.emplace_back(row.labels[0], row.labels[1]);
    r.crosstab = persistence_crosstab(labels);
    return r;
}

void print_report(std::ostream& out, const RunsReport& report) {
    fmt::print(out, "{} runs\n", report.runs);
    for (const auto& h : report.histograms) {
        fmt::print(out, "phase {} {:<10}", h.phase, h.metric);
        for (auto c : h.counts) fmt::print(out, " {:>5}", c);
        out << '\n';
    }
    const RunLabel labels[] = {RunLabel::Aligned, RunLabel::SuccessfulMisunderstanding, RunLabel::Unconverged};
    fmt::print(out, "\nphase-1 label \\ phase-2 label {:>10} {:>10} {:>12}\n", "aligned", "suc_mis", "unconverged");
    for (RunLabel a : labels) {
        fmt::print(out, "{:<29}", to_string(a));
        for (RunLabel b : labels) fmt::print(out, " {:>10}", report.crosstab[label_index(a)][label_index(b)]);
        out << '\n';
    }
}

} // namespace lewis
