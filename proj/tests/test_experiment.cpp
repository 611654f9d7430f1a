#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lewis/config.hpp"
#include "lewis/experiment.hpp"
#include "lewis/report.hpp"

using namespace lewis;

namespace {

ExperimentConfig small(const std::string& preset, std::size_t reps = 24, std::uint64_t episodes = 1500) {
    auto cfg = parse_config(preset_document(preset));
    cfg.phase1.episodes = episodes;
    cfg.phase2_episodes = episodes;
    cfg.epsilon.decay_episodes = episodes / 2;
    cfg.checkpoints = {100, episodes / 2, episodes};
    cfg.repetitions = reps;
    return cfg;
}

std::string bundle_text(const BatchResult& r) {
    std::ostringstream out;
    write_aggregate_csv(out, r.summary);
    write_runs_csv(out, r.runs);
    write_histogram_csv(out, r.summary.histograms);
    write_crosstab_csv(out, r.summary.crosstab);
    for (const auto& run : r.runs)
        if (!run.episodes.empty()) write_trace_csv(out, run.episodes);
    return out.str();
}

} // namespace

TEST_CASE("repetitions are deterministic") {
    auto cfg = small("exp2_3unrestricted");
    auto a = run_repetition(cfg, 5, true);
    auto b = run_repetition(cfg, 5, true);
    CHECK(a.reward_tag == b.reward_tag);
    REQUIRE(a.episodes.size() == b.episodes.size());
    for (std::size_t i = 0; i < a.episodes.size(); ++i) {
        CHECK(a.episodes[i].record.signal == b.episodes[i].record.signal);
        CHECK(a.episodes[i].record.action == b.episodes[i].record.action);
    }
    auto c = run_repetition(cfg, 6, true);
    bool differs = a.reward_tag != c.reward_tag;
    for (std::size_t i = 0; i < a.episodes.size() && !differs; ++i)
        differs = a.episodes[i].record.state != c.episodes[i].record.state;
    CHECK(differs);
}

TEST_CASE("parallel batch matches the serial reference byte for byte") {
    for (const char* name : {"exp1_2agents", "exp3b_4restricted"}) {
        auto cfg = small(name, 16, 1000);
        auto serial = bundle_text(run_batch_serial(cfg, 3));
        CHECK(bundle_text(run_batch(cfg, 1, 3)) == serial);
        CHECK(bundle_text(run_batch(cfg, 4, 3)) == serial);
    }
}

TEST_CASE("phase structure follows the intervention") {
    auto cfg = small("exp1_2agents", 1);
    auto run = run_repetition(cfg, 0, true);
    REQUIRE(run.episodes.size() == 3000);
    AgentId max_p1 = 0, max_p2 = 0;
    for (const auto& ep : run.episodes) {
        auto hi = std::max(ep.record.sender, ep.record.receiver);
        if (ep.phase == 1) max_p1 = std::max(max_p1, hi);
        else max_p2 = std::max(max_p2, hi);
    }
    CHECK(max_p1 == 1);
    CHECK(max_p2 == 2);
    CHECK(run.episodes[1500].phase == 2);
    CHECK(run.episodes[1500].record.episode_index == 1501);
    CHECK(run.episodes[1499].phase == 1);
}

TEST_CASE("checkpoints equal window averages over the trace") {
    auto cfg = small("exp2_3unrestricted", 1);
    auto run = run_repetition(cfg, 2, true);
    for (int ph = 0; ph < 2; ++ph) {
        const auto& cps = run.phases[ph].checkpoints;
        REQUIRE(cps.size() == cfg.checkpoints.size());
        for (std::size_t k = 0; k < cps.size(); ++k) {
            const std::uint64_t end = cfg.checkpoints[k] + (ph == 1 ? cfg.phase1.episodes : 0);
            CHECK(cps[k].episode == end);
            double rw = 0, im = 0, sm = 0, su = 0;
            for (std::uint64_t e = end - 100; e < end; ++e) {
                const auto& r = run.episodes[e].record;
                rw += r.reward;
                im += r.intent_met;
                sm += r.reward > 0 && !r.intent_met;
                su += r.reward > 0;
            }
            CHECK(cps[k].reward == doctest::Approx(rw / 100));
            CHECK(cps[k].intent_met == doctest::Approx(im / 100));
            CHECK(cps[k].suc_mis == doctest::Approx(sm / 100));
            CHECK(cps[k].success == doctest::Approx(su / 100));
            CHECK(cps[k].alignment >= 0.0);
            CHECK(cps[k].alignment <= 1.0);
        }
    }
}

TEST_CASE("reward matrices split evenly across repetitions") {
    auto cfg = small("exp1_2agents", 1000, 100);
    cfg.checkpoints = {100};
    auto batch = run_batch(cfg, 0);
    int r1 = 0;
    for (const auto& run : batch.runs) r1 += run.reward_tag == "R1";
    CHECK(std::abs(r1 / 1000.0 - 0.5) <= 0.05);
}

TEST_CASE("labels agree with phase-end metrics") {
    auto cfg = small("exp1_2agents", 40, 3000);
    auto batch = run_batch(cfg, 0);
    std::size_t total = 0;
    for (const auto& run : batch.runs) {
        for (int ph = 0; ph < 2; ++ph) {
            const auto& p = run.phases[ph];
            CHECK(p.label == classify_run(p.end()));
            if (p.label == RunLabel::Aligned) CHECK(p.end().suc_mis <= 0.1 + 1e-12);
            if (p.label == RunLabel::SuccessfulMisunderstanding) CHECK(p.end().suc_mis >= 0.85 - 1e-12);
        }
    }
    for (const auto& row : batch.summary.crosstab)
        for (auto n : row) total += n;
    CHECK(total == 40);
    for (const auto& h : batch.summary.histograms) {
        std::size_t sum = 0;
        for (auto n : h.counts) sum += n;
        CHECK(sum == 40);
    }
    for (const auto& cp : batch.summary.checkpoints) {
        CHECK(cp.reward.sd >= 0);
        CHECK(cp.alignment.mean >= 0);
        CHECK(cp.alignment.mean <= 1);
        CHECK(cp.intent_met.mean <= 1);
    }
}

TEST_CASE("group alignment is reported for grouped phase 1 only") {
    auto cfg = small("exp3b_4restricted", 4);
    auto batch = run_batch(cfg, 0);
    for (const auto& cp : batch.summary.checkpoints) CHECK(cp.group_alignment.has_value() == (cp.phase == 1));
    auto plain = run_batch(small("exp1_2agents", 4), 0);
    for (const auto& cp : plain.summary.checkpoints) CHECK_FALSE(cp.group_alignment.has_value());
}

TEST_CASE("mean and population sd") {
    auto s = mean_and_sd({1, 2, 3, 4});
    CHECK(s.mean == 2.5);
    CHECK(s.sd == doctest::Approx(std::sqrt(1.25)));
    s = mean_and_sd({0.5});
    CHECK(s.sd == 0.0);
}

TEST_CASE("persistence cross-tab") {
    std::vector<std::pair<RunLabel, RunLabel>> all_aligned(5, {RunLabel::Aligned, RunLabel::Aligned});
    auto t = persistence_crosstab(all_aligned);
    CHECK(t[0][0] == 5);
    std::size_t off = 0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            if (i != j) off += t[i][j];
    CHECK(off == 0);

    t = persistence_crosstab({{RunLabel::SuccessfulMisunderstanding, RunLabel::Unconverged},
                              {RunLabel::Aligned, RunLabel::Unconverged}});
    CHECK(t[1][2] == 1);
    CHECK(t[0][2] == 1);
}
