#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lewis/agent.hpp"
#include "lewis/env.hpp"
#include "lewis/game.hpp"

namespace lewis {

// Carries every problem found, not just the first.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

enum class Intervention { PopulationIncrease, Ungroup };

struct PhaseOneConfig {
    std::size_t agents = 2;
    // Non-empty means cross-group-only pairing during phase 1.
    std::vector<std::vector<AgentId>> groups;
    std::uint64_t episodes = 10000;
};

struct EnvironmentConfig {
    // "symmetric_NxN", "asymmetric_2x2" or "explicit".
    std::string family_name = "symmetric_2x2";
    RewardFamily family;
};

struct ExperimentConfig {
    std::string name;
    PhaseOneConfig phase1;
    Intervention intervention = Intervention::PopulationIncrease;
    std::size_t new_agents = 1;
    std::uint64_t phase2_episodes = 10000;
    EnvironmentConfig environment;
    EpsilonSchedule epsilon;
    AgentParams agent;
    // Applied to both phases, counted from each phase start.
    std::vector<std::uint64_t> checkpoints{100, 500, 5000, 10000};
    std::size_t window = 100;
    std::size_t alignment_min_holders = 2;
    std::size_t repetitions = 1000;
    std::uint64_t master_seed = 1;

    std::size_t num_states() const { return environment.family.front().num_states(); }
    std::size_t num_actions() const { return environment.family.front().num_actions(); }
    std::size_t phase2_agents() const {
        return phase1.agents + (intervention == Intervention::PopulationIncrease ? new_agents : 0);
    }
};

// Semantic checks; returns every violation (empty means valid).
std::vector<std::string> validate(const ExperimentConfig& config);

// Structural parse. Throws ConfigError listing every field it could not read,
// then every semantic violation.
ExperimentConfig parse_config(const nlohmann::json& doc);
nlohmann::json to_json(const ExperimentConfig& config);

// Resolves a family name such as "symmetric_3x3" or "asymmetric_2x2".
RewardFamily named_family(std::string_view name);

// Sets a dotted path ("phase1.episodes") in a config document. The value is
// parsed as JSON when possible, otherwise stored as a string.
void apply_override(nlohmann::json& doc, std::string_view key, std::string_view value);
// Splits "key=value" and applies it.
void apply_override(nlohmann::json& doc, std::string_view assignment);

std::vector<std::string> preset_names();
bool is_preset(std::string_view name);
nlohmann::json preset_document(std::string_view name);

// A preset name or a path to a JSON file.
nlohmann::json load_config_document(const std::string& name_or_path);

} // namespace lewis
