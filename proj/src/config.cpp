#include "lewis/config.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>

#include <fmt/format.h>

namespace lewis {

using nlohmann::json;

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
    std::string out = "invalid experiment configuration:";
    for (const auto& p : problems) out += "\n  - " + p;
    return out;
}

} // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

RewardFamily named_family(std::string_view name) {
    if (name == "asymmetric_2x2") return default_asymmetric_family();
    constexpr std::string_view prefix = "symmetric_";
    if (name.starts_with(prefix)) {
        auto dims = name.substr(prefix.size());
        auto x = dims.find('x');
        if (x != std::string_view::npos) {
            std::size_t n = 0, m = 0;
            auto r1 = std::from_chars(dims.data(), dims.data() + x, n);
            auto r2 = std::from_chars(dims.data() + x + 1, dims.data() + dims.size(), m);
            if (r1.ec == std::errc{} && r2.ec == std::errc{} && r1.ptr == dims.data() + x &&
                r2.ptr == dims.data() + dims.size() && n == m && n >= 1 && n <= 8)
                return enumerate_reward_functions(n, m);
        }
    }
    throw std::invalid_argument(fmt::format("unknown reward family '{}'", name));
}

namespace {

class Reader {
public:
    std::vector<std::string> problems;

    const json* object(const json& parent, const char* key, const std::string& path) {
        if (!parent.contains(key)) return nullptr;
        const auto& v = parent.at(key);
        if (!v.is_object()) {
            problems.push_back(fmt::format("{}.{}: expected an object", path, key));
            return nullptr;
        }
        return &v;
    }

    template <class T>
    void number(const json& parent, const char* key, const std::string& path, T& out) {
        if (!parent.contains(key)) return;
        const auto& v = parent.at(key);
        if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) {
                problems.push_back(fmt::format("{}.{}: expected a number", path, key));
                return;
            }
            out = v.get<T>();
        } else {
            if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
                problems.push_back(fmt::format("{}.{}: expected a non-negative integer", path, key));
                return;
            }
            out = static_cast<T>(v.get<unsigned long long>());
        }
    }

    void string(const json& parent, const char* key, const std::string& path, std::string& out) {
        if (!parent.contains(key)) return;
        const auto& v = parent.at(key);
        if (!v.is_string()) {
            problems.push_back(fmt::format("{}.{}: expected a string", path, key));
            return;
        }
        out = v.get<std::string>();
    }

    void known_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& path) {
        for (const auto& [k, _] : obj.items()) {
            if (std::none_of(keys.begin(), keys.end(), [&](const char* x) { return k == x; }))
                problems.push_back(fmt::format("{}: unknown key '{}'", path, k));
        }
    }
};

RewardFamily parse_matrices(const json& list, std::vector<std::string>& problems) {
    RewardFamily family;
    if (!list.is_array() || list.empty()) {
        problems.push_back("environment.matrices: expected a non-empty list of matrices");
        return family;
    }
    for (std::size_t k = 0; k < list.size(); ++k) {
        const auto& m = list[k];
        try {
            auto rows = m.get<std::vector<std::vector<Reward>>>();
            family.emplace_back(std::move(rows), fmt::format("R_custom{}", k + 1));
        } catch (const std::exception& e) {
            problems.push_back(fmt::format("environment.matrices[{}]: {}", k, e.what()));
        }
    }
    return family;
}

} // namespace

std::vector<std::string> validate(const ExperimentConfig& c) {
    std::vector<std::string> v;
    if (c.name.empty()) v.emplace_back("name: must not be empty");
    if (c.phase1.agents < 2) v.emplace_back("phase1.agents: need at least 2 agents");
    if (c.phase1.episodes == 0) v.emplace_back("phase1.episodes: must be positive");
    if (c.phase2_episodes == 0) v.emplace_back("phase2.episodes: must be positive");
    if (c.repetitions < 1) v.emplace_back("repetitions: must be at least 1");
    if (c.window < 1) v.emplace_back("window: must be at least 1");
    if (c.alignment_min_holders < 1) v.emplace_back("metrics.alignment_min_holders: must be at least 1");
    if (!(c.epsilon.start >= 0.0 && c.epsilon.start <= 1.0)) v.emplace_back("epsilon.start: must lie in [0, 1]");

    if (c.checkpoints.empty()) v.emplace_back("checkpoints: need at least one checkpoint");
    for (auto cp : c.checkpoints) {
        if (cp == 0) v.emplace_back("checkpoints: episode 0 is not a checkpoint");
        if (cp > c.phase1.episodes)
            v.push_back(fmt::format("checkpoints: {} exceeds the {}-episode phase 1", cp, c.phase1.episodes));
        if (cp > c.phase2_episodes)
            v.push_back(fmt::format("checkpoints: {} exceeds the {}-episode phase 2", cp, c.phase2_episodes));
    }
    if (!std::is_sorted(c.checkpoints.begin(), c.checkpoints.end()) ||
        std::adjacent_find(c.checkpoints.begin(), c.checkpoints.end()) != c.checkpoints.end())
        v.emplace_back("checkpoints: must be strictly increasing");

    if (c.environment.family.empty()) {
        v.emplace_back("environment: reward family is empty");
    } else {
        const auto& first = c.environment.family.front();
        for (const auto& m : c.environment.family)
            if (m.num_states() != first.num_states() || m.num_actions() != first.num_actions())
                v.emplace_back("environment: all matrices in a family must share dimensions");
    }

    if (!c.phase1.groups.empty()) {
        if (c.intervention != Intervention::Ungroup)
            v.emplace_back("phase1.groups: grouping is only supported with the 'ungroup' intervention");
        PairingPolicy policy;
        for (std::size_t i = 0; i < c.phase1.agents; ++i) policy.population.push_back(static_cast<AgentId>(i));
        policy.groups = c.phase1.groups;
        policy.mode = PairingMode::CrossGroupOnly;
        try {
            validate(policy);
        } catch (const std::exception& e) {
            v.push_back(fmt::format("phase1.groups: {}", e.what()));
        }
    } else if (c.intervention == Intervention::Ungroup) {
        v.emplace_back("intervention: 'ungroup' requires phase1.groups");
    }
    if (c.intervention == Intervention::PopulationIncrease && c.new_agents < 1)
        v.emplace_back("new_agents: population increase must add at least one agent");
    return v;
}

ExperimentConfig parse_config(const json& doc) {
    Reader r;
    ExperimentConfig c;
    if (!doc.is_object()) throw ConfigError({"configuration must be a JSON object"});
    r.known_keys(doc,
                 {"name", "phase1", "intervention", "new_agents", "phase2", "environment", "epsilon", "agent",
                  "checkpoints", "window", "metrics", "repetitions", "master_seed"},
                 "config");
    r.string(doc, "name", "config", c.name);

    if (const auto* p1 = r.object(doc, "phase1", "config")) {
        r.known_keys(*p1, {"agents", "groups", "episodes"}, "phase1");
        r.number(*p1, "agents", "phase1", c.phase1.agents);
        r.number(*p1, "episodes", "phase1", c.phase1.episodes);
        if (p1->contains("groups")) {
            try {
                c.phase1.groups = p1->at("groups").get<std::vector<std::vector<AgentId>>>();
            } catch (const std::exception&) {
                r.problems.emplace_back("phase1.groups: expected a list of lists of agent indices");
            }
        }
    }
    if (const auto* p2 = r.object(doc, "phase2", "config")) {
        r.known_keys(*p2, {"episodes"}, "phase2");
        r.number(*p2, "episodes", "phase2", c.phase2_episodes);
    }

    std::string intervention = "population_increase";
    r.string(doc, "intervention", "config", intervention);
    if (intervention == "population_increase") c.intervention = Intervention::PopulationIncrease;
    else if (intervention == "ungroup") c.intervention = Intervention::Ungroup;
    else r.problems.push_back(fmt::format("intervention: unknown value '{}'", intervention));
    r.number(doc, "new_agents", "config", c.new_agents);

    if (const auto* env = r.object(doc, "environment", "config")) {
        r.known_keys(*env, {"family", "matrices"}, "environment");
        if (env->contains("matrices")) {
            if (env->contains("family")) r.problems.emplace_back("environment: give either 'family' or 'matrices'");
            c.environment.family_name = "explicit";
            c.environment.family = parse_matrices(env->at("matrices"), r.problems);
        } else {
            r.string(*env, "family", "environment", c.environment.family_name);
        }
    }
    if (c.environment.family_name != "explicit") {
        try {
            c.environment.family = named_family(c.environment.family_name);
        } catch (const std::exception& e) {
            r.problems.push_back(fmt::format("environment.family: {}", e.what()));
        }
    }

    if (const auto* eps = r.object(doc, "epsilon", "config")) {
        r.known_keys(*eps, {"start", "decay_episodes", "clock"}, "epsilon");
        r.number(*eps, "start", "epsilon", c.epsilon.start);
        r.number(*eps, "decay_episodes", "epsilon", c.epsilon.decay_episodes);
        std::string clock = "per_phase";
        r.string(*eps, "clock", "epsilon", clock);
        if (clock == "per_phase") c.epsilon.clock = EpsilonClock::PerPhase;
        else if (clock == "global") c.epsilon.clock = EpsilonClock::Global;
        else r.problems.push_back(fmt::format("epsilon.clock: unknown value '{}'", clock));
    }
    if (const auto* ag = r.object(doc, "agent", "config")) {
        r.known_keys(*ag, {"candidate_rule", "forget_after"}, "agent");
        std::string rule = "weak";
        r.string(*ag, "candidate_rule", "agent", rule);
        if (rule == "weak") c.agent.candidate_rule = CandidateRule::Weak;
        else if (rule == "strict") c.agent.candidate_rule = CandidateRule::Strict;
        else r.problems.push_back(fmt::format("agent.candidate_rule: unknown value '{}'", rule));
        r.number(*ag, "forget_after", "agent", c.agent.forget_after);
    }

    if (doc.contains("checkpoints")) {
        try {
            c.checkpoints = doc.at("checkpoints").get<std::vector<std::uint64_t>>();
        } catch (const std::exception&) {
            r.problems.emplace_back("checkpoints: expected a list of episode counts");
        }
    }
    r.number(doc, "window", "config", c.window);
    if (const auto* m = r.object(doc, "metrics", "config")) {
        r.known_keys(*m, {"alignment_min_holders"}, "metrics");
        r.number(*m, "alignment_min_holders", "metrics", c.alignment_min_holders);
    }
    r.number(doc, "repetitions", "config", c.repetitions);
    r.number(doc, "master_seed", "config", c.master_seed);

    // Fields that failed to parse keep their defaults, so the semantic pass
    // still has something sensible to look at.
    auto problems = std::move(r.problems);
    for (auto& v : validate(c))
        if (std::find(problems.begin(), problems.end(), v) == problems.end()) problems.push_back(std::move(v));
    if (!problems.empty()) throw ConfigError(std::move(problems));
    return c;
}

json to_json(const ExperimentConfig& c) {
    json doc;
    doc["name"] = c.name;
    doc["phase1"] = {{"agents", c.phase1.agents}, {"episodes", c.phase1.episodes}};
    if (!c.phase1.groups.empty()) doc["phase1"]["groups"] = c.phase1.groups;
    doc["intervention"] = c.intervention == Intervention::Ungroup ? "ungroup" : "population_increase";
    if (c.intervention == Intervention::PopulationIncrease) doc["new_agents"] = c.new_agents;
    doc["phase2"] = {{"episodes", c.phase2_episodes}};
    if (c.environment.family_name == "explicit") {
        json mats = json::array();
        for (const auto& m : c.environment.family) mats.push_back(m.rows());
        doc["environment"] = {{"matrices", mats}};
    } else {
        doc["environment"] = {{"family", c.environment.family_name}};
    }
    doc["epsilon"] = {{"start", c.epsilon.start},
                      {"decay_episodes", c.epsilon.decay_episodes},
                      {"clock", c.epsilon.clock == EpsilonClock::Global ? "global" : "per_phase"}};
    doc["agent"] = {{"candidate_rule", c.agent.candidate_rule == CandidateRule::Strict ? "strict" : "weak"},
                    {"forget_after", c.agent.forget_after}};
    doc["checkpoints"] = c.checkpoints;
    doc["window"] = c.window;
    doc["metrics"] = {{"alignment_min_holders", c.alignment_min_holders}};
    doc["repetitions"] = c.repetitions;
    doc["master_seed"] = c.master_seed;
    return doc;
}

void apply_override(json& doc, std::string_view key, std::string_view value) {
    if (key.empty()) throw std::invalid_argument("override key is empty");
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        auto dot = key.find('.', start);
        std::string part(key.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
        if (part.empty()) throw std::invalid_argument(fmt::format("malformed override key '{}'", key));
        if (!node->is_object()) throw std::invalid_argument(fmt::format("override '{}' descends into a non-object", key));
        if (dot == std::string_view::npos) {
            json parsed = json::parse(value, nullptr, false);
            (*node)[part] = parsed.is_discarded() ? json(std::string(value)) : parsed;
            return;
        }
        node = &(*node)[part];
        if (node->is_null()) *node = json::object();
        start = dot + 1;
    }
}

void apply_override(json& doc, std::string_view assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string_view::npos)
        throw std::invalid_argument(fmt::format("override '{}' is not of the form key=value", assignment));
    apply_override(doc, assignment.substr(0, eq), assignment.substr(eq + 1));
}

namespace {

json base_preset(const std::string& name, std::size_t agents, const std::string& family) {
    json doc;
    doc["name"] = name;
    doc["phase1"] = {{"agents", agents}, {"episodes", 10000}};
    doc["intervention"] = "population_increase";
    doc["new_agents"] = 1;
    doc["phase2"] = {{"episodes", 10000}};
    doc["environment"] = {{"family", family}};
    doc["epsilon"] = {{"start", 0.2}, {"decay_episodes", 5000}, {"clock", "per_phase"}};
    doc["agent"] = {{"candidate_rule", "weak"}, {"forget_after", 20}};
    doc["checkpoints"] = {100, 500, 5000, 10000};
    doc["window"] = 100;
    doc["metrics"] = {{"alignment_min_holders", 2}};
    doc["repetitions"] = 1000;
    doc["master_seed"] = 1;
    return doc;
}

json grouped_preset(const std::string& name, std::size_t agents, json groups) {
    json doc = base_preset(name, agents, "symmetric_2x2");
    doc["phase1"]["groups"] = std::move(groups);
    doc["intervention"] = "ungroup";
    doc.erase("new_agents");
    return doc;
}

} // namespace

std::vector<std::string> preset_names() {
    return {"exp1_2agents", "exp2_3unrestricted",   "exp3_3restricted",        "exp3b_4restricted",
            "val_3x3",      "val_3x3_2agents",      "val_asymmetric",          "val_asymmetric_2agents"};
}

bool is_preset(std::string_view name) {
    auto names = preset_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

json preset_document(std::string_view name) {
    const std::string n(name);
    if (n == "exp1_2agents") return base_preset(n, 2, "symmetric_2x2");
    if (n == "exp2_3unrestricted") return base_preset(n, 3, "symmetric_2x2");
    if (n == "exp3_3restricted") return grouped_preset(n, 3, json::array({json::array({0, 1}), json::array({2})}));
    if (n == "exp3b_4restricted")
        return grouped_preset(n, 4, json::array({json::array({0, 1}), json::array({2, 3})}));
    if (n == "val_3x3") return base_preset(n, 3, "symmetric_3x3");
    if (n == "val_3x3_2agents") return base_preset(n, 2, "symmetric_3x3");
    if (n == "val_asymmetric") return base_preset(n, 3, "asymmetric_2x2");
    if (n == "val_asymmetric_2agents") return base_preset(n, 2, "asymmetric_2x2");
    throw std::invalid_argument(fmt::format("unknown preset '{}'", name));
}

json load_config_document(const std::string& name_or_path) {
    if (std::filesystem::is_regular_file(name_or_path)) {
        std::ifstream in(name_or_path);
        if (!in) throw std::runtime_error(fmt::format("cannot read config file '{}'", name_or_path));
        json doc = json::parse(in, nullptr, false);
        if (doc.is_discarded()) throw ConfigError({fmt::format("{}: not valid JSON", name_or_path)});
        return doc;
    }
    if (is_preset(name_or_path)) return preset_document(name_or_path);
    throw std::runtime_error(fmt::format("'{}' is neither a config file nor a preset name", name_or_path));
}

} // namespace lewis
