#pragma once

#include <memory>
#include <string>
#include <vector>

#include "volfml/agents/agent.hpp"
#include "volfml/env/env.hpp"
#include "volfml/harness/config.hpp"

namespace volfml::harness {

struct EpisodeStats {
    int episode = 0;
    double ret = 0.0;        // sum of slot rewards
    double avg_window = 0.0; // trailing moving average of `ret`
    double mean_objective = 0.0;
    double acc_probe = 0.0;  // adapted-accuracy probe at the final slot
    int feasible_slots = 0;
};

struct RunRecord {
    ExperimentConfig config;
    std::string dir;
    std::vector<EpisodeStats> episodes;
};

inline constexpr int kMovingAverageWindow = 20;

// Builds the device profiles and tasks for a config: positions, requirement
// draws and datasets all derive from the master seed via named streams, so
// runs differing only in agent/scheme share the same world.
struct World {
    std::vector<radio::DeviceProfile> profiles;
    fml::TaskFamily tasks;
    nn::ParamVector initial_model;
};

World build_world(const ExperimentConfig& cfg);

// Worst-case curvature probe for the inner learning rate: power iteration on
// the loss Hessian at the initial model; throws ConfigError if 1 - alpha *
// lambda_max is not positive (the meta-gradient correction would flip sign).
void check_alpha_against_curvature(const ExperimentConfig& cfg, const World& world);

env::EnvParams make_env_params(const ExperimentConfig& cfg, World world);

std::unique_ptr<agents::Agent> make_agent(const ExperimentConfig& cfg,
                                          const std::vector<radio::DeviceProfile>& profiles);

// Executes the full episode/slot loop and writes trace.jsonl, summary.csv,
// config.json and meta.json into out_dir (atomically, via temp + rename).
// Identical config+seed produce byte-identical outputs.
RunRecord run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

// moving average of the trailing `window` entries ending at index i
double trailing_average(const std::vector<double>& xs, size_t i, int window);

void atomic_write(const std::string& path, const std::string& content);
std::string format_double(double x);  // shortest exact round-trip decimal

}  // namespace volfml::harness
