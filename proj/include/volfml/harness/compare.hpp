#pragma once

#include <string>
#include <vector>

#include "volfml/harness/runner.hpp"

namespace volfml::harness {

struct LoadedRun {
    std::string dir;
    std::string arm;  // "agent-scheme-tlwmode"
    uint64_t seed = 0;
    uint64_t physics_hash = 0;
    int n_devices = 0;
    std::vector<EpisodeStats> episodes;

    double final_window_return(int window) const;
    double final_window_acc(int window) const;
};

LoadedRun load_run(const std::string& dir);

struct ArmStats {
    std::string arm;
    std::vector<double> per_seed;  // final-window means, one per run
    double min = 0.0, median = 0.0, max = 0.0;
};

struct CompareReport {
    std::vector<LoadedRun> runs;        // sorted by final-window return, best first
    std::vector<double> window_means;   // aligned with runs
    std::vector<ArmStats> arms;
    std::string text;                    // human-readable report
};

// Final-window ordering across runs. Refuses to compare runs whose physics
// hashes differ (different environment definitions).
CompareReport compare_runs(const std::vector<std::string>& dirs, int window = 20);

// Emits the per-figure CSV series for one run into out_dir:
//   reward_series.csv   episode, return, avg<window>
//   accuracy_series.csv round, episode, slot, acc_probe
//   vol_series.csv      episode, vol, cumulative_vol
void export_plotdata(const std::string& run_dir, const std::string& out_dir);

}  // namespace volfml::harness
