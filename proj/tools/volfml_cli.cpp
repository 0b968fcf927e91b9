#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "volfml/fml/task.hpp"
#include "volfml/harness/compare.hpp"
#include "volfml/harness/config.hpp"
#include "volfml/harness/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfigInvalid = 2;
constexpr int kExitNumericAbort = 3;

using volfml::harness::ExperimentConfig;

ExperimentConfig resolve_config(const std::string& config_path, const CLI::App* sub,
                                uint64_t seed, std::string agent, std::string scheme,
                                std::string tlw_mode, int episodes, int slots) {
    ExperimentConfig cfg = config_path.empty() ? volfml::harness::default_config()
                                               : volfml::harness::load_config(config_path);
    if (sub->count("--seed")) cfg.seed = seed;
    if (sub->count("--agent")) cfg.agent = volfml::harness::agent_from_name(agent);
    if (sub->count("--scheme")) cfg.scheme = volfml::harness::scheme_from_name(scheme);
    if (sub->count("--tlw-mode")) cfg.tlw_mode = volfml::harness::tlw_mode_from_name(tlw_mode);
    if (sub->count("--episodes")) cfg.episodes = episodes;
    if (sub->count("--slots")) cfg.slots_per_episode = slots;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"task-oriented federated meta-learning simulator over a NOMA uplink"};
    app.require_subcommand(1);

    std::string config_path, out_dir, run_dir, tasks_out;
    uint64_t seed = 1;
    std::string agent = "pdqn", scheme = "noma", tlw_mode = "tlw";
    int episodes = 0, slots = 0, window = 20;
    std::vector<std::string> compare_dirs;
    bool quiet = false;

    CLI::App* run = app.add_subcommand("run", "run one experiment");
    run->add_option("--config", config_path, "JSON config file (defaults apply otherwise)");
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--seed", seed, "master seed override");
    run->add_option("--agent", agent, "agent override: pdqn|ddpg|rra|ew");
    run->add_option("--scheme", scheme, "access scheme override: noma|oma");
    run->add_option("--tlw-mode", tlw_mode, "weighting override: tlw|equal");
    run->add_option("--episodes", episodes, "episode count override");
    run->add_option("--slots", slots, "slots per episode override");
    run->add_flag("--quiet", quiet, "suppress progress output");

    CLI::App* compare = app.add_subcommand("compare", "order runs by final-window return");
    compare->add_option("dirs", compare_dirs, "run directories")->expected(-2);
    compare->add_option("--window", window, "final episode window (default 20)");

    CLI::App* exp = app.add_subcommand("export", "emit per-figure CSV series for a run");
    exp->add_option("--run", run_dir, "run directory")->required();
    exp->add_option("--out", out_dir, "output directory")->required();

    CLI::App* print_cfg = app.add_subcommand("print-config", "print the resolved config");
    print_cfg->add_option("--config", config_path, "JSON config file");

    CLI::App* dump_tasks = app.add_subcommand("dump-tasks", "serialize the task datasets");
    dump_tasks->add_option("--config", config_path, "JSON config file");
    dump_tasks->add_option("--out", tasks_out, "output file")->required();
    dump_tasks->add_option("--seed", seed, "master seed override");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            ExperimentConfig cfg = resolve_config(config_path, run, seed, agent, scheme,
                                                  tlw_mode, episodes, slots);
            volfml::harness::RunRecord record = volfml::harness::run_experiment(cfg, out_dir);
            if (!quiet) {
                double final_avg =
                    record.episodes.empty() ? 0.0 : record.episodes.back().avg_window;
                std::cout << "run complete: " << record.episodes.size() << " episodes, final avg"
                          << volfml::harness::kMovingAverageWindow << " return "
                          << final_avg << ", outputs in " << out_dir << "\n";
            }
        } else if (compare->parsed()) {
            volfml::harness::CompareReport report =
                volfml::harness::compare_runs(compare_dirs, window);
            std::cout << report.text;
        } else if (exp->parsed()) {
            volfml::harness::export_plotdata(run_dir, out_dir);
            std::cout << "wrote reward_series.csv, vol_series.csv, accuracy_series.csv to "
                      << out_dir << "\n";
        } else if (print_cfg->parsed()) {
            ExperimentConfig cfg = config_path.empty() ? volfml::harness::default_config()
                                                       : volfml::harness::load_config(config_path);
            cfg.validate();
            std::cout << cfg.to_json();
        } else if (dump_tasks->parsed()) {
            ExperimentConfig cfg = config_path.empty() ? volfml::harness::default_config()
                                                       : volfml::harness::load_config(config_path);
            if (dump_tasks->count("--seed")) cfg.seed = seed;
            cfg.validate();
            volfml::fml::TaskFamily family = volfml::fml::make_synthetic_tasks(
                cfg.n_devices, volfml::derive_stream_seed(cfg.seed, "data"), cfg.noniid_degree,
                cfg.data);
            volfml::fml::save_tasks(tasks_out, family);
            std::cout << "wrote " << family.devices.size() << " device datasets to " << tasks_out
                      << "\n";
        }
    } catch (const volfml::harness::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigInvalid;
    } catch (const volfml::harness::NumericAbort& e) {
        std::cerr << "numeric abort: " << e.what() << "\n";
        return kExitNumericAbort;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitOk;
}
