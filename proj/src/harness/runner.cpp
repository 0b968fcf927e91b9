#include "volfml/harness/runner.hpp"

#include <json.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "volfml/agents/baselines.hpp"
#include "volfml/agents/ddpg.hpp"
#include "volfml/agents/pdqn.hpp"

namespace volfml::harness {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open " + tmp);
        os << content;
        if (!os) throw std::runtime_error("write failed: " + tmp);
    }
    fs::rename(tmp, path);
}

double trailing_average(const std::vector<double>& xs, size_t i, int window) {
    size_t begin = i + 1 >= static_cast<size_t>(window) ? i + 1 - window : 0;
    double sum = 0.0;
    for (size_t k = begin; k <= i; ++k) sum += xs[k];
    return sum / static_cast<double>(i - begin + 1);
}

World build_world(const ExperimentConfig& cfg) {
    World world;
    Rng topo_rng(derive_stream_seed(cfg.seed, "topology"));
    Rng req_rng(derive_stream_seed(cfg.seed, "requirements"));

    world.profiles.resize(cfg.n_devices);
    double half = cfg.area_side_m / 2.0;
    for (int i = 0; i < cfg.n_devices; ++i) {
        radio::DeviceProfile& dev = world.profiles[i];
        dev.id = i;
        dev.pos_x_m = topo_rng.uniform(-half, half);
        dev.pos_y_m = topo_rng.uniform(-half, half);
        dev.data_size = cfg.data.train_size;
        dev.cycles_per_sample = cfg.cycles_per_sample;
        dev.f_max_hz = cfg.f_max_hz;
        dev.p_max_w = cfg.p_max_w;
        dev.capacitance_half = cfg.capacitance_half;
        dev.model_bits = cfg.model_bits;
        dev.req.acc_req = req_rng.uniform(cfg.acc_req.lo, cfg.acc_req.hi);
        dev.req.t_max_s = req_rng.uniform(cfg.t_max_s.lo, cfg.t_max_s.hi);
        dev.req.e_max_j = req_rng.uniform(cfg.e_max_j.lo, cfg.e_max_j.hi);
    }

    world.tasks = fml::make_synthetic_tasks(cfg.n_devices, derive_stream_seed(cfg.seed, "data"),
                                            cfg.noniid_degree, cfg.data);

    Rng init_rng(derive_stream_seed(cfg.seed, "model-init"));
    world.initial_model = nn::init_params(cfg.fml_model_spec(), init_rng);
    return world;
}

void check_alpha_against_curvature(const ExperimentConfig& cfg, const World& world) {
    if (cfg.hyper.alpha == 0.0) return;
    nn::MlpSpec spec = cfg.fml_model_spec();
    Rng probe_rng(derive_stream_seed(cfg.seed, "curvature-probe"));
    double max_curvature = 0.0;
    // power iteration on a couple of devices' full-batch Hessians
    for (int dev : {0, cfg.n_devices - 1}) {
        const auto& train = world.tasks.devices[dev].train;
        nn::ParamVector v(world.initial_model.size());
        for (double& x : v) x = probe_rng.uniform(-1.0, 1.0);
        double lambda = 0.0;
        for (int it = 0; it < 15; ++it) {
            nn::ParamVector hv = nn::hessian_vector_product(
                spec, world.initial_model, train, nn::LossKind::cross_entropy, v);
            double norm = 0.0;
            for (double x : hv) norm += x * x;
            norm = std::sqrt(norm);
            if (norm < 1e-15) break;
            lambda = norm;
            for (size_t i = 0; i < v.size(); ++i) v[i] = hv[i] / norm;
        }
        max_curvature = std::max(max_curvature, lambda);
    }
    if (!(1.0 - cfg.hyper.alpha * max_curvature > 0.0)) {
        std::ostringstream os;
        os << "fml.alpha too large: estimated max curvature " << max_curvature
           << " makes (1 - alpha*curvature) nonpositive";
        throw ConfigError(os.str());
    }
}

env::EnvParams make_env_params(const ExperimentConfig& cfg, World world) {
    env::EnvParams p;
    p.profiles = std::move(world.profiles);
    p.tasks = std::move(world.tasks);
    p.model_spec = cfg.fml_model_spec();
    p.loss = nn::LossKind::cross_entropy;
    p.hyper = cfg.hyper;
    p.tlw_params = cfg.tlw_params;
    p.etas = cfg.etas;
    p.channel = cfg.channel;
    p.scheme = cfg.scheme;
    p.encoding = cfg.encoding;
    p.initial_model = std::move(world.initial_model);
    p.fading_seed = derive_stream_seed(cfg.seed, "fading");
    p.equal_weight_tlw = cfg.tlw_mode == TlwMode::equal_weight;
    return p;
}

std::unique_ptr<agents::Agent> make_agent(const ExperimentConfig& cfg,
                                          const std::vector<radio::DeviceProfile>& profiles) {
    uint64_t agent_seed = derive_stream_seed(cfg.seed, "agent");
    switch (cfg.agent) {
        case AgentKind::pdqn: {
            agents::PdqnConfig pc;
            pc.n_devices = cfg.n_devices;
            pc.state_dim = 2 * cfg.n_devices;
            pc.actor_hidden = cfg.actor_hidden;
            pc.critic_hidden = cfg.critic_hidden;
            pc.actor_lr = cfg.actor_lr;
            pc.critic_lr = cfg.critic_lr;
            pc.kappa = cfg.kappa;
            pc.zeta = cfg.zeta;
            pc.buffer_capacity = cfg.buffer_capacity;
            pc.batch_size = cfg.batch_size;
            pc.full_buffer_gate = cfg.full_buffer_gate;
            pc.noise_start = cfg.noise_start;
            pc.noise_end = cfg.noise_end;
            pc.optim = cfg.optim;
            pc.seed = agent_seed;
            return std::make_unique<agents::PdqnAgent>(pc, profiles);
        }
        case AgentKind::ddpg: {
            agents::DdpgConfig dc;
            dc.n_devices = cfg.n_devices;
            dc.state_dim = 2 * cfg.n_devices;
            dc.actor_hidden = cfg.actor_hidden;
            dc.critic_hidden = cfg.critic_hidden;
            dc.actor_lr = cfg.actor_lr;
            dc.critic_lr = cfg.critic_lr;
            dc.kappa = cfg.kappa;
            dc.zeta = cfg.zeta;
            dc.buffer_capacity = cfg.buffer_capacity;
            dc.batch_size = cfg.batch_size;
            dc.full_buffer_gate = cfg.full_buffer_gate;
            dc.noise_start = cfg.noise_start;
            dc.noise_end = cfg.noise_end;
            dc.optim = cfg.optim;
            dc.seed = agent_seed;
            return std::make_unique<agents::DdpgAgent>(dc, profiles);
        }
        case AgentKind::rra:
            return std::make_unique<agents::RraAgent>(profiles, agent_seed);
        case AgentKind::ew:
            return std::make_unique<agents::EwAgent>(profiles, cfg.ew_window);
    }
    throw ConfigError("unknown agent kind");
}

namespace {

json vec_json(const std::vector<double>& v) {
    json arr = json::array();
    for (double x : v) arr.push_back(x);
    return arr;
}

json meta_json(const ExperimentConfig& cfg) {
    json meta;
    meta["format"] = "volfml-run";
    meta["version"] = 1;
    meta["seed"] = cfg.seed;
    meta["agent"] = agent_name(cfg.agent);
    meta["scheme"] = scheme_name(cfg.scheme);
    meta["tlw_mode"] = tlw_mode_name(cfg.tlw_mode);
    meta["episodes"] = cfg.episodes;
    meta["slots_per_episode"] = cfg.slots_per_episode;
    meta["n_devices"] = cfg.n_devices;
    meta["config_hash"] = cfg.config_hash();
    meta["physics_hash"] = cfg.physics_hash();
    return meta;
}

}  // namespace

RunRecord run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    fs::create_directories(out_dir);

    World world = build_world(cfg);
    check_alpha_against_curvature(cfg, world);
    std::unique_ptr<agents::Agent> agent = make_agent(cfg, world.profiles);
    env::Environment environment(make_env_params(cfg, std::move(world)));

    RunRecord record;
    record.config = cfg;
    record.dir = out_dir;

    std::ostringstream trace;
    std::ostringstream summary;
    summary << "episode,return,avg" << kMovingAverageWindow
            << ",mean_objective,acc_probe,feasible_slots\n";

    std::vector<double> returns;
    std::string last_checkpoint;
    bool aborted = false;
    std::string abort_reason;

    for (int ep = 0; ep < cfg.episodes && !aborted; ++ep) {
        agent->begin_episode(ep, cfg.episodes);
        env::EnvState state = environment.reset();

        EpisodeStats stats;
        stats.episode = ep;
        for (int slot = 0; slot < cfg.slots_per_episode; ++slot) {
            agents::AgentAction action;
            env::StepOutcome out;
            try {
                action = agent->select(state.encoded, true);
                out = environment.step(action.decision);
                bool terminal = slot == cfg.slots_per_episode - 1;

                agents::Transition tr;
                tr.state = state.encoded;
                tr.cont = action.cont;
                tr.disc = action.disc;
                tr.reward = out.reward;
                tr.next_state = out.next_state.encoded;
                tr.terminal = terminal;
                agent->observe(tr);
                agent->update();
            } catch (const std::exception& e) {
                // exploding parameters surface as non-finite value errors
                // from the numeric core; abort with the last-good checkpoint
                aborted = true;
                abort_reason = e.what();
                break;
            }

            stats.ret += out.reward;
            stats.mean_objective += out.objective;
            stats.feasible_slots += out.feasible ? 1 : 0;

            json line;
            line["episode"] = ep;
            line["slot"] = slot;
            line["reward"] = out.reward;
            line["objective"] = out.objective;
            line["feasible"] = out.feasible;
            line["mask"] = out.executed.mask;
            line["power"] = vec_json(out.executed.power);
            line["freq"] = vec_json(out.executed.freq);
            line["round_time"] = out.costs.round_time_s;
            line["energy"] = vec_json(out.costs.energy_j);
            line["accuracy"] = vec_json(out.accuracies);
            line["v_acc"] = [&] {
                std::vector<double> v;
                for (const auto& b : out.vols) v.push_back(b.v_acc);
                return vec_json(v);
            }();
            line["v_time"] = [&] {
                std::vector<double> v;
                for (const auto& b : out.vols) v.push_back(b.v_time);
                return vec_json(v);
            }();
            line["v_energy"] = [&] {
                std::vector<double> v;
                for (const auto& b : out.vols) v.push_back(b.v_energy);
                return vec_json(v);
            }();
            line["tlw"] = vec_json(state.tlw);
            if (cfg.trace_probe) {
                stats.acc_probe = environment.mean_adapted_accuracy();
                line["acc_probe"] = stats.acc_probe;
            }
            trace << line.dump() << "\n";

            if (!std::isfinite(out.reward) || !std::isfinite(out.objective)) {
                aborted = true;
                abort_reason = "non-finite reward or objective";
                break;
            }
            state = out.next_state;
        }
        stats.mean_objective /= cfg.slots_per_episode;

        if (!aborted && !agent->params_finite()) {
            aborted = true;
            abort_reason = "non-finite agent parameters";
        }
        if (aborted) break;

        returns.push_back(stats.ret);
        stats.avg_window = trailing_average(returns, returns.size() - 1, kMovingAverageWindow);
        record.episodes.push_back(stats);

        summary << stats.episode << "," << format_double(stats.ret) << ","
                << format_double(stats.avg_window) << "," << format_double(stats.mean_objective)
                << "," << format_double(stats.acc_probe) << "," << stats.feasible_slots << "\n";

        if (cfg.checkpoint_every > 0 && (ep + 1) % cfg.checkpoint_every == 0) {
            std::ostringstream ckpt;
            agent->save_checkpoint(ckpt);
            last_checkpoint = ckpt.str();
        }
    }

    atomic_write(out_dir + "/config.json", cfg.to_json());
    atomic_write(out_dir + "/meta.json", meta_json(cfg).dump(2) + "\n");
    atomic_write(out_dir + "/trace.jsonl", trace.str());
    atomic_write(out_dir + "/summary.csv", summary.str());

    if (aborted) {
        if (!last_checkpoint.empty())
            atomic_write(out_dir + "/last_good.ckpt", last_checkpoint);
        throw NumericAbort("run aborted: " + abort_reason +
                           (last_checkpoint.empty() ? " (no checkpoint taken yet)"
                                                    : " (last-good checkpoint written)"));
    }

    std::ostringstream final_ckpt;
    agent->save_checkpoint(final_ckpt);
    if (!final_ckpt.str().empty()) atomic_write(out_dir + "/agent.ckpt", final_ckpt.str());
    return record;
}

}  // namespace volfml::harness
