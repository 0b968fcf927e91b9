#include "volfml/harness/config.hpp"

#include <json.hpp>
#include <fstream>
#include <sstream>

namespace volfml::harness {

using nlohmann::json;

namespace {

json range_to_json(const RangeSpec& r) { return json::array({r.lo, r.hi}); }

RangeSpec range_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2)
        throw ConfigError(what + ": expected [lo, hi]");
    RangeSpec r{j[0].get<double>(), j[1].get<double>()};
    if (!(r.lo <= r.hi)) throw ConfigError(what + ": lo must be <= hi");
    return r;
}

std::string activation_name(nn::Activation a) {
    switch (a) {
        case nn::Activation::tanh: return "tanh";
        case nn::Activation::relu: return "relu";
        case nn::Activation::identity: return "identity";
    }
    return "tanh";
}

nn::Activation activation_from_name(const std::string& s) {
    if (s == "tanh") return nn::Activation::tanh;
    if (s == "relu") return nn::Activation::relu;
    if (s == "identity") return nn::Activation::identity;
    throw ConfigError("unknown activation: " + s);
}

std::string fading_name(radio::FadingModel f) {
    return f == radio::FadingModel::rayleigh ? "rayleigh" : "unit";
}

radio::FadingModel fading_from_name(const std::string& s) {
    if (s == "rayleigh") return radio::FadingModel::rayleigh;
    if (s == "unit") return radio::FadingModel::unit;
    throw ConfigError("unknown fading model: " + s);
}

std::string optim_name(agents::OptimKind o) {
    return o == agents::OptimKind::adam ? "adam" : "sgd";
}

agents::OptimKind optim_from_name(const std::string& s) {
    if (s == "adam") return agents::OptimKind::adam;
    if (s == "sgd") return agents::OptimKind::sgd;
    throw ConfigError("unknown optimizer: " + s);
}

json to_json_tree(const ExperimentConfig& c) {
    json j;
    j["version"] = 1;
    j["seed"] = c.seed;
    j["run"] = {{"agent", agent_name(c.agent)},
                {"scheme", scheme_name(c.scheme)},
                {"tlw_mode", tlw_mode_name(c.tlw_mode)},
                {"episodes", c.episodes},
                {"slots_per_episode", c.slots_per_episode},
                {"checkpoint_every", c.checkpoint_every},
                {"trace_probe", c.trace_probe}};
    j["topology"] = {{"n_devices", c.n_devices}, {"area_side_m", c.area_side_m}};
    j["physics"] = {{"bandwidth_hz", c.channel.bandwidth_hz},
                    {"awgn_dbm_per_hz", c.channel.awgn_dbm_per_hz},
                    {"path_loss_exponent", c.channel.path_loss_exponent},
                    {"ref_loss_db", c.channel.ref_loss_db},
                    {"fading", fading_name(c.channel.fading)},
                    {"p_max_w", c.p_max_w},
                    {"f_max_hz", c.f_max_hz},
                    {"cycles_per_sample", c.cycles_per_sample},
                    {"model_bits", c.model_bits},
                    {"capacitance_half", c.capacitance_half}};
    j["requirements"] = {{"acc_req", range_to_json(c.acc_req)},
                         {"t_max_s", range_to_json(c.t_max_s)},
                         {"e_max_j", range_to_json(c.e_max_j)}};
    j["data"] = {{"input_dim", c.data.input_dim},
                 {"n_classes", c.data.n_classes},
                 {"class_radius", c.data.class_radius},
                 {"noise_std", c.data.noise_std},
                 {"train_size", c.data.train_size},
                 {"test_size", c.data.test_size},
                 {"noniid_degree", c.noniid_degree}};
    j["fml"] = {{"alpha", c.hyper.alpha},
                {"beta", c.hyper.beta},
                {"sgd_steps", c.hyper.sgd_steps},
                {"batch_size", c.hyper.batch_size},
                {"hidden", c.fml_hidden},
                {"activation", activation_name(c.fml_activation)}};
    j["metrics"] = {{"lambda", {c.tlw_params.lambda1, c.tlw_params.lambda2, c.tlw_params.lambda3}},
                    {"eta", {c.etas.eta1, c.etas.eta2, c.etas.eta3}}};
    j["encoding"] = {{"gain_log10_min", c.encoding.gain_log10_min},
                     {"gain_log10_max", c.encoding.gain_log10_max},
                     {"tlw_min", c.encoding.tlw_min},
                     {"tlw_max", c.encoding.tlw_max}};
    j["agent"] = {{"actor_hidden", c.actor_hidden},
                  {"critic_hidden", c.critic_hidden},
                  {"actor_lr", c.actor_lr},
                  {"critic_lr", c.critic_lr},
                  {"kappa", c.kappa},
                  {"zeta", c.zeta},
                  {"buffer", c.buffer_capacity},
                  {"batch", c.batch_size},
                  {"noise_start", c.noise_start},
                  {"noise_end", c.noise_end},
                  {"full_buffer_gate", c.full_buffer_gate},
                  {"optim", optim_name(c.optim)},
                  {"ew_window", c.ew_window}};
    return j;
}

// deep-merge `patch` over `base`, rejecting keys absent from the defaults
void merge_strict(json& base, const json& patch, const std::string& path) {
    for (auto it = patch.begin(); it != patch.end(); ++it) {
        std::string here = path.empty() ? it.key() : path + "." + it.key();
        if (!base.contains(it.key())) throw ConfigError("unknown config key: " + here);
        if (base[it.key()].is_object() && it.value().is_object()) {
            merge_strict(base[it.key()], it.value(), here);
        } else {
            base[it.key()] = it.value();
        }
    }
}

ExperimentConfig from_json_tree(const json& j) {
    ExperimentConfig c;
    try {
        c.seed = j.at("seed").get<uint64_t>();
        const json& run = j.at("run");
        c.agent = agent_from_name(run.at("agent").get<std::string>());
        c.scheme = scheme_from_name(run.at("scheme").get<std::string>());
        c.tlw_mode = tlw_mode_from_name(run.at("tlw_mode").get<std::string>());
        c.episodes = run.at("episodes").get<int>();
        c.slots_per_episode = run.at("slots_per_episode").get<int>();
        c.checkpoint_every = run.at("checkpoint_every").get<int>();
        c.trace_probe = run.at("trace_probe").get<bool>();

        const json& topo = j.at("topology");
        c.n_devices = topo.at("n_devices").get<int>();
        c.area_side_m = topo.at("area_side_m").get<double>();

        const json& phy = j.at("physics");
        c.channel.bandwidth_hz = phy.at("bandwidth_hz").get<double>();
        c.channel.awgn_dbm_per_hz = phy.at("awgn_dbm_per_hz").get<double>();
        c.channel.path_loss_exponent = phy.at("path_loss_exponent").get<double>();
        c.channel.ref_loss_db = phy.at("ref_loss_db").get<double>();
        c.channel.fading = fading_from_name(phy.at("fading").get<std::string>());
        c.p_max_w = phy.at("p_max_w").get<double>();
        c.f_max_hz = phy.at("f_max_hz").get<double>();
        c.cycles_per_sample = phy.at("cycles_per_sample").get<double>();
        c.model_bits = phy.at("model_bits").get<double>();
        c.capacitance_half = phy.at("capacitance_half").get<double>();

        const json& req = j.at("requirements");
        c.acc_req = range_from_json(req.at("acc_req"), "requirements.acc_req");
        c.t_max_s = range_from_json(req.at("t_max_s"), "requirements.t_max_s");
        c.e_max_j = range_from_json(req.at("e_max_j"), "requirements.e_max_j");

        const json& data = j.at("data");
        c.data.input_dim = data.at("input_dim").get<int>();
        c.data.n_classes = data.at("n_classes").get<int>();
        c.data.class_radius = data.at("class_radius").get<double>();
        c.data.noise_std = data.at("noise_std").get<double>();
        c.data.train_size = data.at("train_size").get<int>();
        c.data.test_size = data.at("test_size").get<int>();
        c.noniid_degree = data.at("noniid_degree").get<double>();

        const json& fml = j.at("fml");
        c.hyper.alpha = fml.at("alpha").get<double>();
        c.hyper.beta = fml.at("beta").get<double>();
        c.hyper.sgd_steps = fml.at("sgd_steps").get<int>();
        c.hyper.batch_size = fml.at("batch_size").get<int>();
        c.fml_hidden = fml.at("hidden").get<std::vector<int>>();
        c.fml_activation = activation_from_name(fml.at("activation").get<std::string>());

        const json& met = j.at("metrics");
        const json& lam = met.at("lambda");
        const json& eta = met.at("eta");
        if (lam.size() != 3 || eta.size() != 3)
            throw ConfigError("metrics.lambda and metrics.eta need 3 entries each");
        c.tlw_params = {lam[0].get<double>(), lam[1].get<double>(), lam[2].get<double>()};
        c.etas = {eta[0].get<double>(), eta[1].get<double>(), eta[2].get<double>()};

        const json& enc = j.at("encoding");
        c.encoding.gain_log10_min = enc.at("gain_log10_min").get<double>();
        c.encoding.gain_log10_max = enc.at("gain_log10_max").get<double>();
        c.encoding.tlw_min = enc.at("tlw_min").get<double>();
        c.encoding.tlw_max = enc.at("tlw_max").get<double>();

        const json& ag = j.at("agent");
        c.actor_hidden = ag.at("actor_hidden").get<std::vector<int>>();
        c.critic_hidden = ag.at("critic_hidden").get<std::vector<int>>();
        c.actor_lr = ag.at("actor_lr").get<double>();
        c.critic_lr = ag.at("critic_lr").get<double>();
        c.kappa = ag.at("kappa").get<double>();
        c.zeta = ag.at("zeta").get<double>();
        c.buffer_capacity = ag.at("buffer").get<int>();
        c.batch_size = ag.at("batch").get<int>();
        c.noise_start = ag.at("noise_start").get<double>();
        c.noise_end = ag.at("noise_end").get<double>();
        c.full_buffer_gate = ag.at("full_buffer_gate").get<bool>();
        c.optim = optim_from_name(ag.at("optim").get<std::string>());
        c.ew_window = ag.at("ew_window").get<int>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

void hash_mix(uint64_t& h, const std::string& s) {
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    if (n_devices < 1 || n_devices > 12)
        throw ConfigError("topology.n_devices must be in [1, 12] (flat mask encoding)");
    if (area_side_m <= 0.0) throw ConfigError("topology.area_side_m must be positive");
    if (episodes < 1 || slots_per_episode < 1)
        throw ConfigError("run.episodes and run.slots_per_episode must be >= 1");
    if (p_max_w <= 0.0 || f_max_hz <= 0.0)
        throw ConfigError("physics.p_max_w and physics.f_max_hz must be positive");
    if (channel.bandwidth_hz <= 0.0) throw ConfigError("physics.bandwidth_hz must be positive");
    if (!(acc_req.lo > 0.0 && acc_req.hi <= 1.0))
        throw ConfigError("requirements.acc_req must lie in (0, 1]");
    if (t_max_s.lo <= 0.0 || e_max_j.lo <= 0.0)
        throw ConfigError("requirement tolerances must be positive");
    if (data.n_classes < 2) throw ConfigError("data.n_classes must be >= 2");
    if (data.train_size < 1 || data.test_size < 1)
        throw ConfigError("data sizes must be positive");
    if (noniid_degree < 0.0 || noniid_degree > 1.0)
        throw ConfigError("data.noniid_degree must be in [0, 1]");
    if (hyper.alpha < 0.0 || hyper.beta < 0.0)
        throw ConfigError("fml.alpha and fml.beta must be >= 0");
    if (hyper.sgd_steps < 1 || hyper.batch_size < 1)
        throw ConfigError("fml.sgd_steps and fml.batch_size must be >= 1");
    if (!(encoding.gain_log10_max > encoding.gain_log10_min) ||
        !(encoding.tlw_max > encoding.tlw_min))
        throw ConfigError("encoding bounds must span a positive range");
    if (!(kappa >= 0.0 && kappa < 1.0)) throw ConfigError("agent.kappa must be in [0, 1)");
    if (!(zeta > 0.0 && zeta <= 1.0)) throw ConfigError("agent.zeta must be in (0, 1]");
    if (batch_size < 1 || buffer_capacity < batch_size)
        throw ConfigError("agent.buffer must hold at least one batch");
    if (ew_window < 1 || ew_window > n_devices)
        throw ConfigError("agent.ew_window must be in [1, n_devices]");

    // worst-case TLW denominator over the requirement ranges must stay
    // positive, otherwise some device draw would be rejected mid-run
    double worst = tlw_params.lambda1 * t_max_s.lo + tlw_params.lambda2 * e_max_j.lo -
                   tlw_params.lambda3 * acc_req.hi;
    if (!(worst > 0.0)) {
        std::ostringstream os;
        os << "metrics.lambda yields a nonpositive TLW denominator (worst case " << worst
           << ") over the configured requirement ranges";
        throw ConfigError(os.str());
    }
}

nn::MlpSpec ExperimentConfig::fml_model_spec() const {
    std::vector<int> sizes;
    sizes.push_back(data.input_dim);
    sizes.insert(sizes.end(), fml_hidden.begin(), fml_hidden.end());
    sizes.push_back(data.n_classes);
    return nn::MlpSpec{sizes, fml_activation};
}

uint64_t ExperimentConfig::physics_hash() const {
    json j = to_json_tree(*this);
    json phys;
    for (const char* key : {"topology", "physics", "requirements", "data", "fml", "metrics",
                            "encoding"})
        phys[key] = j[key];
    uint64_t h = 1469598103934665603ull;
    hash_mix(h, phys.dump());
    return h;
}

uint64_t ExperimentConfig::config_hash() const {
    uint64_t h = 1469598103934665603ull;
    hash_mix(h, to_json_tree(*this).dump());
    return h;
}

std::string ExperimentConfig::to_json() const { return to_json_tree(*this).dump(2) + "\n"; }

ExperimentConfig default_config() { return ExperimentConfig{}; }

ExperimentConfig config_from_json_text(const std::string& text) {
    json patch;
    try {
        patch = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    json base = to_json_tree(ExperimentConfig{});
    if (patch.contains("version") && patch["version"].get<int>() != 1)
        throw ConfigError("unsupported config version");
    merge_strict(base, patch, "");
    ExperimentConfig c = from_json_tree(base);
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return config_from_json_text(ss.str());
}

std::string agent_name(AgentKind k) {
    switch (k) {
        case AgentKind::pdqn: return "pdqn";
        case AgentKind::ddpg: return "ddpg";
        case AgentKind::rra: return "rra";
        case AgentKind::ew: return "ew";
    }
    return "pdqn";
}

std::string scheme_name(env::Scheme s) { return s == env::Scheme::noma ? "noma" : "oma"; }

std::string tlw_mode_name(TlwMode m) { return m == TlwMode::tlw ? "tlw" : "equal"; }

AgentKind agent_from_name(const std::string& s) {
    if (s == "pdqn") return AgentKind::pdqn;
    if (s == "ddpg") return AgentKind::ddpg;
    if (s == "rra") return AgentKind::rra;
    if (s == "ew") return AgentKind::ew;
    throw ConfigError("unknown agent: " + s);
}

env::Scheme scheme_from_name(const std::string& s) {
    if (s == "noma") return env::Scheme::noma;
    if (s == "oma") return env::Scheme::oma;
    throw ConfigError("unknown scheme: " + s);
}

TlwMode tlw_mode_from_name(const std::string& s) {
    if (s == "tlw") return TlwMode::tlw;
    if (s == "equal") return TlwMode::equal_weight;
    throw ConfigError("unknown tlw mode: " + s);
}

}  // namespace volfml::harness
