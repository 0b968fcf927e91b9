#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "volfml/fml/task.hpp"
#include "volfml/harness/compare.hpp"
#include "volfml/harness/config.hpp"
#include "volfml/harness/runner.hpp"

using namespace volfml;
using namespace volfml::harness;

namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

ExperimentConfig tiny_run_config(AgentKind agent, uint64_t seed, int episodes = 4,
                                 int slots = 6) {
    ExperimentConfig cfg;
    cfg.agent = agent;
    cfg.seed = seed;
    cfg.episodes = episodes;
    cfg.slots_per_episode = slots;
    cfg.n_devices = 4;
    cfg.data.train_size = 16;
    cfg.data.test_size = 8;
    cfg.hyper.batch_size = 8;
    cfg.actor_hidden = {16};
    cfg.critic_hidden = {16};
    cfg.buffer_capacity = 128;
    cfg.batch_size = 8;
    cfg.ew_window = 2;
    cfg.checkpoint_every = 2;
    return cfg;
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(VOLFML_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("config: defaults validate and default lambda3 keeps TLW positive") {
    ExperimentConfig cfg = default_config();
    CHECK_NOTHROW(cfg.validate());
    // worst case over the requirement ranges with the defaults
    double worst = cfg.tlw_params.lambda1 * cfg.t_max_s.lo +
                   cfg.tlw_params.lambda2 * cfg.e_max_j.lo -
                   cfg.tlw_params.lambda3 * cfg.acc_req.hi;
    CHECK(worst > 0.0);

    // lambda = (0.1, 1, 1) cannot guarantee positivity over the same ranges
    ExperimentConfig bad = cfg;
    bad.tlw_params.lambda3 = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("config: unknown keys and malformed values are rejected") {
    CHECK_THROWS_AS(config_from_json_text("{\"runz\": {}}"), ConfigError);
    CHECK_THROWS_AS(config_from_json_text("{\"run\": {\"agent\": \"sarsa\"}}"), ConfigError);
    CHECK_THROWS_AS(config_from_json_text("not json"), ConfigError);
    CHECK_THROWS_AS(config_from_json_text("{\"topology\": {\"n_devices\": 40}}"), ConfigError);
    ExperimentConfig ok = config_from_json_text("{\"run\": {\"agent\": \"ddpg\"}}");
    CHECK(ok.agent == AgentKind::ddpg);
}

TEST_CASE("config: json round-trip preserves the resolved configuration") {
    ExperimentConfig cfg = tiny_run_config(AgentKind::ew, 3);
    ExperimentConfig back = config_from_json_text(cfg.to_json());
    CHECK(back.config_hash() == cfg.config_hash());
    CHECK(back.physics_hash() == cfg.physics_hash());
}

TEST_CASE("config: physics hash ignores agent and scheme, tracks physics") {
    ExperimentConfig a = tiny_run_config(AgentKind::pdqn, 1);
    ExperimentConfig b = a;
    b.agent = AgentKind::ddpg;
    b.scheme = env::Scheme::oma;
    b.tlw_mode = TlwMode::equal_weight;
    b.seed = 99;
    CHECK(a.physics_hash() == b.physics_hash());
    CHECK(a.config_hash() != b.config_hash());

    ExperimentConfig c = a;
    c.n_devices = 5;
    CHECK(a.physics_hash() != c.physics_hash());
}

TEST_CASE("build_world: draws stay inside the configured ranges") {
    ExperimentConfig cfg = default_config();
    cfg.episodes = 1;
    World world = build_world(cfg);
    REQUIRE(world.profiles.size() == 10);
    for (const auto& dev : world.profiles) {
        CHECK(std::abs(dev.pos_x_m) <= cfg.area_side_m / 2);
        CHECK(std::abs(dev.pos_y_m) <= cfg.area_side_m / 2);
        CHECK(dev.req.acc_req >= cfg.acc_req.lo);
        CHECK(dev.req.acc_req <= cfg.acc_req.hi);
        CHECK(dev.req.t_max_s >= cfg.t_max_s.lo);
        CHECK(dev.req.t_max_s <= cfg.t_max_s.hi);
        CHECK(dev.req.e_max_j >= cfg.e_max_j.lo);
        CHECK(dev.req.e_max_j <= cfg.e_max_j.hi);
        CHECK_NOTHROW(metrics::tlw_req_factor(dev.req, cfg.tlw_params));
    }
    // same seed -> same world; different seed -> different positions
    World again = build_world(cfg);
    CHECK(again.profiles[0].pos_x_m == world.profiles[0].pos_x_m);
    ExperimentConfig other = cfg;
    other.seed = cfg.seed + 1;
    CHECK(build_world(other).profiles[0].pos_x_m != world.profiles[0].pos_x_m);
}

TEST_CASE("trailing_average: window semantics match a direct recompute") {
    std::vector<double> xs;
    for (int i = 1; i <= 30; ++i) xs.push_back(static_cast<double>(i));
    CHECK(trailing_average(xs, 19, 20) == doctest::Approx(10.5).epsilon(1e-15));  // mean 1..20
    CHECK(trailing_average(xs, 4, 20) == doctest::Approx(3.0).epsilon(1e-15));    // mean 1..5
    CHECK(trailing_average(xs, 29, 20) == doctest::Approx(20.5).epsilon(1e-15));  // mean 11..30
}

TEST_CASE("run_experiment: one episode, one slot logs exactly one transition") {
    fs::path dir = fresh_dir("volfml_one_slot");
    ExperimentConfig cfg = tiny_run_config(AgentKind::rra, 5, 1, 1);
    RunRecord record = run_experiment(cfg, dir.string());
    CHECK(record.episodes.size() == 1);
    std::string trace = slurp((dir / "trace.jsonl").string());
    CHECK(std::count(trace.begin(), trace.end(), '\n') == 1);
    std::string summary = slurp((dir / "summary.csv").string());
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 2);  // header + 1 row
}

TEST_CASE("run_experiment: identical config and seed give byte-identical outputs") {
    fs::path dir_a = fresh_dir("volfml_repro_a");
    fs::path dir_b = fresh_dir("volfml_repro_b");
    ExperimentConfig cfg = tiny_run_config(AgentKind::pdqn, 11);
    run_experiment(cfg, dir_a.string());
    run_experiment(cfg, dir_b.string());
    CHECK(slurp((dir_a / "summary.csv").string()) == slurp((dir_b / "summary.csv").string()));
    CHECK(slurp((dir_a / "trace.jsonl").string()) == slurp((dir_b / "trace.jsonl").string()));
    CHECK(slurp((dir_a / "agent.ckpt").string()) == slurp((dir_b / "agent.ckpt").string()));

    fs::path dir_c = fresh_dir("volfml_repro_c");
    ExperimentConfig other = cfg;
    other.seed = 12;
    run_experiment(other, dir_c.string());
    CHECK(slurp((dir_a / "summary.csv").string()) != slurp((dir_c / "summary.csv").string()));
}

TEST_CASE("run_experiment: noma and oma share masks under rra, rates differ") {
    fs::path dir_noma = fresh_dir("volfml_rra_noma");
    fs::path dir_oma = fresh_dir("volfml_rra_oma");
    ExperimentConfig cfg = tiny_run_config(AgentKind::rra, 21, 2, 4);
    run_experiment(cfg, dir_noma.string());
    ExperimentConfig oma_cfg = cfg;
    oma_cfg.scheme = env::Scheme::oma;
    run_experiment(oma_cfg, dir_oma.string());

    std::ifstream a((dir_noma / "trace.jsonl").string());
    std::ifstream b((dir_oma / "trace.jsonl").string());
    std::string la, lb;
    bool any_rate_diff = false;
    while (std::getline(a, la) && std::getline(b, lb)) {
        auto ja = nlohmann::json::parse(la);
        auto jb = nlohmann::json::parse(lb);
        CHECK(ja["mask"] == jb["mask"]);
        if (ja["round_time"] != jb["round_time"]) any_rate_diff = true;
    }
    CHECK(any_rate_diff);
}

TEST_CASE("compare_runs: ties, orderings and per-arm stats") {
    fs::path dir_a = fresh_dir("volfml_cmp_a");
    fs::path dir_b = fresh_dir("volfml_cmp_b");
    ExperimentConfig cfg = tiny_run_config(AgentKind::ew, 31, 3, 4);
    run_experiment(cfg, dir_a.string());
    run_experiment(cfg, dir_b.string());
    CompareReport tie = compare_runs({dir_a.string(), dir_b.string()});
    CHECK(tie.window_means[0] == tie.window_means[1]);
    CHECK(tie.text.find("tie") != std::string::npos);

    // three seeds of one arm produce min/median/max over three values
    std::vector<std::string> dirs;
    for (uint64_t s : {41ull, 42ull, 43ull}) {
        fs::path d = fresh_dir("volfml_cmp_seed" + std::to_string(s));
        ExperimentConfig c = tiny_run_config(AgentKind::rra, s, 3, 4);
        run_experiment(c, d.string());
        dirs.push_back(d.string());
    }
    CompareReport arms = compare_runs(dirs);
    REQUIRE(arms.arms.size() == 1);
    CHECK(arms.arms[0].per_seed.size() == 3);
    CHECK(arms.arms[0].min <= arms.arms[0].median);
    CHECK(arms.arms[0].median <= arms.arms[0].max);
}

TEST_CASE("compare_runs: refuses cross-physics comparisons") {
    fs::path dir_a = fresh_dir("volfml_phys_a");
    fs::path dir_b = fresh_dir("volfml_phys_b");
    ExperimentConfig cfg = tiny_run_config(AgentKind::rra, 51, 2, 3);
    run_experiment(cfg, dir_a.string());
    ExperimentConfig other = cfg;
    other.n_devices = 3;
    run_experiment(other, dir_b.string());
    CHECK_THROWS_AS(compare_runs({dir_a.string(), dir_b.string()}), ConfigError);
}

TEST_CASE("export_plotdata: row counts, recomputed moving average, bounded accuracy") {
    fs::path run_dir = fresh_dir("volfml_export_run");
    fs::path out_dir = fresh_dir("volfml_export_out");
    ExperimentConfig cfg = tiny_run_config(AgentKind::rra, 61, 25, 3);
    run_experiment(cfg, run_dir.string());
    export_plotdata(run_dir.string(), out_dir.string());

    std::ifstream reward((out_dir / "reward_series.csv").string());
    std::string line;
    std::getline(reward, line);  // header
    std::vector<double> returns, avgs;
    while (std::getline(reward, line)) {
        std::stringstream ss(line);
        std::string c0, c1, c2;
        std::getline(ss, c0, ',');
        std::getline(ss, c1, ',');
        std::getline(ss, c2, ',');
        returns.push_back(std::stod(c1));
        avgs.push_back(std::stod(c2));
    }
    REQUIRE(returns.size() == 25);
    // moving-average column at episode 20 equals the mean of episodes 1..20
    double mean20 = 0.0;
    for (int i = 0; i < 20; ++i) mean20 += returns[i];
    mean20 /= 20.0;
    CHECK(avgs[19] == doctest::Approx(mean20).epsilon(1e-12));

    std::ifstream acc((out_dir / "accuracy_series.csv").string());
    std::getline(acc, line);
    int rows = 0;
    while (std::getline(acc, line)) {
        std::stringstream ss(line);
        std::string cell;
        for (int k = 0; k < 4; ++k) std::getline(ss, cell, ',');
        double a = std::stod(cell);
        CHECK(a >= 0.0);
        CHECK(a <= 1.0);
        ++rows;
    }
    CHECK(rows == 25 * 3);
}

TEST_CASE("run_experiment: numeric blow-up aborts with the last-good checkpoint") {
    fs::path dir = fresh_dir("volfml_blowup");
    ExperimentConfig cfg = tiny_run_config(AgentKind::pdqn, 71, 8, 6);
    cfg.optim = agents::OptimKind::sgd;  // unnormalized steps diverge fast
    cfg.actor_lr = 1e18;
    cfg.critic_lr = 1e18;
    cfg.checkpoint_every = 1;
    CHECK_THROWS_AS(run_experiment(cfg, dir.string()), NumericAbort);
    // outputs up to the abort still land atomically
    CHECK(fs::exists(dir / "summary.csv"));
    CHECK(fs::exists(dir / "trace.jsonl"));
}

TEST_CASE("cli: exit codes distinguish success, config errors and usage") {
    fs::path out = fresh_dir("volfml_cli_run");
    CHECK(run_cli("run --out " + (out / "r1").string() +
                  " --agent rra --episodes 2 --slots 3 --seed 5") == 0);
    CHECK(run_cli("print-config") == 0);

    // invalid config file -> 2
    fs::path bad = fs::temp_directory_path() / "volfml_bad_config.json";
    std::ofstream(bad.string()) << "{\"metrics\": {\"lambda\": [1.0, 1.0, 1.0]}}";
    CHECK(run_cli("run --config " + bad.string() + " --out " + (out / "r2").string()) == 2);
    CHECK(run_cli("run --out " + (out / "r3").string() + " --agent sarsa") == 2);

    // compare over the same run twice works
    CHECK(run_cli("run --out " + (out / "r4").string() +
                  " --agent rra --episodes 2 --slots 3 --seed 5") == 0);
    CHECK(run_cli("compare " + (out / "r1").string() + " " + (out / "r4").string()) == 0);
    CHECK(run_cli("export --run " + (out / "r1").string() + " --out " +
                  (out / "fig").string()) == 0);
}

TEST_CASE("cli: dump-tasks emits a loadable versioned dump") {
    fs::path out = fs::temp_directory_path() / "volfml_tasks_dump.txt";
    CHECK(run_cli("dump-tasks --seed 9 --out " + out.string()) == 0);
    fml::TaskFamily family = fml::load_tasks(out.string());
    CHECK(family.devices.size() == 10);
    ExperimentConfig cfg = default_config();
    cfg.seed = 9;
    fml::TaskFamily direct = fml::make_synthetic_tasks(
        cfg.n_devices, derive_stream_seed(9, "data"), cfg.noniid_degree, cfg.data);
    CHECK(family.devices[3].train[5].input == direct.devices[3].train[5].input);
}
