#include "volfml/harness/compare.hpp"

#include <json.hpp>
#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace volfml::harness {

using nlohmann::json;

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

double window_mean(const std::vector<double>& xs, int window) {
    if (xs.empty()) return 0.0;
    size_t take = std::min(xs.size(), static_cast<size_t>(window));
    double sum = std::accumulate(xs.end() - take, xs.end(), 0.0);
    return sum / static_cast<double>(take);
}

}  // namespace

double LoadedRun::final_window_return(int window) const {
    std::vector<double> r;
    for (const auto& e : episodes) r.push_back(e.ret);
    return window_mean(r, window);
}

double LoadedRun::final_window_acc(int window) const {
    std::vector<double> a;
    for (const auto& e : episodes) a.push_back(e.acc_probe);
    return window_mean(a, window);
}

LoadedRun load_run(const std::string& dir) {
    LoadedRun run;
    run.dir = dir;

    std::ifstream meta_is(dir + "/meta.json");
    if (!meta_is) throw ConfigError("compare: missing meta.json in " + dir);
    json meta = json::parse(meta_is);
    run.seed = meta.at("seed").get<uint64_t>();
    run.physics_hash = meta.at("physics_hash").get<uint64_t>();
    run.n_devices = meta.at("n_devices").get<int>();
    run.arm = meta.at("agent").get<std::string>() + "-" +
              meta.at("scheme").get<std::string>() + "-" +
              meta.at("tlw_mode").get<std::string>();

    std::ifstream csv(dir + "/summary.csv");
    if (!csv) throw ConfigError("compare: missing summary.csv in " + dir);
    std::string line;
    std::getline(csv, line);  // header
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() < 6) throw ConfigError("compare: malformed summary row in " + dir);
        EpisodeStats e;
        e.episode = std::stoi(cells[0]);
        e.ret = std::stod(cells[1]);
        e.avg_window = std::stod(cells[2]);
        e.mean_objective = std::stod(cells[3]);
        e.acc_probe = std::stod(cells[4]);
        e.feasible_slots = std::stoi(cells[5]);
        run.episodes.push_back(e);
    }
    if (run.episodes.empty()) throw ConfigError("compare: empty summary in " + dir);
    return run;
}

CompareReport compare_runs(const std::vector<std::string>& dirs, int window) {
    if (dirs.size() < 2) throw ConfigError("compare: need at least two run directories");
    CompareReport report;
    for (const auto& dir : dirs) report.runs.push_back(load_run(dir));

    for (size_t i = 1; i < report.runs.size(); ++i) {
        if (report.runs[i].physics_hash != report.runs[0].physics_hash ||
            report.runs[i].n_devices != report.runs[0].n_devices) {
            throw ConfigError("compare: physics parameters differ between " +
                              report.runs[0].dir + " and " + report.runs[i].dir);
        }
    }

    std::stable_sort(report.runs.begin(), report.runs.end(),
                     [&](const LoadedRun& a, const LoadedRun& b) {
                         return a.final_window_return(window) > b.final_window_return(window);
                     });
    for (const auto& run : report.runs)
        report.window_means.push_back(run.final_window_return(window));

    std::map<std::string, std::vector<double>> by_arm;
    for (const auto& run : report.runs)
        by_arm[run.arm].push_back(run.final_window_return(window));
    for (auto& [arm, values] : by_arm) {
        ArmStats st;
        st.arm = arm;
        st.per_seed = values;
        std::sort(values.begin(), values.end());
        st.min = values.front();
        st.max = values.back();
        st.median = values[values.size() / 2];
        if (values.size() % 2 == 0)
            st.median = 0.5 * (values[values.size() / 2 - 1] + values[values.size() / 2]);
        report.arms.push_back(st);
    }
    std::sort(report.arms.begin(), report.arms.end(),
              [](const ArmStats& a, const ArmStats& b) { return a.median > b.median; });

    std::ostringstream os;
    os << "final-" << window << "-episode mean return per run:\n";
    for (size_t i = 0; i < report.runs.size(); ++i) {
        const LoadedRun& run = report.runs[i];
        os << "  " << (i + 1) << ". " << run.arm << " seed=" << run.seed << " mean="
           << format_double(report.window_means[i]) << " (" << run.dir << ")\n";
    }
    os << "per-arm stats (min / median / max over seeds):\n";
    for (const auto& st : report.arms) {
        os << "  " << st.arm << ": " << format_double(st.min) << " / "
           << format_double(st.median) << " / " << format_double(st.max) << " over "
           << st.per_seed.size() << " run(s)\n";
    }
    os << "ordering: ";
    for (size_t i = 0; i < report.arms.size(); ++i) {
        if (i) os << " > ";
        os << report.arms[i].arm;
    }
    os << "\n";
    if (report.runs.size() == 2 && report.window_means[0] == report.window_means[1])
        os << "note: the two runs tie exactly\n";
    report.text = os.str();
    return report;
}

void export_plotdata(const std::string& run_dir, const std::string& out_dir) {
    LoadedRun run = load_run(run_dir);
    std::filesystem::create_directories(out_dir);

    std::ostringstream reward;
    reward << "episode,return,avg" << kMovingAverageWindow << "\n";
    std::ostringstream vol;
    vol << "episode,vol,cumulative_vol\n";
    double cumulative = 0.0;
    for (const auto& e : run.episodes) {
        reward << e.episode << "," << format_double(e.ret) << ","
               << format_double(e.avg_window) << "\n";
        cumulative += e.ret;
        vol << e.episode << "," << format_double(e.ret) << "," << format_double(cumulative)
            << "\n";
    }
    atomic_write(out_dir + "/reward_series.csv", reward.str());
    atomic_write(out_dir + "/vol_series.csv", vol.str());

    // accuracy series from the slot trace
    std::ifstream trace(run_dir + "/trace.jsonl");
    if (!trace) throw ConfigError("export: missing trace.jsonl in " + run_dir);
    std::ostringstream acc;
    acc << "round,episode,slot,acc_probe\n";
    std::string line;
    long round = 0;
    while (std::getline(trace, line)) {
        if (line.empty()) continue;
        json rec = json::parse(line);
        if (rec.contains("acc_probe")) {
            acc << round << "," << rec["episode"].get<int>() << "," << rec["slot"].get<int>()
                << "," << format_double(rec["acc_probe"].get<double>()) << "\n";
        }
        ++round;
    }
    atomic_write(out_dir + "/accuracy_series.csv", acc.str());
}

}  // namespace volfml::harness
