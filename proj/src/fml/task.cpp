#include "volfml/fml/task.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace volfml::fml {

std::vector<Example> TaskDataset::sample_batch(int batch_size) {
    if (train.empty()) throw std::runtime_error("TaskDataset: no training data");
    if (batch_size <= 0) throw std::invalid_argument("TaskDataset: batch_size must be positive");
    int n = static_cast<int>(train.size());
    if (batch_size >= n) return train;

    // partial Fisher-Yates over an index vector
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::vector<Example> batch;
    batch.reserve(batch_size);
    for (int i = 0; i < batch_size; ++i) {
        int j = sampler.uniform_int(i, n - 1);
        std::swap(idx[i], idx[j]);
        batch.push_back(train[idx[i]]);
    }
    return batch;
}

TaskFamily make_synthetic_tasks(int n_devices, uint64_t seed, double noniid_degree,
                                const SyntheticTaskConfig& cfg) {
    if (n_devices < 1) throw std::invalid_argument("make_synthetic_tasks: n_devices >= 1");
    if (noniid_degree < 0.0 || noniid_degree > 1.0)
        throw std::invalid_argument("make_synthetic_tasks: noniid_degree in [0,1]");
    if (cfg.input_dim < 2) throw std::invalid_argument("make_synthetic_tasks: input_dim >= 2");

    TaskFamily family;
    family.devices.resize(n_devices);
    family.class_means.resize(n_devices);

    Rng data_rng(derive_stream_seed(seed, "task-data"));

    for (int dev = 0; dev < n_devices; ++dev) {
        // rotate the class layout by up to one class offset across devices
        double rot = noniid_degree * (2.0 * M_PI / cfg.n_classes) *
                     (static_cast<double>(dev) / static_cast<double>(n_devices));
        auto& means = family.class_means[dev];
        means.resize(cfg.n_classes, std::vector<double>(cfg.input_dim, 0.0));
        for (int c = 0; c < cfg.n_classes; ++c) {
            double angle = 2.0 * M_PI * c / cfg.n_classes + rot;
            means[c][0] = cfg.class_radius * std::cos(angle);
            means[c][1] = cfg.class_radius * std::sin(angle);
        }

        auto draw = [&](int count, std::vector<Example>& out) {
            out.resize(count);
            for (int i = 0; i < count; ++i) {
                int c = i % cfg.n_classes;  // balanced classes
                Example& ex = out[i];
                ex.input.resize(cfg.input_dim);
                for (int d = 0; d < cfg.input_dim; ++d)
                    ex.input[d] = means[c][d] + cfg.noise_std * data_rng.normal();
                ex.target.assign(cfg.n_classes, 0.0);
                ex.target[c] = 1.0;
            }
        };
        TaskDataset& task = family.devices[dev];
        draw(cfg.train_size, task.train);
        draw(cfg.test_size, task.test);
        task.sampler = Rng(derive_stream_seed(seed, "task-sampler-" + std::to_string(dev)));
    }
    return family;
}

namespace {

void write_examples(std::ostream& os, const std::vector<Example>& xs) {
    os << xs.size() << "\n";
    os << std::setprecision(17);
    for (const Example& ex : xs) {
        os << ex.input.size() << " " << ex.target.size();
        for (double v : ex.input) os << " " << v;
        for (double v : ex.target) os << " " << v;
        os << "\n";
    }
    
}

std::vector<Example> read_examples(std::istream& is) {
    size_t n;
    is >> n;
    std::vector<Example> xs(n);
    for (Example& ex : xs) {
        size_t ni, nt;
        is >> ni >> nt;
        ex.input.resize(ni);
        ex.target.resize(nt);
        for (double& v : ex.input) is >> v;
        for (double& v : ex.target) is >> v;
    }
    if (!is) throw std::runtime_error("task dump: truncated example block");
    return xs;
}

}  // namespace

void save_tasks(const std::string& path, const TaskFamily& family) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_tasks: cannot open " + path);
    os << "volfml-tasks 1\n";
    os << family.devices.size() << "\n";
    for (size_t dev = 0; dev < family.devices.size(); ++dev) {
        const TaskDataset& task = family.devices[dev];
        write_examples(os, task.train);
        write_examples(os, task.test);
        os << task.sampler.save_state() << "\n";
        const auto& means = family.class_means[dev];
        os << means.size() << " " << (means.empty() ? 0 : means[0].size()) << "\n";
        os << std::setprecision(17);
        for (const auto& m : means) {
            for (size_t d = 0; d < m.size(); ++d) os << (d ? " " : "") << m[d];
            os << "\n";
        }
        
    }
    if (!os) throw std::runtime_error("save_tasks: write failed");
}

TaskFamily load_tasks(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_tasks: cannot open " + path);
    std::string magic;
    int version;
    is >> magic >> version;
    if (magic != "volfml-tasks" || version != 1)
        throw std::runtime_error("load_tasks: unsupported format");
    size_t n_devices;
    is >> n_devices;
    TaskFamily family;
    family.devices.resize(n_devices);
    family.class_means.resize(n_devices);
    for (size_t dev = 0; dev < n_devices; ++dev) {
        TaskDataset& task = family.devices[dev];
        task.train = read_examples(is);
        task.test = read_examples(is);
        std::string state;
        is >> std::ws;
        std::getline(is, state);
        task.sampler.load_state(state);
        size_t n_classes, dim;
        is >> n_classes >> dim;
        auto& means = family.class_means[dev];
        means.assign(n_classes, std::vector<double>(dim, 0.0));
        for (auto& m : means)
            for (double& v : m) is >> v;
    }
    if (!is) throw std::runtime_error("load_tasks: truncated file");
    return family;
}

}  // namespace volfml::fml
