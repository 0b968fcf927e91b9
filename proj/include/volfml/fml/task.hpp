#pragma once

#include <string>
#include <vector>

#include "volfml/nn/mlp.hpp"
#include "volfml/rng.hpp"

namespace volfml::fml {

using nn::Example;

// Per-device labeled dataset with a seeded batch sampler. Successive
// sample_batch calls give the independent batches used by the meta-gradient.
struct TaskDataset {
    std::vector<Example> train;
    std::vector<Example> test;
    Rng sampler{0};

    // Without-replacement sample of `batch_size` training examples; the full
    // training set (in order, no rng consumed) when batch_size covers it.
    std::vector<Example> sample_batch(int batch_size);
};

// Gaussian class clusters on a circle. Non-IID drift rotates the class
// layout with the device index, scaled by noniid_degree.
struct SyntheticTaskConfig {
    int input_dim = 2;
    int n_classes = 3;
    double class_radius = 2.0;
    double noise_std = 1.2;
    int train_size = 100;
    int test_size = 50;
};

struct TaskFamily {
    std::vector<TaskDataset> devices;
    // generator parameters, exposed for tests: means[device][class][dim]
    std::vector<std::vector<std::vector<double>>> class_means;
};

TaskFamily make_synthetic_tasks(int n_devices, uint64_t seed, double noniid_degree,
                                const SyntheticTaskConfig& cfg = {});

// Versioned text dump of a task family (17-digit decimals, exact round-trip).
void save_tasks(const std::string& path, const TaskFamily& family);
TaskFamily load_tasks(const std::string& path);

}  // namespace volfml::fml
