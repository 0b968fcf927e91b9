#pragma once

#include <span>
#include <vector>

#include "volfml/radio/model.hpp"

namespace volfml::metrics {

using radio::TaskRequirements;

// positive VoL factor: acc/acc_req capped at 1 once the requirement is met
double vol_accuracy(double acc, double acc_req);

// negative VoL factors, normalized by the per-task tolerances
double vol_time(double round_time_s, double t_max_s);
double vol_energy(double energy_j, double e_max_j);

struct VolBreakdown {
    double v_acc = 0.0;
    double v_time = 0.0;
    double v_energy = 0.0;
    double weighted = 0.0;  // eta1*v_acc - eta2*v_time - eta3*v_energy
};

struct Etas {
    double eta1 = 1.0;
    double eta2 = 0.5;
    double eta3 = 0.5;
};

VolBreakdown vol_breakdown(double acc, double round_time_s, double energy_j,
                           const TaskRequirements& req, const Etas& etas);

// Age of update: rounds since a device last participated in aggregation.
// Ages start at 1; a scheduled device resets to 1, others increment.
struct AouState {
    std::vector<int> ages;
};

AouState initial_aou(int n_devices);
AouState update_aou(const AouState& state, const std::vector<int>& mask);

struct TlwParams {
    double lambda1 = 0.1;   // 1/s
    double lambda2 = 1.0;   // 1/J
    double lambda3 = 0.01;  // per unit accuracy
};

// requirement factor 1/(l1*T_max + l2*E_max - l3*A_req); throws if the
// denominator is not strictly positive
double tlw_req_factor(const TaskRequirements& req, const TlwParams& params);

// fairness factors a_n / sum(a_i); sums to 1
std::vector<double> tlw_fair_factors(const AouState& state);

// task level weights eps_n = req factor + fairness factor
std::vector<double> tlw(const AouState& state, std::span<const TaskRequirements> reqs,
                        const TlwParams& params);

// sum_n eps_n * z_n * (eta1*v_acc - eta2*v_time - eta3*v_energy)
double objective(std::span<const double> tlw_values, std::span<const int> mask,
                 std::span<const VolBreakdown> vols, const Etas& etas);

}  // namespace volfml::metrics
