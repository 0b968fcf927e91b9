#pragma once

#include <span>
#include <vector>

#include "volfml/rng.hpp"
#include "volfml/types.hpp"

namespace volfml::radio {

struct TaskRequirements {
    double acc_req = 0.8;   // required accuracy, in (0, 1]
    double t_max_s = 1.0;   // tolerable round time
    double e_max_j = 0.1;   // tolerable round energy
};

struct DeviceProfile {
    int id = 0;
    double data_size = 100;            // samples used per local update
    double cycles_per_sample = 1e7;    // CPU cycles per sample
    double f_max_hz = 1e10;
    double p_max_w = 0.1;
    double capacitance_half = 1e-28;   // tau/2, effective chipset capacitance
    double model_bits = 1e6;           // uplink payload per round
    double pos_x_m = 0.0;
    double pos_y_m = 0.0;
    TaskRequirements req;
};

enum class FadingModel { unit, rayleigh };

struct ChannelModel {
    double bandwidth_hz = 1e6;
    double awgn_dbm_per_hz = -174.0;
    double path_loss_exponent = 3.76;
    double ref_loss_db = -30.0;  // loss at the 1 m reference distance
    FadingModel fading = FadingModel::rayleigh;

    double noise_power_w() const;
};

// Per-round channel state. The server sits at the origin; gains are linear
// power gains |h_n|^2.
struct ChannelSnapshot {
    std::vector<double> gains;
    double bandwidth_hz = 1e6;
    double noise_power_w = 0.0;
};

ChannelSnapshot draw_channels(std::span<const DeviceProfile> profiles, const ChannelModel& model,
                              Rng& rng);

// Scheduled devices in SIC decoding order: gain descending, ties by id.
std::vector<int> sic_order(const ChannelSnapshot& snapshot, const std::vector<int>& mask);

// NOMA achievable rates; devices decoded earlier see interference from the
// scheduled devices decoded after them. Unscheduled entries are 0.
std::vector<double> noma_rates(const ChannelSnapshot& snapshot, const RoundDecision& decision);

// OMA baseline: equal bandwidth split among scheduled devices with the noise
// scaled to the subband. Unscheduled entries are 0.
std::vector<double> oma_rates(const ChannelSnapshot& snapshot, const RoundDecision& decision);

struct CostReport {
    std::vector<double> t_cmp_s;
    std::vector<double> e_cmp_j;
    std::vector<double> t_com_s;
    std::vector<double> e_com_j;
    std::vector<double> rate_bps;
    std::vector<double> energy_j;  // e_cmp + e_com
    double round_time_s = 0.0;     // max over scheduled of t_cmp + t_com
    bool feasible = true;          // false if a scheduled device has f=0 or R=0
};

CostReport round_costs(std::span<const DeviceProfile> profiles, const ChannelSnapshot& snapshot,
                       const RoundDecision& decision, std::span<const double> rates);

}  // namespace volfml::radio
