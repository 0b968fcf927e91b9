#include "volfml/metrics/vol.hpp"

#include <stdexcept>

namespace volfml::metrics {

double vol_accuracy(double acc, double acc_req) {
    if (!(acc >= 0.0 && acc <= 1.0)) throw std::invalid_argument("vol_accuracy: acc in [0,1]");
    if (!(acc_req > 0.0 && acc_req <= 1.0))
        throw std::invalid_argument("vol_accuracy: acc_req in (0,1]");
    return acc > acc_req ? 1.0 : acc / acc_req;
}

double vol_time(double round_time_s, double t_max_s) {
    if (!(t_max_s > 0.0)) throw std::invalid_argument("vol_time: t_max must be positive");
    if (round_time_s < 0.0) throw std::invalid_argument("vol_time: negative time");
    return round_time_s / t_max_s;
}

double vol_energy(double energy_j, double e_max_j) {
    if (!(e_max_j > 0.0)) throw std::invalid_argument("vol_energy: e_max must be positive");
    if (energy_j < 0.0) throw std::invalid_argument("vol_energy: negative energy");
    return energy_j / e_max_j;
}

VolBreakdown vol_breakdown(double acc, double round_time_s, double energy_j,
                           const TaskRequirements& req, const Etas& etas) {
    VolBreakdown v;
    v.v_acc = vol_accuracy(acc, req.acc_req);
    v.v_time = vol_time(round_time_s, req.t_max_s);
    v.v_energy = vol_energy(energy_j, req.e_max_j);
    v.weighted = etas.eta1 * v.v_acc - etas.eta2 * v.v_time - etas.eta3 * v.v_energy;
    return v;
}

AouState initial_aou(int n_devices) {
    AouState state;
    state.ages.assign(n_devices, 1);
    return state;
}

AouState update_aou(const AouState& state, const std::vector<int>& mask) {
    if (mask.size() != state.ages.size())
        throw std::invalid_argument("update_aou: mask length mismatch");
    AouState next;
    next.ages.resize(state.ages.size());
    for (size_t n = 0; n < mask.size(); ++n)
        next.ages[n] = mask[n] ? 1 : state.ages[n] + 1;
    return next;
}

double tlw_req_factor(const TaskRequirements& req, const TlwParams& params) {
    double denom = params.lambda1 * req.t_max_s + params.lambda2 * req.e_max_j -
                   params.lambda3 * req.acc_req;
    if (!(denom > 0.0))
        throw std::invalid_argument("tlw_req_factor: nonpositive denominator");
    return 1.0 / denom;
}

std::vector<double> tlw_fair_factors(const AouState& state) {
    double total = 0.0;
    for (int a : state.ages) {
        if (a < 1) throw std::invalid_argument("tlw_fair_factors: ages must be >= 1");
        total += a;
    }
    std::vector<double> fair(state.ages.size());
    for (size_t n = 0; n < fair.size(); ++n) fair[n] = state.ages[n] / total;
    return fair;
}

std::vector<double> tlw(const AouState& state, std::span<const TaskRequirements> reqs,
                        const TlwParams& params) {
    if (reqs.size() != state.ages.size())
        throw std::invalid_argument("tlw: requirements length mismatch");
    std::vector<double> eps = tlw_fair_factors(state);
    for (size_t n = 0; n < eps.size(); ++n) eps[n] += tlw_req_factor(reqs[n], params);
    return eps;
}

double objective(std::span<const double> tlw_values, std::span<const int> mask,
                 std::span<const VolBreakdown> vols, const Etas& etas) {
    if (mask.size() != tlw_values.size() || vols.size() != tlw_values.size())
        throw std::invalid_argument("objective: length mismatch");
    double total = 0.0;
    for (size_t n = 0; n < mask.size(); ++n) {
        if (!mask[n]) continue;
        const VolBreakdown& v = vols[n];
        total += tlw_values[n] *
                 (etas.eta1 * v.v_acc - etas.eta2 * v.v_time - etas.eta3 * v.v_energy);
    }
    return total;
}

}  // namespace volfml::metrics
