#include "volfml/radio/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace volfml::radio {

double ChannelModel::noise_power_w() const {
    // dBm/Hz -> W/Hz -> W over the band
    return std::pow(10.0, awgn_dbm_per_hz / 10.0) * 1e-3 * bandwidth_hz;
}

ChannelSnapshot draw_channels(std::span<const DeviceProfile> profiles, const ChannelModel& model,
                              Rng& rng) {
    ChannelSnapshot snap;
    snap.bandwidth_hz = model.bandwidth_hz;
    snap.noise_power_w = model.noise_power_w();
    snap.gains.reserve(profiles.size());
    double ref_loss = std::pow(10.0, model.ref_loss_db / 10.0);
    for (const DeviceProfile& dev : profiles) {
        double dist = std::hypot(dev.pos_x_m, dev.pos_y_m);
        dist = std::max(dist, 1.0);  // clamp inside the reference distance
        double path = ref_loss * std::pow(dist, -model.path_loss_exponent);
        double fading = model.fading == FadingModel::rayleigh ? rng.exponential() : 1.0;
        snap.gains.push_back(path * fading);
    }
    return snap;
}

std::vector<int> sic_order(const ChannelSnapshot& snapshot, const std::vector<int>& mask) {
    if (mask.size() != snapshot.gains.size())
        throw std::invalid_argument("sic_order: mask length mismatch");
    std::vector<int> order;
    for (size_t n = 0; n < mask.size(); ++n)
        if (mask[n]) order.push_back(static_cast<int>(n));
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (snapshot.gains[a] != snapshot.gains[b]) return snapshot.gains[a] > snapshot.gains[b];
        return a < b;
    });
    return order;
}

std::vector<double> noma_rates(const ChannelSnapshot& snapshot, const RoundDecision& decision) {
    size_t n_dev = snapshot.gains.size();
    if (decision.mask.size() != n_dev || decision.power.size() != n_dev)
        throw std::invalid_argument("noma_rates: decision length mismatch");
    std::vector<double> rates(n_dev, 0.0);
    std::vector<int> order = sic_order(snapshot, decision.mask);

    // decode strongest first; scheduled devices decoded later interfere.
    // interference accumulated weakest-first so that identical suffixes of
    // the SIC order produce bit-identical sums.
    double interference = 0.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        double own = decision.power[*it] * snapshot.gains[*it];
        rates[*it] = snapshot.bandwidth_hz *
                     std::log2(1.0 + own / (interference + snapshot.noise_power_w));
        interference += own;
    }
    return rates;
}

std::vector<double> oma_rates(const ChannelSnapshot& snapshot, const RoundDecision& decision) {
    size_t n_dev = snapshot.gains.size();
    if (decision.mask.size() != n_dev || decision.power.size() != n_dev)
        throw std::invalid_argument("oma_rates: decision length mismatch");
    std::vector<double> rates(n_dev, 0.0);
    int n_sched = 0;
    for (int z : decision.mask) n_sched += (z != 0);
    if (n_sched == 0) return rates;

    double subband = snapshot.bandwidth_hz / n_sched;
    double subband_noise = snapshot.noise_power_w / n_sched;
    for (size_t n = 0; n < n_dev; ++n) {
        if (!decision.mask[n]) continue;
        double own = decision.power[n] * snapshot.gains[n];
        rates[n] = subband * std::log2(1.0 + own / subband_noise);
    }
    return rates;
}

CostReport round_costs(std::span<const DeviceProfile> profiles, const ChannelSnapshot& snapshot,
                       const RoundDecision& decision, std::span<const double> rates) {
    size_t n_dev = profiles.size();
    if (decision.mask.size() != n_dev || decision.power.size() != n_dev ||
        decision.freq.size() != n_dev || rates.size() != n_dev ||
        snapshot.gains.size() != n_dev)
        throw std::invalid_argument("round_costs: length mismatch");

    CostReport report;
    report.t_cmp_s.assign(n_dev, 0.0);
    report.e_cmp_j.assign(n_dev, 0.0);
    report.t_com_s.assign(n_dev, 0.0);
    report.e_com_j.assign(n_dev, 0.0);
    report.rate_bps.assign(rates.begin(), rates.end());
    report.energy_j.assign(n_dev, 0.0);

    for (size_t n = 0; n < n_dev; ++n) {
        if (!decision.mask[n]) continue;
        const DeviceProfile& dev = profiles[n];
        double cycles = dev.cycles_per_sample * dev.data_size;
        if (decision.freq[n] <= 0.0 || rates[n] <= 0.0) {
            report.feasible = false;
            continue;
        }
        report.t_cmp_s[n] = cycles / decision.freq[n];
        report.e_cmp_j[n] = dev.capacitance_half * cycles * decision.freq[n] * decision.freq[n];
        report.t_com_s[n] = dev.model_bits / rates[n];
        report.e_com_j[n] = decision.power[n] * report.t_com_s[n];
        report.energy_j[n] = report.e_cmp_j[n] + report.e_com_j[n];
        report.round_time_s = std::max(report.round_time_s, report.t_cmp_s[n] + report.t_com_s[n]);
    }
    return report;
}

}  // namespace volfml::radio
