#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "volfml/radio/model.hpp"

using namespace volfml;
using namespace volfml::radio;

namespace {

std::vector<DeviceProfile> make_profiles(const std::vector<std::pair<double, double>>& pos) {
    std::vector<DeviceProfile> profiles(pos.size());
    for (size_t n = 0; n < pos.size(); ++n) {
        profiles[n].id = static_cast<int>(n);
        profiles[n].pos_x_m = pos[n].first;
        profiles[n].pos_y_m = pos[n].second;
    }
    return profiles;
}

ChannelSnapshot snap_with_gains(std::vector<double> gains, double bw = 1e6,
                                double noise = 1e-12) {
    return ChannelSnapshot{std::move(gains), bw, noise};
}

RoundDecision all_on(size_t n, double p = 0.05, double f = 1e9) {
    return RoundDecision{std::vector<int>(n, 1), std::vector<double>(n, p),
                         std::vector<double>(n, f)};
}

}  // namespace

TEST_CASE("draw_channels: equal distance and unit fading give equal gains") {
    auto profiles = make_profiles({{100.0, 0.0}, {0.0, 100.0}, {-100.0, 0.0}});
    ChannelModel model;
    model.fading = FadingModel::unit;
    Rng rng(1);
    ChannelSnapshot snap = draw_channels(profiles, model, rng);
    CHECK(snap.gains[0] == snap.gains[1]);
    CHECK(snap.gains[1] == snap.gains[2]);
    CHECK(snap.gains[0] > 0.0);
}

TEST_CASE("draw_channels: doubling distance scales gain by 2^-3.76") {
    auto profiles = make_profiles({{50.0, 0.0}, {100.0, 0.0}});
    ChannelModel model;
    model.fading = FadingModel::unit;
    Rng rng(1);
    ChannelSnapshot snap = draw_channels(profiles, model, rng);
    double ratio = snap.gains[1] / snap.gains[0];
    CHECK(ratio == doctest::Approx(std::pow(2.0, -3.76)).epsilon(1e-12));
    CHECK(ratio == doctest::Approx(0.0738).epsilon(1e-3));
}

TEST_CASE("draw_channels: -174 dBm/Hz over 1 MHz gives about 3.98e-15 W") {
    ChannelModel model;  // defaults: -174 dBm/Hz, 1 MHz
    double sigma2 = model.noise_power_w();
    // 10^(-174/10) mW/Hz = 10^(-20.4) W/Hz, times 1e6 Hz
    CHECK(sigma2 == doctest::Approx(std::pow(10.0, -20.4) * 1e6).epsilon(1e-12));
    CHECK(sigma2 == doctest::Approx(3.98e-15).epsilon(1e-3));
}

TEST_CASE("draw_channels: zero distance clamped to 1 m") {
    auto profiles = make_profiles({{0.0, 0.0}, {1.0, 0.0}});
    ChannelModel model;
    model.fading = FadingModel::unit;
    Rng rng(1);
    ChannelSnapshot snap = draw_channels(profiles, model, rng);
    CHECK(snap.gains[0] == snap.gains[1]);
}

TEST_CASE("sic_order: sorts by gain, ties by id") {
    ChannelSnapshot snap = snap_with_gains({0.1, 0.9, 0.5});
    CHECK(sic_order(snap, {1, 1, 1}) == std::vector<int>{1, 2, 0});
    CHECK(sic_order(snap, {0, 0, 1}) == std::vector<int>{2});
    ChannelSnapshot tied = snap_with_gains({0.4, 0.4, 0.4});
    CHECK(sic_order(tied, {1, 1, 1}) == std::vector<int>{0, 1, 2});
}

TEST_CASE("noma_rates: single device, p*g/sigma2 = 3, B=1e6 -> 2e6") {
    ChannelSnapshot snap = snap_with_gains({3e-11}, 1e6, 1e-12);
    RoundDecision d = all_on(1, 0.1);  // p*g = 3e-12 = 3*sigma2
    auto rates = noma_rates(snap, d);
    CHECK(rates[0] == doctest::Approx(2e6).epsilon(1e-12));
}

TEST_CASE("noma_rates: two devices with p1g1=2s, p2g2=s both get B") {
    // g1 >= g2; device 0 decoded first sees device 1 as interference:
    // R0 = B log2(1 + 2s/(s+s)) = B, R1 = B log2(1 + s/s) = B
    ChannelSnapshot snap = snap_with_gains({2e-12, 1e-12}, 1e6, 1e-12);
    RoundDecision d = all_on(2, 1.0);
    auto rates = noma_rates(snap, d);
    CHECK(rates[0] == doctest::Approx(1e6).epsilon(1e-12));
    CHECK(rates[1] == doctest::Approx(1e6).epsilon(1e-12));
}

TEST_CASE("noma_rates: zero power gives zero rate") {
    ChannelSnapshot snap = snap_with_gains({1e-10, 1e-11}, 1e6, 1e-12);
    RoundDecision d = all_on(2);
    d.power[0] = 0.0;
    auto rates = noma_rates(snap, d);
    CHECK(rates[0] == 0.0);
    CHECK(rates[1] > 0.0);
}

TEST_CASE("noma_rates: unscheduled devices have no rate and no interference") {
    ChannelSnapshot snap = snap_with_gains({1e-10, 2e-10, 3e-10}, 1e6, 1e-12);
    RoundDecision d = all_on(3, 0.05);
    RoundDecision d_masked = d;
    d_masked.mask = {1, 0, 1};
    auto rates = noma_rates(snap, d_masked);
    CHECK(rates[1] == 0.0);
    // device 0 (weakest) is decoded last either way; removing device 1
    // cannot lower device 0's rate
    auto rates_full = noma_rates(snap, d);
    CHECK(rates[0] >= rates_full[0]);
    // device 2 (strongest, decoded first) strictly gains from 1 going silent
    CHECK(rates[2] > rates_full[2]);
}

TEST_CASE("oma_rates: single device equals the NOMA single-device rate") {
    ChannelSnapshot snap = snap_with_gains({3e-11}, 1e6, 1e-12);
    RoundDecision d = all_on(1, 0.1);
    CHECK(oma_rates(snap, d)[0] == doctest::Approx(noma_rates(snap, d)[0]).epsilon(1e-12));
}

TEST_CASE("oma_rates: two equal devices split the band symmetrically") {
    ChannelSnapshot snap = snap_with_gains({1e-11, 1e-11}, 1e6, 1e-12);
    RoundDecision d = all_on(2, 0.1);
    auto rates = oma_rates(snap, d);
    CHECK(rates[0] == rates[1]);
}

TEST_CASE("oma_rates: p*g/sigma2 = 3 at full band -> 5e5*log2(7) each") {
    ChannelSnapshot snap = snap_with_gains({3e-11, 3e-11}, 1e6, 1e-12);
    RoundDecision d = all_on(2, 0.1);  // p*g = 3*sigma2; subband noise sigma2/2
    auto rates = oma_rates(snap, d);
    double expected = 5e5 * std::log2(7.0);
    CHECK(rates[0] == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(1.404e6).epsilon(1e-3));
}

TEST_CASE("round_costs: hand-checked compute and transmit costs") {
    std::vector<DeviceProfile> profiles(1);
    profiles[0].cycles_per_sample = 1e7;
    profiles[0].data_size = 100;
    profiles[0].capacitance_half = 1e-28;
    profiles[0].model_bits = 1e6;
    ChannelSnapshot snap = snap_with_gains({1e-10}, 1e6, 1e-12);
    RoundDecision d{{1}, {0.1}, {1e9}};
    std::vector<double> rates{2e6};

    CostReport r = round_costs(profiles, snap, d, rates);
    CHECK(r.t_cmp_s[0] == doctest::Approx(1.0).epsilon(1e-12));          // c*D/f
    CHECK(r.e_cmp_j[0] == doctest::Approx(0.1).epsilon(1e-12));          // tau/2*c*D*f^2
    CHECK(r.t_com_s[0] == doctest::Approx(0.5).epsilon(1e-12));          // d/R
    CHECK(r.e_com_j[0] == doctest::Approx(0.05).epsilon(1e-12));         // p*T_com
    CHECK(r.energy_j[0] == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(r.round_time_s == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(r.feasible);
}

TEST_CASE("round_costs: round time is the max over scheduled devices only") {
    std::vector<DeviceProfile> profiles(2);
    for (auto& p : profiles) {
        p.cycles_per_sample = 1e7;
        p.data_size = 100;
        p.model_bits = 1e6;
    }
    ChannelSnapshot snap = snap_with_gains({1e-10, 1e-10}, 1e6, 1e-12);
    RoundDecision d{{1, 0}, {0.1, 0.1}, {1e9, 1e7}};  // device 1 would be slow but is off
    std::vector<double> rates{2e6, 0.0};
    CostReport r = round_costs(profiles, snap, d, rates);
    CHECK(r.round_time_s == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(r.t_cmp_s[1] == 0.0);
    CHECK(r.energy_j[1] == 0.0);
    CHECK(r.feasible);
}

TEST_CASE("round_costs: scheduled device with zero freq or rate is infeasible") {
    std::vector<DeviceProfile> profiles(1);
    ChannelSnapshot snap = snap_with_gains({1e-10}, 1e6, 1e-12);
    RoundDecision d{{1}, {0.1}, {0.0}};
    std::vector<double> rates{2e6};
    CHECK_FALSE(round_costs(profiles, snap, d, rates).feasible);

    d.freq[0] = 1e9;
    rates[0] = 0.0;
    CHECK_FALSE(round_costs(profiles, snap, d, rates).feasible);
}

TEST_CASE("noma properties: randomized monotonicity and SIC dominance") {
    Rng rng(2024);
    int violations_power = 0, violations_interf = 0, violations_sic = 0, violations_cost = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        int n = rng.uniform_int(2, 8);
        std::vector<double> gains(n);
        for (double& g : gains) g = std::pow(10.0, rng.uniform(-12.0, -8.0));
        ChannelSnapshot snap = snap_with_gains(gains, 1e6, 1e-12);

        RoundDecision d;
        d.mask.assign(n, 0);
        d.power.resize(n);
        d.freq.assign(n, 1e9);
        for (int i = 0; i < n; ++i) {
            d.mask[i] = rng.bernoulli(0.7) ? 1 : 0;
            d.power[i] = rng.uniform(0.001, 0.1);
        }
        if (std::none_of(d.mask.begin(), d.mask.end(), [](int z) { return z != 0; }))
            d.mask[0] = 1;

        auto rates = noma_rates(snap, d);
        std::vector<int> order = sic_order(snap, d.mask);

        // own-power monotonicity with everything else fixed
        int probe = order[rng.uniform_int(0, static_cast<int>(order.size()) - 1)];
        RoundDecision d_up = d;
        d_up.power[probe] = d.power[probe] * 1.5;
        if (noma_rates(snap, d_up)[probe] <= rates[probe]) ++violations_power;

        // scheduling one more device: earlier-ranked devices lose (or keep)
        // rate, devices it is decoded after are untouched bit-for-bit
        int off = -1;
        for (int i = 0; i < n; ++i)
            if (!d.mask[i]) off = i;
        if (off >= 0) {
            RoundDecision d_more = d;
            d_more.mask[off] = 1;
            auto rates_more = noma_rates(snap, d_more);
            for (int dev : order) {
                bool added_after =
                    gains[off] < gains[dev] || (gains[off] == gains[dev] && off > dev);
                if (added_after) {
                    if (rates_more[dev] > rates[dev]) ++violations_interf;
                } else {
                    if (rates_more[dev] != rates[dev]) ++violations_interf;
                }
            }
        }

        // equal powers: at every SIC stage the device decoded next has the
        // best SINR among the devices still to decode
        RoundDecision d_eq = d;
        d_eq.power.assign(n, 0.05);
        double residual = 0.0;
        for (int dev : order) residual += d_eq.power[dev] * gains[dev];
        for (size_t i = 0; i < order.size(); ++i) {
            double own_i = d_eq.power[order[i]] * gains[order[i]];
            double sinr_i = own_i / (residual - own_i + snap.noise_power_w);
            for (size_t j = i + 1; j < order.size(); ++j) {
                double own_j = d_eq.power[order[j]] * gains[order[j]];
                double sinr_j = own_j / (residual - own_j + snap.noise_power_w);
                if (sinr_i < sinr_j) ++violations_sic;
            }
            residual -= own_i;
        }

        // cost identities on a random scheduled device
        std::vector<DeviceProfile> profiles(n);
        for (int i = 0; i < n; ++i) {
            profiles[i].data_size = rng.uniform(50, 150);
            profiles[i].model_bits = 1e6;
        }
        CostReport cost = round_costs(profiles, snap, d, rates);
        for (int i = 0; i < n; ++i) {
            if (!d.mask[i] || rates[i] <= 0.0) continue;
            double e_expected = d.power[i] * profiles[i].model_bits / rates[i];
            if (std::abs(cost.e_com_j[i] - e_expected) > 1e-12 * std::max(1.0, e_expected))
                ++violations_cost;
        }
    }
    CHECK(violations_power == 0);
    CHECK(violations_interf == 0);
    CHECK(violations_sic == 0);
    CHECK(violations_cost == 0);
}
