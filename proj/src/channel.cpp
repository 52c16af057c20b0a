#include "potsim/channel.hpp"

#include "potsim/error.hpp"
#include "potsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace potsim {

namespace {
constexpr double speed_of_light = 299792458.0;
}

std::string_view to_string(ChannelKind k)
{
    return k == ChannelKind::AWGN ? "awgn" : "epa";
}

ChannelKind parse_channel_kind(std::string_view name)
{
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "awgn")
        return ChannelKind::AWGN;
    if (s == "epa")
        return ChannelKind::EPA;
    throw ConfigurationError("unknown channel kind '" + std::string(name) + "'");
}

ChannelModel ChannelModel::awgn(double carrier_freq)
{
    ChannelModel m;
    m.kind = ChannelKind::AWGN;
    m.carrier_freq = carrier_freq;
    m.taps = {Tap{0.0, 1.0}};
    return m;
}

ChannelModel ChannelModel::epa(double carrier_freq)
{
    return tapped({0.0, 30e-9, 70e-9, 90e-9, 110e-9, 190e-9, 410e-9}, {0.0, -1.0, -2.0, -3.0, -8.0, -17.2, -20.8},
                  carrier_freq);
}

ChannelModel ChannelModel::tapped(std::vector<double> delays_s, std::vector<double> powers_db, double carrier_freq)
{
    if (delays_s.empty() || delays_s.size() != powers_db.size())
        throw ConfigurationError("tap delay and power lists must be non-empty and of equal length");
    ChannelModel m;
    m.kind = ChannelKind::EPA;
    m.carrier_freq = carrier_freq;
    m.taps.clear();
    double total = 0.0;
    for (std::size_t i = 0; i < delays_s.size(); ++i) {
        if (!(delays_s[i] >= 0.0))
            throw ParameterDomainError("tap delays must be non-negative");
        const double p = std::pow(10.0, powers_db[i] / 10.0);
        m.taps.push_back({delays_s[i], p});
        total += p;
    }
    for (auto& t : m.taps)
        t.mean_power /= total;
    return m;
}

void ChannelModel::validate() const
{
    if (!(carrier_freq > 0.0))
        throw ParameterDomainError("carrier frequency must be positive");
    if (!(noise_psd >= 0.0))
        throw ParameterDomainError("noise psd must be non-negative");
    if (taps.empty())
        throw ConfigurationError("channel has no taps");
    if (kind == ChannelKind::AWGN) {
        if (taps.size() != 1 || taps[0].delay != 0.0 || taps[0].mean_power != 1.0)
            throw ConfigurationError("awgn channel must have one unit tap at zero delay");
        return;
    }
    double total = 0.0;
    for (const auto& t : taps) {
        if (!(t.delay >= 0.0) || !(t.mean_power >= 0.0))
            throw ParameterDomainError("tap delay and power must be non-negative");
        total += t.mean_power;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw ConfigurationError("tap powers must sum to one");
}

double free_space_path_loss(double distance_m, double carrier_hz)
{
    if (!(distance_m > 0.0))
        throw ParameterDomainError("distance must be positive");
    if (!(carrier_hz > 0.0))
        throw ParameterDomainError("carrier frequency must be positive");
    const double g = speed_of_light / (4.0 * std::numbers::pi * distance_m * carrier_hz);
    return std::min(1.0, g * g);
}

ChannelRealization realize_channel(const ChannelModel& model, double distance_m, std::uint64_t seed, LinkId link)
{
    model.validate();
    ChannelRealization r;
    r.link_id = link;
    r.seed_trace = seed;
    r.path_gain = free_space_path_loss(distance_m, model.carrier_freq);
    if (model.kind == ChannelKind::AWGN) {
        r.tap_gains = {cplx(1.0, 0.0)};
        r.tap_delays = {0.0};
        return r;
    }
    RandomStream rng(seed);
    for (const auto& t : model.taps) {
        const double s = std::sqrt(t.mean_power / 2.0);
        const double re = rng.normal();
        const double im = rng.normal();
        r.tap_gains.emplace_back(s * re, s * im);
        r.tap_delays.push_back(t.delay);
    }
    return r;
}

cplx effective_gain(const ChannelRealization& realization, const TapEvaluator& evaluator, double max_delay_s)
{
    if (realization.tap_gains.size() != realization.tap_delays.size())
        throw ConfigurationError("realization tap lists differ in length");
    cplx acc = 0.0;
    for (std::size_t i = 0; i < realization.tap_gains.size(); ++i) {
        if (!(std::abs(realization.tap_delays[i]) < max_delay_s))
            throw ParameterDomainError("tap delay exceeds the filter span");
        acc += realization.tap_gains[i] * evaluator(realization.tap_delays[i]);
    }
    return acc * std::sqrt(realization.path_gain);
}

} // namespace potsim
