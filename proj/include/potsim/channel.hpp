#pragma once

#include "potsim/waveform.hpp"

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

namespace potsim {

enum class ChannelKind { AWGN, EPA };

std::string_view to_string(ChannelKind k);
ChannelKind parse_channel_kind(std::string_view name);

struct Tap {
    double delay = 0.0;      // seconds
    double mean_power = 1.0; // linear
};

struct ChannelModel {
    ChannelKind kind = ChannelKind::AWGN;
    double carrier_freq = 800e6;
    std::vector<Tap> taps{Tap{}};
    double noise_psd = 0.0;

    static ChannelModel awgn(double carrier_freq = 800e6);
    // Extended Pedestrian A tapped delay line, normalized to unit power.
    static ChannelModel epa(double carrier_freq = 800e6);
    // Arbitrary tapped delay line; powers in dB, normalized to unit power.
    static ChannelModel tapped(std::vector<double> delays_s, std::vector<double> powers_db,
                               double carrier_freq = 800e6);

    void validate() const;
};

struct LinkId {
    int source = 0;
    int destination = 0;
};

// Block-fading state of one transmitter-to-receiver path for one drop.
struct ChannelRealization {
    LinkId link_id;
    double path_gain = 1.0;
    std::vector<cplx> tap_gains;
    std::vector<double> tap_delays;
    std::uint64_t seed_trace = 0;
};

// (c / (4 pi d f))^2 clipped to 1. Throws ParameterDomainError for d <= 0.
double free_space_path_loss(double distance_m, double carrier_hz);

ChannelRealization realize_channel(const ChannelModel& model, double distance_m, std::uint64_t seed,
                                   LinkId link = {});

using TapEvaluator = std::function<cplx(double tap_delay_s)>;

// sqrt(path_gain) * sum over taps of tap_gain * evaluator(tap_delay).
// Taps beyond max_delay_s raise ParameterDomainError.
cplx effective_gain(const ChannelRealization& realization, const TapEvaluator& evaluator,
                    double max_delay_s);

} // namespace potsim
