#pragma once

#include "potsim/channel.hpp"
#include "potsim/network.hpp"
#include "potsim/waveform.hpp"

#include <map>
#include <span>
#include <utility>
#include <vector>

namespace potsim {

// Expected per-symbol energies at one receiver with i.i.d. unit-energy
// symbols on every lattice position.
struct InterferenceProfile {
    double e_signal = 0.0;
    double e_self = 0.0;
    double e_cci = 0.0;
    double noise_var = 0.0;
    std::vector<std::pair<int, double>> per_aggressor;
    // Channel-convolved peak coefficient |A_mkmk| and path amplitude G_u.
    double a_peak = 1.0;
    double g_u = 1.0;

    double interference() const { return e_self + e_cci; }
};

// Coupling coefficients for one prototype filter used at every transmitter
// and receiver. Tables are built per symbol-timing index and per channel
// tap delay.
class CouplingModel {
  public:
    CouplingModel(const PrototypeFilter& filter, const LatticeConfig& lattice, int fo_quantum, int timing_grid,
                  int reference_subcarrier, std::vector<double> tap_delays = {0.0});

    const LatticeConfig& lattice() const { return lattice_; }
    int fo_quantum() const { return fo_quantum_; }
    int timing_grid() const { return timing_grid_; }
    int reference_subcarrier() const { return reference_; }
    const PrototypeFilter& filter() const { return filter_; }

    // Coefficient of the transmitter's symbol (l, n) at the receiver's
    // reference position through one realized path. timing_index is the
    // transmitter's timing relative to the receiver, fo_tx and fo_rx are
    // absolute FO indices.
    cplx coefficient(const ChannelRealization& path, int timing_index, int fo_tx, int fo_rx, int l, int n) const;

    // Sum of |coefficient|^2 over the whole lattice.
    double cross_energy(const ChannelRealization& path, int timing_index, int fo_tx, int fo_rx) const;

    struct SelfTerms {
        double signal = 0.0;
        double self = 0.0;
        cplx peak = 0.0;
    };
    SelfTerms self_terms(const ChannelRealization& own, int fo) const;

    // Single unit tap at zero delay: energy as a function of relative
    // timing index and FO difference (fo_tx - fo_rx in (-Q, Q)).
    double awgn_cross_energy(int timing_index, int fo_diff) const;
    double awgn_signal() const { return awgn_signal_; }
    double awgn_self() const { return awgn_self_; }

  private:
    std::size_t tap_slot(double delay) const;
    const AmbiguityTable& table(int timing_index, std::size_t tap) const;

    PrototypeFilter filter_;
    LatticeConfig lattice_;
    int fo_quantum_;
    int timing_grid_;
    int reference_;
    std::vector<double> tap_delays_;
    std::vector<AmbiguityTable> tables_; // [timing][tap]
    std::vector<double> awgn_energy_;    // [timing][fo_diff + Q - 1]
    double awgn_signal_ = 0.0;
    double awgn_self_ = 0.0;
};

// Realizations keyed by (transmitting link id, receiving link id).
using ChannelSet = std::map<std::pair<int, int>, ChannelRealization>;

InterferenceProfile decompose(const Link& victim, std::span<const Link> aggressors, const ChannelSet& channels,
                              const CouplingModel& coupling, double noise_var);

double sinr_linear(const InterferenceProfile& p);
// dB; +inf when signal and denominator are both free of noise and interference,
// -inf when e_signal is zero.
double sinr(const InterferenceProfile& p);
// log2(1 + SINR) normalized by the lattice density.
double capacity(const InterferenceProfile& p, const LatticeConfig& lattice);
double multiuser_efficiency(const InterferenceProfile& p, double a_peak, double g_u);
double multiuser_efficiency(const InterferenceProfile& p);
bool outage(const InterferenceProfile& p, double threshold_db = -6.0);

// Realizes every path needed to evaluate the scenario. With victim_only set,
// only paths ending at `victim` are drawn. Streams derive from (seed, tx, rx).
ChannelSet realize_scenario_channels(const NetworkScenario& scenario, const ChannelModel& model,
                                     std::uint64_t seed, bool victim_only = false, int victim = 0);

// SINR oracle over a whole scenario, used for counting and training.
class NetworkInterference {
  public:
    NetworkInterference(const CouplingModel& coupling, ChannelSet channels, double noise_var);

    InterferenceProfile profile(const NetworkScenario& scenario, const std::vector<int>& active, int id) const;
    double sinr_db(const NetworkScenario& scenario, const std::vector<int>& active, int id) const;
    SinrProbe probe() const;

  private:
    const CouplingModel* coupling_;
    ChannelSet channels_;
    double noise_var_;
};

// Relative timing index of tx with respect to rx on a grid of `grid` points.
inline int relative_timing(int tx_index, int rx_index, int grid)
{
    return ((tx_index - rx_index) % grid + grid) % grid;
}

} // namespace potsim
