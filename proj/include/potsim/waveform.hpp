#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace potsim {

using cplx = std::complex<double>;

enum class FilterFamily { Gaussian, RRC, IOTA };

std::string_view to_string(FilterFamily f);
FilterFamily parse_filter_family(std::string_view name);

// Sampled unit-energy prototype pulse. Time is measured in units of the
// lattice symbol spacing tau0; sample i sits at t = (i - L/2) / sample_rate.
struct PrototypeFilter {
    FilterFamily family = FilterFamily::Gaussian;
    double dispersion = 1.0;
    int sample_rate = 16;
    double span = 8.0;
    std::vector<double> samples;
    // Energy of the truncated pulse before renormalization (1 for an
    // untruncated unit-energy prototype).
    double truncation_gain = 1.0;

    std::size_t center_index() const { return samples.size() / 2; }
    double time_of(std::size_t i) const
    {
        return (static_cast<double>(i) - static_cast<double>(center_index())) / sample_rate;
    }
    double energy() const;
};

// Span giving sub-1e-3 truncation error for the given family and dispersion.
double default_span(FilterFamily family, double dispersion);

PrototypeFilter make_gaussian(double dispersion, int sample_rate = 16, double span = 8.0);
PrototypeFilter make_rrc(double roll_off, int sample_rate = 16, double span = 12.0);
PrototypeFilter make_iota(double dispersion, int sample_rate = 16, double span = 8.0);
PrototypeFilter make_filter(FilterFamily family, double dispersion, int sample_rate, double span);
PrototypeFilter make_filter(FilterFamily family, double dispersion, int sample_rate = 16);

// Unnormalized analytic pulse shapes, t in units of tau0.
double gaussian_pulse(double rho, double t);
double rrc_pulse(double alpha, double t);

// Time-frequency grid. tau0 * nu0 is the lattice density.
struct LatticeConfig {
    double tau0 = 60e-6;
    double nu0 = 200e3 / 12;
    int num_subcarriers = 12;
    int num_symbols = 12;

    double density() const { return tau0 * nu0; }
    double bandwidth() const { return num_subcarriers * nu0; }
    // Throws ParameterDomainError / ConfigurationError.
    void validate() const;
    void validate(double channel_bandwidth_hz) const;

    static LatticeConfig from_bandwidth(double bandwidth_hz, int n, int k, double density = 1.0);
};

// Cross-ambiguity between the transmit pulse shifted by (delta_l*tau0 +
// delta_t) in time and (delta_n*nu0 + delta_f) in frequency and the
// receive pulse, as a Riemann sum at the common sample rate.
cplx ambiguity(const PrototypeFilter& tx, const PrototypeFilter& rx, const LatticeConfig& lattice,
               int delta_l, int delta_n, double delta_f_hz = 0.0, double delta_t_s = 0.0);

// Same quantity in normalized units: delay in tau0, frequency in 1/tau0.
cplx ambiguity_normalized(const PrototypeFilter& tx, const PrototypeFilter& rx, double delay,
                          double freq);

// Evaluates many frequencies at one delay. The pulse product is formed once.
class DelayedProduct {
  public:
    DelayedProduct(const PrototypeFilter& tx, const PrototypeFilter& rx, double delay);
    cplx at(double freq) const;
    bool empty() const { return weights_.empty(); }

  private:
    std::vector<double> weights_;
    std::vector<double> times_;
};

// Precomputed coefficients over delta_l in [-K+1, K-1], delta_n in [0, N-1]
// and fractional FO q * nu0 / Q for q in [0, Q).
class AmbiguityTable {
  public:
    AmbiguityTable() = default;
    AmbiguityTable(const PrototypeFilter& tx, const PrototypeFilter& rx, const LatticeConfig& lattice,
                   int fo_quantum, double delta_t_s = 0.0);

    cplx at(int delta_l, int delta_n, int q) const;
    // Signed frequency offset delta_n + q/Q with delta_n possibly negative,
    // resolved through conjugate symmetry of real pulses.
    cplx at_signed(int delta_l, int delta_n, int q) const;
    bool contains(int delta_l, int delta_n, int q) const;

    std::size_t size() const { return values_.size(); }
    int fo_quantum() const { return fo_quantum_; }
    int max_delay() const { return k_ - 1; }
    int num_subcarriers() const { return n_; }
    double delta_t() const { return delta_t_; }
    const LatticeConfig& lattice() const { return lattice_; }
    FilterFamily tx_family() const { return tx_family_; }
    FilterFamily rx_family() const { return rx_family_; }

    std::string to_json() const;
    static AmbiguityTable from_json(const std::string& text);

  private:
    std::size_t index(int delta_l, int delta_n, int q) const;

    LatticeConfig lattice_;
    int fo_quantum_ = 0;
    int k_ = 0;
    int n_ = 0;
    double delta_t_ = 0.0;
    FilterFamily tx_family_ = FilterFamily::Gaussian;
    FilterFamily rx_family_ = FilterFamily::Gaussian;
    double tx_dispersion_ = 0.0;
    double rx_dispersion_ = 0.0;
    std::vector<cplx> values_;
};

AmbiguityTable build_ambiguity_table(const PrototypeFilter& tx, const PrototypeFilter& rx,
                                     const LatticeConfig& lattice, int fo_quantum);

} // namespace potsim
