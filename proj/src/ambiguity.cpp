#include "potsim/error.hpp"
#include "potsim/waveform.hpp"

#include "json.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace potsim {

namespace {

constexpr int lagrange_points = 8;

// Weights of the 8-point Lagrange interpolator for a fractional offset
// frac in [0, 1) measured from node 3 of nodes 0..7.
std::array<double, lagrange_points> lagrange_weights(double frac)
{
    std::array<double, lagrange_points> w{};
    const double u = 3.0 + frac;
    for (int j = 0; j < lagrange_points; ++j) {
        double num = 1.0;
        double den = 1.0;
        for (int m = 0; m < lagrange_points; ++m) {
            if (m == j)
                continue;
            num *= u - m;
            den *= j - m;
        }
        w[j] = num / den;
    }
    return w;
}

void require_same_rate(const PrototypeFilter& tx, const PrototypeFilter& rx)
{
    if (tx.sample_rate != rx.sample_rate)
        throw ConfigurationError("filters sampled at different rates");
}

} // namespace

DelayedProduct::DelayedProduct(const PrototypeFilter& tx, const PrototypeFilter& rx, double delay)
{
    require_same_rate(tx, rx);
    const int sr = rx.sample_rate;
    const auto tx_len = static_cast<long>(tx.samples.size());
    const auto tx_centre = static_cast<long>(tx.center_index());
    const auto rx_centre = static_cast<long>(rx.center_index());

    // Position of rx sample i on the tx sample axis is i + offset.
    const double offset = static_cast<double>(tx_centre - rx_centre) - delay * sr;
    const double base = std::floor(offset + 1e-9);
    double frac = offset - base;
    const bool integral = frac < 1e-9 || frac > 1.0 - 1e-9;
    const auto shift = static_cast<long>(integral ? std::round(offset) : base);
    if (integral)
        frac = 0.0;
    const auto weights = lagrange_weights(frac);

    auto tx_at = [&](long i) -> double {
        const long pos = i + shift;
        if (integral)
            return (pos >= 0 && pos < tx_len) ? tx.samples[pos] : 0.0;
        double v = 0.0;
        for (int j = 0; j < lagrange_points; ++j) {
            const long p = pos - 3 + j;
            if (p >= 0 && p < tx_len)
                v += weights[j] * tx.samples[p];
        }
        return v;
    };

    for (std::size_t i = 0; i < rx.samples.size(); ++i) {
        const double w = tx_at(static_cast<long>(i)) * rx.samples[i];
        if (w != 0.0) {
            weights_.push_back(w / sr);
            times_.push_back(rx.time_of(i));
        }
    }
}

cplx DelayedProduct::at(double freq) const
{
    double re = 0.0;
    double im = 0.0;
    const double k = 2.0 * std::numbers::pi * freq;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        const double a = k * times_[i];
        re += weights_[i] * std::cos(a);
        im += weights_[i] * std::sin(a);
    }
    return {re, im};
}

cplx ambiguity_normalized(const PrototypeFilter& tx, const PrototypeFilter& rx, double delay, double freq)
{
    return DelayedProduct(tx, rx, delay).at(freq);
}

cplx ambiguity(const PrototypeFilter& tx, const PrototypeFilter& rx, const LatticeConfig& lattice, int delta_l,
               int delta_n, double delta_f_hz, double delta_t_s)
{
    require_same_rate(tx, rx);
    lattice.validate();
    if (!(std::abs(delta_f_hz) < lattice.bandwidth()))
        throw ParameterDomainError("frequency offset exceeds the link bandwidth");
    const double span = std::max(tx.span, rx.span);
    if (!(std::abs(delta_t_s) < span * lattice.tau0))
        throw ParameterDomainError("timing offset exceeds the filter span");
    const double delay = delta_l + delta_t_s / lattice.tau0;
    const double freq = (delta_n * lattice.nu0 + delta_f_hz) * lattice.tau0;
    return ambiguity_normalized(tx, rx, delay, freq);
}

AmbiguityTable::AmbiguityTable(const PrototypeFilter& tx, const PrototypeFilter& rx, const LatticeConfig& lattice,
                               int fo_quantum, double delta_t_s)
    : lattice_(lattice), fo_quantum_(fo_quantum), k_(lattice.num_symbols), n_(lattice.num_subcarriers),
      delta_t_(delta_t_s), tx_family_(tx.family), rx_family_(rx.family), tx_dispersion_(tx.dispersion),
      rx_dispersion_(rx.dispersion)
{
    require_same_rate(tx, rx);
    lattice.validate();
    if (fo_quantum < 2)
        throw ParameterDomainError("fo_quantum must be at least 2");
    const double span = std::max(tx.span, rx.span);
    if (!(std::abs(delta_t_s) < span * lattice.tau0))
        throw ParameterDomainError("timing offset exceeds the filter span");

    const double density = lattice.density();
    values_.resize(static_cast<std::size_t>(2 * k_ - 1) * n_ * fo_quantum_);
    for (int l = -k_ + 1; l <= k_ - 1; ++l) {
        const DelayedProduct product(tx, rx, l + delta_t_s / lattice.tau0);
        for (int n = 0; n < n_; ++n)
            for (int q = 0; q < fo_quantum_; ++q)
                values_[index(l, n, q)] = product.at((n + static_cast<double>(q) / fo_quantum_) * density);
    }
}

bool AmbiguityTable::contains(int delta_l, int delta_n, int q) const
{
    return delta_l > -k_ && delta_l < k_ && delta_n >= 0 && delta_n < n_ && q >= 0 && q < fo_quantum_;
}

std::size_t AmbiguityTable::index(int delta_l, int delta_n, int q) const
{
    return (static_cast<std::size_t>(delta_l + k_ - 1) * n_ + delta_n) * fo_quantum_ + q;
}

cplx AmbiguityTable::at(int delta_l, int delta_n, int q) const
{
    if (!contains(delta_l, delta_n, q))
        throw ConfigurationError("ambiguity table has no entry for (" + std::to_string(delta_l) + ", " +
                                 std::to_string(delta_n) + ", " + std::to_string(q) + ")");
    return values_[index(delta_l, delta_n, q)];
}

cplx AmbiguityTable::at_signed(int delta_l, int delta_n, int q) const
{
    if (delta_n >= 0)
        return at(delta_l, delta_n, q);
    if (q == 0)
        return std::conj(at(delta_l, -delta_n, 0));
    return std::conj(at(delta_l, -delta_n - 1, fo_quantum_ - q));
}

std::string AmbiguityTable::to_json() const
{
    nlohmann::json j;
    j["format"] = "potsim-ambiguity-table";
    j["version"] = 1;
    j["tx"] = {{"family", to_string(tx_family_)}, {"dispersion", tx_dispersion_}};
    j["rx"] = {{"family", to_string(rx_family_)}, {"dispersion", rx_dispersion_}};
    j["lattice"] = {{"tau0", lattice_.tau0},
                    {"nu0", lattice_.nu0},
                    {"num_subcarriers", lattice_.num_subcarriers},
                    {"num_symbols", lattice_.num_symbols}};
    j["fo_quantum"] = fo_quantum_;
    j["delta_t"] = delta_t_;
    auto& re = j["re"] = nlohmann::json::array();
    auto& im = j["im"] = nlohmann::json::array();
    for (const auto& v : values_) {
        re.push_back(v.real());
        im.push_back(v.imag());
    }
    return j.dump();
}

AmbiguityTable AmbiguityTable::from_json(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError(std::string("malformed ambiguity table: ") + e.what());
    }
    AmbiguityTable t;
    try {
        if (j.value("format", "") != "potsim-ambiguity-table" || j.value("version", 0) != 1)
            throw ConfigurationError("not a version 1 ambiguity table");
        t.lattice_.tau0 = j.at("lattice").at("tau0").get<double>();
        t.lattice_.nu0 = j.at("lattice").at("nu0").get<double>();
        t.lattice_.num_subcarriers = j.at("lattice").at("num_subcarriers").get<int>();
        t.lattice_.num_symbols = j.at("lattice").at("num_symbols").get<int>();
        t.fo_quantum_ = j.at("fo_quantum").get<int>();
        t.delta_t_ = j.at("delta_t").get<double>();
        t.tx_family_ = parse_filter_family(j.at("tx").at("family").get<std::string>());
        t.rx_family_ = parse_filter_family(j.at("rx").at("family").get<std::string>());
        t.tx_dispersion_ = j.at("tx").at("dispersion").get<double>();
        t.rx_dispersion_ = j.at("rx").at("dispersion").get<double>();
        const auto& re = j.at("re");
        const auto& im = j.at("im");
        t.k_ = t.lattice_.num_symbols;
        t.n_ = t.lattice_.num_subcarriers;
        const std::size_t expected = static_cast<std::size_t>(2 * t.k_ - 1) * t.n_ * t.fo_quantum_;
        if (re.size() != expected || im.size() != expected)
            throw ConfigurationError("ambiguity table has the wrong number of entries");
        t.values_.resize(expected);
        for (std::size_t i = 0; i < expected; ++i)
            t.values_[i] = {re[i].get<double>(), im[i].get<double>()};
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError(std::string("malformed ambiguity table: ") + e.what());
    }
    t.lattice_.validate();
    return t;
}

AmbiguityTable build_ambiguity_table(const PrototypeFilter& tx, const PrototypeFilter& rx,
                                     const LatticeConfig& lattice, int fo_quantum)
{
    return AmbiguityTable(tx, rx, lattice, fo_quantum);
}

} // namespace potsim
