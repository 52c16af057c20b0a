#include "potsim/error.hpp"
#include "potsim/interference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace potsim {

namespace {

int floor_div(int a, int b)
{
    int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

bool is_unit_awgn(const ChannelRealization& path)
{
    return path.tap_gains.size() == 1 && path.tap_delays.size() == 1 && path.tap_delays[0] == 0.0 &&
           path.tap_gains[0] == cplx(1.0, 0.0);
}

} // namespace

CouplingModel::CouplingModel(const PrototypeFilter& filter, const LatticeConfig& lattice, int fo_quantum,
                             int timing_grid, int reference_subcarrier, std::vector<double> tap_delays)
    : filter_(filter), lattice_(lattice), fo_quantum_(fo_quantum), timing_grid_(timing_grid),
      reference_(reference_subcarrier), tap_delays_(std::move(tap_delays))
{
    lattice_.validate();
    if (fo_quantum_ < 2)
        throw ParameterDomainError("fo_quantum must be at least 2");
    if (timing_grid_ < 1)
        throw ParameterDomainError("timing grid must have at least one point");
    if (reference_ < 0 || reference_ >= lattice_.num_subcarriers)
        throw ParameterDomainError("reference subcarrier outside the lattice");
    if (std::find(tap_delays_.begin(), tap_delays_.end(), 0.0) == tap_delays_.end())
        tap_delays_.insert(tap_delays_.begin(), 0.0);
    for (std::size_t i = 0; i < tap_delays_.size(); ++i) {
        if (!(tap_delays_[i] >= 0.0) || !(tap_delays_[i] < filter_.span * lattice_.tau0 / 2))
            throw ParameterDomainError("tap delay exceeds the filter span");
        for (std::size_t j = 0; j < i; ++j)
            if (tap_delays_[i] == tap_delays_[j])
                throw ConfigurationError("duplicate tap delay");
    }

    tables_.reserve(static_cast<std::size_t>(timing_grid_) * tap_delays_.size());
    for (int r = 0; r < timing_grid_; ++r)
        for (double d : tap_delays_)
            tables_.emplace_back(filter_, filter_, lattice_, fo_quantum_,
                                 lattice_.tau0 * r / timing_grid_ + d);

    const std::size_t zero_tap = tap_slot(0.0);
    const int n_sub = lattice_.num_subcarriers;
    const int reach = lattice_.num_symbols - 1;
    awgn_energy_.assign(static_cast<std::size_t>(timing_grid_) * (2 * fo_quantum_ - 1), 0.0);
    for (int r = 0; r < timing_grid_; ++r) {
        const auto& t = table(r, zero_tap);
        for (int dq = -fo_quantum_ + 1; dq < fo_quantum_; ++dq) {
            double e = 0.0;
            for (int l = -reach; l <= reach; ++l)
                for (int n = 0; n < n_sub; ++n) {
                    const int m = (n - reference_) * fo_quantum_ + dq;
                    const int dn = floor_div(m, fo_quantum_);
                    e += std::norm(t.at_signed(l, dn, m - dn * fo_quantum_));
                }
            awgn_energy_[static_cast<std::size_t>(r) * (2 * fo_quantum_ - 1) + dq + fo_quantum_ - 1] = e;
        }
    }
    const auto& own = table(0, zero_tap);
    double total = 0.0;
    for (int l = -reach; l <= reach; ++l)
        for (int n = 0; n < n_sub; ++n)
            total += std::norm(own.at_signed(l, n - reference_, 0));
    awgn_signal_ = std::norm(own.at(0, 0, 0));
    awgn_self_ = total - awgn_signal_;
}

std::size_t CouplingModel::tap_slot(double delay) const
{
    for (std::size_t i = 0; i < tap_delays_.size(); ++i)
        if (std::abs(tap_delays_[i] - delay) <= 1e-15)
            return i;
    throw ConfigurationError("no coupling table for tap delay " + std::to_string(delay));
}

const AmbiguityTable& CouplingModel::table(int timing_index, std::size_t tap) const
{
    if (timing_index < 0 || timing_index >= timing_grid_)
        throw ConfigurationError("timing index outside the timing grid");
    return tables_[static_cast<std::size_t>(timing_index) * tap_delays_.size() + tap];
}

cplx CouplingModel::coefficient(const ChannelRealization& path, int timing_index, int fo_tx, int fo_rx, int l,
                                int n) const
{
    const int m = (n - reference_) * fo_quantum_ + (fo_tx - fo_rx);
    const int dn = floor_div(m, fo_quantum_);
    const int q = m - dn * fo_quantum_;
    const double carrier = (n + static_cast<double>(fo_tx) / fo_quantum_) * lattice_.nu0;
    const TapEvaluator per_tap = [&](double delay) {
        const double phase = -2.0 * std::numbers::pi * carrier * delay;
        return std::polar(1.0, phase) * table(timing_index, tap_slot(delay)).at_signed(l, dn, q);
    };
    return effective_gain(path, per_tap, filter_.span * lattice_.tau0 / 2);
}

double CouplingModel::cross_energy(const ChannelRealization& path, int timing_index, int fo_tx, int fo_rx) const
{
    if (is_unit_awgn(path))
        return path.path_gain * awgn_cross_energy(timing_index, fo_tx - fo_rx);
    const int reach = lattice_.num_symbols - 1;
    double e = 0.0;
    for (int l = -reach; l <= reach; ++l)
        for (int n = 0; n < lattice_.num_subcarriers; ++n)
            e += std::norm(coefficient(path, timing_index, fo_tx, fo_rx, l, n));
    return e;
}

CouplingModel::SelfTerms CouplingModel::self_terms(const ChannelRealization& own, int fo) const
{
    SelfTerms s;
    if (is_unit_awgn(own)) {
        s.signal = own.path_gain * awgn_signal_;
        s.self = own.path_gain * awgn_self_;
        s.peak = std::sqrt(own.path_gain) * table(0, tap_slot(0.0)).at(0, 0, 0);
        return s;
    }
    const int reach = lattice_.num_symbols - 1;
    for (int l = -reach; l <= reach; ++l)
        for (int n = 0; n < lattice_.num_subcarriers; ++n) {
            const cplx c = coefficient(own, 0, fo, fo, l, n);
            if (l == 0 && n == reference_) {
                s.peak = c;
                s.signal = std::norm(c);
            } else {
                s.self += std::norm(c);
            }
        }
    return s;
}

double CouplingModel::awgn_cross_energy(int timing_index, int fo_diff) const
{
    if (timing_index < 0 || timing_index >= timing_grid_)
        throw ConfigurationError("timing index outside the timing grid");
    if (fo_diff <= -fo_quantum_ || fo_diff >= fo_quantum_)
        throw ConfigurationError("FO difference outside (-Q, Q)");
    return awgn_energy_[static_cast<std::size_t>(timing_index) * (2 * fo_quantum_ - 1) + fo_diff + fo_quantum_ - 1];
}

} // namespace potsim
