#include "potsim/interference.hpp"

#include "potsim/error.hpp"
#include "potsim/rng.hpp"

#include <cmath>
#include <limits>

namespace potsim {

InterferenceProfile decompose(const Link& victim, std::span<const Link> aggressors, const ChannelSet& channels,
                              const CouplingModel& coupling, double noise_var)
{
    if (!(noise_var >= 0.0))
        throw ParameterDomainError("noise variance must be non-negative");
    auto path = [&](int tx, int rx) -> const ChannelRealization& {
        const auto it = channels.find({tx, rx});
        if (it == channels.end())
            throw ConfigurationError("no channel realization for link " + std::to_string(tx) + " -> " +
                                     std::to_string(rx));
        return it->second;
    };

    InterferenceProfile p;
    p.noise_var = noise_var;
    const auto& own = path(victim.id, victim.id);
    const auto st = coupling.self_terms(own, victim.fo_index);
    p.e_signal = st.signal;
    p.e_self = st.self;
    p.g_u = std::sqrt(own.path_gain);
    p.a_peak = std::abs(st.peak) / p.g_u;

    const int grid = coupling.timing_grid();
    for (const auto& a : aggressors) {
        const int r = relative_timing(a.timing_index, victim.timing_index, grid);
        const double e = coupling.cross_energy(path(a.id, victim.id), r, a.fo_index, victim.fo_index);
        p.per_aggressor.emplace_back(a.id, e);
        p.e_cci += e;
    }
    return p;
}

double sinr_linear(const InterferenceProfile& p)
{
    if (!(p.e_signal > 0.0))
        return 0.0;
    const double den = p.e_self + p.e_cci + p.noise_var;
    if (den == 0.0)
        return std::numeric_limits<double>::infinity();
    return p.e_signal / den;
}

double sinr(const InterferenceProfile& p)
{
    if (!(p.e_signal > 0.0))
        return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(sinr_linear(p));
}

double capacity(const InterferenceProfile& p, const LatticeConfig& lattice)
{
    return std::log2(1.0 + sinr_linear(p)) / lattice.density();
}

double multiuser_efficiency(const InterferenceProfile& p, double a_peak, double g_u)
{
    if (!(a_peak > 0.0) || !(g_u > 0.0))
        throw ParameterDomainError("peak coefficient and gain must be positive");
    const double x = 1.0 - std::sqrt(p.e_self + p.e_cci) / (g_u * a_peak);
    return x > 0.0 ? x * x : 0.0;
}

double multiuser_efficiency(const InterferenceProfile& p)
{
    return multiuser_efficiency(p, p.a_peak, p.g_u);
}

bool outage(const InterferenceProfile& p, double threshold_db)
{
    return sinr(p) < threshold_db;
}

ChannelSet realize_scenario_channels(const NetworkScenario& scenario, const ChannelModel& model, std::uint64_t seed,
                                     bool victim_only, int victim)
{
    ChannelSet out;
    for (const auto& rx : scenario.links) {
        if (victim_only && rx.id != victim)
            continue;
        for (const auto& tx : scenario.links) {
            const auto stream = derive_stream(seed, {static_cast<std::uint64_t>(tx.id), static_cast<std::uint64_t>(rx.id)});
            out.emplace(std::pair{tx.id, rx.id}, realize_channel(model, distance(tx.tp, rx.rp), stream, {tx.id, rx.id}));
        }
    }
    return out;
}

NetworkInterference::NetworkInterference(const CouplingModel& coupling, ChannelSet channels, double noise_var)
    : coupling_(&coupling), channels_(std::move(channels)), noise_var_(noise_var)
{
}

InterferenceProfile NetworkInterference::profile(const NetworkScenario& scenario, const std::vector<int>& active,
                                                 int id) const
{
    std::vector<Link> others;
    for (int a : active)
        if (a != id)
            others.push_back(scenario.by_id(a));
    return decompose(scenario.by_id(id), others, channels_, *coupling_, noise_var_);
}

double NetworkInterference::sinr_db(const NetworkScenario& scenario, const std::vector<int>& active, int id) const
{
    return sinr(profile(scenario, active, id));
}

SinrProbe NetworkInterference::probe() const
{
    return [this](const NetworkScenario& s, const std::vector<int>& active, int id) { return sinr_db(s, active, id); };
}

} // namespace potsim
