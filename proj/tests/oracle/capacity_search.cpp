#include "oracle/capacity_search.hpp"

#include <cmath>
#include <limits>

namespace oracle {

using namespace potsim;

double brute_capacity(const CouplingModel& m, const std::vector<NetworkScenario>& drops, const FoState& state,
                      double snr_db)
{
    double total = 0.0;
    for (auto s : drops) {
        const auto order = s.entry_order();
        s.by_id(order[0]).fo_index = 0;
        for (std::size_t i = 0; i < state.size(); ++i)
            s.by_id(order[i + 1]).fo_index = state[i];
        const auto ch = realize_scenario_channels(s, ChannelModel::awgn(), 1);
        auto profile_of = [&](int id, double noise) {
            std::vector<Link> others;
            for (const auto& l : s.links)
                if (l.id != id)
                    others.push_back(l);
            return decompose(s.by_id(id), others, ch, m, noise);
        };
        const double noise = profile_of(order[0], 0.0).e_signal / std::pow(10.0, snr_db / 10.0);
        for (const auto& l : s.links)
            total += capacity(profile_of(l.id, noise), m.lattice());
    }
    return total / static_cast<double>(drops.size());
}

SearchOptimum exhaustive_search(const CouplingModel& m, const std::vector<NetworkScenario>& drops,
                                int num_aggressors, double snr_db)
{
    SearchOptimum best;
    best.value = -std::numeric_limits<double>::infinity();
    const int q = m.fo_quantum();
    FoState state(num_aggressors, 0);
    for (;;) {
        const double v = brute_capacity(m, drops, state, snr_db);
        if (v > best.value + 1e-12) {
            best.value = v;
            best.state = state;
        }
        int i = 0;
        while (i < num_aggressors && ++state[i] == q)
            state[i++] = 0;
        if (i == num_aggressors)
            break;
    }
    return best;
}

} // namespace oracle
