#pragma once

// Brute-force optimum of the mean sum capacity over every FO state. Each
// state is evaluated link by link through decompose with AWGN paths.

#include "potsim/interference.hpp"
#include "potsim/qlearning.hpp"

#include <vector>

namespace oracle {

double brute_capacity(const potsim::CouplingModel& coupling, const std::vector<potsim::NetworkScenario>& drops,
                      const potsim::FoState& state, double snr_db);

struct SearchOptimum {
    potsim::FoState state;
    double value = 0.0;
};

SearchOptimum exhaustive_search(const potsim::CouplingModel& coupling,
                                const std::vector<potsim::NetworkScenario>& drops, int num_aggressors,
                                double snr_db);

} // namespace oracle
