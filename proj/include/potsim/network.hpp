#pragma once

#include "potsim/waveform.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace potsim {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

double distance(const Point& a, const Point& b);

struct Link {
    int id = 0;
    Point tp;
    Point rp;
    int fo_index = 0;     // intentional FO in units of nu0 / Q
    int entry_rank = 0;
    int aggressor_count = 0;
    int timing_index = 0; // symbol timing in units of tau0 / timing_grid
    double timing_offset = 0.0; // seconds, timing_index * tau0 / timing_grid
    FilterFamily filter = FilterFamily::Gaussian;

    double fo_hz(const LatticeConfig& lattice, int fo_quantum) const
    {
        return fo_index * lattice.nu0 / fo_quantum;
    }
    double length() const { return distance(tp, rp); }
};

struct NetworkScenario {
    std::vector<Link> links;
    double area_side = 1000.0;
    double max_link_range = 100.0;
    std::uint64_t rng_seed = 0;
    LatticeConfig lattice;
    int fo_quantum = 8;
    int timing_grid = 16;

    // Throws ConfigurationError when an invariant is broken.
    void validate() const;
    // Links sorted by entry_rank.
    std::vector<int> entry_order() const;
    const Link& by_id(int id) const;
    Link& by_id(int id);

    std::string to_json() const;
    static NetworkScenario from_json(const std::string& text);
};

struct ScenarioOptions {
    double area_side = 1000.0;
    double max_link_range = 100.0;
    LatticeConfig lattice;
    int fo_quantum = 8;
    int timing_grid = 16;
    FilterFamily filter = FilterFamily::Gaussian;
};

// Uniform TPs over the square, each RP uniform in a disk around its TP
// (resampled until inside the square), random entry order, random symbol
// timing on the timing grid, all FOs zero.
NetworkScenario generate_scenario(int num_links, const ScenarioOptions& options, std::uint64_t seed);
NetworkScenario generate_scenario(int num_links, double area_side, double max_link_range, std::uint64_t seed);

// Victim link (id 0, entry rank 0) plus num_aggressors links whose TPs lie
// within interference_radius of the victim RP; aggressor entry order random.
NetworkScenario generate_victim_scenario(int num_aggressors, const ScenarioOptions& options,
                                         double interference_radius, std::uint64_t seed);

// Three dB counting rule.
int update_aggressor_count(int count, double sinr_before_db, double sinr_after_db);

// FO prescribed for each (aggressor count, entry slot). Slot 0 is the first
// link to enter and keeps FO 0. Within one count, slots claim distinct FOs
// while unclaimed ones remain; a repeat is moved to the lowest free index.
class FoPolicy {
  public:
    FoPolicy() = default;
    explicit FoPolicy(int fo_quantum) : fo_quantum_(fo_quantum) {}

    // assignment[0] is ignored and forced to 0; assignment.size() == count + 1.
    void set(int count, std::vector<int> assignment);
    bool has(int count) const { return table_.count(count) != 0; }
    int max_count() const { return table_.empty() ? 0 : table_.rbegin()->first; }
    int fo_quantum() const { return fo_quantum_; }
    // Throws UnavailablePolicyError.
    int fo_for(int count, int slot) const;
    const std::vector<int>& assignment(int count) const;

  private:
    int fo_quantum_ = 8;
    std::map<int, std::vector<int>> table_;
};

struct TraceEntry {
    int link = 0;
    int count = 0;
    int fo_index = 0;
};

enum class CountingMode {
    // Every entry is seen by every active link as a full-overlap SINR drop.
    Ideal,
    // Counters follow the three dB rule on measured SINR.
    Measured,
};

// SINR in dB of link `id` given the FOs currently set in the scenario,
// restricted to the links listed in `active`.
using SinrProbe = std::function<double(const NetworkScenario&, const std::vector<int>& active, int id)>;

// Replays network entry in entry_rank order. Updates counts and FOs in the
// scenario and returns the chronological trace.
std::vector<TraceEntry> entry_sequence(NetworkScenario& scenario, const FoPolicy& policy,
                                       CountingMode mode = CountingMode::Ideal, const SinrProbe& probe = {});

} // namespace potsim
