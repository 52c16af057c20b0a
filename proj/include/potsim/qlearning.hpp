#pragma once

#include "potsim/interference.hpp"
#include "potsim/network.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace potsim {

struct Hyperparams {
    double beta = 0.1;
    double gamma = 0.9;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    double lambda1 = 10.0;
    int episodes = 500;
    int steps_per_episode = 0; // 0 means 10 * fo_quantum
    int training_drops = 20;
    double tolerance = 1e-4;

    void validate() const;
};

// (1 - beta) q + beta (r + gamma max_next).
double q_update(double q_old, double reward, double max_next, double beta, double gamma);
double reward(double capacity_now, double capacity_prev, double lambda1);

// FO indices of the aggressors, victim fixed at FO 0.
using FoState = std::vector<int>;

// Action 0 keeps the state; action 2i+1 raises aggressor i by one FO step
// and 2i+2 lowers it, wrapping around the FO grid.
int num_actions(int num_aggressors);
FoState apply_action(const FoState& state, int action, int fo_quantum);

// Q-values of one aggressor count. Only touched entries are stored; the
// rest read as zero.
class QSubTable {
  public:
    QSubTable() = default;
    QSubTable(int num_aggressors, int fo_quantum) : aggressors_(num_aggressors), fo_quantum_(fo_quantum) {}

    int num_aggressors() const { return aggressors_; }
    int fo_quantum() const { return fo_quantum_; }
    std::size_t num_states() const { return rows_.size(); }
    bool contains(const FoState& s) const { return rows_.count(key(s)) != 0; }

    double get(const FoState& s, int action) const;
    void set(const FoState& s, int action, double value);
    double max_value(const FoState& s) const;
    // Greedy action with ties to the lowest index.
    int best_action(const FoState& s) const;
    std::vector<double> values(const FoState& s) const;

    // Stored states in lexicographic order.
    std::vector<FoState> states() const;

    bool converged = false;
    int episodes_run = 0;
    double last_delta = 0.0;
    FoState greedy_assignment;

  private:
    using Row = std::vector<std::pair<std::uint16_t, double>>;
    std::string key(const FoState& s) const;
    FoState decode(const std::string& k) const;

    int aggressors_ = 0;
    int fo_quantum_ = 8;
    std::unordered_map<std::string, Row> rows_;

    friend class QTable;
};

struct TrainingMeta {
    FilterFamily filter = FilterFamily::Gaussian;
    double dispersion = 0.2;
    int fo_quantum = 8;
    int timing_grid = 16;
    double training_snr_db = 10.0;
    std::string fingerprint; // identifies the training setup
};

class QTable {
  public:
    Hyperparams hyperparams;
    std::uint64_t seed = 0;
    TrainingMeta meta;
    std::map<int, QSubTable> per_count;

    bool has(int count) const { return per_count.count(count) != 0; }
    const QSubTable& at(int count) const;
    bool all_converged() const;
    // Policy lookup for entry sequencing, built from the greedy assignments.
    FoPolicy policy() const;

    void save(const std::string& path) const;
    static QTable load(const std::string& path);
    std::string serialize() const;
    static QTable deserialize(const std::string& text);
};

struct GreedyChoice {
    int action = 0;
    bool fallback = false;
    FoState matched_state;
};

// argmax_a Q(state, a). An unseen state falls back to the stored state
// nearest in L1 distance (ties to the lexicographically smallest).
GreedyChoice greedy_policy(const QTable& table, int count, const FoState& state);
GreedyChoice greedy_policy(const QSubTable& table, const FoState& state);

// Follows greedy actions from the all-zero state until a no-op, a revisit
// or max_steps, and returns the final state.
FoState greedy_rollout(const QSubTable& table, int max_steps);

// Mean sum-capacity over a set of training drops, updated incrementally when
// a single aggressor changes FO. Slot 0 of each drop is the victim.
class CapacityObjective {
  public:
    CapacityObjective(const CouplingModel& coupling, const std::vector<NetworkScenario>& drops, double snr_db,
                      double carrier_hz = 800e6);

    int num_aggressors() const { return aggressors_; }
    int fo_quantum() const { return coupling_->fo_quantum(); }
    // Resets to `state` and returns the objective.
    double reset(const FoState& state);
    // Moves aggressor `aggressor` (link slot aggressor + 1) to `fo`.
    double move(int aggressor, int fo);
    double value() const { return value_; }
    // Full recomputation, independent of the incremental bookkeeping.
    double evaluate(const FoState& state) const;

  private:
    struct Drop {
        int links = 0;
        std::vector<double> signal;
        std::vector<double> self;
        std::vector<double> path;   // [rx * links + tx] path gain
        std::vector<int> timing;    // [rx * links + tx] relative timing index
        std::vector<double> interference;
        double noise = 0.0;
    };
    double pair_energy(const Drop& d, int rx, int tx, int fo_rx, int fo_tx) const;
    double drop_capacity(const Drop& d) const;

    const CouplingModel* coupling_;
    int aggressors_ = 0;
    std::vector<Drop> drops_;
    std::vector<int> fo_; // per link slot, slot 0 fixed at 0
    double value_ = 0.0;
};

using ScenarioFamily = std::function<NetworkScenario(int num_aggressors, int drop, std::uint64_t seed)>;

// Trains one sub-table per aggressor count in [1, s_max].
QTable train(const ScenarioFamily& family, const CouplingModel& coupling, int s_max, const Hyperparams& hp,
             std::uint64_t seed, double training_snr_db = 10.0, int threads = 0);

QSubTable train_count(CapacityObjective objective, const Hyperparams& hp, std::uint64_t seed);

} // namespace potsim
