#include "potsim/qlearning.hpp"

#include "potsim/error.hpp"
#include "potsim/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <mutex>
#include <thread>

namespace potsim {

void Hyperparams::validate() const
{
    if (!(beta > 0.0 && beta <= 1.0))
        throw ParameterDomainError("beta must lie in (0, 1]");
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw ParameterDomainError("gamma must lie in [0, 1)");
    if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0) || !(epsilon_end >= 0.0 && epsilon_end <= 1.0))
        throw ParameterDomainError("epsilon must lie in [0, 1]");
    if (!(lambda1 > 0.0))
        throw ParameterDomainError("lambda1 must be positive");
    if (episodes < 1 || steps_per_episode < 0 || training_drops < 1)
        throw ParameterDomainError("episode, step and drop budgets must be positive");
    if (!(tolerance >= 0.0))
        throw ParameterDomainError("tolerance must be non-negative");
}

double q_update(double q_old, double reward, double max_next, double beta, double gamma)
{
    return (1.0 - beta) * q_old + beta * (reward + gamma * max_next);
}

double reward(double capacity_now, double capacity_prev, double lambda1)
{
    return lambda1 * (capacity_now - capacity_prev);
}

int num_actions(int num_aggressors)
{
    return 2 * num_aggressors + 1;
}

FoState apply_action(const FoState& state, int action, int fo_quantum)
{
    if (action < 0 || action >= num_actions(static_cast<int>(state.size())))
        throw ParameterDomainError("action out of range");
    FoState next = state;
    if (action == 0)
        return next;
    const auto i = static_cast<std::size_t>((action - 1) / 2);
    const int step = (action % 2 == 1) ? 1 : -1;
    next[i] = (next[i] + step + fo_quantum) % fo_quantum;
    return next;
}

std::string QSubTable::key(const FoState& s) const
{
    if (static_cast<int>(s.size()) != aggressors_)
        throw ConfigurationError("state has the wrong number of aggressors");
    std::string k(s.size(), '\0');
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] < 0 || s[i] >= fo_quantum_)
            throw ConfigurationError("state FO off the grid");
        k[i] = static_cast<char>(s[i]);
    }
    return k;
}

FoState QSubTable::decode(const std::string& k) const
{
    FoState s(k.size());
    for (std::size_t i = 0; i < k.size(); ++i)
        s[i] = static_cast<unsigned char>(k[i]);
    return s;
}

double QSubTable::get(const FoState& s, int action) const
{
    const auto it = rows_.find(key(s));
    if (it == rows_.end())
        return 0.0;
    for (const auto& [a, v] : it->second)
        if (a == action)
            return v;
    return 0.0;
}

void QSubTable::set(const FoState& s, int action, double value)
{
    if (action < 0 || action >= num_actions(aggressors_))
        throw ParameterDomainError("action out of range");
    auto& row = rows_[key(s)];
    for (auto& [a, v] : row)
        if (a == action) {
            v = value;
            return;
        }
    row.emplace_back(static_cast<std::uint16_t>(action), value);
}

std::vector<double> QSubTable::values(const FoState& s) const
{
    std::vector<double> out(num_actions(aggressors_), 0.0);
    const auto it = rows_.find(key(s));
    if (it != rows_.end())
        for (const auto& [a, v] : it->second)
            out[a] = v;
    return out;
}

double QSubTable::max_value(const FoState& s) const
{
    const auto it = rows_.find(key(s));
    if (it == rows_.end())
        return 0.0;
    double best = it->second.size() < static_cast<std::size_t>(num_actions(aggressors_))
                      ? 0.0
                      : -std::numeric_limits<double>::infinity();
    for (const auto& [a, v] : it->second)
        best = std::max(best, v);
    return best;
}

int QSubTable::best_action(const FoState& s) const
{
    const auto v = values(s);
    return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

std::vector<FoState> QSubTable::states() const
{
    std::vector<std::string> keys;
    keys.reserve(rows_.size());
    for (const auto& [k, row] : rows_)
        keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    std::vector<FoState> out;
    out.reserve(keys.size());
    for (const auto& k : keys)
        out.push_back(decode(k));
    return out;
}

const QSubTable& QTable::at(int count) const
{
    const auto it = per_count.find(count);
    if (it == per_count.end())
        throw UnavailablePolicyError("Q-table has no entry for aggressor count " + std::to_string(count));
    return it->second;
}

bool QTable::all_converged() const
{
    return std::all_of(per_count.begin(), per_count.end(), [](const auto& kv) { return kv.second.converged; });
}

FoPolicy QTable::policy() const
{
    FoPolicy p(meta.fo_quantum);
    for (const auto& [count, sub] : per_count) {
        std::vector<int> a{0};
        a.insert(a.end(), sub.greedy_assignment.begin(), sub.greedy_assignment.end());
        if (static_cast<int>(a.size()) != count + 1)
            throw ConfigurationError("Q-table greedy assignment has the wrong size");
        p.set(count, std::move(a));
    }
    return p;
}

GreedyChoice greedy_policy(const QSubTable& table, const FoState& state)
{
    GreedyChoice c;
    if (table.contains(state)) {
        c.action = table.best_action(state);
        c.matched_state = state;
        return c;
    }
    c.fallback = true;
    int best = std::numeric_limits<int>::max();
    for (const auto& s : table.states()) {
        int d = 0;
        for (std::size_t i = 0; i < s.size(); ++i)
            d += std::abs(s[i] - state[i]);
        if (d < best) {
            best = d;
            c.matched_state = s;
        }
    }
    if (best != std::numeric_limits<int>::max())
        c.action = table.best_action(c.matched_state);
    return c;
}

GreedyChoice greedy_policy(const QTable& table, int count, const FoState& state)
{
    return greedy_policy(table.at(count), state);
}

FoState greedy_rollout(const QSubTable& table, int max_steps)
{
    FoState state(table.num_aggressors(), 0);
    std::set<FoState> seen{state};
    for (int step = 0; step < max_steps; ++step) {
        const auto choice = greedy_policy(table, state);
        if (choice.action == 0)
            break;
        const auto next = apply_action(state, choice.action, table.fo_quantum());
        if (!seen.insert(next).second)
            break;
        state = next;
    }
    return state;
}

CapacityObjective::CapacityObjective(const CouplingModel& coupling, const std::vector<NetworkScenario>& drops,
                                     double snr_db, double carrier_hz)
    : coupling_(&coupling)
{
    if (drops.empty())
        throw ConfigurationError("training needs at least one drop");
    aggressors_ = static_cast<int>(drops.front().links.size()) - 1;
    if (aggressors_ < 1)
        throw ConfigurationError("training drops need at least one aggressor");
    const double snr = std::isinf(snr_db) && snr_db > 0 ? std::numeric_limits<double>::infinity()
                                                        : std::pow(10.0, snr_db / 10.0);
    for (const auto& s : drops) {
        if (static_cast<int>(s.links.size()) != aggressors_ + 1)
            throw ConfigurationError("training drops differ in link count");
        if (s.fo_quantum != coupling.fo_quantum() || s.timing_grid != coupling.timing_grid())
            throw ConfigurationError("training drop grids differ from the coupling model");
        const auto order = s.entry_order();
        Drop d;
        d.links = static_cast<int>(order.size());
        d.path.resize(static_cast<std::size_t>(d.links) * d.links);
        d.timing.resize(d.path.size());
        for (int rx = 0; rx < d.links; ++rx)
            for (int tx = 0; tx < d.links; ++tx) {
                const Link& lr = s.by_id(order[rx]);
                const Link& lt = s.by_id(order[tx]);
                d.path[rx * d.links + tx] = free_space_path_loss(distance(lt.tp, lr.rp), carrier_hz);
                d.timing[rx * d.links + tx] = relative_timing(lt.timing_index, lr.timing_index, coupling.timing_grid());
            }
        for (int j = 0; j < d.links; ++j) {
            d.signal.push_back(d.path[j * d.links + j] * coupling.awgn_signal());
            d.self.push_back(d.path[j * d.links + j] * coupling.awgn_self());
        }
        d.noise = d.signal[0] / snr;
        d.interference.assign(d.links, 0.0);
        drops_.push_back(std::move(d));
    }
    reset(FoState(aggressors_, 0));
}

double CapacityObjective::pair_energy(const Drop& d, int rx, int tx, int fo_rx, int fo_tx) const
{
    return d.path[rx * d.links + tx] * coupling_->awgn_cross_energy(d.timing[rx * d.links + tx], fo_tx - fo_rx);
}

double CapacityObjective::drop_capacity(const Drop& d) const
{
    double c = 0.0;
    for (int j = 0; j < d.links; ++j)
        c += std::log2(1.0 + d.signal[j] / (d.self[j] + d.interference[j] + d.noise));
    return c / coupling_->lattice().density();
}

double CapacityObjective::reset(const FoState& state)
{
    if (static_cast<int>(state.size()) != aggressors_)
        throw ConfigurationError("state has the wrong number of aggressors");
    fo_.assign(1, 0);
    fo_.insert(fo_.end(), state.begin(), state.end());
    double total = 0.0;
    for (auto& d : drops_) {
        for (int rx = 0; rx < d.links; ++rx) {
            double acc = 0.0;
            for (int tx = 0; tx < d.links; ++tx)
                if (tx != rx)
                    acc += pair_energy(d, rx, tx, fo_[rx], fo_[tx]);
            d.interference[rx] = acc;
        }
        total += drop_capacity(d);
    }
    value_ = total / static_cast<double>(drops_.size());
    return value_;
}

double CapacityObjective::move(int aggressor, int fo)
{
    const int m = aggressor + 1;
    if (m < 1 || m > aggressors_)
        throw ParameterDomainError("aggressor index out of range");
    const int old = fo_[m];
    if (old == fo)
        return value_;
    fo_[m] = fo;
    double total = 0.0;
    for (auto& d : drops_) {
        double own = 0.0;
        for (int j = 0; j < d.links; ++j) {
            if (j == m)
                continue;
            d.interference[j] += pair_energy(d, j, m, fo_[j], fo) - pair_energy(d, j, m, fo_[j], old);
            own += pair_energy(d, m, j, fo, fo_[j]);
        }
        d.interference[m] = own;
        total += drop_capacity(d);
    }
    value_ = total / static_cast<double>(drops_.size());
    return value_;
}

double CapacityObjective::evaluate(const FoState& state) const
{
    CapacityObjective copy = *this;
    return copy.reset(state);
}

QSubTable train_count(CapacityObjective objective, const Hyperparams& hp, std::uint64_t seed)
{
    hp.validate();
    const int s = objective.num_aggressors();
    const int q = objective.fo_quantum();
    const int actions = num_actions(s);
    const int steps = hp.steps_per_episode > 0 ? hp.steps_per_episode : 10 * q;
    QSubTable table(s, q);
    RandomStream rng(seed);

    for (int ep = 0; ep < hp.episodes; ++ep) {
        const double frac = hp.episodes > 1 ? static_cast<double>(ep) / (hp.episodes - 1) : 1.0;
        const double eps = hp.epsilon_start + (hp.epsilon_end - hp.epsilon_start) * frac;
        FoState state(s, 0);
        double cap = objective.reset(state);
        double delta = 0.0;
        for (int t = 0; t < steps; ++t) {
            const int a = rng.uniform() < eps ? static_cast<int>(rng.index(actions)) : table.best_action(state);
            FoState next = apply_action(state, a, q);
            const double next_cap = a == 0 ? cap : objective.move((a - 1) / 2, next[(a - 1) / 2]);
            const double r = reward(next_cap, cap, hp.lambda1);
            const double old = table.get(state, a);
            const double updated = q_update(old, r, table.max_value(next), hp.beta, hp.gamma);
            table.set(state, a, updated);
            delta = std::max(delta, std::abs(updated - old));
            state = std::move(next);
            cap = next_cap;
        }
        table.episodes_run = ep + 1;
        table.last_delta = delta;
        if (delta < hp.tolerance) {
            table.converged = true;
            break;
        }
    }
    table.greedy_assignment = greedy_rollout(table, steps);
    return table;
}

QTable train(const ScenarioFamily& family, const CouplingModel& coupling, int s_max, const Hyperparams& hp,
             std::uint64_t seed, double training_snr_db, int threads)
{
    if (s_max < 1)
        throw ParameterDomainError("s_max must be at least 1");
    hp.validate();
    QTable out;
    out.hyperparams = hp;
    out.seed = seed;
    out.meta.dispersion = coupling.filter().dispersion;
    out.meta.filter = coupling.filter().family;
    out.meta.fo_quantum = coupling.fo_quantum();
    out.meta.timing_grid = coupling.timing_grid();
    out.meta.training_snr_db = training_snr_db;

    std::vector<QSubTable> results(static_cast<std::size_t>(s_max));
    std::atomic<int> next{1};
    std::exception_ptr failure;
    std::mutex failure_lock;
    auto worker = [&] {
        for (int s = next++; s <= s_max; s = next++) {
            try {
                std::vector<NetworkScenario> drops;
                for (int d = 0; d < hp.training_drops; ++d)
                    drops.push_back(family(s, d, derive_stream(seed, {static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(d), 1})));
                CapacityObjective obj(coupling, drops, training_snr_db);
                results[s - 1] = train_count(std::move(obj), hp, derive_stream(seed, {static_cast<std::uint64_t>(s), 2}));
            } catch (...) {
                std::lock_guard lock(failure_lock);
                if (!failure)
                    failure = std::current_exception();
            }
        }
    };
    const int n = std::max(1, std::min(threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency()), s_max));
    std::vector<std::thread> pool;
    for (int i = 1; i < n; ++i)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
    for (int s = 1; s <= s_max; ++s)
        out.per_count.emplace(s, std::move(results[s - 1]));
    return out;
}

} // namespace potsim
