#include "potsim/network.hpp"

#include "potsim/error.hpp"
#include "potsim/rng.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <utility>

namespace potsim {

double distance(const Point& a, const Point& b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

namespace {

bool inside(const Point& p, double side)
{
    return p.x >= 0.0 && p.x <= side && p.y >= 0.0 && p.y <= side;
}

Point uniform_in_square(RandomStream& rng, double side)
{
    const double x = rng.uniform(0.0, side);
    const double y = rng.uniform(0.0, side);
    return {x, y};
}

// Uniform in the disk of `radius` around `centre`, clipped to the square by
// resampling. The point never coincides with the centre.
Point uniform_in_disk(RandomStream& rng, const Point& centre, double radius, double side)
{
    for (int attempt = 0; attempt < 100000; ++attempt) {
        const double r = radius * std::sqrt(rng.uniform());
        const double a = 2.0 * std::numbers::pi * rng.uniform();
        const Point p{centre.x + r * std::cos(a), centre.y + r * std::sin(a)};
        if (r > 0.0 && inside(p, side) && distance(p, centre) > 0.0)
            return p;
    }
    throw NumericalDegeneracyError("could not place a point inside the area");
}

void shuffle(std::vector<int>& v, RandomStream& rng)
{
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng.index(i)]);
}

void check_options(const ScenarioOptions& o)
{
    if (!(o.area_side > 0.0))
        throw ParameterDomainError("area side must be positive");
    if (!(o.max_link_range > 0.0))
        throw ParameterDomainError("link range must be positive");
    if (o.fo_quantum < 2)
        throw ParameterDomainError("fo_quantum must be at least 2");
    if (o.timing_grid < 1)
        throw ParameterDomainError("timing grid must have at least one point");
    o.lattice.validate();
}

Link make_link(int id, const Point& tp, const Point& rp, RandomStream& rng, const ScenarioOptions& o)
{
    Link l;
    l.id = id;
    l.tp = tp;
    l.rp = rp;
    l.filter = o.filter;
    l.timing_index = static_cast<int>(rng.index(static_cast<std::uint64_t>(o.timing_grid)));
    l.timing_offset = o.lattice.tau0 * l.timing_index / o.timing_grid;
    return l;
}

NetworkScenario empty_scenario(const ScenarioOptions& o, std::uint64_t seed)
{
    NetworkScenario s;
    s.area_side = o.area_side;
    s.max_link_range = o.max_link_range;
    s.rng_seed = seed;
    s.lattice = o.lattice;
    s.fo_quantum = o.fo_quantum;
    s.timing_grid = o.timing_grid;
    return s;
}

} // namespace

void NetworkScenario::validate() const
{
    std::set<int> ranks;
    std::set<int> ids;
    for (const auto& l : links) {
        if (!inside(l.tp, area_side) || !inside(l.rp, area_side))
            throw ConfigurationError("link " + std::to_string(l.id) + " lies outside the area");
        const double d = l.length();
        if (!(d > 0.0) || d > max_link_range + 1e-9)
            throw ConfigurationError("link " + std::to_string(l.id) + " length outside (0, max range]");
        if (l.fo_index < 0 || l.fo_index >= fo_quantum)
            throw ConfigurationError("FO index off the grid");
        if (l.aggressor_count < 0 || l.aggressor_count > static_cast<int>(links.size()) - 1)
            throw ConfigurationError("aggressor count out of range");
        if (!ranks.insert(l.entry_rank).second)
            throw ConfigurationError("entry ranks are not unique");
        if (!ids.insert(l.id).second)
            throw ConfigurationError("link ids are not unique");
    }
}

std::vector<int> NetworkScenario::entry_order() const
{
    std::vector<std::size_t> idx(links.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return links[a].entry_rank < links[b].entry_rank; });
    std::vector<int> out;
    for (auto i : idx)
        out.push_back(links[i].id);
    return out;
}

const Link& NetworkScenario::by_id(int id) const
{
    for (const auto& l : links)
        if (l.id == id)
            return l;
    throw ConfigurationError("no link with id " + std::to_string(id));
}

Link& NetworkScenario::by_id(int id)
{
    return const_cast<Link&>(std::as_const(*this).by_id(id));
}

std::string NetworkScenario::to_json() const
{
    nlohmann::json j;
    j["format"] = "potsim-scenario";
    j["version"] = 1;
    j["area_side"] = area_side;
    j["max_link_range"] = max_link_range;
    j["rng_seed"] = rng_seed;
    j["fo_quantum"] = fo_quantum;
    j["timing_grid"] = timing_grid;
    j["lattice"] = {{"tau0", lattice.tau0},
                    {"nu0", lattice.nu0},
                    {"num_subcarriers", lattice.num_subcarriers},
                    {"num_symbols", lattice.num_symbols}};
    auto& arr = j["links"] = nlohmann::json::array();
    for (const auto& l : links) {
        arr.push_back({{"id", l.id},
                       {"tp", {l.tp.x, l.tp.y}},
                       {"rp", {l.rp.x, l.rp.y}},
                       {"fo_index", l.fo_index},
                       {"fo_hz", l.fo_hz(lattice, fo_quantum)},
                       {"entry_rank", l.entry_rank},
                       {"aggressor_count", l.aggressor_count},
                       {"timing_index", l.timing_index},
                       {"timing_offset", l.timing_offset},
                       {"filter", to_string(l.filter)}});
    }
    return j.dump(2);
}

NetworkScenario NetworkScenario::from_json(const std::string& text)
{
    NetworkScenario s;
    try {
        const auto j = nlohmann::json::parse(text);
        if (j.value("format", "") != "potsim-scenario" || j.value("version", 0) != 1)
            throw ConfigurationError("not a version 1 scenario file");
        s.area_side = j.at("area_side").get<double>();
        s.max_link_range = j.at("max_link_range").get<double>();
        s.rng_seed = j.at("rng_seed").get<std::uint64_t>();
        s.fo_quantum = j.at("fo_quantum").get<int>();
        s.timing_grid = j.at("timing_grid").get<int>();
        const auto& lat = j.at("lattice");
        s.lattice.tau0 = lat.at("tau0").get<double>();
        s.lattice.nu0 = lat.at("nu0").get<double>();
        s.lattice.num_subcarriers = lat.at("num_subcarriers").get<int>();
        s.lattice.num_symbols = lat.at("num_symbols").get<int>();
        for (const auto& e : j.at("links")) {
            Link l;
            l.id = e.at("id").get<int>();
            l.tp = {e.at("tp").at(0).get<double>(), e.at("tp").at(1).get<double>()};
            l.rp = {e.at("rp").at(0).get<double>(), e.at("rp").at(1).get<double>()};
            l.fo_index = e.at("fo_index").get<int>();
            l.entry_rank = e.at("entry_rank").get<int>();
            l.aggressor_count = e.at("aggressor_count").get<int>();
            l.timing_index = e.at("timing_index").get<int>();
            l.timing_offset = e.at("timing_offset").get<double>();
            l.filter = parse_filter_family(e.at("filter").get<std::string>());
            s.links.push_back(l);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError(std::string("malformed scenario: ") + e.what());
    }
    s.lattice.validate();
    s.validate();
    return s;
}

NetworkScenario generate_scenario(int num_links, const ScenarioOptions& options, std::uint64_t seed)
{
    if (num_links < 1)
        throw ParameterDomainError("need at least one link");
    check_options(options);
    RandomStream rng(derive_stream(seed, {0x5ce7a110}));
    NetworkScenario s = empty_scenario(options, seed);
    for (int i = 0; i < num_links; ++i) {
        const Point tp = uniform_in_square(rng, options.area_side);
        const Point rp = uniform_in_disk(rng, tp, options.max_link_range, options.area_side);
        s.links.push_back(make_link(i, tp, rp, rng, options));
    }
    std::vector<int> ranks(num_links);
    std::iota(ranks.begin(), ranks.end(), 0);
    shuffle(ranks, rng);
    for (int i = 0; i < num_links; ++i)
        s.links[i].entry_rank = ranks[i];
    return s;
}

NetworkScenario generate_scenario(int num_links, double area_side, double max_link_range, std::uint64_t seed)
{
    ScenarioOptions o;
    o.area_side = area_side;
    o.max_link_range = max_link_range;
    return generate_scenario(num_links, o, seed);
}

NetworkScenario generate_victim_scenario(int num_aggressors, const ScenarioOptions& options,
                                         double interference_radius, std::uint64_t seed)
{
    if (num_aggressors < 0)
        throw ParameterDomainError("aggressor count must be non-negative");
    if (!(interference_radius > 0.0))
        throw ParameterDomainError("interference radius must be positive");
    check_options(options);
    RandomStream rng(derive_stream(seed, {0x71c71a}));
    NetworkScenario s = empty_scenario(options, seed);
    const Point vtp = uniform_in_square(rng, options.area_side);
    const Point vrp = uniform_in_disk(rng, vtp, options.max_link_range, options.area_side);
    s.links.push_back(make_link(0, vtp, vrp, rng, options));
    for (int i = 1; i <= num_aggressors; ++i) {
        const Point tp = uniform_in_disk(rng, vrp, interference_radius, options.area_side);
        const Point rp = uniform_in_disk(rng, tp, options.max_link_range, options.area_side);
        s.links.push_back(make_link(i, tp, rp, rng, options));
    }
    std::vector<int> ranks(num_aggressors);
    std::iota(ranks.begin(), ranks.end(), 1);
    shuffle(ranks, rng);
    s.links[0].entry_rank = 0;
    for (int i = 0; i < num_aggressors; ++i)
        s.links[i + 1].entry_rank = ranks[i];
    return s;
}

int update_aggressor_count(int count, double sinr_before_db, double sinr_after_db)
{
    if (sinr_after_db < sinr_before_db - 3.0)
        return count + 1;
    if (sinr_after_db > sinr_before_db + 3.0)
        return std::max(0, count - 1);
    return count;
}

void FoPolicy::set(int count, std::vector<int> assignment)
{
    if (count < 0 || static_cast<int>(assignment.size()) != count + 1)
        throw ConfigurationError("policy assignment must have count + 1 slots");
    assignment[0] = 0;
    std::vector<bool> claimed(fo_quantum_, false);
    int n_claimed = 0;
    for (auto& fo : assignment) {
        if (fo < 0 || fo >= fo_quantum_)
            throw ConfigurationError("policy FO off the grid");
        if (claimed[fo] && n_claimed < fo_quantum_)
            fo = static_cast<int>(std::find(claimed.begin(), claimed.end(), false) - claimed.begin());
        if (!claimed[fo]) {
            claimed[fo] = true;
            ++n_claimed;
        }
    }
    table_[count] = std::move(assignment);
}

const std::vector<int>& FoPolicy::assignment(int count) const
{
    const auto it = table_.find(count);
    if (it == table_.end())
        throw UnavailablePolicyError("no FO policy for aggressor count " + std::to_string(count));
    return it->second;
}

int FoPolicy::fo_for(int count, int slot) const
{
    if (count == 0 && slot == 0)
        return 0;
    const auto& a = assignment(count);
    if (slot < 0 || slot >= static_cast<int>(a.size()))
        throw UnavailablePolicyError("slot " + std::to_string(slot) + " outside the policy for count " +
                                     std::to_string(count));
    return a[slot];
}

namespace {

std::vector<TraceEntry> ideal_sequence(NetworkScenario& s, const FoPolicy& policy)
{
    std::vector<TraceEntry> trace;
    std::vector<int> active;
    for (int id : s.entry_order()) {
        Link& entrant = s.by_id(id);
        entrant.fo_index = 0;
        entrant.aggressor_count = 0;
        const int before = static_cast<int>(active.size());
        if (before == 0) {
            active.push_back(id);
            trace.push_back({id, 0, 0});
            continue;
        }
        for (int a : active)
            ++s.by_id(a).aggressor_count;
        active.push_back(id);
        // The entrant collides first with the link at FO 0, then with each
        // earlier entrant whose FO it picks up at the lower count.
        const int slot = before;
        for (int c = 1; c <= before; ++c) {
            entrant.aggressor_count = c;
            entrant.fo_index = policy.fo_for(c, std::min(slot, c));
            trace.push_back({id, c, entrant.fo_index});
        }
        for (int k = 0; k < before; ++k) {
            Link& l = s.by_id(active[k]);
            l.fo_index = policy.fo_for(l.aggressor_count, k);
            trace.push_back({l.id, l.aggressor_count, l.fo_index});
        }
    }
    return trace;
}

std::vector<TraceEntry> measured_sequence(NetworkScenario& s, const FoPolicy& policy, const SinrProbe& probe)
{
    if (!probe)
        throw ConfigurationError("measured counting needs an SINR probe");
    std::vector<TraceEntry> trace;
    std::vector<int> active;
    auto measure = [&](const std::vector<int>& ids) {
        std::vector<double> out;
        for (int id : ids)
            out.push_back(probe(s, active, id));
        return out;
    };
    auto slot_of = [&](int id) {
        return static_cast<int>(std::find(active.begin(), active.end(), id) - active.begin());
    };

    for (int id : s.entry_order()) {
        Link& entrant = s.by_id(id);
        entrant.fo_index = 0;
        entrant.aggressor_count = 0;
        if (active.empty()) {
            active.push_back(id);
            trace.push_back({id, 0, 0});
            continue;
        }
        std::vector<double> before = measure(active);
        before.push_back(probe(s, {id}, id));
        active.push_back(id);
        trace.push_back({id, 0, 0});
        const std::vector<double> after = measure(active);
        const int cap = static_cast<int>(active.size()) - 1;
        std::vector<int> changed;
        for (std::size_t k = 0; k < active.size(); ++k) {
            Link& l = s.by_id(active[k]);
            const int c = std::min(cap, update_aggressor_count(l.aggressor_count, before[k], after[k]));
            if (c != l.aggressor_count) {
                l.aggressor_count = c;
                changed.push_back(l.id);
            }
        }
        // Links whose count moved adopt the policy for their new count; a
        // further drop beyond three dB means another collision.
        for (std::size_t round = 0; round < active.size() && !changed.empty(); ++round) {
            const std::vector<double> pre = measure(active);
            for (int cid : changed) {
                Link& l = s.by_id(cid);
                l.fo_index = policy.fo_for(l.aggressor_count, std::min(slot_of(cid), l.aggressor_count));
                trace.push_back({cid, l.aggressor_count, l.fo_index});
            }
            const std::vector<double> post = measure(active);
            changed.clear();
            for (std::size_t k = 0; k < active.size(); ++k) {
                Link& l = s.by_id(active[k]);
                if (post[k] < pre[k] - 3.0 && l.aggressor_count < cap) {
                    ++l.aggressor_count;
                    changed.push_back(l.id);
                }
            }
        }
        // Earlier entrants keep their FO; a later duplicate moves to the
        // lowest unclaimed index while one exists.
        std::vector<bool> claimed(s.fo_quantum, false);
        int n_claimed = 0;
        for (int aid : active) {
            Link& l = s.by_id(aid);
            if (claimed[l.fo_index] && n_claimed < s.fo_quantum) {
                l.fo_index = static_cast<int>(std::find(claimed.begin(), claimed.end(), false) - claimed.begin());
                trace.push_back({aid, l.aggressor_count, l.fo_index});
            }
            if (!claimed[l.fo_index]) {
                claimed[l.fo_index] = true;
                ++n_claimed;
            }
        }
    }
    return trace;
}

} // namespace

std::vector<TraceEntry> entry_sequence(NetworkScenario& scenario, const FoPolicy& policy, CountingMode mode,
                                       const SinrProbe& probe)
{
    if (policy.fo_quantum() != scenario.fo_quantum)
        throw ConfigurationError("policy and scenario use different FO grids");
    return mode == CountingMode::Ideal ? ideal_sequence(scenario, policy) : measured_sequence(scenario, policy, probe);
}

} // namespace potsim
