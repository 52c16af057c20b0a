#include "potsim/error.hpp"
#include "potsim/experiments.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace potsim {

using nlohmann::json;

namespace {

constexpr std::pair<ExperimentKind, std::string_view> kKinds[] = {
    {ExperimentKind::AmbiguitySurface, "ambiguity_surface"},
    {ExperimentKind::CapacityVsSnr, "capacity_vs_snr"},
    {ExperimentKind::CapacityVsAggressors, "capacity_vs_aggressors"},
    {ExperimentKind::MeVsAggressors, "me_vs_aggressors"},
    {ExperimentKind::OutageVsAggressors, "outage_vs_aggressors"},
};

json snr_value(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    return v;
}

double parse_snr(const json& j)
{
    if (j.is_number())
        return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "+inf")
            return std::numeric_limits<double>::infinity();
    }
    throw ConfigurationError("SNR values must be numbers or \"inf\"");
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where)
{
    for (const auto& [key, value] : j.items())
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigurationError("unknown key '" + key + "' in " + where);
}

} // namespace

std::string_view to_string(ExperimentKind k)
{
    for (const auto& [kind, name] : kKinds)
        if (kind == k)
            return name;
    return "unknown";
}

std::string_view to_string(OverlapMode m)
{
    return m == OverlapMode::POT ? "pot" : "full_overlap";
}

ExperimentKind parse_experiment_kind(std::string_view name)
{
    for (const auto& [kind, n] : kKinds)
        if (n == name)
            return kind;
    throw ConfigurationError("unknown experiment '" + std::string(name) + "'");
}

OverlapMode parse_overlap_mode(std::string_view name)
{
    if (name == "pot" || name == "POT")
        return OverlapMode::POT;
    if (name == "full_overlap" || name == "full")
        return OverlapMode::FullOverlap;
    throw ConfigurationError("unknown overlap mode '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const
{
    auto fail = [](const std::string& m) { throw ConfigurationError(m); };
    if (filters.empty())
        fail("at least one filter is required");
    if (std::set<FilterFamily>(filters.begin(), filters.end()).size() != filters.size())
        fail("filters must be distinct");
    if (!(filter_param > 0.0))
        fail("filter_param must be positive");
    if (num_drops < 1)
        fail("num_drops must be at least 1");
    if (experiment == ExperimentKind::CapacityVsSnr) {
        if (snr_grid.empty())
            fail("snr_grid must not be empty");
        if (!std::is_sorted(snr_grid.begin(), snr_grid.end()) ||
            std::adjacent_find(snr_grid.begin(), snr_grid.end()) != snr_grid.end())
            fail("snr_grid must be strictly increasing");
        if (num_aggressors < 0)
            fail("num_aggressors must be non-negative");
    } else if (experiment != ExperimentKind::AmbiguitySurface) {
        if (aggressor_grid.empty())
            fail("aggressor_grid must not be empty");
        if (!std::is_sorted(aggressor_grid.begin(), aggressor_grid.end()) ||
            std::adjacent_find(aggressor_grid.begin(), aggressor_grid.end()) != aggressor_grid.end())
            fail("aggressor_grid must be strictly increasing");
        if (aggressor_grid.front() < 0)
            fail("aggressor counts must be non-negative");
    }
    for (double s : snr_grid)
        if (std::isnan(s) || s == -std::numeric_limits<double>::infinity())
            fail("SNR values must be finite or +inf");
    if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity())
        fail("snr_db must be finite or +inf");
    if (modes.empty())
        fail("at least one overlap mode is required");
    if (fo_quantum < 2 || fo_quantum > 255)
        fail("fo_quantum must lie in [2, 255]");
    if (timing_grid < 1)
        fail("timing_grid must be at least 1");
    if (!(area_side > 0.0) || !(max_link_range > 0.0) || !(interference_radius > 0.0))
        fail("geometry lengths must be positive");
    if (!(carrier_hz > 0.0))
        fail("carrier frequency must be positive");
    if (surface.points < 3 || surface.points % 2 == 0 || !(surface.extent > 0.0))
        fail("surface grid needs an odd point count of at least 3 and a positive extent");
    if (threads < 0)
        fail("threads must be non-negative");
    if (epa_delays_ns.size() != epa_powers_db.size())
        fail("epa_profile needs equally long delay and power lists");
    for (double p : epa_powers_db)
        if (!std::isfinite(p))
            fail("epa_profile powers must be finite");
    if (!epa_delays_ns.empty())
        channel_model();
    try {
        lattice().validate(bandwidth_hz);
        training.validate();
    } catch (const ConfigurationError&) {
        throw;
    } catch (const Error& e) {
        fail(e.what());
    }
}

LatticeConfig ExperimentConfig::lattice() const
{
    try {
        return LatticeConfig::from_bandwidth(bandwidth_hz, subcarriers, symbols, density);
    } catch (const Error& e) {
        throw ConfigurationError(std::string("lattice: ") + e.what());
    }
}

ChannelModel ExperimentConfig::channel_model() const
{
    if (channel == ChannelKind::AWGN)
        return ChannelModel::awgn(carrier_hz);
    if (epa_delays_ns.empty())
        return ChannelModel::epa(carrier_hz);
    std::vector<double> delays;
    for (double d : epa_delays_ns)
        delays.push_back(d * 1e-9);
    try {
        return ChannelModel::tapped(delays, epa_powers_db, carrier_hz);
    } catch (const Error& e) {
        throw ConfigurationError(std::string("epa_profile: ") + e.what());
    }
}

int ExperimentConfig::max_aggressors() const
{
    if (experiment == ExperimentKind::AmbiguitySurface)
        return 0;
    if (experiment == ExperimentKind::CapacityVsSnr)
        return num_aggressors;
    return aggressor_grid.empty() ? 0 : aggressor_grid.back();
}

std::string ExperimentConfig::to_json() const
{
    json j;
    j["experiment"] = to_string(experiment);
    j["filters"] = json::array();
    for (auto f : filters)
        j["filters"].push_back(to_string(f));
    j["filter_param"] = filter_param;
    j["sample_rate"] = sample_rate;
    j["channel"] = to_string(channel);
    if (!epa_delays_ns.empty())
        j["epa_profile"] = {{"delays_ns", epa_delays_ns}, {"powers_db", epa_powers_db}};
    j["num_drops"] = num_drops;
    j["snr_grid"] = json::array();
    for (double s : snr_grid)
        j["snr_grid"].push_back(snr_value(s));
    j["aggressor_grid"] = aggressor_grid;
    j["snr_db"] = snr_value(snr_db);
    j["num_aggressors"] = num_aggressors;
    j["lattice"] = {{"N", subcarriers}, {"K", symbols}, {"density", density}};
    j["rf"] = {{"carrier_hz", carrier_hz}, {"bandwidth_hz", bandwidth_hz}};
    j["outage_threshold_db"] = outage_threshold_db;
    j["seed"] = seed;
    j["overlap_mode"] = json::array();
    for (auto m : modes)
        j["overlap_mode"].push_back(to_string(m));
    j["fo_quantum"] = fo_quantum;
    j["timing_grid"] = timing_grid;
    j["area_side"] = area_side;
    j["max_link_range"] = max_link_range;
    j["interference_radius"] = interference_radius;
    j["counting"] = counting == CountingMode::Ideal ? "ideal" : "measured";
    j["qtable_dir"] = qtable_dir;
    j["training"] = {{"beta", training.beta},
                     {"gamma", training.gamma},
                     {"epsilon_start", training.epsilon_start},
                     {"epsilon_end", training.epsilon_end},
                     {"lambda1", training.lambda1},
                     {"episodes", training.episodes},
                     {"steps_per_episode", training.steps_per_episode},
                     {"drops", training.training_drops},
                     {"tolerance", training.tolerance},
                     {"snr_db", training_snr_db},
                     {"seed", training_seed}};
    j["surface"] = {{"extent", surface.extent}, {"points", surface.points}};
    j["threads"] = threads;
    return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text)
{
    ExperimentConfig c;
    try {
        const json j = json::parse(text);
        if (!j.is_object())
            throw ConfigurationError("config must be a JSON object");
        check_keys(j,
                   {"experiment", "filters", "filter_param", "sample_rate", "channel", "epa_profile", "num_drops", "snr_grid",
                    "aggressor_grid", "snr_db", "num_aggressors", "lattice", "rf", "outage_threshold_db", "seed",
                    "overlap_mode", "fo_quantum", "timing_grid", "area_side", "max_link_range",
                    "interference_radius", "counting", "qtable_dir", "training", "surface", "threads"},
                   "config");
        if (!j.contains("experiment"))
            throw ConfigurationError("config needs an 'experiment'");
        c.experiment = parse_experiment_kind(j.at("experiment").get<std::string>());
        if (j.contains("filters")) {
            c.filters.clear();
            for (const auto& f : j.at("filters"))
                c.filters.push_back(parse_filter_family(f.get<std::string>()));
        }
        c.filter_param = j.value("filter_param", c.filter_param);
        c.sample_rate = j.value("sample_rate", c.sample_rate);
        if (j.contains("channel"))
            c.channel = parse_channel_kind(j.at("channel").get<std::string>());
        if (j.contains("epa_profile")) {
            const auto& e = j.at("epa_profile");
            check_keys(e, {"delays_ns", "powers_db"}, "epa_profile");
            c.epa_delays_ns = e.at("delays_ns").get<std::vector<double>>();
            c.epa_powers_db = e.at("powers_db").get<std::vector<double>>();
        }
        c.num_drops = j.value("num_drops", c.num_drops);
        if (j.contains("snr_grid")) {
            c.snr_grid.clear();
            for (const auto& s : j.at("snr_grid"))
                c.snr_grid.push_back(parse_snr(s));
        }
        if (j.contains("aggressor_grid"))
            c.aggressor_grid = j.at("aggressor_grid").get<std::vector<int>>();
        if (j.contains("snr_db"))
            c.snr_db = parse_snr(j.at("snr_db"));
        c.num_aggressors = j.value("num_aggressors", c.num_aggressors);
        if (j.contains("lattice")) {
            const auto& l = j.at("lattice");
            check_keys(l, {"N", "K", "density"}, "lattice");
            c.subcarriers = l.value("N", c.subcarriers);
            c.symbols = l.value("K", c.symbols);
            c.density = l.value("density", c.density);
        }
        if (j.contains("rf")) {
            const auto& r = j.at("rf");
            check_keys(r, {"carrier_hz", "bandwidth_hz"}, "rf");
            c.carrier_hz = r.value("carrier_hz", c.carrier_hz);
            c.bandwidth_hz = r.value("bandwidth_hz", c.bandwidth_hz);
        }
        c.outage_threshold_db = j.value("outage_threshold_db", c.outage_threshold_db);
        c.seed = j.value("seed", c.seed);
        if (j.contains("overlap_mode")) {
            c.modes.clear();
            const auto& m = j.at("overlap_mode");
            if (m.is_string())
                c.modes.push_back(parse_overlap_mode(m.get<std::string>()));
            else
                for (const auto& x : m)
                    c.modes.push_back(parse_overlap_mode(x.get<std::string>()));
        }
        c.fo_quantum = j.value("fo_quantum", c.fo_quantum);
        c.timing_grid = j.value("timing_grid", c.timing_grid);
        c.area_side = j.value("area_side", c.area_side);
        c.max_link_range = j.value("max_link_range", c.max_link_range);
        c.interference_radius = j.value("interference_radius", c.interference_radius);
        if (j.contains("counting")) {
            const auto s = j.at("counting").get<std::string>();
            if (s == "ideal")
                c.counting = CountingMode::Ideal;
            else if (s == "measured")
                c.counting = CountingMode::Measured;
            else
                throw ConfigurationError("counting must be 'ideal' or 'measured'");
        }
        c.qtable_dir = j.value("qtable_dir", c.qtable_dir);
        if (j.contains("training")) {
            const auto& t = j.at("training");
            check_keys(t,
                       {"beta", "gamma", "epsilon_start", "epsilon_end", "lambda1", "episodes",
                        "steps_per_episode", "drops", "tolerance", "snr_db", "seed"},
                       "training");
            auto& h = c.training;
            h.beta = t.value("beta", h.beta);
            h.gamma = t.value("gamma", h.gamma);
            h.epsilon_start = t.value("epsilon_start", h.epsilon_start);
            h.epsilon_end = t.value("epsilon_end", h.epsilon_end);
            h.lambda1 = t.value("lambda1", h.lambda1);
            h.episodes = t.value("episodes", h.episodes);
            h.steps_per_episode = t.value("steps_per_episode", h.steps_per_episode);
            h.training_drops = t.value("drops", h.training_drops);
            h.tolerance = t.value("tolerance", h.tolerance);
            if (t.contains("snr_db"))
                c.training_snr_db = parse_snr(t.at("snr_db"));
            c.training_seed = t.value("seed", c.training_seed);
        }
        if (j.contains("surface")) {
            const auto& s = j.at("surface");
            check_keys(s, {"extent", "points"}, "surface");
            c.surface.extent = s.value("extent", c.surface.extent);
            c.surface.points = s.value("points", c.surface.points);
        }
        c.threads = j.value("threads", c.threads);
    } catch (const json::exception& e) {
        throw ConfigurationError(std::string("malformed config: ") + e.what());
    } catch (const ConfigurationError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigurationError(e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigurationError("cannot read config " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

std::string fnv1a_hex(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string config_hash(const ExperimentConfig& config)
{
    auto j = json::parse(config.to_json());
    j.erase("threads");
    return fnv1a_hex(j.dump());
}

} // namespace potsim
