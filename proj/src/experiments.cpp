#include "potsim/experiments.hpp"

#include "potsim/error.hpp"
#include "potsim/interference.hpp"
#include "potsim/rng.hpp"

#include "json.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

namespace potsim {

using nlohmann::json;

namespace {

constexpr std::array<const char*, 3> kMetrics{"capacity", "me", "outage"};

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

ScenarioOptions scenario_options(const ExperimentConfig& c, FilterFamily filter)
{
    ScenarioOptions o;
    o.area_side = c.area_side;
    o.max_link_range = c.max_link_range;
    o.lattice = c.lattice();
    o.fo_quantum = c.fo_quantum;
    o.timing_grid = c.timing_grid;
    o.filter = filter;
    return o;
}

PrototypeFilter experiment_filter(const ExperimentConfig& c, FilterFamily f)
{
    return make_filter(f, c.filter_param, c.sample_rate);
}

double noise_for(double path_gain, double snr_db)
{
    if (std::isinf(snr_db))
        return 0.0;
    return path_gain / std::pow(10.0, snr_db / 10.0);
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path.string());
    out << text;
    if (!out)
        throw Error("failed writing " + path.string());
}

template <class Fn>
void parallel_for(int n, int threads, Fn&& fn)
{
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex lock;
    auto worker = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard g(lock);
                if (!failure)
                    failure = std::current_exception();
                next = n;
            }
        }
    };
    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    const int count = std::max(1, std::min(threads > 0 ? threads : std::max(1, hw), n));
    std::vector<std::thread> pool;
    for (int i = 1; i < count; ++i)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace

std::pair<double, double> mean_ci95(const std::vector<double>& values)
{
    if (values.empty())
        return {0.0, 0.0};
    double sum = 0.0;
    for (double v : values)
        sum += v;
    const double n = static_cast<double>(values.size());
    const double mean = sum / n;
    if (values.size() < 2)
        return {mean, 0.0};
    double ss = 0.0;
    for (double v : values)
        ss += (v - mean) * (v - mean);
    return {mean, 1.96 * std::sqrt(ss / (n - 1.0) / n)};
}

std::string training_fingerprint(const ExperimentConfig& c, FilterFamily filter)
{
    json j;
    j["filter"] = to_string(filter);
    j["filter_param"] = c.filter_param;
    j["sample_rate"] = c.sample_rate;
    j["lattice"] = {c.subcarriers, c.symbols, c.density, c.bandwidth_hz};
    j["carrier_hz"] = c.carrier_hz;
    j["fo_quantum"] = c.fo_quantum;
    j["timing_grid"] = c.timing_grid;
    j["geometry"] = {c.area_side, c.max_link_range, c.interference_radius};
    const auto& h = c.training;
    j["hyperparams"] = {h.beta,     h.gamma,     h.epsilon_start,  h.epsilon_end, h.lambda1,
                        h.episodes, h.steps_per_episode, h.training_drops, h.tolerance};
    j["training_snr_db"] = std::isinf(c.training_snr_db) ? json("inf") : json(c.training_snr_db);
    j["training_seed"] = c.training_seed;
    return fnv1a_hex(j.dump());
}

std::string qtable_path(const ExperimentConfig& c, FilterFamily filter)
{
    const std::string name = "qtable_" + std::string(to_string(filter)) + "_" + training_fingerprint(c, filter) + ".txt";
    return (std::filesystem::path(c.qtable_dir) / name).string();
}

QTable obtain_qtable(const ExperimentConfig& c, FilterFamily filter, bool train_if_missing, ArtifactInfo* info)
{
    const std::string path = qtable_path(c, filter);
    const std::string fingerprint = training_fingerprint(c, filter);
    const int needed = c.max_aggressors();
    ArtifactInfo local;
    ArtifactInfo& out = info ? *info : local;
    out.filter = filter;
    out.path = path;
    out.trained = false;

    auto covers = [&](const QTable& t) {
        for (int s = 1; s <= needed; ++s)
            if (!t.has(s))
                return false;
        return true;
    };

    if (std::filesystem::exists(path)) {
        QTable t = QTable::load(path);
        if (t.meta.fingerprint != fingerprint)
            throw ConfigurationError("Q-table " + path + " was trained for a different setup");
        if (covers(t)) {
            out.hash = fnv1a_hex(read_file(path));
            out.converged = t.all_converged();
            return t;
        }
        if (!train_if_missing)
            throw MissingArtifactError("Q-table " + path + " lacks aggressor counts up to " + std::to_string(needed));
    } else if (!train_if_missing) {
        throw MissingArtifactError("Q-table not found: " + path);
    }

    const auto lattice = c.lattice();
    const CouplingModel coupling(experiment_filter(c, filter), lattice, c.fo_quantum, c.timing_grid,
                                 c.reference_subcarrier());
    const auto opts = scenario_options(c, filter);
    const double radius = c.interference_radius;
    const ScenarioFamily family = [opts, radius](int s, int, std::uint64_t seed) {
        return generate_victim_scenario(s, opts, radius, seed);
    };
    QTable t = train(family, coupling, std::max(1, needed), c.training, c.training_seed, c.training_snr_db, c.threads);
    t.meta.fingerprint = fingerprint;
    std::filesystem::create_directories(c.qtable_dir);
    t.save(path);
    out.trained = true;
    out.hash = fnv1a_hex(read_file(path));
    out.converged = t.all_converged();
    return t;
}

ExperimentResult run(const ExperimentConfig& config, const RunOptions& options)
{
    config.validate();
    ExperimentResult result;
    result.config = config;
    result.config_hash = config_hash(config);

    if (config.experiment == ExperimentKind::AmbiguitySurface) {
        for (auto f : config.filters)
            result.surfaces.push_back(export_ambiguity_surface(f, config.filter_param, config.surface, config.sample_rate));
        return result;
    }

    const auto lattice = config.lattice();
    const auto model = config.channel_model();
    std::vector<double> tap_delays;
    for (const auto& t : model.taps)
        tap_delays.push_back(t.delay);

    const int nf = static_cast<int>(config.filters.size());
    const int nm = static_cast<int>(config.modes.size());
    std::vector<std::unique_ptr<CouplingModel>> couplings;
    std::vector<FoPolicy> policies(nf, FoPolicy(config.fo_quantum));
    const bool needs_policy =
        std::find(config.modes.begin(), config.modes.end(), OverlapMode::POT) != config.modes.end() &&
        config.max_aggressors() > 0;
    for (int fi = 0; fi < nf; ++fi) {
        const auto f = config.filters[fi];
        couplings.push_back(std::make_unique<CouplingModel>(experiment_filter(config, f), lattice, config.fo_quantum,
                                                            config.timing_grid, config.reference_subcarrier(),
                                                            tap_delays));
        if (needs_policy) {
            ArtifactInfo info;
            policies[fi] = obtain_qtable(config, f, options.train_if_missing, &info).policy();
            if (!info.converged) {
                result.converged = false;
                result.warnings.push_back("Q-table for " + std::string(to_string(f)) +
                                          " did not converge within the episode budget");
            }
            result.artifacts.push_back(info);
        }
    }

    const bool snr_sweep = config.experiment == ExperimentKind::CapacityVsSnr;
    const int ng = static_cast<int>(snr_sweep ? config.snr_grid.size() : config.aggressor_grid.size());
    const int nd = config.num_drops;
    const int ns = nf * nm;
    const int nmet = static_cast<int>(kMetrics.size());
    // [grid][drop][series][metric]
    std::vector<double> values(static_cast<std::size_t>(ng) * nd * ns * nmet, 0.0);

    parallel_for(ng * nd, config.threads, [&](int task) {
        const int g = task / nd;
        const int d = task % nd;
        const int s_count = snr_sweep ? config.num_aggressors : config.aggressor_grid[g];
        const double snr_db = snr_sweep ? config.snr_grid[g] : config.snr_db;
        const auto key_s = static_cast<std::uint64_t>(s_count);
        const auto key_d = static_cast<std::uint64_t>(d);
        const auto opts = scenario_options(config, config.filters.front());
        const NetworkScenario base = generate_victim_scenario(s_count, opts, config.interference_radius,
                                                              derive_stream(config.seed, {1, key_s, key_d}));
        const bool victim_only = config.counting == CountingMode::Ideal;
        const ChannelSet channels =
            realize_scenario_channels(base, model, derive_stream(config.seed, {2, key_s, key_d}), victim_only, 0);
        const double noise = noise_for(channels.at({0, 0}).path_gain, snr_db);

        for (int fi = 0; fi < nf; ++fi) {
            const CouplingModel& coupling = *couplings[fi];
            for (int mi = 0; mi < nm; ++mi) {
                NetworkScenario s = base;
                for (auto& l : s.links)
                    l.filter = config.filters[fi];
                if (config.modes[mi] == OverlapMode::POT) {
                    if (config.counting == CountingMode::Ideal) {
                        entry_sequence(s, policies[fi]);
                    } else {
                        const NetworkInterference net(coupling, channels, noise);
                        entry_sequence(s, policies[fi], CountingMode::Measured, net.probe());
                    }
                } else {
                    for (auto& l : s.links)
                        l.fo_index = 0;
                }
                std::vector<Link> aggressors(s.links.begin() + 1, s.links.end());
                const auto p = decompose(s.links[0], aggressors, channels, coupling, noise);
                const std::size_t base_idx = ((static_cast<std::size_t>(g) * nd + d) * ns + fi * nm + mi) * nmet;
                values[base_idx + 0] = capacity(p, lattice);
                values[base_idx + 1] = multiuser_efficiency(p);
                values[base_idx + 2] = outage(p, config.outage_threshold_db) ? 1.0 : 0.0;
            }
        }
    });

    std::vector<double> sample(nd);
    for (int g = 0; g < ng; ++g)
        for (int fi = 0; fi < nf; ++fi)
            for (int mi = 0; mi < nm; ++mi)
                for (int k = 0; k < nmet; ++k) {
                    for (int d = 0; d < nd; ++d)
                        sample[d] = values[((static_cast<std::size_t>(g) * nd + d) * ns + fi * nm + mi) * nmet + k];
                    const auto [mean, ci] = mean_ci95(sample);
                    ResultRow row;
                    row.grid_value = snr_sweep ? config.snr_grid[g] : config.aggressor_grid[g];
                    row.filter = config.filters[fi];
                    row.mode = config.modes[mi];
                    row.metric = kMetrics[k];
                    row.mean = mean;
                    row.ci95 = ci;
                    row.drops = nd;
                    result.rows.push_back(row);
                }
    return result;
}

const ResultRow& ExperimentResult::find(double grid_value, FilterFamily filter, OverlapMode mode,
                                        const std::string& metric) const
{
    for (const auto& r : rows)
        if (r.grid_value == grid_value && r.filter == filter && r.mode == mode && r.metric == metric)
            return r;
    throw ConfigurationError("no result row for " + metric + " at " + num(grid_value));
}

std::string ExperimentResult::csv() const
{
    std::string out = "grid_value,filter,mode,metric,mean,ci95,drops,config_hash\n";
    for (const auto& r : rows) {
        out += num(r.grid_value) + ',' + std::string(to_string(r.filter)) + ',' + std::string(to_string(r.mode)) +
               ',' + r.metric + ',' + num(r.mean) + ',' + num(r.ci95) + ',' + std::to_string(r.drops) + ',' +
               config_hash + '\n';
    }
    return out;
}

std::string ExperimentResult::summary_json() const
{
    json j;
    j["config"] = json::parse(config.to_json());
    j["config_hash"] = config_hash;
    j["seed"] = config.seed;
    j["experiment"] = to_string(config.experiment);
    j["x_axis"] = config.experiment == ExperimentKind::CapacityVsSnr ? "snr_db"
                  : config.experiment == ExperimentKind::AmbiguitySurface ? "delay_tau0"
                                                                          : "num_aggressors";
    j["metrics"] = kMetrics;
    j["rows"] = rows.size();
    j["converged"] = converged;
    j["warnings"] = warnings;
    j["artifacts"] = json::array();
    for (const auto& a : artifacts)
        j["artifacts"].push_back({{"filter", to_string(a.filter)},
                                  {"path", a.path},
                                  {"hash", a.hash},
                                  {"trained", a.trained},
                                  {"converged", a.converged}});
    j["surfaces"] = json::array();
    for (const auto& s : surfaces)
        j["surfaces"].push_back({{"filter", to_string(s.filter)},
                                 {"file", "surface_" + std::string(to_string(s.filter)) + ".csv"},
                                 {"dispersion", s.dispersion}});
    return j.dump(2) + "\n";
}

void write_outputs(const ExperimentResult& result, const std::string& dir)
{
    const std::filesystem::path root(dir);
    std::filesystem::create_directories(root);
    write_file(root / "results.csv", result.csv());
    write_file(root / "summary.json", result.summary_json());
    for (const auto& s : result.surfaces)
        write_file(root / ("surface_" + std::string(to_string(s.filter)) + ".csv"), s.csv());
}

} // namespace potsim
