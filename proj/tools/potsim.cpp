#include "potsim/error.hpp"
#include "potsim/experiments.hpp"
#include "potsim/interference.hpp"
#include "potsim/qlearning.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kConfigError = 2;
constexpr int kMissingArtifact = 3;
constexpr int kNotConverged = 4;

int cmd_run(const std::string& config_path, const std::string& out_dir, std::optional<std::uint64_t> seed,
            bool train_if_missing, int threads)
{
    auto config = potsim::ExperimentConfig::load(config_path);
    if (seed)
        config.seed = *seed;
    if (threads > 0)
        config.threads = threads;
    potsim::RunOptions opts;
    opts.train_if_missing = train_if_missing;
    const auto result = potsim::run(config, opts);
    potsim::write_outputs(result, out_dir);
    for (const auto& w : result.warnings)
        std::cerr << "warning: " << w << '\n';
    std::cout << "wrote " << result.rows.size() << " rows to " << out_dir << " (config " << result.config_hash
              << ")\n";
    return result.converged ? kOk : kNotConverged;
}

int cmd_train(const std::string& config_path, int s_max, const std::string& out, const std::string& filter_name,
              std::optional<double> param, std::optional<std::uint64_t> seed, int threads)
{
    potsim::ExperimentConfig config;
    if (!config_path.empty())
        config = potsim::ExperimentConfig::load(config_path);
    if (param)
        config.filter_param = *param;
    if (seed)
        config.training_seed = *seed;
    if (threads > 0)
        config.threads = threads;
    config.validate();
    const auto filter = potsim::parse_filter_family(filter_name);
    const auto lattice = config.lattice();
    const potsim::CouplingModel coupling(potsim::make_filter(filter, config.filter_param, config.sample_rate), lattice,
                                         config.fo_quantum, config.timing_grid, config.reference_subcarrier());
    potsim::ScenarioOptions opts;
    opts.area_side = config.area_side;
    opts.max_link_range = config.max_link_range;
    opts.lattice = lattice;
    opts.fo_quantum = config.fo_quantum;
    opts.timing_grid = config.timing_grid;
    opts.filter = filter;
    const double radius = config.interference_radius;
    const potsim::ScenarioFamily family = [opts, radius](int s, int, std::uint64_t stream) {
        return potsim::generate_victim_scenario(s, opts, radius, stream);
    };
    auto table = potsim::train(family, coupling, s_max, config.training, config.training_seed,
                               config.training_snr_db, config.threads);
    table.meta.fingerprint = potsim::training_fingerprint(config, filter);
    const auto parent = std::filesystem::path(out).parent_path();
    if (!parent.empty())
        std::filesystem::create_directories(parent);
    table.save(out);
    for (const auto& [count, sub] : table.per_count)
        if (!sub.converged)
            std::cerr << "warning: S=" << count << " stopped after " << sub.episodes_run
                      << " episodes, last max |dQ| " << sub.last_delta << '\n';
    std::cout << "wrote " << out << '\n';
    return table.all_converged() ? kOk : kNotConverged;
}

int cmd_ambiguity(const std::string& filter_name, double param, const std::string& out, double extent, int points,
                  int sample_rate)
{
    potsim::SurfaceGrid grid;
    grid.extent = extent;
    grid.points = points;
    const auto surface =
        potsim::export_ambiguity_surface(potsim::parse_filter_family(filter_name), param, grid, sample_rate);
    const auto parent = std::filesystem::path(out).parent_path();
    if (!parent.empty())
        std::filesystem::create_directories(parent);
    std::ofstream f(out, std::ios::binary);
    if (!f)
        throw potsim::Error("cannot write " + out);
    f << surface.csv();
    std::cout << "wrote " << out << '\n';
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"POT interference mitigation simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::optional<std::uint64_t> seed;
    bool train_if_missing = false;
    int threads = 0;
    auto* run = app.add_subcommand("run", "Run an experiment from a config file");
    run->add_option("--config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--out", out_dir, "Output directory")->required();
    run->add_option("--seed", seed, "Override the config seed");
    run->add_flag("--train-if-missing", train_if_missing, "Train absent Q-tables instead of failing");
    run->add_option("--threads", threads, "Worker threads (0 = all cores)");

    int s_max = 0;
    std::string train_out, train_config, train_filter = "gaussian";
    std::optional<double> train_param;
    std::optional<std::uint64_t> train_seed;
    auto* train = app.add_subcommand("train", "Train a Q-table");
    train->add_option("--s-max", s_max, "Largest aggressor count")->required()->check(CLI::PositiveNumber);
    train->add_option("--out", train_out, "Q-table file")->required();
    train->add_option("--config", train_config, "Config providing lattice, geometry and hyperparameters");
    train->add_option("--filter", train_filter, "gaussian, rrc or iota");
    train->add_option("--param", train_param, "Filter parameter");
    train->add_option("--seed", train_seed, "Training seed");
    train->add_option("--threads", threads, "Worker threads (0 = all cores)");

    std::string amb_filter, amb_out;
    double amb_param = 1.0, extent = 3.0;
    int points = 61, sample_rate = 16;
    auto* amb = app.add_subcommand("ambiguity", "Export an ambiguity surface as a CSV matrix");
    amb->add_option("--filter", amb_filter, "gaussian, rrc or iota")->required();
    amb->add_option("--param", amb_param, "Dispersion or roll-off");
    amb->add_option("--out", amb_out, "CSV file")->required();
    amb->add_option("--extent", extent, "Half-width in tau0 and nu0");
    amb->add_option("--points", points, "Grid points per axis (odd)");
    amb->add_option("--sample-rate", sample_rate, "Samples per tau0");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*run)
            return cmd_run(config_path, out_dir, seed, train_if_missing, threads);
        if (*train)
            return cmd_train(train_config, s_max, train_out, train_filter, train_param, train_seed, threads);
        if (*amb)
            return cmd_ambiguity(amb_filter, amb_param, amb_out, extent, points, sample_rate);
    } catch (const potsim::MissingArtifactError& e) {
        std::cerr << "missing artifact: " << e.what() << '\n';
        return kMissingArtifact;
    } catch (const potsim::ConfigurationError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const potsim::ParameterDomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kFailure;
}
