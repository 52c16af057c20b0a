#include "doctest.h"

#include "potsim/error.hpp"
#include "potsim/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

using namespace potsim;

namespace {

std::string temp_dir(const std::string& name)
{
    const auto p = std::filesystem::temp_directory_path() / ("potsim_test_" + name);
    std::filesystem::remove_all(p);
    return p.string();
}

ExperimentConfig small_config()
{
    ExperimentConfig c;
    c.experiment = ExperimentKind::CapacityVsAggressors;
    c.filters = {FilterFamily::Gaussian};
    c.modes = {OverlapMode::FullOverlap};
    c.aggressor_grid = {5};
    c.num_drops = 100;
    c.threads = 1;
    return c;
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("config parsing")
{
    const auto c = ExperimentConfig::from_json(R"({
        "experiment": "capacity_vs_snr",
        "filters": ["gaussian", "rrc"],
        "channel": "epa",
        "snr_grid": [0, 10, "inf"],
        "overlap_mode": "pot",
        "lattice": {"N": 12, "K": 12},
        "training": {"episodes": 20}
    })");
    CHECK(c.experiment == ExperimentKind::CapacityVsSnr);
    CHECK(c.filters.size() == 2);
    CHECK(c.channel == ChannelKind::EPA);
    REQUIRE(c.snr_grid.size() == 3);
    CHECK(std::isinf(c.snr_grid[2]));
    CHECK(c.modes == std::vector<OverlapMode>{OverlapMode::POT});
    CHECK(c.training.episodes == 20);
    CHECK(c.filter_param == 0.2);
    CHECK(c.outage_threshold_db == -6.0);
    CHECK(c.carrier_hz == 800e6);
    CHECK(c.max_aggressors() == 10);

    const auto back = ExperimentConfig::from_json(c.to_json());
    CHECK(back.to_json() == c.to_json());

    for (const char* bad : {
             "not json",
             "[]",
             R"({"filters": ["gaussian"]})",
             R"({"experiment": "capacity_vs_snr", "snr_grid": []})",
             R"({"experiment": "capacity_vs_snr", "snr_grid": [10, 0]})",
             R"({"experiment": "capacity_vs_aggressors", "aggressor_grid": [5, 2]})",
             R"({"experiment": "capacity_vs_aggressors", "num_drops": 0})",
             R"({"experiment": "capacity_vs_aggressors", "filters": []})",
             R"({"experiment": "capacity_vs_aggressors", "filters": ["sinc"]})",
             R"({"experiment": "capacity_vs_aggressors", "typo": 1})",
             R"({"experiment": "capacity_vs_aggressors", "lattice": {"N": 0}})",
             R"({"experiment": "capacity_vs_aggressors", "training": {"beta": 2}})",
             R"({"experiment": "capacity_vs_aggressors", "counting": "psychic"})",
             R"({"experiment": "warp"})",
             R"({"experiment": "capacity_vs_snr", "channel": "epa", "epa_profile": {"delays_ns": [0, 50], "powers_db": [0]}})",
             R"({"experiment": "capacity_vs_snr", "channel": "epa", "epa_profile": {"delays_ns": [-5], "powers_db": [0]}})",
         }) {
        INFO(bad);
        CHECK_THROWS_AS(ExperimentConfig::from_json(bad), ConfigurationError);
    }
    CHECK_THROWS_AS(ExperimentConfig::load("/nonexistent/config.json"), ConfigurationError);
}

TEST_CASE("epa profile override")
{
    const auto std_model = ExperimentConfig::from_json(R"({"experiment": "capacity_vs_snr", "channel": "epa"})")
                               .channel_model();
    CHECK(std_model.taps.size() == 7);

    const auto c = ExperimentConfig::from_json(R"({
        "experiment": "capacity_vs_snr", "channel": "epa",
        "epa_profile": {"delays_ns": [0, 100], "powers_db": [0, -3]}
    })");
    const auto m = c.channel_model();
    REQUIRE(m.taps.size() == 2);
    CHECK(m.taps[1].delay == doctest::Approx(100e-9));
    const double p1 = std::pow(10.0, -0.3);
    CHECK(m.taps[0].mean_power == doctest::Approx(1.0 / (1.0 + p1)));
    CHECK(m.taps[1].mean_power == doctest::Approx(p1 / (1.0 + p1)));
    CHECK(ExperimentConfig::from_json(c.to_json()).to_json() == c.to_json());
}

TEST_CASE("config hash")
{
    const auto a = small_config();
    auto b = a;
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    b.threads = 4;
    CHECK(config_hash(a) == config_hash(b));
    b.seed = 2;
    CHECK(config_hash(a) != config_hash(b));
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("mean and confidence half-width")
{
    const auto [m, ci] = mean_ci95({1.0, 2.0, 3.0, 4.0});
    CHECK(m == doctest::Approx(2.5));
    CHECK(ci == doctest::Approx(1.96 * std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(mean_ci95({7.0}).second == 0.0);
}

TEST_CASE("csv rows carry the config hash and runs are reproducible")
{
    auto c = small_config();
    c.num_drops = 20;
    const auto a = run(c);
    c.threads = 3;
    const auto b = run(c);
    CHECK(a.csv() == b.csv());
    std::istringstream lines(a.csv());
    std::string line;
    std::getline(lines, line);
    CHECK(line == "grid_value,filter,mode,metric,mean,ci95,drops,config_hash");
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        CHECK(line.substr(line.size() - 16) == a.config_hash);
    }
    CHECK(rows == 3);
    const auto& cap = a.find(5, FilterFamily::Gaussian, OverlapMode::FullOverlap, "capacity");
    CHECK(cap.drops == 20);
    CHECK(cap.mean > 0.0);
    const auto& out = a.find(5, FilterFamily::Gaussian, OverlapMode::FullOverlap, "outage");
    CHECK(out.mean >= 0.0);
    CHECK(out.mean <= 1.0);
    CHECK_THROWS_AS(a.find(6, FilterFamily::Gaussian, OverlapMode::FullOverlap, "capacity"), ConfigurationError);

    const auto dir = temp_dir("outputs");
    write_outputs(a, dir);
    CHECK(slurp(dir + "/results.csv") == a.csv());
    CHECK(slurp(dir + "/summary.json").find(a.config_hash) != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("confidence half-widths shrink with the drop count")
{
    auto c = small_config();
    c.num_drops = 100;
    const double ci100 = run(c).find(5, FilterFamily::Gaussian, OverlapMode::FullOverlap, "capacity").ci95;
    c.num_drops = 400;
    const double ci400 = run(c).find(5, FilterFamily::Gaussian, OverlapMode::FullOverlap, "capacity").ci95;
    CHECK(ci400 / ci100 == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("pot runs need a q-table")
{
    auto c = small_config();
    c.modes = {OverlapMode::POT, OverlapMode::FullOverlap};
    c.aggressor_grid = {1, 2};
    c.num_drops = 10;
    c.training.episodes = 30;
    c.training.training_drops = 2;
    c.qtable_dir = temp_dir("qtables");
    CHECK_THROWS_AS(run(c), MissingArtifactError);

    RunOptions train;
    train.train_if_missing = true;
    const auto first = run(c, train);
    REQUIRE(first.artifacts.size() == 1);
    CHECK(first.artifacts[0].trained);
    CHECK(std::filesystem::exists(first.artifacts[0].path));
    const auto second = run(c);
    CHECK_FALSE(second.artifacts[0].trained);
    CHECK(second.artifacts[0].hash == first.artifacts[0].hash);
    CHECK(second.csv() == first.csv());

    c.aggressor_grid = {1, 2, 3};
    CHECK_THROWS_AS(run(c), MissingArtifactError);
    std::filesystem::remove_all(c.qtable_dir);
}

TEST_CASE("multipath and snr sweeps")
{
    auto c = small_config();
    c.experiment = ExperimentKind::CapacityVsSnr;
    c.channel = ChannelKind::EPA;
    c.snr_grid = {0.0, 20.0, std::numeric_limits<double>::infinity()};
    c.num_aggressors = 3;
    c.num_drops = 10;
    const auto r = run(c);
    const double low = r.find(0.0, FilterFamily::Gaussian, OverlapMode::FullOverlap, "capacity").mean;
    const double high = r.find(20.0, FilterFamily::Gaussian, OverlapMode::FullOverlap, "capacity").mean;
    const double inf = r.find(c.snr_grid[2], FilterFamily::Gaussian, OverlapMode::FullOverlap, "capacity").mean;
    CHECK(low < high);
    CHECK(high <= inf);
    CHECK(r.csv().find("\ninf,") != std::string::npos);
}

TEST_CASE("ambiguity surfaces")
{
    SurfaceGrid g;
    g.extent = 2.0;
    g.points = 21;
    const auto iso = export_ambiguity_surface(FilterFamily::Gaussian, 1.0, g);
    CHECK(iso.at_origin() == doctest::Approx(1.0).epsilon(1e-12));
    double asym = 0.0;
    for (std::size_t i = 0; i < iso.freqs.size(); ++i)
        for (std::size_t j = 0; j < iso.delays.size(); ++j)
            asym = std::max(asym, std::abs(iso.magnitude[i][j] - iso.magnitude[j][i]));
    CHECK(asym <= 1e-3);

    const auto squeezed = export_ambiguity_surface(FilterFamily::Gaussian, 0.5, g);
    const std::size_t c = 10, off = 13; // origin and +0.6
    CHECK(squeezed.magnitude[c][off] > iso.magnitude[c][off]);
    CHECK(squeezed.magnitude[off][c] < iso.magnitude[off][c]);

    for (auto f : {FilterFamily::RRC, FilterFamily::IOTA}) {
        const auto s = export_ambiguity_surface(f, f == FilterFamily::RRC ? 0.2 : 1.0, g);
        CHECK(s.at_origin() == doctest::Approx(1.0).epsilon(1e-12));
        for (const auto& row : s.magnitude)
            for (double m : row)
                CHECK(m <= 1.0 + 1e-9);
    }
    const auto text = iso.csv();
    CHECK(text.rfind("nu\\tau,-2,", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 22);

    g.points = 20;
    CHECK_THROWS_AS(export_ambiguity_surface(FilterFamily::Gaussian, 1.0, g), ParameterDomainError);

    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::AmbiguitySurface;
    cfg.filter_param = 1.0;
    cfg.filters = {FilterFamily::Gaussian};
    cfg.surface.points = 11;
    const auto r = run(cfg);
    REQUIRE(r.surfaces.size() == 1);
    const auto dir = temp_dir("surface");
    write_outputs(r, dir);
    CHECK(std::filesystem::exists(dir + "/surface_gaussian.csv"));
    std::filesystem::remove_all(dir);
}
