#pragma once

#include "potsim/channel.hpp"
#include "potsim/network.hpp"
#include "potsim/qlearning.hpp"
#include "potsim/waveform.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace potsim {

enum class ExperimentKind {
    AmbiguitySurface,
    CapacityVsSnr,
    CapacityVsAggressors,
    MeVsAggressors,
    OutageVsAggressors,
};

enum class OverlapMode { POT, FullOverlap };

std::string_view to_string(ExperimentKind k);
std::string_view to_string(OverlapMode m);
ExperimentKind parse_experiment_kind(std::string_view name);
OverlapMode parse_overlap_mode(std::string_view name);

struct SurfaceGrid {
    double extent = 3.0; // half-width in units of tau0 and nu0
    int points = 61;     // per axis, odd so the origin is on the grid
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::CapacityVsAggressors;
    std::vector<FilterFamily> filters{FilterFamily::Gaussian, FilterFamily::RRC, FilterFamily::IOTA};
    double filter_param = 0.2;
    int sample_rate = 16;
    ChannelKind channel = ChannelKind::AWGN;
    // Replaces the standard EPA taps when non-empty.
    std::vector<double> epa_delays_ns;
    std::vector<double> epa_powers_db;
    int num_drops = 200;
    std::vector<double> snr_grid{0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
    std::vector<int> aggressor_grid{1, 2, 5, 10, 20};
    double snr_db = 10.0;     // fixed SNR for aggressor sweeps
    int num_aggressors = 10;  // fixed count for SNR sweeps
    int subcarriers = 12;     // N
    int symbols = 12;         // K
    double density = 1.0;
    double carrier_hz = 800e6;
    double bandwidth_hz = 200e3;
    double outage_threshold_db = -6.0;
    std::uint64_t seed = 1;
    std::vector<OverlapMode> modes{OverlapMode::POT, OverlapMode::FullOverlap};
    int fo_quantum = 8;
    int timing_grid = 16;
    double area_side = 1000.0;
    double max_link_range = 100.0;
    double interference_radius = 300.0;
    CountingMode counting = CountingMode::Ideal;
    std::string qtable_dir = "qtables";
    Hyperparams training;
    double training_snr_db = 10.0;
    std::uint64_t training_seed = 7;
    SurfaceGrid surface;
    int threads = 0;

    // Throws ConfigurationError.
    void validate() const;
    LatticeConfig lattice() const;
    ChannelModel channel_model() const;
    int reference_subcarrier() const { return subcarriers / 2; }
    // Largest aggressor count the run needs a policy for.
    int max_aggressors() const;

    std::string to_json() const;
    static ExperimentConfig from_json(const std::string& text);
    static ExperimentConfig load(const std::string& path);
};

// FNV-1a over the canonical JSON form, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);
std::string config_hash(const ExperimentConfig& config);

struct AmbiguitySurface {
    FilterFamily filter = FilterFamily::Gaussian;
    double dispersion = 1.0;
    std::vector<double> delays; // tau0
    std::vector<double> freqs;  // nu0
    std::vector<std::vector<double>> magnitude; // [freq][delay], peak normalized to 1

    double at_origin() const;
    std::string csv() const;
};

struct ResultRow {
    double grid_value = 0.0;
    FilterFamily filter = FilterFamily::Gaussian;
    OverlapMode mode = OverlapMode::POT;
    std::string metric;
    double mean = 0.0;
    double ci95 = 0.0;
    int drops = 0;
};

struct ArtifactInfo {
    FilterFamily filter = FilterFamily::Gaussian;
    std::string path;
    std::string hash;
    bool trained = false;
    bool converged = true;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::string config_hash;
    std::vector<ResultRow> rows;
    std::vector<ArtifactInfo> artifacts;
    std::vector<AmbiguitySurface> surfaces;
    std::vector<std::string> warnings;
    bool converged = true;

    // Row lookup; throws ConfigurationError when absent.
    const ResultRow& find(double grid_value, FilterFamily filter, OverlapMode mode, const std::string& metric) const;
    std::string csv() const;
    std::string summary_json() const;
};

struct RunOptions {
    bool train_if_missing = false;
};

// Mean and 95% half-width (1.96 s / sqrt(n)) of a sample.
std::pair<double, double> mean_ci95(const std::vector<double>& values);

// Fingerprint of everything a trained table depends on, and its file name.
std::string training_fingerprint(const ExperimentConfig& config, FilterFamily filter);
std::string qtable_path(const ExperimentConfig& config, FilterFamily filter);

// Loads the Q-table for `filter`, training and saving it when allowed.
QTable obtain_qtable(const ExperimentConfig& config, FilterFamily filter, bool train_if_missing,
                     ArtifactInfo* info = nullptr);

ExperimentResult run(const ExperimentConfig& config, const RunOptions& options = {});
// Writes results.csv and summary.json under `dir`, plus one surface CSV per
// filter for ambiguity_surface runs.
void write_outputs(const ExperimentResult& result, const std::string& dir);

AmbiguitySurface export_ambiguity_surface(FilterFamily filter, double dispersion, const SurfaceGrid& grid = {},
                                          int sample_rate = 16);

} // namespace potsim
