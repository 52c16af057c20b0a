// One PASS/FAIL line per acceptance criterion. Exit status is non-zero when
// any criterion fails.

#include "oracle/capacity_search.hpp"
#include "oracle/closed_forms.hpp"
#include "oracle/time_domain.hpp"
#include "potsim/experiments.hpp"
#include "potsim/interference.hpp"
#include "potsim/qlearning.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <sys/wait.h>

#ifndef POTSIM_CLI
#define POTSIM_CLI "potsim"
#endif

using namespace potsim;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr FilterFamily kFilters[] = {FilterFamily::Gaussian, FilterFamily::RRC, FilterFamily::IOTA};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string name(FilterFamily f)
{
    return std::string(to_string(f));
}

std::filesystem::path work_dir()
{
    static const auto dir = [] {
        auto p = std::filesystem::temp_directory_path() / "potsim_acceptance";
        std::filesystem::remove_all(p);
        std::filesystem::create_directories(p);
        return p;
    }();
    return dir;
}

ExperimentConfig base_config()
{
    ExperimentConfig c;
    c.num_drops = 200;
    c.filter_param = 0.2;
    c.qtable_dir = (work_dir() / "qtables").string();
    c.seed = 2024;
    return c;
}

ExperimentResult run_trained(const ExperimentConfig& c)
{
    RunOptions o;
    o.train_if_missing = true;
    return run(c, o);
}

double cap(const ExperimentResult& r, double x, FilterFamily f, OverlapMode m, const char* metric = "capacity")
{
    return r.find(x, f, m, metric).mean;
}

// Maximum |A| over nonzero lattice offsets with |dl|, |dn| <= reach.
double max_off_origin(const PrototypeFilter& p, double density, int reach)
{
    double worst = 0.0;
    for (int dl = -reach; dl <= reach; ++dl)
        for (int dn = -reach; dn <= reach; ++dn)
            if (dl != 0 || dn != 0)
                worst = std::max(worst, std::abs(ambiguity_normalized(p, p, dl, dn * density)));
    return worst;
}

Outcome criterion1()
{
    const auto g = make_filter(FilterFamily::Gaussian, 1.0, 16);
    double worst = 0.0;
    int points = 0;
    for (double tau : {-1.0, -0.5, 0.0, 0.5, 1.0})
        for (double nu : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
            const double got = std::abs(ambiguity_normalized(g, g, tau, nu));
            worst = std::max(worst, std::abs(got - oracle::gaussian_ambiguity_magnitude(1.0, tau, nu)));
            ++points;
        }
    return {worst <= 1e-4 && points == 25, fmt("%d points, max abs error %.3g (tol 1e-4)", points, worst)};
}

Outcome criterion2()
{
    const double rrc = max_off_origin(make_filter(FilterFamily::RRC, 0.2, 16), 1.2, 2);
    double iota = 0.0;
    for (double rho : {1.0, 0.2})
        iota = std::max(iota, max_off_origin(make_filter(FilterFamily::IOTA, rho, 16), 2.0, 2));
    const double iota_unit = max_off_origin(make_filter(FilterFamily::IOTA, 1.0, 16), 1.0, 2);
    return {rrc <= 1e-3 && iota <= 1e-3,
            fmt("RRC a=0.2 on tau0 x 1.2/tau0: %.3g; IOTA rho in {1, 0.2} on tau0 x 2/tau0: %.3g (tol 1e-3); "
                "IOTA on tau0 x 1/tau0 for reference: %.3g",
                rrc, iota, iota_unit)};
}

Outcome criterion3()
{
    const int bursts = 10000;
    double worst = 0.0;
    std::string where;
    for (auto family : kFilters) {
        const auto f = make_filter(family, 0.2, 16);
        const auto lat = LatticeConfig::from_bandwidth(200e3, 2, 2);
        oracle::TimeDomainSetup setup;
        setup.pulse = oracle::decimate(f.samples, 4);
        for (bool two_tap : {false, true}) {
            const std::vector<double> delays = two_tap ? std::vector<double>{0.0, lat.tau0 / 4} : std::vector<double>{0.0};
            const CouplingModel m(f, lat, 8, 4, 1, delays);
            const std::vector<int> delay_samples = two_tap ? std::vector<int>{0, 1} : std::vector<int>{0};
            auto taps = [&](cplx a, cplx b) { return two_tap ? std::vector<cplx>{a, b} : std::vector<cplx>{1.0}; };
            const oracle::TimeDomainPath v{1.0, taps({0.8, 0.3}, {-0.2, 0.45}), delay_samples, 0, 3};
            const oracle::TimeDomainPath a1{0.7, taps({0.5, -0.6}, {0.3, 0.1}), delay_samples, 1, 5};
            const oracle::TimeDomainPath a2{0.4, taps({-0.9, 0.2}, {0.1, -0.3}), delay_samples, 3, 0};
            const auto ref = oracle::simulate_energies(setup, v, {a1, a2}, bursts, 77);

            auto realization = [&](const oracle::TimeDomainPath& p) {
                ChannelRealization r;
                r.path_gain = p.path_gain;
                r.tap_gains = p.taps;
                r.tap_delays = delays;
                return r;
            };
            const ChannelSet ch{{{0, 0}, realization(v)}, {{1, 0}, realization(a1)}, {{2, 0}, realization(a2)}};
            auto link = [](int id, int fo, int timing) {
                Link l;
                l.id = id;
                l.fo_index = fo;
                l.timing_index = timing;
                return l;
            };
            const std::vector<Link> agg{link(1, 5, 1), link(2, 0, 3)};
            const auto p = decompose(link(0, 3, 0), agg, ch, m, 0.0);
            const double errs[] = {std::abs(p.e_signal / ref.signal - 1.0), std::abs(p.e_self / ref.self - 1.0),
                                   std::abs(p.e_cci / ref.cci - 1.0)};
            const char* labels[] = {"E_S", "E_SI", "E_OI"};
            for (int k = 0; k < 3; ++k)
                if (errs[k] > worst) {
                    worst = errs[k];
                    where = name(family) + (two_tap ? " 2-tap " : " awgn ") + labels[k];
                }
        }
    }
    return {worst <= 0.03, fmt("%d bursts, worst relative gap %.2f%% at %s (tol 3%%)", bursts, 100.0 * worst,
                               where.c_str())};
}

Outcome criterion4()
{
    const CouplingModel m(make_filter(FilterFamily::Gaussian, 0.2, 16), LatticeConfig::from_bandwidth(200e3, 12, 12),
                          8, 16, 6);
    Hyperparams hp;
    std::string detail;
    bool pass = true;
    for (int s : {1, 2}) {
        const std::vector<NetworkScenario> drops{generate_victim_scenario(s, ScenarioOptions{}, 150.0, 900 + s)};
        const auto best = oracle::exhaustive_search(m, drops, s, 10.0);
        int hits = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto sub = train_count(CapacityObjective(m, drops, 10.0), hp, seed);
            if (oracle::brute_capacity(m, drops, sub.greedy_assignment, 10.0) >= best.value - 1e-9 * std::abs(best.value))
                ++hits;
        }
        pass = pass && hits >= 95;
        detail += fmt("S=%d: %d/100 optimal; ", s, hits);
    }
    return {pass, detail + "need >= 95"};
}

Outcome criterion5()
{
    auto c = base_config();
    c.experiment = ExperimentKind::CapacityVsSnr;
    c.filters = {FilterFamily::Gaussian};
    c.num_aggressors = 10;
    c.snr_grid = {30.0, kInf};
    const auto r = run_trained(c);
    const double high = cap(r, 30.0, FilterFamily::Gaussian, OverlapMode::POT) /
                        cap(r, 30.0, FilterFamily::Gaussian, OverlapMode::FullOverlap);
    const double clean = cap(r, kInf, FilterFamily::Gaussian, OverlapMode::POT) /
                         cap(r, kInf, FilterFamily::Gaussian, OverlapMode::FullOverlap);
    return {high >= 1.3 && clean >= 1.5 && clean <= 2.1,
            fmt("POT/full at 30 dB %.3f (need >= 1.3), noiseless %.3f (need [1.5, 2.1])", high, clean)};
}

Outcome criterion6()
{
    auto c = base_config();
    c.experiment = ExperimentKind::CapacityVsSnr;
    c.filters = {FilterFamily::Gaussian};
    c.num_aggressors = 10;
    c.snr_grid = {10.0};
    const auto awgn = run_trained(c);
    c.channel = ChannelKind::EPA;
    const auto epa = run_trained(c);
    auto drop = [&](OverlapMode m) {
        const double a = cap(awgn, 10.0, FilterFamily::Gaussian, m);
        return (a - cap(epa, 10.0, FilterFamily::Gaussian, m)) / a;
    };
    const double full = drop(OverlapMode::FullOverlap);
    const double pot = drop(OverlapMode::POT);
    return {full > pot, fmt("relative capacity loss AWGN->EPA: full overlap %.2f%%, POT %.2f%% (need full > POT)",
                            100.0 * full, 100.0 * pot)};
}

ExperimentResult aggressor_sweep()
{
    static const ExperimentResult r = [] {
        auto c = base_config();
        c.experiment = ExperimentKind::CapacityVsAggressors;
        c.aggressor_grid = {1, 2, 5, 10, 20, 50};
        c.snr_db = 10.0;
        return run_trained(c);
    }();
    return r;
}

Outcome criterion7()
{
    const auto r = aggressor_sweep();
    bool me_order = true, outage_order = true;
    std::string detail;
    for (int s : {2, 5, 10, 20}) {
        const double g = cap(r, s, FilterFamily::Gaussian, OverlapMode::POT, "me");
        const double rr = cap(r, s, FilterFamily::RRC, OverlapMode::POT, "me");
        const double io = cap(r, s, FilterFamily::IOTA, OverlapMode::POT, "me");
        const double og = cap(r, s, FilterFamily::Gaussian, OverlapMode::POT, "outage");
        const double orr = cap(r, s, FilterFamily::RRC, OverlapMode::POT, "outage");
        const double oi = cap(r, s, FilterFamily::IOTA, OverlapMode::POT, "outage");
        me_order = me_order && g >= rr && g >= io;
        outage_order = outage_order && og <= orr && og <= oi;
        detail += fmt("S=%d ME g/r/i %.3f/%.3f/%.3f outage %.3f/%.3f/%.3f; ", s, g, rr, io, og, orr, oi);
    }
    double spread = 0.0;
    for (int s : {1, 2, 5, 10, 20, 50})
        for (const char* metric : {"capacity", "me"}) {
            double lo = kInf, hi = -kInf;
            for (auto f : kFilters) {
                const double v = cap(r, s, f, OverlapMode::FullOverlap, metric);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            spread = std::max(spread, hi > 0.0 ? (hi - lo) / hi : 0.0);
        }
    detail += fmt("ME order %s, outage order %s, full-overlap filter spread %.1f%% (tol 1%%)", me_order ? "ok" : "broken",
                  outage_order ? "ok" : "broken", 100.0 * spread);
    return {me_order && outage_order && spread <= 0.01, detail};
}

Outcome criterion8()
{
    const auto r = aggressor_sweep();
    const int grid[] = {1, 2, 5, 10, 20, 50};
    bool monotone = true;
    std::string broken;
    for (auto f : kFilters)
        for (auto m : {OverlapMode::POT, OverlapMode::FullOverlap})
            for (int i = 1; i < 6; ++i) {
                const bool cap_ok = cap(r, grid[i], f, m) <= cap(r, grid[i - 1], f, m);
                const bool out_ok = cap(r, grid[i], f, m, "outage") >= cap(r, grid[i - 1], f, m, "outage");
                if (!cap_ok || !out_ok) {
                    monotone = false;
                    broken += fmt(" %s/%s at S=%d", name(f).c_str(), std::string(to_string(m)).c_str(), grid[i]);
                }
            }
    double gap = 0.0;
    std::string gaps;
    for (auto f : kFilters) {
        const double pot = cap(r, 50, f, OverlapMode::POT);
        const double full = cap(r, 50, f, OverlapMode::FullOverlap);
        const double g = std::abs(pot - full) / full;
        gap = std::max(gap, g);
        gaps += fmt(" %s %.1f%%", name(f).c_str(), 100.0 * g);
    }
    return {monotone && gap <= 0.10, fmt("monotone %s%s; POT vs full gap at S=50:%s (tol 10%%)",
                                         monotone ? "yes" : "no", broken.c_str(), gaps.c_str())};
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Outcome criterion9()
{
    const auto dir = work_dir() / "cli";
    std::filesystem::create_directories(dir);
    {
        std::ofstream cfg(dir / "config.json");
        cfg << R"({"experiment": "capacity_vs_aggressors", "aggressor_grid": [1, 3, 6], "num_drops": 40, )"
            << R"("training": {"episodes": 100}, "qtable_dir": ")" << (dir / "qtables").string() << "\"}\n";
    }
    int codes[2];
    for (int i = 0; i < 2; ++i) {
        const std::string cmd = std::string("\"") + POTSIM_CLI + "\" run --config \"" + (dir / "config.json").string() +
                                "\" --out \"" + (dir / ("out" + std::to_string(i))).string() +
                                "\" --seed 31 --train-if-missing > /dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        codes[i] = WEXITSTATUS(status);
    }
    const auto a = slurp(dir / "out0" / "results.csv");
    const auto b = slurp(dir / "out1" / "results.csv");
    const bool ok_codes = (codes[0] == 0 || codes[0] == 4) && codes[0] == codes[1];
    return {ok_codes && !a.empty() && a == b,
            fmt("exit codes %d/%d, csv %zu bytes, identical %s", codes[0], codes[1], a.size(), a == b ? "yes" : "no")};
}

} // namespace

int main()
{
    const std::pair<double, std::function<Outcome()>> criteria[] = {
        {5.0, criterion1},   {10.0, criterion2}, {120.0, criterion3}, {300.0, criterion4}, {600.0, criterion5},
        {kInf, criterion6}, {kInf, criterion7}, {kInf, criterion8},  {kInf, criterion9},
    };
    int failed = 0;
    for (std::size_t i = 0; i < std::size(criteria); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > criteria[i].first) {
            o.pass = false;
            o.detail += fmt("; runtime %.1f s over the %.0f s budget", secs, criteria[i].first);
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << o.detail
                  << fmt(" [%.1f s]", secs) << std::endl;
        if (!o.pass)
            ++failed;
    }
    std::filesystem::remove_all(work_dir());
    std::cout << (failed == 0 ? "all criteria passed" : fmt("%d criteria failed", failed)) << std::endl;
    return failed == 0 ? 0 : 1;
}
