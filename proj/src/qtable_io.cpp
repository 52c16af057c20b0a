#include "potsim/error.hpp"
#include "potsim/qlearning.hpp"

#include <cstdio>
#include <algorithm>
#include <fstream>
#include <sstream>

namespace potsim {

namespace {

constexpr const char* kMagic = "potsim-qtable";
constexpr int kVersion = 1;

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T>
T read_field(std::istringstream& in, const std::string& name)
{
    std::string tag;
    T value{};
    if (!(in >> tag) || tag != name || !(in >> value))
        throw ConfigurationError("Q-table: expected field '" + name + "'");
    return value;
}

} // namespace

std::string QTable::serialize() const
{
    std::ostringstream out;
    const auto& hp = hyperparams;
    out << kMagic << ' ' << kVersion << '\n';
    out << "seed " << seed << '\n';
    out << "filter " << to_string(meta.filter) << '\n';
    out << "dispersion " << fmt(meta.dispersion) << '\n';
    out << "fo_quantum " << meta.fo_quantum << '\n';
    out << "timing_grid " << meta.timing_grid << '\n';
    out << "training_snr_db " << fmt(meta.training_snr_db) << '\n';
    out << "fingerprint " << (meta.fingerprint.empty() ? "-" : meta.fingerprint) << '\n';
    out << "beta " << fmt(hp.beta) << '\n';
    out << "gamma " << fmt(hp.gamma) << '\n';
    out << "epsilon_start " << fmt(hp.epsilon_start) << '\n';
    out << "epsilon_end " << fmt(hp.epsilon_end) << '\n';
    out << "lambda1 " << fmt(hp.lambda1) << '\n';
    out << "episodes " << hp.episodes << '\n';
    out << "steps_per_episode " << hp.steps_per_episode << '\n';
    out << "training_drops " << hp.training_drops << '\n';
    out << "tolerance " << fmt(hp.tolerance) << '\n';
    out << "counts " << per_count.size() << '\n';
    for (const auto& [count, sub] : per_count) {
        out << "count " << count << ' ' << sub.fo_quantum() << ' ' << (sub.converged ? 1 : 0) << ' '
            << sub.episodes_run << ' ' << fmt(sub.last_delta) << '\n';
        out << "greedy";
        for (int fo : sub.greedy_assignment)
            out << ' ' << fo;
        out << '\n';
        const auto states = sub.states();
        out << "rows " << states.size() << '\n';
        for (const auto& s : states) {
            const auto& row = sub.rows_.at(sub.key(s));
            for (int fo : s)
                out << fo << ' ';
            out << row.size();
            auto sorted = row;
            std::sort(sorted.begin(), sorted.end());
            for (const auto& [a, v] : sorted)
                out << ' ' << a << ' ' << fmt(v);
            out << '\n';
        }
    }
    return out.str();
}

QTable QTable::deserialize(const std::string& text)
{
    std::istringstream in(text);
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != kMagic)
        throw ConfigurationError("not a Q-table file");
    if (version != kVersion)
        throw ConfigurationError("unsupported Q-table version " + std::to_string(version));
    QTable t;
    auto& hp = t.hyperparams;
    t.seed = read_field<std::uint64_t>(in, "seed");
    t.meta.filter = parse_filter_family(read_field<std::string>(in, "filter"));
    t.meta.dispersion = read_field<double>(in, "dispersion");
    t.meta.fo_quantum = read_field<int>(in, "fo_quantum");
    t.meta.timing_grid = read_field<int>(in, "timing_grid");
    t.meta.training_snr_db = read_field<double>(in, "training_snr_db");
    t.meta.fingerprint = read_field<std::string>(in, "fingerprint");
    if (t.meta.fingerprint == "-")
        t.meta.fingerprint.clear();
    hp.beta = read_field<double>(in, "beta");
    hp.gamma = read_field<double>(in, "gamma");
    hp.epsilon_start = read_field<double>(in, "epsilon_start");
    hp.epsilon_end = read_field<double>(in, "epsilon_end");
    hp.lambda1 = read_field<double>(in, "lambda1");
    hp.episodes = read_field<int>(in, "episodes");
    hp.steps_per_episode = read_field<int>(in, "steps_per_episode");
    hp.training_drops = read_field<int>(in, "training_drops");
    hp.tolerance = read_field<double>(in, "tolerance");
    const auto counts = read_field<std::size_t>(in, "counts");
    for (std::size_t c = 0; c < counts; ++c) {
        const int count = read_field<int>(in, "count");
        int q = 0, converged = 0;
        QSubTable sub;
        if (!(in >> q >> converged >> sub.episodes_run >> sub.last_delta))
            throw ConfigurationError("Q-table: malformed count header");
        if (count < 1 || q < 2 || q > 65535)
            throw ConfigurationError("Q-table: invalid count header");
        sub.aggressors_ = count;
        sub.fo_quantum_ = q;
        sub.converged = converged != 0;
        std::string tag;
        if (!(in >> tag) || tag != "greedy")
            throw ConfigurationError("Q-table: expected greedy assignment");
        sub.greedy_assignment.resize(count);
        for (auto& fo : sub.greedy_assignment)
            if (!(in >> fo) || fo < 0 || fo >= q)
                throw ConfigurationError("Q-table: malformed greedy assignment");
        const auto rows = read_field<std::size_t>(in, "rows");
        for (std::size_t r = 0; r < rows; ++r) {
            FoState s(count);
            for (auto& fo : s)
                if (!(in >> fo))
                    throw ConfigurationError("Q-table: malformed row");
            std::size_t n = 0;
            if (!(in >> n))
                throw ConfigurationError("Q-table: malformed row");
            for (std::size_t i = 0; i < n; ++i) {
                int a = 0;
                double v = 0.0;
                if (!(in >> a >> v))
                    throw ConfigurationError("Q-table: malformed row entry");
                try {
                    sub.set(s, a, v);
                } catch (const Error& e) {
                    throw ConfigurationError(std::string("Q-table: ") + e.what());
                }
            }
        }
        t.per_count.emplace(count, std::move(sub));
    }
    return t;
}

void QTable::save(const std::string& path) const
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write Q-table to " + path);
    out << serialize();
    if (!out)
        throw Error("failed writing Q-table to " + path);
}

QTable QTable::load(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw MissingArtifactError("Q-table not found: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize(buf.str());
}

} // namespace potsim
