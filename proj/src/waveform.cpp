#include "potsim/waveform.hpp"

#include "potsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace potsim {

namespace {

constexpr double pi = std::numbers::pi;

std::size_t checked_length(int sample_rate, double span)
{
    const double len = span * sample_rate;
    const double rounded = std::round(len);
    if (std::abs(len - rounded) > 1e-9)
        throw ParameterDomainError("span * sample_rate must be an integer");
    return static_cast<std::size_t>(rounded);
}

void check_common(int sample_rate, double span, double min_span)
{
    if (sample_rate < 8)
        throw ParameterDomainError("sample_rate must be at least 8 samples per symbol");
    if (!(span >= min_span))
        throw ParameterDomainError("span too short: " + std::to_string(span));
}

double normalize(std::vector<double>& x, int sample_rate)
{
    double e = 0.0;
    for (double v : x)
        e += v * v;
    e /= sample_rate;
    if (!(e > 0.0))
        throw NumericalDegeneracyError("pulse has zero energy after truncation");
    const double s = 1.0 / std::sqrt(e);
    for (double& v : x)
        v *= s;
    return e;
}

} // namespace

std::string_view to_string(FilterFamily f)
{
    switch (f) {
    case FilterFamily::Gaussian:
        return "gaussian";
    case FilterFamily::RRC:
        return "rrc";
    case FilterFamily::IOTA:
        return "iota";
    }
    return "unknown";
}

FilterFamily parse_filter_family(std::string_view name)
{
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "gaussian")
        return FilterFamily::Gaussian;
    if (s == "rrc")
        return FilterFamily::RRC;
    if (s == "iota")
        return FilterFamily::IOTA;
    throw ConfigurationError("unknown filter family '" + std::string(name) + "'");
}

double PrototypeFilter::energy() const
{
    double e = 0.0;
    for (double v : samples)
        e += v * v;
    return e / sample_rate;
}

double default_span(FilterFamily family, double dispersion)
{
    if (family == FilterFamily::RRC)
        return 12.0;
    if (dispersion >= 1.0)
        return 8.0;
    return 2.0 * std::ceil(4.0 / std::sqrt(dispersion));
}

double gaussian_pulse(double rho, double t)
{
    return std::pow(2.0 * rho, 0.25) * std::exp(-pi * rho * t * t);
}

double rrc_pulse(double alpha, double t)
{
    if (std::abs(t) < 1e-12)
        return 1.0 + alpha * (4.0 / pi - 1.0);
    if (std::abs(std::abs(t) - 1.0 / (4.0 * alpha)) < 1e-12) {
        const double x = pi / (4.0 * alpha);
        return alpha / std::numbers::sqrt2 *
               ((1.0 + 2.0 / pi) * std::sin(x) + (1.0 - 2.0 / pi) * std::cos(x));
    }
    const double num = std::sin(pi * t * (1.0 - alpha)) + 4.0 * alpha * t * std::cos(pi * t * (1.0 + alpha));
    const double den = pi * t * (1.0 - (4.0 * alpha * t) * (4.0 * alpha * t));
    return num / den;
}

PrototypeFilter make_gaussian(double dispersion, int sample_rate, double span)
{
    if (!(dispersion > 0.0) || !std::isfinite(dispersion))
        throw ParameterDomainError("gaussian dispersion must be positive");
    check_common(sample_rate, span, 4.0);
    PrototypeFilter f;
    f.family = FilterFamily::Gaussian;
    f.dispersion = dispersion;
    f.sample_rate = sample_rate;
    f.span = span;
    f.samples.resize(checked_length(sample_rate, span));
    for (std::size_t i = 0; i < f.samples.size(); ++i)
        f.samples[i] = gaussian_pulse(dispersion, f.time_of(i));
    f.truncation_gain = normalize(f.samples, sample_rate);
    return f;
}

PrototypeFilter make_rrc(double roll_off, int sample_rate, double span)
{
    if (!(roll_off > 0.0 && roll_off <= 1.0))
        throw ParameterDomainError("rrc roll-off must lie in (0, 1]");
    check_common(sample_rate, span, 8.0);
    PrototypeFilter f;
    f.family = FilterFamily::RRC;
    f.dispersion = roll_off;
    f.sample_rate = sample_rate;
    f.span = span;
    f.samples.resize(checked_length(sample_rate, span));
    for (std::size_t i = 0; i < f.samples.size(); ++i)
        f.samples[i] = rrc_pulse(roll_off, f.time_of(i));
    f.truncation_gain = normalize(f.samples, sample_rate);
    return f;
}

PrototypeFilter make_filter(FilterFamily family, double dispersion, int sample_rate, double span)
{
    switch (family) {
    case FilterFamily::Gaussian:
        return make_gaussian(dispersion, sample_rate, span);
    case FilterFamily::RRC:
        return make_rrc(dispersion, sample_rate, span);
    case FilterFamily::IOTA:
        return make_iota(dispersion, sample_rate, span);
    }
    throw ConfigurationError("unknown filter family");
}

PrototypeFilter make_filter(FilterFamily family, double dispersion, int sample_rate)
{
    if (family != FilterFamily::RRC && !(dispersion > 0.0))
        throw ParameterDomainError("dispersion must be positive");
    return make_filter(family, dispersion, sample_rate, default_span(family, dispersion));
}

void LatticeConfig::validate() const
{
    if (!(tau0 > 0.0) || !(nu0 > 0.0))
        throw ParameterDomainError("lattice spacings must be positive");
    if (num_subcarriers < 1 || num_symbols < 1)
        throw ParameterDomainError("lattice needs at least one subcarrier and one symbol");
}

void LatticeConfig::validate(double channel_bandwidth_hz) const
{
    validate();
    if (std::abs(bandwidth() - channel_bandwidth_hz) > 1.0)
        throw ConfigurationError("N * nu0 does not match the channel bandwidth");
}

LatticeConfig LatticeConfig::from_bandwidth(double bandwidth_hz, int n, int k, double density)
{
    if (!(bandwidth_hz > 0.0) || n < 1 || k < 1 || !(density > 0.0))
        throw ParameterDomainError("invalid lattice parameters");
    LatticeConfig l;
    l.num_subcarriers = n;
    l.num_symbols = k;
    l.nu0 = bandwidth_hz / n;
    l.tau0 = density / l.nu0;
    return l;
}

} // namespace potsim
