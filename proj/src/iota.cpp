#include "potsim/error.hpp"
#include "potsim/waveform.hpp"

#include <cmath>
#include <numbers>

namespace potsim {

namespace {

constexpr double pi = std::numbers::pi;

// Frequency period of the first orthogonalization step and time period of
// the second, in units of 1/tau0 and tau0. The resulting pulse is
// orthogonal to its shifts by tau0 in time and 2/tau0 in frequency.
constexpr double freq_period = 1.0;
constexpr double time_period = 0.5;

// Gaussian spectrum divided by the root of its periodized energy. Evaluated
// through ratios so that the far tails do not underflow to 0/0.
double orthogonalized_spectrum(double rho, double f)
{
    const long centre = std::lround(f / freq_period);
    double sum = 0.0;
    for (long k = centre - 12; k <= centre + 12; ++k) {
        const double shifted = f - k * freq_period;
        const double e = -2.0 * pi / rho * (shifted * shifted - f * f);
        if (e > -700.0)
            sum += std::exp(e);
    }
    return 1.0 / std::sqrt(freq_period * sum);
}

} // namespace

PrototypeFilter make_iota(double dispersion, int sample_rate, double span)
{
    if (!(dispersion > 0.0) || !std::isfinite(dispersion))
        throw ParameterDomainError("iota dispersion must be positive");
    if (sample_rate < 8)
        throw ParameterDomainError("sample_rate must be at least 8 samples per symbol");
    if (sample_rate % 2 != 0)
        throw ParameterDomainError("iota construction needs an even sample_rate");
    if (!(span >= 4.0))
        throw ParameterDomainError("span too short: " + std::to_string(span));
    const double len = span * sample_rate;
    if (std::abs(len - std::round(len)) > 1e-9)
        throw ParameterDomainError("span * sample_rate must be an integer");
    const auto out_len = static_cast<std::size_t>(std::round(len));

    // Band edge where the orthogonalized spectrum has decayed below 1e-17.
    const double peak = orthogonalized_spectrum(dispersion, 0.0);
    double f_max = 0.5;
    while (orthogonalized_spectrum(dispersion, f_max) > 1e-17 * peak && f_max < 1e3)
        f_max += 0.125;

    // Inverse transform on a window twice the output span.
    const std::size_t wide_len = 2 * out_len;
    const std::size_t wide_centre = wide_len / 2;
    const double df = 1.0 / (8.0 * span);
    const auto nf = static_cast<std::size_t>(std::ceil(f_max / df));
    std::vector<double> spectrum(nf + 1);
    for (std::size_t j = 0; j <= nf; ++j)
        spectrum[j] = orthogonalized_spectrum(dispersion, j * df);

    std::vector<double> x(wide_len, 0.0);
    for (std::size_t i = 0; i < wide_len; ++i) {
        const double t = (static_cast<double>(i) - static_cast<double>(wide_centre)) / sample_rate;
        double acc = 0.5 * spectrum[0];
        for (std::size_t j = 1; j < nf; ++j)
            acc += spectrum[j] * std::cos(2.0 * pi * j * df * t);
        acc += 0.5 * spectrum[nf] * std::cos(2.0 * pi * nf * df * t);
        x[i] = 2.0 * acc * df;
    }

    // Time-domain orthogonalization with period time_period.
    const std::size_t step = static_cast<std::size_t>(sample_rate * time_period);
    const std::size_t first = wide_centre - out_len / 2;
    PrototypeFilter f;
    f.family = FilterFamily::IOTA;
    f.dispersion = dispersion;
    f.sample_rate = sample_rate;
    f.span = span;
    f.samples.resize(out_len);
    for (std::size_t i = 0; i < out_len; ++i) {
        const std::size_t w = first + i;
        double periodized = 0.0;
        for (std::size_t s = w % step; s < wide_len; s += step)
            periodized += x[s] * x[s];
        const double divisor = std::sqrt(time_period * periodized);
        if (divisor < 1e-12)
            throw NumericalDegeneracyError("iota orthogonalization divisor vanished");
        f.samples[i] = x[w] / divisor;
    }
    double e = 0.0;
    for (double v : f.samples)
        e += v * v;
    e /= sample_rate;
    for (double& v : f.samples)
        v /= std::sqrt(e);
    f.truncation_gain = e;
    return f;
}

} // namespace potsim
