#include "oracle/closed_forms.hpp"

#include <cmath>
#include <numbers>

namespace oracle {

double gaussian_ambiguity_magnitude(double rho, double tau, double nu)
{
    const double pi = std::numbers::pi;
    return std::exp(-pi * rho * tau * tau / 2.0 - pi * nu * nu / (2.0 * rho));
}

std::complex<double> modulated_inner_product(const std::vector<double>& a, const std::vector<double>& b,
                                             long shift, double freq, int sample_rate)
{
    const long ca = static_cast<long>(a.size() / 2);
    const long cb = static_cast<long>(b.size() / 2);
    std::complex<double> acc = 0.0;
    for (long i = 0; i < static_cast<long>(b.size()); ++i) {
        // a evaluated at t_i - shift / sample_rate
        const long j = i - cb + ca - shift;
        if (j < 0 || j >= static_cast<long>(a.size()))
            continue;
        const double t = static_cast<double>(i - cb) / sample_rate;
        acc += a[j] * b[i] * std::polar(1.0, 2.0 * std::numbers::pi * freq * t);
    }
    return acc / static_cast<double>(sample_rate);
}

double shifted_inner_product(const std::vector<double>& a, const std::vector<double>& b, long shift,
                             int sample_rate)
{
    return modulated_inner_product(a, b, shift, 0.0, sample_rate).real();
}

double friis_gain_db(double distance_m, double carrier_hz)
{
    const double wavelength = 299792458.0 / carrier_hz;
    return 20.0 * std::log10(wavelength / (4.0 * std::numbers::pi * distance_m));
}

} // namespace oracle
