#include "potsim/error.hpp"
#include "potsim/experiments.hpp"

#include <cmath>
#include <cstdio>

namespace potsim {

AmbiguitySurface export_ambiguity_surface(FilterFamily filter, double dispersion, const SurfaceGrid& grid,
                                          int sample_rate)
{
    if (grid.points < 3 || grid.points % 2 == 0 || !(grid.extent > 0.0))
        throw ParameterDomainError("surface grid needs an odd point count of at least 3 and a positive extent");
    const auto pulse = make_filter(filter, dispersion, sample_rate);
    AmbiguitySurface s;
    s.filter = filter;
    s.dispersion = dispersion;
    const int half = grid.points / 2;
    for (int i = -half; i <= half; ++i) {
        const double v = grid.extent * i / half;
        s.delays.push_back(v);
        s.freqs.push_back(v);
    }
    s.magnitude.assign(s.freqs.size(), std::vector<double>(s.delays.size(), 0.0));
    const double peak = std::abs(DelayedProduct(pulse, pulse, 0.0).at(0.0));
    if (!(peak > 0.0))
        throw NumericalDegeneracyError("prototype filter has zero energy");
    for (std::size_t di = 0; di < s.delays.size(); ++di) {
        const DelayedProduct product(pulse, pulse, s.delays[di]);
        for (std::size_t fi = 0; fi < s.freqs.size(); ++fi)
            s.magnitude[fi][di] = product.empty() ? 0.0 : std::abs(product.at(s.freqs[fi])) / peak;
    }
    return s;
}

double AmbiguitySurface::at_origin() const
{
    return magnitude[freqs.size() / 2][delays.size() / 2];
}

std::string AmbiguitySurface::csv() const
{
    char buf[40];
    std::string out = "nu\\tau";
    for (double t : delays) {
        std::snprintf(buf, sizeof buf, ",%.10g", t);
        out += buf;
    }
    out += '\n';
    for (std::size_t fi = 0; fi < freqs.size(); ++fi) {
        std::snprintf(buf, sizeof buf, "%.10g", freqs[fi]);
        out += buf;
        for (double m : magnitude[fi]) {
            std::snprintf(buf, sizeof buf, ",%.10g", m);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

} // namespace potsim
