#include "oracle/time_domain.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace oracle {

std::vector<double> decimate(const std::vector<double>& samples, int factor)
{
    const long centre = static_cast<long>(samples.size() / 2);
    std::vector<double> out;
    long first = centre % factor;
    for (long i = first; i < static_cast<long>(samples.size()); i += factor)
        out.push_back(samples[i]);
    return out;
}

namespace {

using cd = std::complex<double>;

// Adds symbol x * p(t - offset) * exp(j 2 pi f t) delayed through the path.
void add_symbol(std::vector<cd>& wave, long origin, const TimeDomainSetup& s, const TimeDomainPath& path, cd x,
                long offset_samples, double freq)
{
    const long pc = static_cast<long>(s.pulse.size() / 2);
    const double amp = std::sqrt(path.path_gain);
    for (std::size_t k = 0; k < path.taps.size(); ++k) {
        const long delay = path.tap_delay_samples[k];
        for (long i = 0; i < static_cast<long>(s.pulse.size()); ++i) {
            // pulse sample i sits at transmit time (i - pc + offset); the
            // tap shifts it by `delay`.
            const long tx_sample = i - pc + offset_samples;
            const long rx_sample = tx_sample + delay;
            const long w = rx_sample + origin;
            if (w < 0 || w >= static_cast<long>(wave.size()))
                continue;
            const double t_tx = static_cast<double>(tx_sample) / s.rate;
            wave[w] += amp * path.taps[k] * x * s.pulse[i] * std::polar(1.0, 2.0 * std::numbers::pi * freq * t_tx);
        }
    }
}

cd demodulate(const std::vector<cd>& wave, long origin, const TimeDomainSetup& s, double freq)
{
    const long pc = static_cast<long>(s.pulse.size() / 2);
    cd acc = 0.0;
    for (long i = 0; i < static_cast<long>(s.pulse.size()); ++i) {
        const long sample = i - pc;
        const long w = sample + origin;
        if (w < 0 || w >= static_cast<long>(wave.size()))
            continue;
        const double t = static_cast<double>(sample) / s.rate;
        acc += wave[w] * s.pulse[i] * std::polar(1.0, -2.0 * std::numbers::pi * freq * t);
    }
    return acc / static_cast<double>(s.rate);
}

} // namespace

EmpiricalEnergies simulate_energies(const TimeDomainSetup& s, const TimeDomainPath& victim,
                                    const std::vector<TimeDomainPath>& aggressors, int bursts, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    const double h = 1.0 / std::sqrt(2.0);
    auto qpsk = [&] {
        const auto b = gen();
        return cd((b & 1) ? h : -h, (b & 2) ? h : -h);
    };
    const long pulse_len = static_cast<long>(s.pulse.size());
    const long reach = s.num_symbols - 1;
    long max_delay = 0;
    for (int d : victim.tap_delay_samples)
        max_delay = std::max<long>(max_delay, d);
    for (const auto& a : aggressors)
        for (int d : a.tap_delay_samples)
            max_delay = std::max<long>(max_delay, d + std::abs(a.timing_samples));
    const long origin = pulse_len + reach * s.rate + max_delay;
    const std::size_t len = static_cast<std::size_t>(2 * origin + 1);

    auto freq_of = [&](int n, int fo) { return (n + static_cast<double>(fo) / s.fo_quantum) * s.density; };
    const double demod_freq = freq_of(s.reference_subcarrier, victim.fo_index);

    EmpiricalEnergies e;
    std::vector<cd> wave(len);
    {
        std::fill(wave.begin(), wave.end(), cd{});
        add_symbol(wave, origin, s, victim, qpsk(), 0, freq_of(s.reference_subcarrier, victim.fo_index));
        e.signal = std::norm(demodulate(wave, origin, s, demod_freq));
    }
    for (int b = 0; b < bursts; ++b) {
        std::fill(wave.begin(), wave.end(), cd{});
        for (long l = -reach; l <= reach; ++l)
            for (int n = 0; n < s.num_subcarriers; ++n)
                if (l != 0 || n != s.reference_subcarrier)
                    add_symbol(wave, origin, s, victim, qpsk(), l * s.rate, freq_of(n, victim.fo_index));
        e.self += std::norm(demodulate(wave, origin, s, demod_freq));

        std::fill(wave.begin(), wave.end(), cd{});
        for (const auto& a : aggressors)
            for (long l = -reach; l <= reach; ++l)
                for (int n = 0; n < s.num_subcarriers; ++n)
                    add_symbol(wave, origin, s, a, qpsk(), l * s.rate + a.timing_samples, freq_of(n, a.fo_index));
        e.cci += std::norm(demodulate(wave, origin, s, demod_freq));
    }
    e.self /= bursts;
    e.cci /= bursts;
    return e;
}

} // namespace oracle
