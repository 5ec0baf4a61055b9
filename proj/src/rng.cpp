#include "dynplan/rng.hpp"

#include <cmath>

namespace dynplan {

std::uint64_t Rng::below(std::uint64_t n) noexcept {
    if (n <= 1) {
        return 0;
    }
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            m = static_cast<unsigned __int128>((*this)()) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

int Rng::poisson(double lambda) noexcept {
    if (!(lambda > 0.0)) {
        return 0;
    }
    const double limit = std::exp(-lambda);
    int k = 0;
    double p = uniform();
    while (p > limit) {
        ++k;
        p *= uniform();
    }
    return k;
}

double Rng::normal() noexcept {
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

}  // namespace dynplan
