#include "aoifbl/fbl_math.hpp"

#include <cmath>
#include <numbers>

namespace aoifbl {

double gaussian_q(double x) {
    // Q(x) = erfc(x / sqrt(2)) / 2; erfc keeps full relative accuracy in the
    // far tail where 1 - Phi(x) would underflow to rounding noise.
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

double shannon_capacity(const ChannelSpec& spec) {
    spec.validate();
    return std::log2(1.0 + spec.snr_linear);
}

double channel_dispersion(const ChannelSpec& spec) {
    spec.validate();
    const double g = 1.0 + spec.snr_linear;
    return 1.0 - 1.0 / (g * g);
}

double packet_error_rate(const ChannelSpec& spec, int n) {
    if (n < 1)
        throw std::invalid_argument("packet_error_rate: blocklength must be >= 1");
    const double c = shannon_capacity(spec);
    const double v = channel_dispersion(spec);
    const double d = static_cast<double>(spec.payload_bits);
    const double arg = std::sqrt(n / v) * (c - d / n) * std::numbers::ln2;
    return gaussian_q(arg);
}

int min_blocklength(const ChannelSpec& spec, double eps_max, int hard_cap) {
    spec.validate();
    if (!(eps_max > 0.0 && eps_max < 0.5))
        throw std::invalid_argument("min_blocklength: eps_max must be in (0, 0.5)");
    if (hard_cap < 1)
        throw std::invalid_argument("min_blocklength: hard_cap must be >= 1");

    // eps crosses 0.5 at n = d/C; everything at or below that is hopeless.
    const double c = shannon_capacity(spec);
    int lo = static_cast<int>(std::floor(spec.payload_bits / c));
    if (lo < 0) lo = 0;  // eps(lo) > eps_max, eps strictly decreasing beyond lo

    // Bracket by doubling, then bisect the crossing.
    int hi = lo + 1;
    while (hi <= hard_cap && packet_error_rate(spec, hi) > eps_max) {
        lo = hi;
        hi = std::min(hard_cap, hi * 2);
        if (hi == lo) break;
    }
    if (packet_error_rate(spec, std::min(hi, hard_cap)) > eps_max)
        throw std::runtime_error("min_blocklength: target error rate unreachable within hard cap (infeasible sensor)");
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        if (packet_error_rate(spec, mid) > eps_max)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

}  // namespace aoifbl
