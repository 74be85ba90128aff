#pragma once

// Closed-form finite-blocklength channel math: Shannon capacity, channel
// dispersion, normal-approximation packet error rate, and the minimal
// blocklength meeting a target error rate.
//
// Conventions: capacity in bits per channel use, C = log2(1 + snr);
// dispersion dimensionless, V = 1 - (1 + snr)^-2; the ln 2 factor inside the
// Q-function argument converts the bit-domain rate gap to nats.

#include <stdexcept>

namespace aoifbl {

struct ChannelSpec {
    double snr_linear = 1.0;  // received SNR as a linear power ratio, > 0
    int payload_bits = 16;    // message length d in bits, >= 1

    void validate() const {
        if (!(snr_linear > 0.0))
            throw std::invalid_argument("ChannelSpec: snr_linear must be > 0");
        if (payload_bits < 1)
            throw std::invalid_argument("ChannelSpec: payload_bits must be >= 1");
    }
};

// Upper-tail probability of the standard normal, Q(x) = P(Z > x).
double gaussian_q(double x);

// C = log2(1 + snr), bits per channel use.
double shannon_capacity(const ChannelSpec& spec);

// V = 1 - (1 + snr)^-2, dimensionless, in (0, 1).
double channel_dispersion(const ChannelSpec& spec);

// Normal-approximation packet error rate at blocklength n (channel uses):
//   eps(n) = Q( sqrt(n/V) * (C - d/n) * ln 2 ).
// Strictly decreasing in n on the branch n > d/C; values >= 0.5 are legal
// outputs for n <= d/C. Throws std::invalid_argument for n < 1.
double packet_error_rate(const ChannelSpec& spec, int n);

// Smallest n with packet_error_rate(spec, n) <= eps_max, found by bracketing
// and bisection on the monotone branch. Requires 0 < eps_max < 0.5. Throws
// std::runtime_error if no n <= hard_cap qualifies (infeasible sensor).
int min_blocklength(const ChannelSpec& spec, double eps_max, int hard_cap = 5000);

}  // namespace aoifbl
