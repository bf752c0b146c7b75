#pragma once

#include "dmtk/channel.hpp"
#include "dmtk/outage.hpp"

#include <cstdint>

namespace dmtk {

struct McConfig {
    std::int64_t n_samples = 1000000;
    std::uint64_t seed = 42;
    int stream_count = 64; // independent RNG streams the samples partition into
};

struct McResult {
    double p_out;
    double std_err; // sqrt(p*(1-p)/n)
    std::int64_t n_samples;
    std::int64_t outage_count;
};

struct FdDiversity {
    double value;
    double std_err; // propagated from the two outage estimates
    McResult plus;
    McResult minus;
};

// log2 det(I + eta/n_t * H H^adj), evaluated on the smaller Gram side.
double mutual_information(const ChannelMatrix &h, double eta, int n_t);

// Empirical outage probability at rate R = r * log2(1 + g*eta), transmit
// correlation only.  Samples are split across fixed RNG streams and counted
// with an associative reduction, so the result is bit-identical for any
// thread count.  outage_mc runs the streams under OpenMP; outage_mc_serial
// is the plain reference loop kept for comparison in tests and benchmarks.
McResult outage_mc(const OperatingPoint &op, const AntennaConfig &cfg, const CorrelationMatrix &r_t,
                   const McConfig &mc);
McResult outage_mc_serial(const OperatingPoint &op, const AntennaConfig &cfg,
                          const CorrelationMatrix &r_t, const McConfig &mc);

// Central-difference combination -eta * (ln p+ - ln p-) / (eta+ - eta-) with
// eta± = eta * (1 ± rel_step).  Kept separate so the stencil can be checked
// against closed forms without Monte Carlo noise.
double fd_log_elasticity(double p_plus, double p_minus, double rel_step);

// Monte Carlo diversity: the stencil above on two outage_mc runs sharing the
// same seed (common random numbers).  Zero outage events on either side
// raise InsufficientSamplesError.
FdDiversity diversity_fd(const OperatingPoint &op, const AntennaConfig &cfg,
                         const CorrelationMatrix &r_t, const McConfig &mc, double rel_step = 1e-2);

// One draw of the branch quadratic form: d_sq[l-1] * Gamma(n_r - l + 1, 1)
// plus sum over the trailing eigenvalues of d_sq[k] * Exp(1).
double sample_delta(const EigenSpectrum &spectrum, int l, const AntennaConfig &cfg, CounterRng &rng);

} // namespace dmtk
