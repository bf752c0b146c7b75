#pragma once

#include "dmtk/channel.hpp"
#include "dmtk/quadform.hpp"

#include <utility>
#include <vector>

namespace dmtk {

// Finite-SNR operating point: linear SNR eta and multiplexing gain r, where
// the rate is R = r * log2(1 + g * eta).  The upper limit r <= t depends on
// the antenna configuration and is checked by the operations that take one.
struct OperatingPoint {
    double eta;
    double r;

    OperatingPoint(double eta_linear, double mux_gain);
};

// Per-branch split b_1..b_t of the multiplexing gain, sum equal to r.
struct Allocation {
    std::vector<double> b;

    double sum() const;
};

enum class EstimateKind { lower_bound, monte_carlo };

struct OutageEstimate {
    double value;
    EstimateKind kind;
    double std_err; // 0 for analytic bounds
    Allocation allocation;
};

// Branch threshold xi_l = (n_t / eta) * ((1 + g*eta)^b - 1).
double xi(double b, const OperatingPoint &op, const AntennaConfig &cfg);

// Outage lower bound for uncorrelated fading: product over branches of
// regularized incomplete gamma cdfs at xi_l, shape n_t + n_r - 2l + 1.
double lower_bound_uncorr(const OperatingPoint &op, const AntennaConfig &cfg, const Allocation &alloc);

// Correlated counterpart: branch cdfs come from the Gamma mixtures of the
// eigenvalue spectrum.  An all-ones spectrum routes to the uncorrelated
// bound exactly.
double lower_bound_corr(const OperatingPoint &op, const AntennaConfig &cfg,
                        const EigenSpectrum &spectrum, const Allocation &alloc);
double lower_bound_corr(const OperatingPoint &op, const AntennaConfig &cfg,
                        const std::vector<GammaMixture> &mixtures, const Allocation &alloc);

// Maximizes the applicable bound over the allocation simplex: coarse grid
// (step r/20) followed by Nelder-Mead on the first t-1 components with
// b_t = r - sum, working on ln(bound) so the 1e-8 tolerance is relative.
// Ties prefer the lexicographically smallest allocation.  Passing a null
// spectrum (or an all-ones one) optimizes the uncorrelated bound.
std::pair<Allocation, double> optimize_allocation(const OperatingPoint &op, const AntennaConfig &cfg,
                                                  const EigenSpectrum *spectrum = nullptr);

OutageEstimate optimized_bound(const OperatingPoint &op, const AntennaConfig &cfg,
                               const EigenSpectrum *spectrum = nullptr);

} // namespace dmtk
