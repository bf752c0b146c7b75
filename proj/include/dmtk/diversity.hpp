#pragma once

#include "dmtk/outage.hpp"

#include <vector>

namespace dmtk {

enum class DiversityFlavor { closed_form, asymptotic_limit, mc_finite_difference };

struct DiversityEstimate {
    double value;
    DiversityFlavor flavor;
    double eta;
    double r;
    Allocation allocation;
};

// Per-branch ingredients of the closed-form estimate at a fixed allocation:
// k_l is the rate-split sensitivity factor, j_l the uncorrelated pdf/cdf
// ratio, q_over_p its Gamma-mixture counterpart (empty when the spectrum is
// absent or all-ones).
struct AsymptoticTerms {
    std::vector<double> k;
    std::vector<double> j;
    std::vector<double> q_over_p;
};

enum class CurveKind { estimate, asymptote, monte_carlo };

// Diversity-multiplexing curve sampled on a strictly increasing r grid.
struct DMTCurve {
    std::vector<std::pair<double, double>> points; // (r, d)
    CurveKind kind;

    DMTCurve(std::vector<std::pair<double, double>> pts, CurveKind k);
};

// Closed-form diversity estimates: the negative log-elasticity of the outage
// bound in eta, differentiated at the fixed allocation passed in (the
// allocation is not re-optimized inside the derivative).  r = 0 or an
// allocation with an empty branch makes the bound vanish identically; both
// raise std::domain_error (use d_max for the r -> 0 limit).
DiversityEstimate estimate_uncorr(const OperatingPoint &op, const AntennaConfig &cfg,
                                  const Allocation &alloc);
DiversityEstimate estimate_corr(const OperatingPoint &op, const AntennaConfig &cfg,
                                const EigenSpectrum &spectrum, const Allocation &alloc);

// Optimizes the bound first, then differentiates at that allocation.
DiversityEstimate optimized_estimate(const OperatingPoint &op, const AntennaConfig &cfg,
                                     const EigenSpectrum *spectrum = nullptr);

// r -> 0 ceiling of the diversity estimate at finite SNR.
double d_max(double eta, const AntennaConfig &cfg);

// Infinite-SNR tradeoff limit: piecewise linear between d(k) = (n_t-k)(n_r-k)
// at integer k, computed by the greedy budget argument.
double d_asym(double r, const AntennaConfig &cfg);

AsymptoticTerms asymptotic_terms(const OperatingPoint &op, const AntennaConfig &cfg,
                                 const EigenSpectrum *spectrum, const Allocation &alloc);

// Ratio of the optimized correlated estimate to the optimized uncorrelated
// one at the same operating point; exactly 1 for an all-ones spectrum.
double relative_gain(double r, double eta, const AntennaConfig &cfg, const EigenSpectrum &spectrum);

DMTCurve dmt_curve_estimate(double eta, const AntennaConfig &cfg, const std::vector<double> &r_grid,
                            const EigenSpectrum *spectrum = nullptr);
DMTCurve dmt_curve_asymptotic(const AntennaConfig &cfg, const std::vector<double> &r_grid);

} // namespace dmtk
