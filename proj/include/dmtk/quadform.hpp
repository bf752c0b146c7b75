#pragma once

#include "dmtk/channel.hpp"
#include "dmtk/linalg.hpp"

#include <vector>

namespace dmtk {

// Regularized lower incomplete gamma P(shape, x) at integer shape.  Uses the
// standard lower series below x = shape + 1 (keeps relative precision as
// x -> 0) and the finite Poisson-sum complement above it; saturates to 1 for
// x > 700 where the complement underflows anyway.
double gamma_inc(double x, int shape);

// pdf/cdf of Gamma(shape, 1) at x > 0, evaluated as a ratio so it stays
// accurate where the cdf itself would underflow.
double gamma_pdf_over_cdf(double x, int shape);

struct GammaTerm {
    double weight; // signed
    int shape;     // integer >= 1
    double scale;  // > 0
};

// Signed Gamma mixture; weights sum to 1 but individual weights may be
// negative, so pdf/cdf positivity holds only collectively.
struct GammaMixture {
    std::vector<GammaTerm> terms;
    int source_index = 0; // originating branch l, 0 when standalone

    double weight_sum() const;
};

// Transform of one branch quadratic form: a pole of given order at
// multiple_pole_scale plus distinct simple poles.
struct MgfSpec {
    double multiple_pole_scale;
    int multiple_pole_order;
    std::vector<double> simple_pole_scales;
};

// Product form evaluated at transform variable v:
//   (1 - v*b0)^(-m) * prod_k (1 - v*b_k)^(-1).
cdouble mgf(const MgfSpec &spec, cdouble v);

// Exact partial-fraction expansion of the transform into Gamma terms:
// shapes 1..m at the multiple pole plus one shape-1 term per simple pole.
// Near-coincident poles (relative gap < 1e-9) or weights above 1e8 in
// magnitude raise DegenerateSpectrumError.
GammaMixture partial_fraction_weights(const MgfSpec &spec, int source_index = 0);

double mixture_pdf(const GammaMixture &mix, double x);
double mixture_cdf(const GammaMixture &mix, double x);

// Branch l (1-based) of the ordered eigenvalue decomposition: multiple pole
// at d_sq[l-1] with order n_r - l + 1, simple poles at the smaller
// eigenvalues.
MgfSpec branch_mgf(const EigenSpectrum &spectrum, int l, const AntennaConfig &cfg);

// Mixtures for all branches l = 1..t.  Near-tied eigenvalues are split by a
// multiplicative 1e-7 perturbation (warning on stderr); an all-ones spectrum
// is fully degenerate and must be routed to the uncorrelated path by the
// caller instead.
std::vector<GammaMixture> branch_mixtures(const EigenSpectrum &spectrum, const AntennaConfig &cfg);

} // namespace dmtk
