#pragma once

#include "dmtk/linalg.hpp"
#include "dmtk/rng.hpp"

#include <vector>

namespace dmtk {

struct AntennaConfig {
    int n_t;
    int n_r;

    AntennaConfig(int transmit, int receive);

    // Number of outage-relevant branches and the array gain entering the
    // multiplexing-gain normalization R = r * log2(1 + g * eta).
    int t() const { return n_t < n_r ? n_t : n_r; }
    int g() const { return n_r; }
};

// n_r x n_t complex channel realization.
using ChannelMatrix = CMatrix;

// Hermitian, unit-diagonal correlation matrix (so trace equals dimension).
// Positive semidefiniteness is checked where it is actually needed, in
// eigen_spectrum.
class CorrelationMatrix {
  public:
    explicit CorrelationMatrix(CMatrix m);

    const CMatrix &matrix() const { return m_; }
    int dim() const { return m_.rows(); }
    bool is_identity(double tol = 1e-14) const;

  private:
    CMatrix m_;
};

// Eigenvalues of a correlation matrix, sorted descending.  The unit diagonal
// makes them sum to the dimension.
class EigenSpectrum {
  public:
    explicit EigenSpectrum(std::vector<double> d_sq);

    const std::vector<double> &d_sq() const { return d_sq_; }
    int dim() const { return static_cast<int>(d_sq_.size()); }
    bool all_ones(double tol = 1e-12) const;

  private:
    std::vector<double> d_sq_;
};

// Single-coefficient model: entry (i,j) = rho^((i-j)^2).  rho = 1 would make
// the matrix rank one, which the bounds cannot handle; the valid range is
// [0, 1).
CorrelationMatrix build_single_coeff_correlation(double rho, int dim);

EigenSpectrum eigen_spectrum(const CorrelationMatrix &corr);

// Draws H = R_r^(1/2) * H_w * R_t^(1/2) with i.i.d. CN(0,1) entries in H_w.
// Precomputes the matrix square roots once; sampling is then two small
// matrix products (skipped entirely for identity correlation).
class ChannelSampler {
  public:
    ChannelSampler(const AntennaConfig &cfg, const CorrelationMatrix &r_t, const CorrelationMatrix &r_r);

    ChannelMatrix sample(CounterRng &rng) const;

  private:
    int n_t_, n_r_;
    bool tx_identity_, rx_identity_;
    CMatrix tx_root_, rx_root_;
};

ChannelMatrix sample_channel(const AntennaConfig &cfg, const CorrelationMatrix &r_t,
                             const CorrelationMatrix &r_r, CounterRng &rng);

} // namespace dmtk
