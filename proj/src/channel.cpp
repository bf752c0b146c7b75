#include "dmtk/channel.hpp"

#include "dmtk/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dmtk {

AntennaConfig::AntennaConfig(int transmit, int receive) : n_t(transmit), n_r(receive) {
    if (transmit < 1 || receive < 1)
        throw std::invalid_argument("AntennaConfig: antenna counts must be at least 1");
}

CorrelationMatrix::CorrelationMatrix(CMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1)
        throw std::invalid_argument("CorrelationMatrix: matrix must be square and non-empty");
    if (!is_hermitian(m_, 1e-10))
        throw std::invalid_argument("CorrelationMatrix: matrix must be Hermitian");
    for (int i = 0; i < m_.rows(); ++i)
        if (std::abs(m_(i, i) - cdouble(1.0)) > 1e-12)
            throw std::invalid_argument("CorrelationMatrix: diagonal entries must equal 1");
}

bool CorrelationMatrix::is_identity(double tol) const {
    for (int i = 0; i < m_.rows(); ++i)
        for (int j = 0; j < m_.cols(); ++j) {
            cdouble want = i == j ? 1.0 : 0.0;
            if (std::abs(m_(i, j) - want) > tol)
                return false;
        }
    return true;
}

EigenSpectrum::EigenSpectrum(std::vector<double> d_sq) : d_sq_(std::move(d_sq)) {
    if (d_sq_.empty())
        throw std::invalid_argument("EigenSpectrum: empty spectrum");
    for (std::size_t i = 0; i < d_sq_.size(); ++i) {
        if (d_sq_[i] < 0.0)
            throw std::invalid_argument("EigenSpectrum: eigenvalues must be nonnegative");
        if (i > 0 && d_sq_[i] > d_sq_[i - 1])
            throw std::invalid_argument("EigenSpectrum: eigenvalues must be sorted descending");
    }
}

bool EigenSpectrum::all_ones(double tol) const {
    for (double d : d_sq_)
        if (std::abs(d - 1.0) > tol)
            return false;
    return true;
}

CorrelationMatrix build_single_coeff_correlation(double rho, int dim) {
    if (dim < 1)
        throw std::invalid_argument("build_single_coeff_correlation: dim must be at least 1");
    if (!(rho >= 0.0) || rho >= 1.0)
        throw std::invalid_argument(
            "build_single_coeff_correlation: rho must lie in [0, 1); rho = 1 breaks the "
            "full-rank requirement");
    CMatrix m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            double d = static_cast<double>(i - j);
            m(i, j) = std::pow(rho, d * d);
        }
    return CorrelationMatrix(std::move(m));
}

EigenSpectrum eigen_spectrum(const CorrelationMatrix &corr) {
    EigResult e = eigh(corr.matrix());
    double top = 1.0;
    for (double lam : e.values)
        top = std::max(top, std::abs(lam));
    std::vector<double> d_sq(e.values.size());
    for (std::size_t i = 0; i < e.values.size(); ++i) {
        if (e.values[i] < -1e-10 * top)
            throw NumericalError("eigen_spectrum: correlation matrix is not positive semidefinite");
        d_sq[i] = e.values[i] > 0.0 ? e.values[i] : 0.0;
    }
    return EigenSpectrum(std::move(d_sq));
}

ChannelSampler::ChannelSampler(const AntennaConfig &cfg, const CorrelationMatrix &r_t,
                               const CorrelationMatrix &r_r)
    : n_t_(cfg.n_t), n_r_(cfg.n_r) {
    if (r_t.dim() != cfg.n_t)
        throw std::invalid_argument("ChannelSampler: transmit correlation dimension != n_t");
    if (r_r.dim() != cfg.n_r)
        throw std::invalid_argument("ChannelSampler: receive correlation dimension != n_r");
    tx_identity_ = r_t.is_identity();
    rx_identity_ = r_r.is_identity();
    if (!tx_identity_)
        tx_root_ = hermitian_sqrt(r_t.matrix());
    if (!rx_identity_)
        rx_root_ = hermitian_sqrt(r_r.matrix());
}

ChannelMatrix ChannelSampler::sample(CounterRng &rng) const {
    ChannelMatrix h(n_r_, n_t_);
    for (int i = 0; i < n_r_; ++i)
        for (int j = 0; j < n_t_; ++j)
            h(i, j) = rng.complex_gaussian();
    if (!rx_identity_)
        h = matmul(rx_root_, h);
    if (!tx_identity_)
        h = matmul(h, tx_root_);
    return h;
}

ChannelMatrix sample_channel(const AntennaConfig &cfg, const CorrelationMatrix &r_t,
                             const CorrelationMatrix &r_r, CounterRng &rng) {
    return ChannelSampler(cfg, r_t, r_r).sample(rng);
}

} // namespace dmtk
