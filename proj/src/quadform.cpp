#include "dmtk/quadform.hpp"

#include "dmtk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace dmtk {

double gamma_inc(double x, int shape) {
    if (!(x >= 0.0))
        throw std::invalid_argument("gamma_inc: x must be nonnegative");
    if (shape < 1)
        throw std::invalid_argument("gamma_inc: shape must be a positive integer");
    if (x == 0.0)
        return 0.0;
    if (x > 700.0)
        return 1.0;
    const double a = shape;
    if (x < a + 1.0) {
        double term = 1.0;
        double sum = 1.0;
        for (int k = 1; k < 500; ++k) {
            term *= x / (a + k);
            sum += term;
            if (term < sum * 1e-17)
                break;
        }
        double lead = std::exp(a * std::log(x) - x - std::lgamma(a + 1.0));
        return std::min(1.0, lead * sum);
    }
    double term = std::exp(-x);
    double sum = term;
    for (int j = 1; j < shape; ++j) {
        term *= x / j;
        sum += term;
    }
    return std::max(0.0, 1.0 - sum);
}

double gamma_pdf_over_cdf(double x, int shape) {
    if (!(x > 0.0))
        throw std::invalid_argument("gamma_pdf_over_cdf: x must be positive");
    if (shape < 1)
        throw std::invalid_argument("gamma_pdf_over_cdf: shape must be a positive integer");
    const double a = shape;
    if (x < a + 1.0) {
        double term = 1.0;
        double sum = 1.0;
        for (int k = 1; k < 500; ++k) {
            term *= x / (a + k);
            sum += term;
            if (term < sum * 1e-17)
                break;
        }
        return a / (x * sum);
    }
    double pdf = std::exp((a - 1.0) * std::log(x) - x - std::lgamma(a));
    return pdf / gamma_inc(x, shape);
}

double GammaMixture::weight_sum() const {
    double s = 0.0;
    for (const GammaTerm &t : terms)
        s += t.weight;
    return s;
}

namespace {

void validate_spec(const MgfSpec &spec) {
    if (spec.multiple_pole_order < 1)
        throw std::invalid_argument("MgfSpec: multiple_pole_order must be at least 1");
    if (!(spec.multiple_pole_scale > 0.0))
        throw std::invalid_argument("MgfSpec: multiple_pole_scale must be positive");
    for (double b : spec.simple_pole_scales)
        if (!(b > 0.0))
            throw std::invalid_argument("MgfSpec: simple pole scales must be positive");
}

std::vector<double> all_scales(const MgfSpec &spec) {
    std::vector<double> s;
    s.push_back(spec.multiple_pole_scale);
    s.insert(s.end(), spec.simple_pole_scales.begin(), spec.simple_pole_scales.end());
    return s;
}

bool poles_distinct(const std::vector<double> &scales, double rel_tol) {
    for (std::size_t i = 0; i < scales.size(); ++i)
        for (std::size_t j = i + 1; j < scales.size(); ++j)
            if (std::abs(scales[i] - scales[j]) < rel_tol * std::max(scales[i], scales[j]))
                return false;
    return true;
}

} // namespace

cdouble mgf(const MgfSpec &spec, cdouble v) {
    validate_spec(spec);
    for (double b : all_scales(spec))
        if (std::abs(v - cdouble(1.0 / b)) < 1e-12)
            throw PoleError("mgf: v within 1e-12 of a pole");
    cdouble factor = 1.0 - v * spec.multiple_pole_scale;
    cdouble denom = 1.0;
    for (int i = 0; i < spec.multiple_pole_order; ++i)
        denom *= factor;
    for (double b : spec.simple_pole_scales)
        denom *= 1.0 - v * b;
    return 1.0 / denom;
}

GammaMixture partial_fraction_weights(const MgfSpec &spec, int source_index) {
    validate_spec(spec);
    if (!poles_distinct(all_scales(spec), 1e-9))
        throw DegenerateSpectrumError(
            "partial_fraction_weights: near-coincident poles; perturb the spectrum or use the "
            "uncorrelated path");

    const double b0 = spec.multiple_pole_scale;
    const int m = spec.multiple_pole_order;
    const std::vector<double> &bs = spec.simple_pole_scales;
    const int nk = static_cast<int>(bs.size());

    // Derivatives of g(s) = prod_k (1 - s*b_k)^(-1) at s = 1/b0 through the
    // log-derivative recurrence g^(n+1) = sum_j C(n,j) L^(j+1) g^(n-j) with
    // L^(j) = (j-1)! * sum_k (b_k h_k)^j, h_k = g's k-th factor at s.
    std::vector<double> h(nk);
    for (int k = 0; k < nk; ++k)
        h[k] = b0 / (b0 - bs[k]);

    std::vector<double> g(m);
    g[0] = 1.0;
    for (int k = 0; k < nk; ++k)
        g[0] *= h[k];
    if (m > 1) {
        std::vector<double> lder(m - 1); // lder[j] = L^(j+1)(s*) for j = 0..m-2
        for (int j = 0; j < m - 1; ++j) {
            double fact = 1.0;
            for (int i = 2; i <= j; ++i)
                fact *= i; // j!
            double s = 0.0;
            for (int k = 0; k < nk; ++k)
                s += std::pow(bs[k] * h[k], j + 1);
            lder[j] = fact * s;
        }
        std::vector<double> binom(m, 0.0);
        for (int n = 0; n + 1 < m; ++n) {
            binom[0] = 1.0;
            for (int j = n; j >= 1; --j)
                binom[j] = binom[j] + binom[j - 1]; // row n of Pascal's triangle
            double acc = 0.0;
            for (int j = 0; j <= n; ++j)
                acc += binom[j] * lder[j] * g[n - j];
            g[n + 1] = acc;
        }
    }

    GammaMixture mix;
    mix.source_index = source_index;
    double fact = 1.0;
    double sign_scale = 1.0; // (-b0)^(-(m-i)) accumulated from i = m down
    for (int i = m; i >= 1; --i) {
        int order = m - i;
        if (order > 0) {
            fact *= order;
            sign_scale /= -b0;
        }
        double w = sign_scale * g[order] / fact;
        if (w != 0.0)
            mix.terms.push_back({w, i, b0});
    }
    for (int k = 0; k < nk; ++k) {
        double w = 1.0;
        for (int i = 0; i < m; ++i)
            w /= 1.0 - b0 / bs[k];
        for (int kk = 0; kk < nk; ++kk)
            if (kk != k)
                w /= 1.0 - bs[kk] / bs[k];
        mix.terms.push_back({w, 1, bs[k]});
    }

    double max_w = 0.0;
    for (const GammaTerm &t : mix.terms)
        max_w = std::max(max_w, std::abs(t.weight));
    if (max_w > 1e8)
        throw DegenerateSpectrumError("partial_fraction_weights: weights exceed 1e8; spectrum too "
                                      "close to degenerate");
    // The weights must sum to 1 (the mgf at v = 0). Rounding in the pole-gap
    // divisions leaves a residual near max|w| * eps / rel_gap, so close
    // spectra legitimately drift well past eps while staying usable; only a
    // drift beyond 1e-4 means the decomposition has lost too much precision.
    if (std::abs(mix.weight_sum() - 1.0) > 1e-4)
        throw DegenerateSpectrumError("partial_fraction_weights: weight sum drifted from 1; "
                                      "spectrum too close to degenerate");
    return mix;
}

double mixture_pdf(const GammaMixture &mix, double x) {
    if (!(x >= 0.0))
        throw std::invalid_argument("mixture_pdf: x must be nonnegative");
    double s = 0.0;
    for (const GammaTerm &t : mix.terms) {
        double term;
        if (x == 0.0)
            term = t.shape == 1 ? 1.0 / t.scale : 0.0;
        else
            term = std::exp((t.shape - 1.0) * std::log(x / t.scale) - x / t.scale -
                            std::lgamma(static_cast<double>(t.shape))) /
                   t.scale;
        s += t.weight * term;
    }
    return s;
}

double mixture_cdf(const GammaMixture &mix, double x) {
    if (!(x >= 0.0))
        throw std::invalid_argument("mixture_cdf: x must be nonnegative");
    double s = 0.0;
    for (const GammaTerm &t : mix.terms)
        s += t.weight * gamma_inc(x / t.scale, t.shape);
    return std::clamp(s, 0.0, 1.0);
}

MgfSpec branch_mgf(const EigenSpectrum &spectrum, int l, const AntennaConfig &cfg) {
    const std::vector<double> &d = spectrum.d_sq();
    if (static_cast<int>(d.size()) != cfg.n_t)
        throw std::invalid_argument("branch_mgf: spectrum dimension != n_t");
    if (l < 1 || l > cfg.t())
        throw std::invalid_argument("branch_mgf: branch index out of range");
    MgfSpec spec;
    spec.multiple_pole_scale = d[l - 1];
    spec.multiple_pole_order = cfg.n_r - l + 1;
    spec.simple_pole_scales.assign(d.begin() + l, d.end());
    return spec;
}

namespace {

// Splits near-tied eigenvalues multiplicatively until all relative gaps are
// at least 1e-9, keeping the descending order.
std::vector<double> split_near_ties(std::vector<double> d, bool &perturbed) {
    perturbed = false;
    for (int rounds = 0; rounds < 64; ++rounds) {
        std::sort(d.rbegin(), d.rend());
        bool tie = false;
        for (std::size_t i = 1; i < d.size(); ++i) {
            if (!(d[i] > 0.0))
                throw DegenerateSpectrumError("branch_mixtures: spectrum must be strictly positive");
            if (d[i - 1] - d[i] < 1e-9 * d[i - 1]) {
                // The split has to be wide enough that the resulting partial
                // fraction weights, which grow like (1/gap)^order, stay
                // inside the 1e8 conditioning guard for low pole orders.
                d[i - 1] *= 1.0 + 1e-4;
                d[i] *= 1.0 - 1e-4;
                tie = true;
                perturbed = true;
                break;
            }
        }
        if (!tie)
            return d;
    }
    throw DegenerateSpectrumError("branch_mixtures: could not separate near-tied eigenvalues");
}

} // namespace

std::vector<GammaMixture> branch_mixtures(const EigenSpectrum &spectrum, const AntennaConfig &cfg) {
    if (spectrum.all_ones())
        throw DegenerateSpectrumError(
            "branch_mixtures: all-ones spectrum is fully degenerate; use the uncorrelated path");
    bool perturbed = false;
    std::vector<double> d = split_near_ties(spectrum.d_sq(), perturbed);
    if (perturbed)
        std::cerr << "dmtk: warning: near-coincident correlation eigenvalues split by a 1e-4 "
                     "multiplicative perturbation\n";
    EigenSpectrum separated(std::move(d));
    std::vector<GammaMixture> out;
    out.reserve(cfg.t());
    for (int l = 1; l <= cfg.t(); ++l)
        out.push_back(partial_fraction_weights(branch_mgf(separated, l, cfg), l));
    return out;
}

} // namespace dmtk
