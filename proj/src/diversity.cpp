#include "dmtk/diversity.hpp"

#include "dmtk/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace dmtk {

DMTCurve::DMTCurve(std::vector<std::pair<double, double>> pts, CurveKind k)
    : points(std::move(pts)), kind(k) {
    for (std::size_t i = 1; i < points.size(); ++i)
        if (!(points[i].first > points[i - 1].first))
            throw std::invalid_argument("DMTCurve: r grid must be strictly increasing");
}

namespace {

void validate_estimate_inputs(const OperatingPoint &op, const AntennaConfig &cfg,
                              const Allocation &alloc) {
    if (op.r > cfg.t() + 1e-12)
        throw std::invalid_argument("multiplexing gain exceeds min(n_t, n_r)");
    if (op.r == 0.0)
        throw std::domain_error("diversity estimate undefined at r = 0; use d_max for the limit");
    if (static_cast<int>(alloc.b.size()) != cfg.t())
        throw std::invalid_argument("Allocation: expected one component per branch");
    double s = 0.0;
    for (double v : alloc.b) {
        if (!(v > 0.0))
            throw std::domain_error(
                "diversity estimate undefined for allocations with an empty branch");
        s += v;
    }
    if (std::abs(s - op.r) > 1e-10)
        throw std::invalid_argument("Allocation: components must sum to r");
}

// (1+g*eta)^b - b*g*eta*(1+g*eta)^(b-1) - 1, written so that the small-b
// cancellation happens between O(b) quantities rather than around 1.
double k_factor(double b, double g_eta) {
    if (b == 1.0)
        return 0.0;
    double log1p_ge = std::log1p(g_eta);
    return std::expm1(b * log1p_ge) - b * g_eta * std::exp((b - 1.0) * log1p_ge);
}

} // namespace

AsymptoticTerms asymptotic_terms(const OperatingPoint &op, const AntennaConfig &cfg,
                                 const EigenSpectrum *spectrum, const Allocation &alloc) {
    validate_estimate_inputs(op, cfg, alloc);
    const double g_eta = cfg.g() * op.eta;
    AsymptoticTerms terms;
    const bool correlated = spectrum != nullptr && !spectrum->all_ones();
    std::vector<GammaMixture> mixtures;
    if (correlated)
        mixtures = branch_mixtures(*spectrum, cfg);
    for (int l = 1; l <= cfg.t(); ++l) {
        double x = xi(alloc.b[l - 1], op, cfg);
        terms.k.push_back(k_factor(alloc.b[l - 1], g_eta));
        terms.j.push_back(gamma_pdf_over_cdf(x, cfg.n_t + cfg.n_r - 2 * l + 1));
        if (correlated) {
            double p = mixture_cdf(mixtures[l - 1], x);
            if (!(p > 0.0))
                throw NumericalError("asymptotic_terms: branch cdf underflowed to zero");
            terms.q_over_p.push_back(mixture_pdf(mixtures[l - 1], x) / p);
        }
    }
    return terms;
}

DiversityEstimate estimate_uncorr(const OperatingPoint &op, const AntennaConfig &cfg,
                                  const Allocation &alloc) {
    AsymptoticTerms terms = asymptotic_terms(op, cfg, nullptr, alloc);
    double s = 0.0;
    for (int l = 0; l < cfg.t(); ++l)
        s += terms.k[l] * terms.j[l];
    return {cfg.n_t / op.eta * s, DiversityFlavor::closed_form, op.eta, op.r, alloc};
}

DiversityEstimate estimate_corr(const OperatingPoint &op, const AntennaConfig &cfg,
                                const EigenSpectrum &spectrum, const Allocation &alloc) {
    if (spectrum.all_ones())
        return estimate_uncorr(op, cfg, alloc);
    AsymptoticTerms terms = asymptotic_terms(op, cfg, &spectrum, alloc);
    double s = 0.0;
    for (int l = 0; l < cfg.t(); ++l)
        s += terms.k[l] * terms.q_over_p[l];
    return {cfg.n_t / op.eta * s, DiversityFlavor::closed_form, op.eta, op.r, alloc};
}

DiversityEstimate optimized_estimate(const OperatingPoint &op, const AntennaConfig &cfg,
                                     const EigenSpectrum *spectrum) {
    auto [alloc, value] = optimize_allocation(op, cfg, spectrum);
    (void)value;
    if (spectrum != nullptr && !spectrum->all_ones())
        return estimate_corr(op, cfg, *spectrum, alloc);
    return estimate_uncorr(op, cfg, alloc);
}

double d_max(double eta, const AntennaConfig &cfg) {
    if (!(eta > 0.0))
        throw std::invalid_argument("d_max: eta must be positive");
    double g_eta = cfg.g() * eta;
    return cfg.n_t * cfg.n_r * (1.0 - g_eta / ((1.0 + g_eta) * std::log1p(g_eta)));
}

double d_asym(double r, const AntennaConfig &cfg) {
    const int t = cfg.t();
    if (!(r >= 0.0) || r > t)
        throw std::invalid_argument("d_asym: r must lie in [0, min(n_t, n_r)]");
    // Branch weights n_t + n_r - 2l + 1 decrease strictly in l, so spending
    // the rate budget on the leading branches first is optimal.
    double d = 0.0;
    for (int l = 1; l <= t; ++l) {
        double spent = std::min(1.0, std::max(0.0, r - (l - 1)));
        d += (cfg.n_t + cfg.n_r - 2 * l + 1) * (1.0 - spent);
    }
    return d;
}

double relative_gain(double r, double eta, const AntennaConfig &cfg, const EigenSpectrum &spectrum) {
    if (spectrum.all_ones())
        return 1.0;
    OperatingPoint op(eta, r);
    DiversityEstimate corr = optimized_estimate(op, cfg, &spectrum);
    DiversityEstimate uncorr = optimized_estimate(op, cfg, nullptr);
    if (!(uncorr.value != 0.0))
        throw NumericalError("relative_gain: uncorrelated estimate is zero");
    return corr.value / uncorr.value;
}

DMTCurve dmt_curve_estimate(double eta, const AntennaConfig &cfg, const std::vector<double> &r_grid,
                            const EigenSpectrum *spectrum) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(r_grid.size());
    for (double r : r_grid)
        pts.emplace_back(r, optimized_estimate(OperatingPoint(eta, r), cfg, spectrum).value);
    return DMTCurve(std::move(pts), CurveKind::estimate);
}

DMTCurve dmt_curve_asymptotic(const AntennaConfig &cfg, const std::vector<double> &r_grid) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(r_grid.size());
    for (double r : r_grid)
        pts.emplace_back(r, d_asym(r, cfg));
    return DMTCurve(std::move(pts), CurveKind::asymptote);
}

} // namespace dmtk
