#include "dmtk/montecarlo.hpp"

#include "dmtk/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace dmtk {

double mutual_information(const ChannelMatrix &h, double eta, int n_t) {
    if (!(eta > 0.0))
        throw std::invalid_argument("mutual_information: eta must be positive");
    if (n_t < 1)
        throw std::invalid_argument("mutual_information: n_t must be at least 1");
    const double c = eta / n_t;
    const bool tall = h.rows() > h.cols();
    const int m = tall ? h.cols() : h.rows();
    CMatrix gram(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            cdouble s = i == j ? 1.0 : 0.0;
            if (tall) {
                for (int k = 0; k < h.rows(); ++k)
                    s += c * std::conj(h(k, i)) * h(k, j);
            } else {
                for (int k = 0; k < h.cols(); ++k)
                    s += c * h(i, k) * std::conj(h(j, k));
            }
            gram(i, j) = s;
        }
    return cholesky_log2_det(std::move(gram));
}

namespace {

void validate_mc(const McConfig &mc) {
    if (mc.n_samples < 1)
        throw std::invalid_argument("McConfig: n_samples must be at least 1");
    if (mc.stream_count < 1)
        throw std::invalid_argument("McConfig: stream_count must be at least 1");
}

// Outage events among samples [begin, end) of one RNG stream.
std::int64_t stream_outage_count(const ChannelSampler &sampler, double rate, double eta, int n_t,
                                 std::uint64_t seed, int stream, std::int64_t count) {
    CounterRng rng(seed, static_cast<std::uint64_t>(stream));
    std::int64_t events = 0;
    for (std::int64_t i = 0; i < count; ++i) {
        ChannelMatrix h = sampler.sample(rng);
        if (mutual_information(h, eta, n_t) < rate)
            ++events;
    }
    return events;
}

McResult finish(std::int64_t events, std::int64_t n) {
    double p = static_cast<double>(events) / static_cast<double>(n);
    double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    return {p, se, n, events};
}

struct McPlan {
    ChannelSampler sampler;
    double rate;
    std::int64_t chunk;

    McPlan(const OperatingPoint &op, const AntennaConfig &cfg, const CorrelationMatrix &r_t,
           const McConfig &mc)
        : sampler(cfg, r_t, build_single_coeff_correlation(0.0, cfg.n_r)),
          rate(op.r * std::log2(1.0 + cfg.g() * op.eta)),
          chunk((mc.n_samples + mc.stream_count - 1) / mc.stream_count) {
        if (op.r > cfg.t() + 1e-12)
            throw std::invalid_argument("multiplexing gain exceeds min(n_t, n_r)");
        validate_mc(mc);
    }

    std::int64_t stream_samples(int stream, const McConfig &mc) const {
        std::int64_t begin = chunk * stream;
        if (begin >= mc.n_samples)
            return 0;
        return std::min(chunk, mc.n_samples - begin);
    }
};

} // namespace

McResult outage_mc_serial(const OperatingPoint &op, const AntennaConfig &cfg,
                          const CorrelationMatrix &r_t, const McConfig &mc) {
    McPlan plan(op, cfg, r_t, mc);
    std::int64_t events = 0;
    for (int s = 0; s < mc.stream_count; ++s)
        events += stream_outage_count(plan.sampler, plan.rate, op.eta, cfg.n_t, mc.seed, s,
                                      plan.stream_samples(s, mc));
    return finish(events, mc.n_samples);
}

McResult outage_mc(const OperatingPoint &op, const AntennaConfig &cfg, const CorrelationMatrix &r_t,
                   const McConfig &mc) {
    McPlan plan(op, cfg, r_t, mc);
    std::int64_t events = 0;
#pragma omp parallel for schedule(static) reduction(+ : events)
    for (int s = 0; s < mc.stream_count; ++s)
        events += stream_outage_count(plan.sampler, plan.rate, op.eta, cfg.n_t, mc.seed, s,
                                      plan.stream_samples(s, mc));
    return finish(events, mc.n_samples);
}

double fd_log_elasticity(double p_plus, double p_minus, double rel_step) {
    // A zero estimate means the sample ran out of outage events, not that the
    // caller passed garbage, so this maps to the statistical error class.
    if (!(p_plus > 0.0) || !(p_minus > 0.0))
        throw InsufficientSamplesError("fd_log_elasticity: outage estimates must be positive");
    if (!(rel_step > 0.0))
        throw std::invalid_argument("fd_log_elasticity: rel_step must be positive");
    // -eta * (ln p+ - ln p-) / (eta+ - eta-) with eta± = eta*(1 ± rel_step);
    // the eta factors cancel.
    return -(std::log(p_plus) - std::log(p_minus)) / (2.0 * rel_step);
}

FdDiversity diversity_fd(const OperatingPoint &op, const AntennaConfig &cfg,
                         const CorrelationMatrix &r_t, const McConfig &mc, double rel_step) {
    if (!(rel_step > 0.0) || rel_step >= 1.0)
        throw std::invalid_argument("diversity_fd: rel_step must lie in (0, 1)");
    OperatingPoint plus(op.eta * (1.0 + rel_step), op.r);
    OperatingPoint minus(op.eta * (1.0 - rel_step), op.r);
    McResult rp = outage_mc(plus, cfg, r_t, mc);
    McResult rm = outage_mc(minus, cfg, r_t, mc);
    if (rp.outage_count == 0 || rm.outage_count == 0)
        throw InsufficientSamplesError(
            "diversity_fd: no outage events at one of the stencil points; increase n_samples");
    double value = fd_log_elasticity(rp.p_out, rm.p_out, rel_step);
    double rel_p = rp.std_err / rp.p_out;
    double rel_m = rm.std_err / rm.p_out;
    double se = std::sqrt(rel_p * rel_p + rel_m * rel_m) / (2.0 * rel_step);
    return {value, se, rp, rm};
}

double sample_delta(const EigenSpectrum &spectrum, int l, const AntennaConfig &cfg, CounterRng &rng) {
    const std::vector<double> &d = spectrum.d_sq();
    if (static_cast<int>(d.size()) != cfg.n_t)
        throw std::invalid_argument("sample_delta: spectrum dimension != n_t");
    if (l < 1 || l > cfg.t())
        throw std::invalid_argument("sample_delta: branch index out of range");
    double acc = 0.0;
    for (int i = 0; i < cfg.n_r - l + 1; ++i)
        acc += d[l - 1] * rng.exponential();
    for (int k = l; k < cfg.n_t; ++k)
        acc += d[k] * rng.exponential();
    return acc;
}

} // namespace dmtk
