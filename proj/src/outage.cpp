#include "dmtk/outage.hpp"

#include "dmtk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace dmtk {

OperatingPoint::OperatingPoint(double eta_linear, double mux_gain) : eta(eta_linear), r(mux_gain) {
    if (!(eta > 0.0))
        throw std::invalid_argument("OperatingPoint: eta must be positive (linear scale)");
    if (!(r >= 0.0))
        throw std::invalid_argument("OperatingPoint: multiplexing gain must be nonnegative");
}

double Allocation::sum() const {
    double s = 0.0;
    for (double v : b)
        s += v;
    return s;
}

namespace {

void validate_r(const OperatingPoint &op, const AntennaConfig &cfg) {
    if (op.r > cfg.t() + 1e-12)
        throw std::invalid_argument("multiplexing gain exceeds min(n_t, n_r)");
}

void validate_allocation(const Allocation &alloc, const OperatingPoint &op, const AntennaConfig &cfg) {
    if (static_cast<int>(alloc.b.size()) != cfg.t())
        throw std::invalid_argument("Allocation: expected one component per branch");
    for (double v : alloc.b)
        if (!(v >= 0.0))
            throw std::invalid_argument("Allocation: components must be nonnegative");
    if (std::abs(alloc.sum() - op.r) > 1e-10)
        throw std::invalid_argument("Allocation: components must sum to r");
}

} // namespace

double xi(double b, const OperatingPoint &op, const AntennaConfig &cfg) {
    if (!(b >= 0.0))
        throw std::invalid_argument("xi: b must be nonnegative");
    // expm1/log1p keep full precision for small b, where (1+g*eta)^b - 1
    // would cancel catastrophically.
    return cfg.n_t / op.eta * std::expm1(b * std::log1p(cfg.g() * op.eta));
}

double lower_bound_uncorr(const OperatingPoint &op, const AntennaConfig &cfg, const Allocation &alloc) {
    validate_r(op, cfg);
    validate_allocation(alloc, op, cfg);
    double prod = 1.0;
    for (int l = 1; l <= cfg.t(); ++l) {
        int shape = cfg.n_t + cfg.n_r - 2 * l + 1;
        prod *= gamma_inc(xi(alloc.b[l - 1], op, cfg), shape);
    }
    return prod;
}

double lower_bound_corr(const OperatingPoint &op, const AntennaConfig &cfg,
                        const std::vector<GammaMixture> &mixtures, const Allocation &alloc) {
    validate_r(op, cfg);
    validate_allocation(alloc, op, cfg);
    if (static_cast<int>(mixtures.size()) != cfg.t())
        throw std::invalid_argument("lower_bound_corr: expected one mixture per branch");
    double prod = 1.0;
    for (int l = 1; l <= cfg.t(); ++l)
        prod *= mixture_cdf(mixtures[l - 1], xi(alloc.b[l - 1], op, cfg));
    return prod;
}

double lower_bound_corr(const OperatingPoint &op, const AntennaConfig &cfg,
                        const EigenSpectrum &spectrum, const Allocation &alloc) {
    if (spectrum.all_ones())
        return lower_bound_uncorr(op, cfg, alloc);
    return lower_bound_corr(op, cfg, branch_mixtures(spectrum, cfg), alloc);
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ln of the branch-product bound; -inf on the simplex boundary where any
// branch cdf vanishes.
class LogBound {
  public:
    LogBound(const OperatingPoint &op, const AntennaConfig &cfg, const EigenSpectrum *spectrum)
        : op_(op), cfg_(cfg) {
        if (spectrum != nullptr && !spectrum->all_ones())
            mixtures_ = branch_mixtures(*spectrum, cfg);
    }

    double operator()(const std::vector<double> &b) const {
        double s = 0.0;
        for (int l = 1; l <= cfg_.t(); ++l) {
            double x = xi(b[l - 1], op_, cfg_);
            double cdf = mixtures_.empty()
                             ? gamma_inc(x, cfg_.n_t + cfg_.n_r - 2 * l + 1)
                             : mixture_cdf(mixtures_[l - 1], x);
            if (cdf <= 0.0)
                return kNegInf;
            s += std::log(cdf);
        }
        return s;
    }

    double plain(const std::vector<double> &b) const {
        double prod = 1.0;
        for (int l = 1; l <= cfg_.t(); ++l) {
            double x = xi(b[l - 1], op_, cfg_);
            prod *= mixtures_.empty() ? gamma_inc(x, cfg_.n_t + cfg_.n_r - 2 * l + 1)
                                      : mixture_cdf(mixtures_[l - 1], x);
        }
        return prod;
    }

    // d/db of one branch's ln cdf. dxi/db = L * (xi + n_t/eta) with
    // L = ln(1 + g*eta), so the slope stays exact even where xi underflows
    // the naive power form.
    double branch_slope(int l, double b) const {
        double x = xi(b, op_, cfg_);
        double hazard = mixtures_.empty()
                            ? gamma_pdf_over_cdf(x, cfg_.n_t + cfg_.n_r - 2 * l + 1)
                            : mixture_pdf(mixtures_[l - 1], x) / mixture_cdf(mixtures_[l - 1], x);
        double big_l = std::log1p(cfg_.g() * op_.eta);
        return hazard * big_l * (x + cfg_.n_t / op_.eta);
    }

  private:
    OperatingPoint op_;
    AntennaConfig cfg_;
    std::vector<GammaMixture> mixtures_;
};

// Maps t-1 free variables onto the simplex: clamp negatives, rescale if the
// partial sum overshoots r, last component takes the remainder.
std::vector<double> project_simplex(const std::vector<double> &x, double r) {
    std::vector<double> b(x.size() + 1);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        b[i] = std::max(x[i], 0.0);
        s += b[i];
    }
    if (s > r && s > 0.0) {
        double scale = r / s;
        s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            b[i] *= scale;
            s += b[i];
        }
    }
    b.back() = std::max(r - s, 0.0);
    return b;
}

// Gaussian elimination with partial pivoting, solution overwrites rhs.
// Returns false on a singular pivot.
bool solve_dense(std::vector<double> a, std::vector<double> &rhs, int n) {
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int row = col + 1; row < n; ++row)
            if (std::abs(a[row * n + col]) > std::abs(a[pivot * n + col]))
                pivot = row;
        if (a[pivot * n + col] == 0.0 || !std::isfinite(a[pivot * n + col]))
            return false;
        if (pivot != col) {
            for (int j = col; j < n; ++j)
                std::swap(a[col * n + j], a[pivot * n + j]);
            std::swap(rhs[col], rhs[pivot]);
        }
        for (int row = col + 1; row < n; ++row) {
            double m = a[row * n + col] / a[col * n + col];
            for (int j = col; j < n; ++j)
                a[row * n + j] -= m * a[col * n + j];
            rhs[row] -= m * rhs[col];
        }
    }
    for (int row = n - 1; row >= 0; --row) {
        double s = rhs[row];
        for (int j = row + 1; j < n; ++j)
            s -= a[row * n + j] * rhs[j];
        rhs[row] = s / a[row * n + row];
    }
    return true;
}

// Enumerates b_1..b_{t-1} over multiples of r/20 with partial sum <= r, in
// lexicographic order so the first strict maximum is also the
// lexicographically smallest tie winner.
void grid_scan(int depth, int levels, int remaining, std::vector<int> &steps,
               const std::function<void(const std::vector<int> &)> &visit) {
    if (depth == levels) {
        visit(steps);
        return;
    }
    for (int k = 0; k <= remaining; ++k) {
        steps[depth] = k;
        grid_scan(depth + 1, levels, remaining - k, steps, visit);
    }
}

} // namespace

std::pair<Allocation, double> optimize_allocation(const OperatingPoint &op, const AntennaConfig &cfg,
                                                  const EigenSpectrum *spectrum) {
    validate_r(op, cfg);
    const int t = cfg.t();
    if (op.r == 0.0)
        return {Allocation{std::vector<double>(t, 0.0)}, 0.0};

    LogBound objective(op, cfg, spectrum);
    if (t == 1) {
        Allocation alloc{{op.r}};
        return {alloc, objective.plain(alloc.b)};
    }

    const double step = op.r / 20.0;
    std::vector<double> best_x(t - 1, 0.0);
    double best_f = kNegInf;
    std::vector<int> steps(t - 1, 0);
    grid_scan(0, t - 1, 20, steps, [&](const std::vector<int> &s) {
        std::vector<double> x(t - 1);
        for (int i = 0; i < t - 1; ++i)
            x[i] = s[i] * step;
        double f = objective(project_simplex(x, op.r));
        if (f > best_f) {
            best_f = f;
            best_x = x;
        }
    });
    // The uniform split is not on the coarse grid unless t divides 20.
    {
        std::vector<double> x(t - 1, op.r / t);
        double f = objective(project_simplex(x, op.r));
        if (f > best_f) {
            best_f = f;
            best_x = x;
        }
    }

    // Nelder-Mead refinement in the free coordinates, log-domain objective.
    const int n = t - 1;
    struct Vertex {
        std::vector<double> x;
        double f;
    };
    auto eval = [&](const std::vector<double> &x) { return objective(project_simplex(x, op.r)); };
    std::vector<Vertex> simplex;
    simplex.push_back({best_x, best_f});
    for (int i = 0; i < n; ++i) {
        std::vector<double> x = best_x;
        x[i] += step * 0.5;
        simplex.push_back({x, eval(x)});
    }
    auto by_f = [](const Vertex &a, const Vertex &b) { return a.f > b.f; };
    std::sort(simplex.begin(), simplex.end(), by_f);

    const int max_iter = 400 * n;
    for (int it = 0; it < max_iter; ++it) {
        if (simplex.front().f - simplex.back().f <= 1e-8 && std::isfinite(simplex.back().f))
            break;
        std::vector<double> centroid(n, 0.0);
        for (int v = 0; v < n; ++v)
            for (int i = 0; i < n; ++i)
                centroid[i] += simplex[v].x[i] / n;
        const Vertex &worst = simplex.back();

        auto blend = [&](double coef) {
            std::vector<double> x(n);
            for (int i = 0; i < n; ++i)
                x[i] = centroid[i] + coef * (centroid[i] - worst.x[i]);
            return x;
        };

        std::vector<double> xr = blend(1.0);
        double fr = eval(xr);
        if (fr > simplex.front().f) {
            std::vector<double> xe = blend(2.0);
            double fe = eval(xe);
            simplex.back() = fe > fr ? Vertex{xe, fe} : Vertex{xr, fr};
        } else if (fr > simplex[n - 1].f) {
            simplex.back() = {xr, fr};
        } else {
            std::vector<double> xc = blend(-0.5);
            double fc = eval(xc);
            if (fc > worst.f) {
                simplex.back() = {xc, fc};
            } else {
                for (int v = 1; v <= n; ++v) {
                    for (int i = 0; i < n; ++i)
                        simplex[v].x[i] = 0.5 * (simplex[v].x[i] + simplex[0].x[i]);
                    simplex[v].f = eval(simplex[v].x);
                }
            }
        }
        std::sort(simplex.begin(), simplex.end(), by_f);
    }

    std::vector<double> b = project_simplex(simplex.front().x, op.r);

    // Stationarity polish. The maximum is interior (every branch slope blows
    // up as b_l -> 0), so at the optimum all branch slopes are equal. Newton
    // on the pairwise slope differences takes the Nelder-Mead allocation from
    // roughly 1e-5 down to machine precision; the high-snr diversity
    // estimates are first-order sensitive to the allocation and need this.
    {
        const double floor_b = op.r * 1e-12;
        double s0 = 0.0;
        for (double &v : b) {
            v = std::max(v, floor_b);
            s0 += v;
        }
        for (double &v : b)
            v *= op.r / s0;

        std::vector<double> cand = b;
        double f_best = objective(b);
        auto residual = [&](const std::vector<double> &bb, std::vector<double> &g) {
            double last = objective.branch_slope(t, bb[t - 1]);
            double scale = std::abs(last);
            for (int i = 0; i < t - 1; ++i) {
                double s = objective.branch_slope(i + 1, bb[i]);
                g[i] = s - last;
                scale = std::max(scale, std::abs(s));
            }
            return scale;
        };

        std::vector<double> g(t - 1), gt(t - 1);
        for (int iter = 0; iter < 60; ++iter) {
            double scale = residual(cand, g);
            double gmax = 0.0;
            for (double v : g)
                gmax = std::max(gmax, std::abs(v));
            if (!(scale > 0.0) || !std::isfinite(scale) || gmax <= scale * 1e-13)
                break;

            // Jacobian of g in the free coordinates b_0..b_{t-2}, with
            // b_{t-1} = r - sum, via central differences on the slopes.
            std::vector<double> dslope(t);
            for (int l = 0; l < t; ++l) {
                double h = 1e-6 * std::max(cand[l], 1e-6 * op.r);
                dslope[l] = (objective.branch_slope(l + 1, cand[l] + h) -
                             objective.branch_slope(l + 1, cand[l] - h)) /
                            (2.0 * h);
            }
            const int n_free = t - 1;
            std::vector<double> jac(static_cast<std::size_t>(n_free) * n_free);
            for (int i = 0; i < n_free; ++i)
                for (int j = 0; j < n_free; ++j)
                    jac[i * n_free + j] = (i == j ? dslope[i] : 0.0) + dslope[t - 1];

            std::vector<double> d = g;
            if (!solve_dense(jac, d, n_free))
                break;

            // Backtrack until the step stays feasible and shrinks the
            // residual; Newton is only trusted inside the basin Nelder-Mead
            // already found.
            double step = 1.0;
            bool accepted = false;
            for (int halving = 0; halving < 30; ++halving, step *= 0.5) {
                std::vector<double> trial = cand;
                double s = 0.0;
                bool feasible = true;
                for (int i = 0; i < n_free; ++i) {
                    trial[i] = cand[i] - step * d[i];
                    if (trial[i] <= 0.0) {
                        feasible = false;
                        break;
                    }
                    s += trial[i];
                }
                if (!feasible || s >= op.r)
                    continue;
                trial[t - 1] = op.r - s;
                double tscale = residual(trial, gt);
                double tmax = 0.0;
                for (double v : gt)
                    tmax = std::max(tmax, std::abs(v));
                if (std::isfinite(tscale) && tmax < gmax) {
                    cand = trial;
                    accepted = true;
                    break;
                }
            }
            if (!accepted)
                break;
        }

        double f_cand = objective(cand);
        if (std::isfinite(f_cand) && f_cand >= f_best - 1e-9 * (1.0 + std::abs(f_best)))
            b = cand;
    }

    return {Allocation{b}, objective.plain(b)};
}

OutageEstimate optimized_bound(const OperatingPoint &op, const AntennaConfig &cfg,
                               const EigenSpectrum *spectrum) {
    auto [alloc, value] = optimize_allocation(op, cfg, spectrum);
    return {value, EstimateKind::lower_bound, 0.0, std::move(alloc)};
}

} // namespace dmtk
