#include "dmtk/sweep.hpp"

#include "dmtk/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace dmtk {

std::vector<double> make_grid(double start, double stop, double step) {
    if (!(step > 0.0))
        throw std::invalid_argument("make_grid: step must be positive");
    if (stop < start - 1e-9)
        throw std::invalid_argument("make_grid: stop must not precede start");
    std::vector<double> grid;
    for (int k = 0;; ++k) {
        double v = start + k * step;
        if (v > stop + 1e-9)
            break;
        grid.push_back(v);
    }
    return grid;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void sort_records(std::vector<CurveRecord> &records) {
    std::stable_sort(records.begin(), records.end(), [](const CurveRecord &a, const CurveRecord &b) {
        return std::tie(a.quantity, a.rho, a.r, a.eta_db) <
               std::tie(b.quantity, b.rho, b.r, b.eta_db);
    });
}

void write_csv(std::ostream &os, const std::vector<CurveRecord> &records) {
    os << "quantity,r,eta_db,rho,value,stderr,b\n";
    for (const CurveRecord &rec : records) {
        os << rec.quantity << ',' << format_double(rec.r) << ',' << format_double(rec.eta_db) << ','
           << format_double(rec.rho) << ',' << format_double(rec.value) << ','
           << format_double(rec.std_err) << ',';
        for (std::size_t i = 0; i < rec.b.size(); ++i) {
            if (i)
                os << ';';
            os << format_double(rec.b[i]);
        }
        os << '\n';
    }
}

void write_jsonl(std::ostream &os, const std::vector<CurveRecord> &records) {
    for (const CurveRecord &rec : records) {
        os << "{\"quantity\":\"" << rec.quantity << "\",\"r\":" << format_double(rec.r)
           << ",\"eta_db\":" << format_double(rec.eta_db) << ",\"rho\":" << format_double(rec.rho)
           << ",\"value\":" << format_double(rec.value)
           << ",\"stderr\":" << format_double(rec.std_err) << ",\"b\":[";
        for (std::size_t i = 0; i < rec.b.size(); ++i) {
            if (i)
                os << ',';
            os << format_double(rec.b[i]);
        }
        os << "]}\n";
    }
}

std::vector<CurveRecord> parse_jsonl(std::istream &is) {
    std::vector<CurveRecord> records;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        nlohmann::json j = nlohmann::json::parse(line);
        CurveRecord rec;
        rec.quantity = j.at("quantity").get<std::string>();
        rec.r = j.at("r").get<double>();
        rec.eta_db = j.at("eta_db").get<double>();
        rec.rho = j.at("rho").get<double>();
        rec.value = j.at("value").get<double>();
        rec.std_err = j.at("stderr").get<double>();
        rec.b = j.at("b").get<std::vector<double>>();
        records.push_back(std::move(rec));
    }
    return records;
}

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

struct CorrelationCase {
    double rho_label;                     // value for the record's rho column
    std::optional<EigenSpectrum> spectrum; // nullopt for the uncorrelated case
};

std::vector<CorrelationCase> correlation_cases(const SweepSpec &spec) {
    std::vector<CorrelationCase> cases;
    if (spec.corr.has_value()) {
        EigenSpectrum s = eigen_spectrum(*spec.corr);
        if (s.all_ones())
            cases.push_back({-1.0, std::nullopt});
        else
            cases.push_back({-1.0, std::move(s)});
        return cases;
    }
    for (double rho : spec.rhos) {
        if (rho == 0.0) {
            cases.push_back({0.0, std::nullopt});
        } else {
            EigenSpectrum s = eigen_spectrum(build_single_coeff_correlation(rho, spec.cfg.n_t));
            cases.push_back({rho, std::move(s)});
        }
    }
    return cases;
}

} // namespace

std::vector<CurveRecord> run_sweep(const SweepSpec &spec) {
    if (spec.r_grid.empty() || spec.eta_db_grid.empty())
        throw std::invalid_argument("run_sweep: r and eta grids must be non-empty");
    for (double r : spec.r_grid)
        if (!(r >= 0.0) || r > spec.cfg.t() + 1e-12)
            throw std::invalid_argument("run_sweep: r grid leaves [0, min(n_t, n_r)]");
    std::vector<CorrelationCase> cases = correlation_cases(spec);

    struct Task {
        Quantity quantity;
        const CorrelationCase *cc;
        double r;
        double eta_db;
    };
    std::vector<Task> tasks;
    for (Quantity q : spec.quantities) {
        switch (q) {
        case Quantity::d_max_curve:
            // Correlation-independent; one record per eta point.
            for (double eta_db : spec.eta_db_grid)
                tasks.push_back({q, nullptr, 0.0, eta_db});
            break;
        case Quantity::d_asym_curve:
            // SNR- and correlation-independent; one record per r point.
            for (double r : spec.r_grid)
                tasks.push_back({q, nullptr, r, 0.0});
            break;
        default:
            for (const CorrelationCase &cc : cases)
                for (double r : spec.r_grid)
                    for (double eta_db : spec.eta_db_grid)
                        tasks.push_back({q, &cc, r, eta_db});
        }
    }

    std::vector<CurveRecord> records(tasks.size());
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (failed.load(std::memory_order_relaxed))
            continue;
        try {
            const Task &task = tasks[i];
            CurveRecord rec;
            rec.r = task.r;
            rec.eta_db = task.eta_db;
            const EigenSpectrum *spectrum = nullptr;
            bool correlated = false;
            if (task.cc != nullptr) {
                rec.rho = task.cc->rho_label;
                if (task.cc->spectrum.has_value()) {
                    spectrum = &*task.cc->spectrum;
                    correlated = true;
                }
            }
            const double eta = db_to_linear(task.eta_db);
            switch (task.quantity) {
            case Quantity::bound: {
                OutageEstimate est = optimized_bound(OperatingPoint(eta, task.r), spec.cfg, spectrum);
                rec.quantity = correlated ? "bound-corr" : "bound-uncorr";
                rec.value = est.value;
                rec.b = est.allocation.b;
                break;
            }
            case Quantity::div_est: {
                DiversityEstimate est =
                    optimized_estimate(OperatingPoint(eta, task.r), spec.cfg, spectrum);
                rec.quantity = correlated ? "div-est-corr" : "div-est-uncorr";
                rec.value = est.value;
                rec.b = est.allocation.b;
                break;
            }
            case Quantity::div_fd: {
                CorrelationMatrix r_t = spec.corr.has_value()
                                            ? *spec.corr
                                            : build_single_coeff_correlation(rec.rho > 0.0 ? rec.rho : 0.0,
                                                                             spec.cfg.n_t);
                FdDiversity fd =
                    diversity_fd(OperatingPoint(eta, task.r), spec.cfg, r_t, spec.mc, spec.fd_rel_step);
                rec.quantity = "div-fd";
                rec.value = fd.value;
                rec.std_err = fd.std_err;
                break;
            }
            case Quantity::mc_outage: {
                CorrelationMatrix r_t = spec.corr.has_value()
                                            ? *spec.corr
                                            : build_single_coeff_correlation(rec.rho > 0.0 ? rec.rho : 0.0,
                                                                             spec.cfg.n_t);
                McResult res = outage_mc(OperatingPoint(eta, task.r), spec.cfg, r_t, spec.mc);
                rec.quantity = "mc-outage";
                rec.value = res.p_out;
                rec.std_err = res.std_err;
                break;
            }
            case Quantity::d_max_curve:
                rec.quantity = "d-max";
                rec.value = d_max(eta, spec.cfg);
                break;
            case Quantity::d_asym_curve:
                rec.quantity = "d-asym";
                rec.value = d_asym(task.r, spec.cfg);
                break;
            case Quantity::relative_gain: {
                if (!correlated)
                    throw std::invalid_argument("relative gain requires a correlated case (rho > 0)");
                rec.quantity = "relative-gain";
                rec.value = relative_gain(task.r, eta, spec.cfg, *spectrum);
                break;
            }
            }
            records[i] = std::move(rec);
        } catch (...) {
#pragma omp critical
            {
                if (!failure)
                    failure = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
            }
        }
    }
    if (failure)
        std::rethrow_exception(failure);
    sort_records(records);
    return records;
}

} // namespace dmtk
