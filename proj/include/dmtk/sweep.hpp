#pragma once

#include "dmtk/diversity.hpp"
#include "dmtk/montecarlo.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dmtk {

// Quantities a sweep can emit.  Bound and estimate resolve to their
// "-uncorr"/"-corr" record names per correlation case.
enum class Quantity { bound, div_est, div_fd, mc_outage, d_max_curve, d_asym_curve, relative_gain };

struct CurveRecord {
    std::string quantity;
    double r = 0.0;
    double eta_db = 0.0;
    double rho = 0.0; // -1 when the correlation came from an explicit matrix
    double value = 0.0;
    double std_err = 0.0;
    std::vector<double> b; // optimized allocation, empty when not applicable

    bool operator==(const CurveRecord &) const = default;
};

// start + k*step up to stop, inclusive within 1e-9 slack.
std::vector<double> make_grid(double start, double stop, double step);

// 17 significant digits: enough for doubles to round-trip exactly.
std::string format_double(double v);

// Deterministic output order: (quantity, rho, r, eta_db).
void sort_records(std::vector<CurveRecord> &records);

void write_csv(std::ostream &os, const std::vector<CurveRecord> &records);
void write_jsonl(std::ostream &os, const std::vector<CurveRecord> &records);
std::vector<CurveRecord> parse_jsonl(std::istream &is);

struct SweepSpec {
    AntennaConfig cfg{1, 1};
    std::vector<double> rhos;                  // one correlation case per entry
    std::optional<CorrelationMatrix> corr;     // explicit matrix instead of rhos
    std::vector<double> r_grid;
    std::vector<double> eta_db_grid;
    std::vector<Quantity> quantities;
    McConfig mc;
    double fd_rel_step = 1e-2;
};

// Runs every (quantity, correlation case, grid point) combination, in
// parallel over grid points, and returns the records sorted.  dB converts to
// linear SNR here and nowhere deeper.
std::vector<CurveRecord> run_sweep(const SweepSpec &spec);

} // namespace dmtk
