// Command-line front end: analytic outage bounds, diversity estimates and
// Monte Carlo ground truth over (r, eta, rho) sweeps, emitted as CSV or
// JSON lines.  Exit codes: 0 success, 2 invalid input, 3 numerical or
// statistical failure, 4 I/O failure.

#include "dmtk/errors.hpp"
#include "dmtk/sweep.hpp"

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include <complex>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOpts {
    int nt = 0;
    int nr = 0;
    std::vector<double> rhos{0.0};
    std::string corr_file;
    double r_single = 0.0;
    std::string r_grid;
    double eta_single = 0.0;
    std::string eta_grid;
    std::string out;
    std::string format = "csv";
    std::uint64_t seed = 42;
    std::int64_t samples = 1000000;
    int threads = 0;

    CLI::Option *r_opt = nullptr;
    CLI::Option *r_grid_opt = nullptr;
    CLI::Option *eta_opt = nullptr;
    CLI::Option *eta_grid_opt = nullptr;
};

void add_common(CLI::App *cmd, CommonOpts &o) {
    cmd->add_option("--nt", o.nt, "Transmit antennas")->required()->check(CLI::PositiveNumber);
    cmd->add_option("--nr", o.nr, "Receive antennas")->required()->check(CLI::PositiveNumber);
    CLI::Option *rho = cmd->add_option("--rho", o.rhos, "Correlation coefficient(s) in [0,1)")
                           ->delimiter(',');
    cmd->add_option("--corr-file", o.corr_file,
                    "Transmit correlation matrix file (dim, then dim rows of re+imj entries)")
        ->excludes(rho);
    o.r_opt = cmd->add_option("--r", o.r_single, "Multiplexing gain");
    o.r_grid_opt = cmd->add_option("--r-grid", o.r_grid, "Multiplexing grid start:stop:step")
                       ->excludes(o.r_opt);
    o.eta_opt = cmd->add_option("--eta-db", o.eta_single, "SNR in dB");
    o.eta_grid_opt = cmd->add_option("--eta-grid-db", o.eta_grid, "SNR grid start:stop:step in dB")
                         ->excludes(o.eta_opt);
    cmd->add_option("--out", o.out, "Output path (default stdout)");
    cmd->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    cmd->add_option("--seed", o.seed, "Monte Carlo seed");
    cmd->add_option("--samples", o.samples, "Monte Carlo samples per point")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--threads", o.threads, "Worker threads (0 = library default)");
}

std::vector<double> parse_grid_string(const std::string &s, const char *what) {
    std::vector<double> parts;
    std::string token;
    std::istringstream is(s);
    while (std::getline(is, token, ':'))
        parts.push_back(std::stod(token));
    if (parts.size() != 3)
        throw std::invalid_argument(std::string(what) + ": expected start:stop:step");
    return dmtk::make_grid(parts[0], parts[1], parts[2]);
}

std::vector<double> resolve_grid(const CLI::Option *single_opt, double single_value,
                                 const CLI::Option *grid_opt, const std::string &grid_value,
                                 double fallback, const char *what, bool required) {
    if (grid_opt->count() > 0)
        return parse_grid_string(grid_value, what);
    if (single_opt->count() > 0)
        return {single_value};
    if (required)
        throw std::invalid_argument(std::string(what) + " required for this command");
    return {fallback};
}

std::complex<double> parse_complex_token(const std::string &token) {
    std::string s = token;
    bool has_j = !s.empty() && (s.back() == 'j' || s.back() == 'J');
    if (has_j)
        s.pop_back();
    // Split at the last +/- that is not an exponent sign and not leading.
    std::size_t split = std::string::npos;
    for (std::size_t i = 1; i < s.size(); ++i)
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E')
            split = i;
    std::size_t used = 0;
    if (split == std::string::npos) {
        double v = std::stod(s, &used);
        if (used != s.size())
            throw std::invalid_argument("corr-file: malformed complex value '" + token + "'");
        return has_j ? std::complex<double>(0.0, v) : std::complex<double>(v, 0.0);
    }
    if (!has_j)
        throw std::invalid_argument("corr-file: malformed complex value '" + token + "'");
    double re = std::stod(s.substr(0, split), &used);
    if (used != split)
        throw std::invalid_argument("corr-file: malformed complex value '" + token + "'");
    std::string imag_part = s.substr(split);
    double im = imag_part == "+" ? 1.0 : imag_part == "-" ? -1.0 : std::stod(imag_part, &used);
    if (imag_part != "+" && imag_part != "-" && used != imag_part.size())
        throw std::invalid_argument("corr-file: malformed complex value '" + token + "'");
    return {re, im};
}

dmtk::CorrelationMatrix load_corr_file(const std::string &path, int nt) {
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot open correlation file: " + path);
    int dim = 0;
    if (!(f >> dim))
        throw std::invalid_argument("corr-file: missing dimension header");
    if (dim != nt)
        throw std::invalid_argument("corr-file: dimension does not match --nt");
    dmtk::CMatrix m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            std::string token;
            if (!(f >> token))
                throw std::invalid_argument("corr-file: too few entries");
            m(i, j) = parse_complex_token(token);
        }
    return dmtk::CorrelationMatrix(std::move(m));
}

void validate_rhos(const std::vector<double> &rhos) {
    if (rhos.empty())
        throw std::invalid_argument("--rho: at least one value required");
    for (double rho : rhos)
        if (!(rho >= 0.0) || rho >= 1.0)
            throw std::invalid_argument(
                "--rho: values must lie in [0, 1); rho = 1 breaks the full-rank requirement");
}

void emit(const CommonOpts &o, const std::vector<dmtk::CurveRecord> &records) {
    std::ofstream file;
    if (!o.out.empty()) {
        file.open(o.out);
        if (!file)
            throw IoError("cannot open output file: " + o.out);
    }
    std::ostream &os = o.out.empty() ? std::cout : file;
    if (o.format == "csv")
        dmtk::write_csv(os, records);
    else
        dmtk::write_jsonl(os, records);
    os.flush();
    if (!os)
        throw IoError("failed writing output");
}

// Quantities whose records depend on the r grid / eta grid.
bool wants_r(const std::vector<dmtk::Quantity> &qs) {
    for (dmtk::Quantity q : qs)
        if (q != dmtk::Quantity::d_max_curve)
            return true;
    return false;
}

bool wants_eta(const std::vector<dmtk::Quantity> &qs) {
    for (dmtk::Quantity q : qs)
        if (q != dmtk::Quantity::d_asym_curve)
            return true;
    return false;
}

int run_subcommand(const CommonOpts &o, std::vector<dmtk::Quantity> quantities, double fd_rel_step) {
    if (o.threads > 0) {
#ifdef _OPENMP
        omp_set_num_threads(o.threads);
#endif
    }
    dmtk::SweepSpec spec;
    spec.cfg = dmtk::AntennaConfig(o.nt, o.nr);
    if (!o.corr_file.empty())
        spec.corr = load_corr_file(o.corr_file, o.nt);
    else {
        validate_rhos(o.rhos);
        spec.rhos = o.rhos;
    }
    spec.r_grid = resolve_grid(o.r_opt, o.r_single, o.r_grid_opt, o.r_grid, 0.0, "--r",
                               wants_r(quantities));
    spec.eta_db_grid = resolve_grid(o.eta_opt, o.eta_single, o.eta_grid_opt, o.eta_grid, 0.0,
                                    "--eta-db", wants_eta(quantities));
    spec.quantities = std::move(quantities);
    spec.mc.seed = o.seed;
    spec.mc.n_samples = o.samples;
    spec.fd_rel_step = fd_rel_step;
    emit(o, dmtk::run_sweep(spec));
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Finite-SNR diversity-multiplexing tradeoff toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a key=value file");
    app.get_config_ptr()->configurable(false);

    CommonOpts bound_opts;
    CLI::App *bound = app.add_subcommand("bound", "Analytic outage lower bound over a sweep");
    add_common(bound, bound_opts);

    CommonOpts div_opts;
    CLI::App *diversity = app.add_subcommand("diversity", "Diversity estimates over a sweep");
    add_common(diversity, div_opts);
    bool dmax_flag = false, asym_flag = false, relgain_flag = false, exact_flag = false;
    double div_rel_step = 1e-2;
    CLI::Option *dmax_opt = diversity->add_flag("--dmax", dmax_flag, "Emit the r -> 0 diversity ceiling");
    CLI::Option *asym_opt =
        diversity->add_flag("--asymptote", asym_flag, "Emit the infinite-SNR tradeoff curve");
    CLI::Option *relgain_opt = diversity->add_flag("--relative-gain", relgain_flag,
                                                   "Emit correlated/uncorrelated estimate ratios");
    dmax_opt->excludes(asym_opt)->excludes(relgain_opt);
    asym_opt->excludes(relgain_opt);
    diversity->add_flag("--exact", exact_flag, "Add Monte Carlo finite-difference records");
    diversity->add_option("--rel-step", div_rel_step, "Relative SNR step for --exact");

    CommonOpts sim_opts;
    CLI::App *simulate = app.add_subcommand("simulate", "Monte Carlo outage / diversity");
    add_common(simulate, sim_opts);
    std::string sim_quantity = "mc-outage";
    double sim_rel_step = 1e-2;
    simulate->add_option("--quantity", sim_quantity, "What to simulate")
        ->check(CLI::IsMember({"mc-outage", "div-fd"}));
    simulate->add_option("--rel-step", sim_rel_step, "Relative SNR step for div-fd");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (bound->parsed())
            return run_subcommand(bound_opts, {dmtk::Quantity::bound}, 1e-2);
        if (diversity->parsed()) {
            std::vector<dmtk::Quantity> qs;
            if (dmax_flag)
                qs = {dmtk::Quantity::d_max_curve};
            else if (asym_flag)
                qs = {dmtk::Quantity::d_asym_curve};
            else if (relgain_flag)
                qs = {dmtk::Quantity::relative_gain};
            else {
                qs = {dmtk::Quantity::div_est};
                if (exact_flag)
                    qs.push_back(dmtk::Quantity::div_fd);
            }
            return run_subcommand(div_opts, std::move(qs), div_rel_step);
        }
        std::vector<dmtk::Quantity> qs{sim_quantity == "mc-outage" ? dmtk::Quantity::mc_outage
                                                                   : dmtk::Quantity::div_fd};
        return run_subcommand(sim_opts, std::move(qs), sim_rel_step);
    } catch (const IoError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const dmtk::NumericalError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
