// Times the serial reference outage sampler against the OpenMP kernel and
// checks they agree bit for bit.

#include "dmtk/montecarlo.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cstdio>
#include <cstdlib>

namespace {

double wall_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

} // namespace

int main(int argc, char **argv) {
    std::int64_t samples = argc > 1 ? std::atoll(argv[1]) : 2000000;
    dmtk::AntennaConfig cfg(2, 2);
    dmtk::OperatingPoint op(10.0, 1.0);
    dmtk::CorrelationMatrix r_t = dmtk::build_single_coeff_correlation(0.9, 2);
    dmtk::McConfig mc;
    mc.n_samples = samples;

    double t0 = wall_seconds();
    dmtk::McResult serial = dmtk::outage_mc_serial(op, cfg, r_t, mc);
    double t1 = wall_seconds();
    dmtk::McResult parallel = dmtk::outage_mc(op, cfg, r_t, mc);
    double t2 = wall_seconds();

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("samples            : %lld\n", static_cast<long long>(samples));
    std::printf("serial reference   : %.3f s  (%.2f Msamples/s)\n", t1 - t0,
                samples / (t1 - t0) / 1e6);
    std::printf("openmp (%2d threads): %.3f s  (%.2f Msamples/s)\n", threads, t2 - t1,
                samples / (t2 - t1) / 1e6);
    std::printf("speedup            : %.2fx\n", (t1 - t0) / (t2 - t1));
    std::printf("p_out serial/openmp: %.10g / %.10g  (%s)\n", serial.p_out, parallel.p_out,
                serial.outage_count == parallel.outage_count ? "identical" : "MISMATCH");
    return serial.outage_count == parallel.outage_count ? 0 : 1;
}
