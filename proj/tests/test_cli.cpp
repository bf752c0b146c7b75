#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dmtk/sweep.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

const std::string &temp_dir() {
    static std::string dir = [] {
        char tmpl[] = "/tmp/dmtk_cli_XXXXXX";
        char *d = mkdtemp(tmpl);
        REQUIRE(d != nullptr);
        return std::string(d);
    }();
    return dir;
}

std::string slurp(const std::string &path) {
    std::ifstream f(path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

// Runs the binary through the shell so env prefixes and redirection work.
RunResult run_cli(const std::string &args, const std::string &env = "") {
    static int counter = 0;
    std::string err_path = temp_dir() + "/stderr_" + std::to_string(counter++);
    std::string cmd = env + (env.empty() ? "" : " ") + DMTK_CLI_PATH + " " + args + " 2>" + err_path;
    FILE *pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult res;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0)
        res.out.append(buf, n);
    int status = pclose(pipe);
    res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    res.err = slurp(err_path);
    return res;
}

int data_lines(const std::string &csv) {
    int lines = 0;
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line); // header
    while (std::getline(is, line))
        if (!line.empty())
            ++lines;
    return lines;
}

std::string write_file(const std::string &name, const std::string &content) {
    std::string path = temp_dir() + "/" + name;
    std::ofstream f(path);
    f << content;
    return path;
}

} // namespace

TEST_CASE("bound emits one csv row per grid point") {
    RunResult res = run_cli("bound --nt 2 --nr 2 --rho 0.9 --r 0.5 --eta-db 10");
    CHECK(res.code == 0);
    CHECK(res.out.rfind("quantity,r,eta_db,rho,value,stderr,b\n", 0) == 0);
    CHECK(data_lines(res.out) == 1);
    CHECK(res.out.find("bound-corr,0.5,10,0.9") != std::string::npos);

    res = run_cli("bound --nt 2 --nr 2 --rho 0 --r-grid 0.5:1.5:0.5 --eta-grid-db 0:20:5");
    CHECK(res.code == 0);
    CHECK(data_lines(res.out) == 15);
    CHECK(res.out.find("bound-uncorr") != std::string::npos);
    CHECK(res.out.find("bound-corr") == std::string::npos);
}

TEST_CASE("invalid inputs exit with code 2") {
    CHECK(run_cli("bound --nt 2 --nr 2 --rho 1.0 --r 0.5 --eta-db 10").code == 2);
    CHECK(run_cli("bound --nt 2 --nr 2 --rho 0.5 --eta-db 10").code == 2); // no rate
    CHECK(run_cli("bound --nr 2 --rho 0.5 --r 1 --eta-db 10").code == 2);  // no --nt
    CHECK(run_cli("bound --nt 2 --nr 2 --r 1 --eta-db 10 --nonsense").code == 2);
    CHECK(run_cli("bound --nt 2 --nr 2 --r-grid 0:1 --eta-db 10").code == 2);
    CHECK(run_cli("bound --nt 2 --nr 2 --r 3.5 --eta-db 10").code == 2); // r > t
    CHECK(run_cli("").code == 2);                                        // subcommand required

    RunResult rho_err = run_cli("bound --nt 2 --nr 2 --rho 1.0 --r 0.5 --eta-db 10");
    CHECK(rho_err.err.find("full-rank") != std::string::npos);
}

TEST_CASE("domain failures exit with code 3") {
    // zero rate has no finite-rate diversity estimate
    CHECK(run_cli("diversity --nt 2 --nr 2 --rho 0 --r 0 --eta-db 10").code == 3);
}

TEST_CASE("io failures exit with code 4") {
    CHECK(run_cli("bound --nt 2 --nr 2 --corr-file " + temp_dir() + "/absent.txt --r 1 --eta-db 10")
              .code == 4);
    CHECK(run_cli("bound --nt 2 --nr 2 --rho 0 --r 1 --eta-db 10 --out /nonexistent/dir/x.csv")
              .code == 4);
}

TEST_CASE("correlation files are parsed and flagged in the rho column") {
    std::string good = write_file("corr_good.txt", "2\n1+0j 0.5+0.1j\n0.5-0.1j 1+0j\n");
    RunResult res = run_cli("bound --nt 2 --nr 2 --corr-file " + good + " --r 1 --eta-db 10");
    CHECK(res.code == 0);
    CHECK(data_lines(res.out) == 1);
    CHECK(res.out.find("bound-corr,1,10,-1,") != std::string::npos);

    std::string wrong_dim = write_file("corr_dim.txt", "3\n1 0 0\n0 1 0\n0 0 1\n");
    CHECK(run_cli("bound --nt 2 --nr 2 --corr-file " + wrong_dim + " --r 1 --eta-db 10").code == 2);

    std::string not_herm = write_file("corr_herm.txt", "2\n1 0.5+0.1j\n0.5+0.1j 1\n");
    CHECK(run_cli("bound --nt 2 --nr 2 --corr-file " + not_herm + " --r 1 --eta-db 10").code == 2);

    std::string bad_token = write_file("corr_tok.txt", "2\n1 q\n0.5 1\n");
    CHECK(run_cli("bound --nt 2 --nr 2 --corr-file " + bad_token + " --r 1 --eta-db 10").code == 2);

    std::string truncated = write_file("corr_trunc.txt", "2\n1 0.5\n");
    CHECK(run_cli("bound --nt 2 --nr 2 --corr-file " + truncated + " --r 1 --eta-db 10").code == 2);
}

TEST_CASE("diversity curve flags ignore the unused grid") {
    RunResult res = run_cli("diversity --dmax --nt 2 --nr 2 --eta-grid-db 0:40:10");
    CHECK(res.code == 0);
    CHECK(data_lines(res.out) == 5);
    CHECK(res.out.find("d-max") != std::string::npos);

    res = run_cli("diversity --asymptote --nt 2 --nr 2 --r-grid 0:2:0.5");
    CHECK(res.code == 0);
    CHECK(data_lines(res.out) == 5);
    CHECK(res.out.find("d-asym,2,") != std::string::npos);

    // relative gain needs a correlated case
    CHECK(run_cli("diversity --relative-gain --nt 2 --nr 2 --rho 0 --r 0.5 --eta-db 10").code == 2);
    res = run_cli("diversity --relative-gain --nt 2 --nr 2 --rho 0.9 --r 0.5 --eta-db 10");
    CHECK(res.code == 0);
    CHECK(res.out.find("relative-gain") != std::string::npos);
}

TEST_CASE("simulate output is reproducible and thread count invariant") {
    std::string args = "simulate --nt 2 --nr 2 --rho 0.9 --r 1 --eta-db 10 --samples 40000 --seed 5";
    RunResult a = run_cli(args);
    RunResult b = run_cli(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);

    RunResult c = run_cli(args + " --threads 4");
    RunResult d = run_cli(args + " --threads 1");
    CHECK(c.out == a.out);
    CHECK(d.out == a.out);

    RunResult e = run_cli(args, "OMP_NUM_THREADS=3");
    CHECK(e.out == a.out);

    RunResult f = run_cli(
        "simulate --nt 2 --nr 2 --rho 0.9 --r 1 --eta-db 10 --samples 40000 --seed 6");
    CHECK(f.out != a.out);
}

TEST_CASE("simulate emits monte carlo rows with error bars") {
    RunResult res = run_cli(
        "simulate --nt 1 --nr 1 --rho 0 --r 0.5 --eta-db 10 --samples 50000 --format jsonl");
    CHECK(res.code == 0);
    std::istringstream is(res.out);
    std::vector<dmtk::CurveRecord> recs = dmtk::parse_jsonl(is);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].quantity == "mc-outage");
    CHECK(recs[0].value > 0.0);
    CHECK(recs[0].std_err > 0.0);
    CHECK(recs[0].b.empty());

    res = run_cli("simulate --quantity div-fd --nt 1 --nr 1 --rho 0 --r 0.5 --eta-db 10 "
                  "--samples 50000 --rel-step 0.05 --format jsonl");
    CHECK(res.code == 0);
    std::istringstream is2(res.out);
    recs = dmtk::parse_jsonl(is2);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].quantity == "div-fd");
    CHECK(recs[0].value > 0.0);
    CHECK(recs[0].std_err > 0.0);
}

TEST_CASE("output lands in the requested file") {
    std::string path = temp_dir() + "/bound.csv";
    RunResult res =
        run_cli("bound --nt 2 --nr 2 --rho 0.5 --r 1 --eta-db 10 --out " + path);
    CHECK(res.code == 0);
    CHECK(res.out.empty());
    std::string content = slurp(path);
    CHECK(data_lines(content) == 1);
    CHECK(content.find("bound-corr") != std::string::npos);
}

TEST_CASE("config files feed defaults that flags override") {
    std::string cfg = write_file("sweep.ini", "[bound]\n"
                                              "nt=2\n"
                                              "nr=2\n"
                                              "rho=0.5\n"
                                              "r=1.0\n"
                                              "eta-db=10\n");
    RunResult base = run_cli("--config " + cfg + " bound");
    CHECK(base.code == 0);
    CHECK(data_lines(base.out) == 1);
    CHECK(base.out.find("bound-corr,1,10,0.5") != std::string::npos);

    RunResult over = run_cli("--config " + cfg + " bound --eta-db 20");
    CHECK(over.code == 0);
    CHECK(over.out.find("bound-corr,1,20,0.5") != std::string::npos);
}
