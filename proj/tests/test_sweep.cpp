#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dmtk/sweep.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace dmtk;

namespace {

CurveRecord sample_record() {
    CurveRecord rec;
    rec.quantity = "bound-corr";
    rec.r = 0.5;
    rec.eta_db = 10.0;
    rec.rho = 0.9;
    rec.value = 1.0 / 3.0;
    rec.std_err = 0.0;
    rec.b = {0.3, 0.2};
    return rec;
}

} // namespace

TEST_CASE("grids are inclusive of a representable stop") {
    CHECK(make_grid(0.0, 2.0, 0.5) == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
    CHECK(make_grid(0.0, 40.0, 5.0).size() == 9);
    CHECK(make_grid(1.0, 1.0, 0.1) == std::vector<double>{1.0});
    CHECK(make_grid(5.0, 6.0, 10.0) == std::vector<double>{5.0});
    // accumulated rounding must not drop the endpoint
    CHECK(make_grid(0.0, 1.9, 0.1).size() == 20);
    CHECK_THROWS_AS(make_grid(0.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(2.0, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("doubles survive the text round trip exactly") {
    for (double v : {0.1, 1.0 / 3.0, 2.7487286142740911, 1e-300, 6.02214076e23, -0.0}) {
        CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
    }
}

TEST_CASE("csv layout is stable") {
    std::ostringstream os;
    write_csv(os, {sample_record()});
    std::istringstream is(os.str());
    std::string header, line;
    std::getline(is, header);
    std::getline(is, line);
    CHECK(header == "quantity,r,eta_db,rho,value,stderr,b");
    CHECK(line == "bound-corr,0.5,10,0.90000000000000002,0.33333333333333331,0,0.29999999999999999;0.20000000000000001");
}

TEST_CASE("jsonl round trips records exactly") {
    std::vector<CurveRecord> recs{sample_record()};
    recs.push_back(sample_record());
    recs[1].quantity = "d-max";
    recs[1].b.clear();
    recs[1].value = 1e-17;

    std::ostringstream os;
    write_jsonl(os, recs);
    std::istringstream is(os.str());
    std::vector<CurveRecord> back = parse_jsonl(is);
    REQUIRE(back.size() == 2);
    CHECK(back[0] == recs[0]);
    CHECK(back[1] == recs[1]);
}

TEST_CASE("records sort by quantity then correlation then grid") {
    std::vector<CurveRecord> recs;
    for (double rho : {0.9, 0.0})
        for (double r : {1.0, 0.5})
            for (double eta : {20.0, 0.0}) {
                CurveRecord rec;
                rec.quantity = rho > 0 ? "bound-corr" : "bound-uncorr";
                rec.r = r;
                rec.eta_db = eta;
                rec.rho = rho;
                recs.push_back(rec);
            }
    sort_records(recs);
    CHECK(recs.front().quantity == "bound-corr");
    CHECK(recs.front().r == 0.5);
    CHECK(recs.front().eta_db == 0.0);
    CHECK(recs.back().quantity == "bound-uncorr");
    CHECK(recs.back().r == 1.0);
    CHECK(recs.back().eta_db == 20.0);
    for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
        auto key = [](const CurveRecord &x) {
            return std::tuple(x.quantity, x.rho, x.r, x.eta_db);
        };
        CHECK(key(recs[i]) <= key(recs[i + 1]));
    }
}

TEST_CASE("sweep covers the full cartesian grid") {
    SweepSpec spec;
    spec.cfg = AntennaConfig(2, 2);
    spec.rhos = {0.0, 0.5, 0.9};
    spec.r_grid = {0.5, 1.0};
    spec.eta_db_grid = make_grid(0.0, 40.0, 5.0);
    spec.quantities = {Quantity::bound};
    std::vector<CurveRecord> recs = run_sweep(spec);
    REQUIRE(recs.size() == 54);

    int uncorr = 0, corr = 0;
    for (const auto &rec : recs) {
        if (rec.quantity == "bound-uncorr")
            ++uncorr;
        else if (rec.quantity == "bound-corr")
            ++corr;
        CHECK(rec.value > 0.0);
        CHECK(rec.value <= 1.0);
        REQUIRE(rec.b.size() == 2);
        CHECK(rec.b[0] + rec.b[1] == doctest::Approx(rec.r).epsilon(1e-9));
    }
    CHECK(uncorr == 18);
    CHECK(corr == 36);

    // output arrives sorted
    std::vector<CurveRecord> sorted = recs;
    sort_records(sorted);
    CHECK(sorted == recs);
}

TEST_CASE("sweep quantities that ignore part of the grid emit single rows") {
    SweepSpec spec;
    spec.cfg = AntennaConfig(2, 2);
    spec.rhos = {0.0, 0.9};
    spec.r_grid = {0.5, 1.0, 1.5};
    spec.eta_db_grid = {0.0, 10.0};
    spec.quantities = {Quantity::d_max_curve, Quantity::d_asym_curve};
    std::vector<CurveRecord> recs = run_sweep(spec);

    int dmax = 0, dasym = 0;
    for (const auto &rec : recs) {
        if (rec.quantity == "d-max")
            ++dmax;
        if (rec.quantity == "d-asym")
            ++dasym;
        CHECK(rec.b.empty());
    }
    CHECK(dmax == 2);  // one per snr point
    CHECK(dasym == 3); // one per rate point
    CHECK(recs.size() == 5);
}

TEST_CASE("sweep validates the rate grid against the antenna count") {
    SweepSpec spec;
    spec.cfg = AntennaConfig(2, 2);
    spec.rhos = {0.0};
    spec.r_grid = {2.5};
    spec.eta_db_grid = {10.0};
    spec.quantities = {Quantity::bound};
    CHECK_THROWS_AS(run_sweep(spec), std::invalid_argument);

    spec.r_grid.clear();
    CHECK_THROWS_AS(run_sweep(spec), std::invalid_argument);
}

TEST_CASE("csv and jsonl encode identical values") {
    SweepSpec spec;
    spec.cfg = AntennaConfig(2, 2);
    spec.rhos = {0.5};
    spec.r_grid = {1.0};
    spec.eta_db_grid = {10.0, 20.0};
    spec.quantities = {Quantity::bound, Quantity::div_est};
    std::vector<CurveRecord> recs = run_sweep(spec);

    std::ostringstream js;
    write_jsonl(js, recs);
    std::istringstream is(js.str());
    std::vector<CurveRecord> back = parse_jsonl(is);
    REQUIRE(back.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i)
        CHECK(back[i] == recs[i]);

    std::ostringstream cs;
    write_csv(cs, recs);
    std::istringstream lines(cs.str());
    std::string line;
    std::getline(lines, line); // header
    for (const auto &rec : recs) {
        REQUIRE(std::getline(lines, line));
        // value sits in the fifth comma separated field
        std::size_t pos = 0;
        for (int f = 0; f < 4; ++f)
            pos = line.find(',', pos) + 1;
        std::string value = line.substr(pos, line.find(',', pos) - pos);
        CHECK(std::strtod(value.c_str(), nullptr) == rec.value);
    }
}
