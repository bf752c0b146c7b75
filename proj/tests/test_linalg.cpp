#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dmtk/errors.hpp"
#include "dmtk/linalg.hpp"
#include "dmtk/rng.hpp"

#include <cmath>
#include <complex>

using namespace dmtk;

namespace {

CMatrix random_hermitian(int n, std::uint64_t seed) {
    CounterRng rng(seed, 0);
    CMatrix b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            b(i, j) = rng.complex_gaussian();
    CMatrix bh = adjoint(b);
    CMatrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            a(i, j) = 0.5 * (b(i, j) + bh(i, j));
    return a;
}

double max_abs_diff(const CMatrix &a, const CMatrix &b) {
    double m = 0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

} // namespace

TEST_CASE("matmul and adjoint on a known pair") {
    CMatrix a(2, 2), b(2, 2);
    a(0, 0) = {1, 0};
    a(0, 1) = {0, 1};
    a(1, 0) = {2, 0};
    a(1, 1) = {0, 0};
    b(0, 0) = {0, 0};
    b(0, 1) = {1, 0};
    b(1, 0) = {1, 0};
    b(1, 1) = {0, 0};
    CMatrix c = matmul(a, b);
    CHECK(c(0, 0) == cdouble{0, 1});
    CHECK(c(0, 1) == cdouble{1, 0});
    CHECK(c(1, 0) == cdouble{0, 0});
    CHECK(c(1, 1) == cdouble{2, 0});
    CMatrix ah = adjoint(a);
    CHECK(ah(0, 1) == cdouble{2, 0});
    CHECK(ah(1, 0) == cdouble{0, -1});
}

TEST_CASE("is_hermitian distinguishes") {
    CMatrix h = CMatrix::identity(3);
    CHECK(is_hermitian(h));
    h(0, 1) = {0, 1};
    CHECK(!is_hermitian(h));
    h(1, 0) = {0, -1};
    CHECK(is_hermitian(h));
}

TEST_CASE("eigh sorts a diagonal matrix descending") {
    CMatrix a(3, 3);
    a(0, 0) = 3.0;
    a(1, 1) = 1.0;
    a(2, 2) = 2.0;
    EigResult e = eigh(a);
    CHECK(e.values[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(e.values[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(e.values[2] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("eigh of a real symmetric 2x2") {
    CMatrix a(2, 2);
    a(0, 0) = a(1, 1) = 1.0;
    a(0, 1) = a(1, 0) = 0.9;
    EigResult e = eigh(a);
    CHECK(e.values[0] == doctest::Approx(1.9).epsilon(1e-13));
    CHECK(e.values[1] == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("eigh of a complex hermitian 2x2") {
    // [[2, i], [-i, 2]] has eigenvalues 3 and 1
    CMatrix a(2, 2);
    a(0, 0) = a(1, 1) = 2.0;
    a(0, 1) = {0, 1};
    a(1, 0) = {0, -1};
    EigResult e = eigh(a);
    CHECK(e.values[0] == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(e.values[1] == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("eigh reconstructs random hermitian matrices") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        for (int n : {2, 3, 5}) {
            CMatrix a = random_hermitian(n, seed * 100 + n);
            EigResult e = eigh(a);
            // V diag(lambda) V^H
            CMatrix vl(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    vl(i, j) = e.vectors(i, j) * e.values[j];
            CMatrix rec = matmul(vl, adjoint(e.vectors));
            CHECK(max_abs_diff(rec, a) < 1e-10);
            CMatrix vhv = matmul(adjoint(e.vectors), e.vectors);
            CHECK(max_abs_diff(vhv, CMatrix::identity(n)) < 1e-10);
        }
    }
}

TEST_CASE("hermitian_sqrt squares back") {
    CounterRng rng(5, 0);
    CMatrix b(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            b(i, j) = rng.complex_gaussian();
    CMatrix a = matmul(adjoint(b), b); // positive semidefinite by construction
    CMatrix s = hermitian_sqrt(a);
    CHECK(is_hermitian(s, 1e-10));
    CHECK(max_abs_diff(matmul(s, s), a) < 1e-10);

    CMatrix id = CMatrix::identity(4);
    CHECK(max_abs_diff(hermitian_sqrt(id), id) < 1e-14);
}

TEST_CASE("hermitian_sqrt rejects negative definite input") {
    CMatrix a(1, 1);
    a(0, 0) = -1.0;
    CHECK_THROWS_AS(hermitian_sqrt(a), NumericalError);
}

TEST_CASE("cholesky_log2_det on known determinants") {
    CMatrix a(2, 2);
    a(0, 0) = a(1, 1) = 2.0;
    CHECK(cholesky_log2_det(a) == doctest::Approx(2.0).epsilon(1e-14));

    CHECK(cholesky_log2_det(CMatrix::identity(5)) == doctest::Approx(0.0).epsilon(1e-14));

    // det = 2*1 - |0.5i|^2 = 1.75
    CMatrix c(2, 2);
    c(0, 0) = 2.0;
    c(1, 1) = 1.0;
    c(0, 1) = {0, 0.5};
    c(1, 0) = {0, -0.5};
    CHECK(cholesky_log2_det(c) == doctest::Approx(std::log2(1.75)).epsilon(1e-14));
}

TEST_CASE("cholesky_log2_det rejects indefinite input") {
    CMatrix a(2, 2);
    a(0, 0) = a(1, 1) = 1.0;
    a(0, 1) = a(1, 0) = 2.0;
    CHECK_THROWS_AS(cholesky_log2_det(a), NumericalError);
}
