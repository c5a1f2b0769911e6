#include <doctest.h>

#include <cmath>

#include "nsverify/quadrature.hpp"

using namespace nsverify;

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

// int_T x^a y^b z^c over the reference tetrahedron = a! b! c! / (a+b+c+3)!
double tet_monomial_exact(int a, int b, int c) {
    return factorial(a) * factorial(b) * factorial(c) /
           factorial(a + b + c + 3);
}

double tri_monomial_exact(int a, int b) {
    return factorial(a) * factorial(b) / factorial(a + b + 2);
}

}  // namespace

TEST_CASE("tet rule integrates all monomials up to its degree") {
    const TetQuadrature q = make_tet_quadrature(6);
    CHECK(q.exact_degree == 11);
    double vol = 0.0;
    for (double w : q.weights) {
        CHECK(w > 0.0);
        vol += w;
    }
    CHECK(vol == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

    for (int a = 0; a <= q.exact_degree; ++a)
        for (int b = 0; a + b <= q.exact_degree; ++b)
            for (int c = 0; a + b + c <= q.exact_degree; ++c) {
                double acc = 0.0;
                for (int i = 0; i < q.size(); ++i)
                    acc += q.weights[i] * std::pow(q.points[i][0], a) *
                           std::pow(q.points[i][1], b) *
                           std::pow(q.points[i][2], c);
                const double exact = tet_monomial_exact(a, b, c);
                CHECK(acc == doctest::Approx(exact).epsilon(1e-12));
            }
}

TEST_CASE("triangle rule integrates all monomials up to its degree") {
    const TriQuadrature q = make_triangle_quadrature(4);
    CHECK(q.exact_degree == 7);
    for (int a = 0; a <= q.exact_degree; ++a)
        for (int b = 0; a + b <= q.exact_degree; ++b) {
            double acc = 0.0;
            for (int i = 0; i < q.size(); ++i)
                acc += q.weights[i] * std::pow(q.points[i][0], a) *
                       std::pow(q.points[i][1], b);
            CHECK(acc == doctest::Approx(tri_monomial_exact(a, b)).epsilon(1e-13));
        }
}

TEST_CASE("line rule matches classical Gauss-Legendre") {
    const LineQuadrature q = make_line_quadrature(3);
    REQUIRE(q.size() == 3);
    CHECK(q.points[1] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(q.weights[1] == doctest::Approx(4.0 / 9.0 / 2.0 * 2.0 * 0.5 * 2).epsilon(1e-12));
    for (int d = 0; d <= 5; ++d) {
        double acc = 0.0;
        for (int i = 0; i < q.size(); ++i)
            acc += q.weights[i] * std::pow(q.points[i], d);
        CHECK(acc == doctest::Approx(1.0 / (d + 1)).epsilon(1e-13));
    }
}
