#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "esl/numerics.hpp"

using namespace esl;

static TriDiag diag3(double a, double b, double c) {
    TriDiag T;
    T.diag = {a, b, c};
    T.offdiag = {0.0, 0.0};
    return T;
}

TEST_CASE("sturm_count basics") {
    TriDiag T = diag3(1, 2, 3);
    CHECK(sturm_count(T, 2.5) == 2);
    CHECK(sturm_count(T, 0.5) == 0);
    CHECK(sturm_count(T, -1e9) == 0);
    CHECK(sturm_count(T, 1e9) == 3);

    TriDiag S;
    S.diag = {2, 2};
    S.offdiag = {-1};
    CHECK(sturm_count(S, 1.5) == 1);  // eigenvalues 1, 3

    // nondecreasing in x
    std::size_t prev = 0;
    for (double x = -2; x <= 6; x += 0.25) {
        std::size_t c = sturm_count(T, x);
        CHECK(c >= prev);
        prev = c;
    }
}

TEST_CASE("tridiag_eigs small closed forms") {
    TriDiag T = diag3(3, 1, 2);
    auto ev = tridiag_eigs(T, 3);
    REQUIRE(ev.size() == 3);
    CHECK(ev[0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(ev[1] == Catch::Approx(2.0).margin(1e-12));
    CHECK(ev[2] == Catch::Approx(3.0).margin(1e-12));

    TriDiag S;
    S.diag = {2, 2};
    S.offdiag = {-1};
    auto ev2 = tridiag_eigs(S, 2);
    CHECK(ev2[0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(ev2[1] == Catch::Approx(3.0).margin(1e-12));
}

TEST_CASE("tridiag_eigs discrete Laplacian vs closed form") {
    // -u'' on (0,1), Dirichlet, n interior points: eigenvalues
    // (2/h^2)(1 - cos(i pi h)), h = 1/(n+1)
    const int n = 999;
    const double h = 1.0 / (n + 1);
    TriDiag T;
    T.diag.assign(n, 2.0 / (h * h));
    T.offdiag.assign(n - 1, -1.0 / (h * h));
    auto ev = tridiag_eigs(T, 3);
    for (int i = 1; i <= 3; ++i) {
        double exact = 2.0 / (h * h) * (1.0 - std::cos(i * M_PI * h));
        CHECK(std::fabs(ev[i - 1] - exact) <= 1e-10 * exact);
    }
    // smallest ~ pi^2 within 1e-4 relative
    CHECK(std::fabs(ev[0] - M_PI * M_PI) <= 1e-4 * M_PI * M_PI);
    // index property: sturm_count brackets each eigenvalue
    for (int i = 0; i < 3; ++i) {
        double d = 1e-9 * (1.0 + std::fabs(ev[i]));
        CHECK(sturm_count(T, ev[i] - d) == std::size_t(i));
        CHECK(sturm_count(T, ev[i] + d) >= std::size_t(i + 1));
    }
}

TEST_CASE("inverse_iteration") {
    TriDiag T = diag3(1, 2, 3);
    auto v = inverse_iteration(T, 2.0);
    REQUIRE(v.size() == 3);
    CHECK(std::fabs(std::fabs(v[1]) - 1.0) < 1e-8);
    CHECK(std::fabs(v[0]) < 1e-8);
    CHECK(std::fabs(v[2]) < 1e-8);

    TriDiag S;
    S.diag = {2, 2};
    S.offdiag = {-1};
    auto w = inverse_iteration(S, 1.0);
    double r = 1.0 / std::sqrt(2.0);
    CHECK(std::fabs(std::fabs(w[0]) - r) < 1e-8);
    CHECK(w[0] * w[1] > 0);  // (1,1)/sqrt(2) up to global sign
}

TEST_CASE("jacobi_eigs 2x2 and reconstruction") {
    SymMatrix A(2);
    A.at(0, 0) = 5;
    A.at(1, 1) = -1;
    auto r = jacobi_eigs(A);
    CHECK(r.eigenvalues[0] == Catch::Approx(-1.0).margin(1e-12));
    CHECK(r.eigenvalues[1] == Catch::Approx(5.0).margin(1e-12));

    SymMatrix B(2);
    B.at(1, 0) = 1;
    auto rb = jacobi_eigs(B);
    CHECK(rb.eigenvalues[0] == Catch::Approx(-1.0).margin(1e-12));
    CHECK(rb.eigenvalues[1] == Catch::Approx(1.0).margin(1e-12));

    // random symmetric 50x50: V L V^T reconstructs within 1e-10 Frobenius
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t n = 50;
    SymMatrix S(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) S.at(i, j) = u(rng);
    S.symmetrize();
    auto js = jacobi_eigs(S);
    double err2 = 0.0, tr = 0.0, evsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        tr += S.at(i, i);
        evsum += js.eigenvalues[i];
        for (std::size_t j = 0; j < n; ++j) {
            double rec = 0.0;
            for (std::size_t c = 0; c < n; ++c)
                rec += js.vectors.at(i, c) * js.eigenvalues[c] * js.vectors.at(j, c);
            double d = rec - S.at(i, j);
            err2 += d * d;
        }
    }
    CHECK(std::sqrt(err2) < 1e-10);
    CHECK(std::fabs(evsum - tr) <= 1e-10 * std::max(1.0, std::fabs(tr)));
    // orthogonality
    double worst = 0.0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += js.vectors.at(i, a) * js.vectors.at(i, b);
            worst = std::max(worst, std::fabs(dot - (a == b ? 1.0 : 0.0)));
        }
    CHECK(worst < 1e-12);
}

TEST_CASE("sym_sqrt") {
    SymMatrix D(2);
    D.at(0, 0) = 4;
    D.at(1, 1) = 9;
    auto R = sym_sqrt(D);
    CHECK(R.at(0, 0) == Catch::Approx(2.0).margin(1e-12));
    CHECK(R.at(1, 1) == Catch::Approx(3.0).margin(1e-12));
    CHECK(std::fabs(R.at(0, 1)) < 1e-12);

    SymMatrix I(3);
    for (int i = 0; i < 3; ++i) I.at(i, i) = 1.0;
    auto RI = sym_sqrt(I);
    for (int i = 0; i < 3; ++i) CHECK(RI.at(i, i) == Catch::Approx(1.0).margin(1e-12));

    // S = A A^T round trip
    std::mt19937 rng(999);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t n = 20;
    std::vector<double> A(n * n);
    for (auto& x : A) x = u(rng);
    SymMatrix S(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < n; ++c) s += A[i * n + c] * A[j * n + c];
            S.at(i, j) = s;
        }
    S.symmetrize();
    auto Rs = sym_sqrt(S);
    double err2 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double rr = 0.0;
            for (std::size_t c = 0; c < n; ++c) rr += Rs.at(i, c) * Rs.at(c, j);
            double d = rr - S.at(i, j);
            err2 += d * d;
        }
    CHECK(std::sqrt(err2) <= 1e-10 * S.frobenius());
    // negative definite input must throw
    SymMatrix N(2);
    N.at(0, 0) = -1.0;
    N.at(1, 1) = 1.0;
    CHECK_THROWS_AS(sym_sqrt(N), numeric_error);
}

TEST_CASE("brent_root") {
    double r = brent_root([](double x) { return x * x - 2.0; }, 1.0, 2.0, 1e-12);
    CHECK(std::fabs(r - std::sqrt(2.0)) < 1e-12);
    double z = brent_root([](double x) { return x; }, -1.0, 1.0, 1e-12);
    CHECK(std::fabs(z) < 1e-12);
    CHECK_THROWS_AS(brent_root([](double x) { return 1.0 + x * x; }, -1, 1, 1e-12),
                    numeric_error);
}

TEST_CASE("hermite_phi values and properties") {
    CHECK(hermite_phi(1, 0.0) == Catch::Approx(std::pow(M_PI, -0.25)).epsilon(1e-12));
    CHECK(std::fabs(hermite_phi(2, 0.0)) < 1e-14);

    // L2 normalization of phi_3 by Gauss-Legendre on [-12,12]
    auto gl = gauss_legendre(200, -12.0, 12.0);
    KahanSum s;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        double p = hermite_phi(3, gl.nodes[i]);
        s.add(gl.weights[i] * p * p);
    }
    CHECK(std::fabs(s.value() - 1.0) < 1e-10);

    // orthogonality up to j=6
    for (int i = 1; i <= 6; ++i)
        for (int j = i + 1; j <= 6; ++j) {
            KahanSum o;
            for (std::size_t q = 0; q < gl.nodes.size(); ++q)
                o.add(gl.weights[q] * hermite_phi(i, gl.nodes[q]) * hermite_phi(j, gl.nodes[q]));
            CHECK(std::fabs(o.value()) < 1e-10);
        }

    // oscillator equation residual with 5-point FD second derivative
    for (int j = 1; j <= 3; ++j) {
        const double h = 1e-3;
        for (double x = -6.0; x <= 6.0; x += 0.5) {
            double d2 = (-hermite_phi(j, x - 2 * h) + 16 * hermite_phi(j, x - h) -
                         30 * hermite_phi(j, x) + 16 * hermite_phi(j, x + h) -
                         hermite_phi(j, x + 2 * h)) /
                        (12 * h * h);
            double res = -d2 + x * x * hermite_phi(j, x) - (2 * j - 1) * hermite_phi(j, x);
            CHECK(std::fabs(res) <= 1e-6);
        }
    }
}

TEST_CASE("gauss_legendre") {
    auto g1 = gauss_legendre(1, -1.0, 1.0);
    REQUIRE(g1.nodes.size() == 1);
    CHECK(std::fabs(g1.nodes[0]) < 1e-15);
    CHECK(g1.weights[0] == Catch::Approx(2.0).epsilon(1e-14));

    auto g2 = gauss_legendre(2, -1.0, 1.0);
    double integral = 0.0;
    for (int i = 0; i < 2; ++i) integral += g2.weights[i] * g2.nodes[i] * g2.nodes[i];
    CHECK(integral == Catch::Approx(2.0 / 3.0).epsilon(1e-14));

    // polynomial exactness through degree 2n-1
    auto g5 = gauss_legendre(5, 0.0, 2.0);
    for (int d = 0; d <= 9; ++d) {
        KahanSum s;
        for (std::size_t i = 0; i < g5.nodes.size(); ++i)
            s.add(g5.weights[i] * std::pow(g5.nodes[i], d));
        double exact = std::pow(2.0, d + 1) / (d + 1);
        CHECK(std::fabs(s.value() - exact) <= 1e-13 * exact);
    }

    // Gaussian integral
    auto g60 = gauss_legendre(60, -8.0, 8.0);
    KahanSum s;
    for (std::size_t i = 0; i < g60.nodes.size(); ++i)
        s.add(g60.weights[i] * std::exp(-g60.nodes[i] * g60.nodes[i]));
    CHECK(std::fabs(s.value() - std::sqrt(M_PI)) < 1e-12);

    // nodes strictly increasing, weights positive
    for (std::size_t i = 0; i + 1 < g60.nodes.size(); ++i) CHECK(g60.nodes[i] < g60.nodes[i + 1]);
    for (double w : g60.weights) CHECK(w > 0.0);
}
