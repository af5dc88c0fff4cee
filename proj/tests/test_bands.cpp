#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "esl/bands.hpp"

using namespace esl;

static FiberSpec dspec(int nx = 400) {
    FiberSpec s;
    s.n_x = nx;
    return s;
}

TEST_CASE("tabulate_band shape") {
    FiberSpec s = dspec(300);
    BandTable t1 = tabulate_band(s, 1, -6.0, 6.0, 24);
    CHECK(t1.energies.front() > t1.energies.back());
    // limit from above, up to extrapolation noise where the gap is sub-FD
    for (double e : t1.energies) CHECK(e > 1.0 - 1e-9);
    for (double d : t1.derivatives) CHECK(d < 0.0);
    BandTable t2 = tabulate_band(s, 2, -6.0, 6.0, 24);
    for (std::size_t i = 0; i < t1.energies.size(); ++i)
        CHECK(t2.energies[i] > t1.energies[i]);
}

TEST_CASE("invert_band round trips and anchor") {
    FiberSpec s = dspec(400);
    InverseBand inv = make_inverse_band(tabulate_band(s, 1, -1.5, 4.2, 40));

    // rho_1(2) = 0 (E_1(0) = 3 anchor)
    CHECK(std::fabs(invert_band(inv, 2.0)) < 1e-8);

    // round trip at k0 = 1
    double s0 = band_value(s, 1, 1.0).energy - 1.0;
    CHECK(std::fabs(invert_band(inv, s0) - 1.0) < 1e-8);

    // rho is strictly decreasing in s: as s shrinks, k grows
    double prev = invert_band(inv, inv.s_max * 0.99);
    for (double q = 0.9; q > 0.05; q -= 0.15) {
        double sq = inv.s_min * std::pow(inv.s_max / inv.s_min, q);
        double kq = invert_band(inv, sq);
        CHECK(kq > prev - 1e-12);
        double resid = band_value(s, 1, kq).energy - 1.0 - sq;
        CHECK(std::fabs(resid) <= 1e-10 + 10 * band_value(s, 1, kq).disc_error);
        prev = kq;
    }

    CHECK_THROWS_AS(invert_band(inv, inv.s_max * 10), numeric_error);
}

TEST_CASE("rho_derivative") {
    FiberSpec s = dspec(400);
    InverseBand inv = make_inverse_band(tabulate_band(s, 1, -1.5, 4.2, 40));
    // negative everywhere
    for (double sv : {1e-3, 1e-2, 0.3, 2.0}) CHECK(rho_derivative(inv, sv) < 0.0);
    // inverse-function identity at s = 2
    double k = invert_band(inv, 2.0);
    double chain = rho_derivative(inv, 2.0) * band_derivative(s, 1, k);
    CHECK(std::fabs(chain - 1.0) < 1e-6);
    // order: |rho'(s)| * s * sqrt|ln s| confined to a band over a decade
    double lo = 1e300, hi = 0.0;
    for (double sv = 1e-5; sv <= 1.01e-4; sv *= std::pow(10.0, 0.25)) {
        double v = std::fabs(rho_derivative(inv, sv)) * sv * std::sqrt(std::fabs(std::log(sv)));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(hi / lo < 2.0);
}

TEST_CASE("inverse band log law") {
    FiberSpec s = dspec(400);
    InverseBand inv = make_inverse_band(tabulate_band(s, 1, -1.5, 4.2, 40));
    double lo = 1e300, hi = 0.0;
    for (double sv = 1e-6; sv <= 1.01e-2; sv *= 10.0) {
        double v = invert_band(inv, sv) / std::sqrt(std::fabs(std::log(sv)));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(lo > 0.0);
    CHECK(hi / lo < 2.0);
}

TEST_CASE("gap law ratio and calibration") {
    FiberSpec s = dspec(400);
    double r25 = gap_asymptotic_ratio(s, 1, 2.5);
    double r35 = gap_asymptotic_ratio(s, 1, 3.5);
    CHECK(r25 > 0.0);
    CHECK(r35 > 0.0);
    CHECK(std::fabs(r25 - r35) / std::min(r25, r35) < 0.35);
    // far outside the window the gap drowns in discretization error
    CHECK_THROWS_AS(gap_asymptotic_ratio(s, 1, 6.5), numeric_error);

    GapLaw law = calibrate_gap_law(s, 1);
    CHECK(law.A > 0.5);
    CHECK(law.A < 2.0);
    // law inversion consistency in its own regime
    double kk = 5.0;
    double sl = std::log(law.s_of_k(kk));
    CHECK(std::fabs(law.k_of_s(sl) - kk) < 1e-10);
    // extended inversion agrees with the direct one near the switch
    InverseBand inv = make_inverse_band(tabulate_band(s, 1, -1.5, 4.2, 40));
    double sv = 2e-4;  // k about 3.3, below k_star -> table path
    CHECK(std::fabs(extended_k_of_ln_s(inv, law, std::log(sv)) - invert_band(inv, sv)) <
          1e-10);
    // deep tail: monotone and finite
    double k1 = extended_k_of_ln_s(inv, law, std::log(1e-40));
    double k2 = extended_k_of_ln_s(inv, law, std::log(1e-60));
    CHECK(k1 > 9.0);
    CHECK(k2 > k1);
    CHECK(std::isfinite(k2));
}

TEST_CASE("mode defect") {
    FiberSpec s = dspec(400);
    double prev = 1e9;
    for (double k : {1.0, 2.0, 3.0, 4.0}) {
        double d = mode_defect(s, 1, k);
        CHECK(d < prev);
        prev = d;
    }
    // calibrated band check on [2,3.5]
    auto gap = [&](double k) { return band_value(s, 1, k).energy - 1.0; };
    double c2 = mode_defect(s, 1, 2.0) * 2.0 / std::sqrt(gap(2.0));
    for (double k : {2.5, 3.0, 3.5}) {
        double rat = mode_defect(s, 1, k) * k / std::sqrt(gap(k));
        CHECK(rat <= 2.0 * c2);
        CHECK(mode_defect(s, 1, k) <= 50.0 * std::sqrt(gap(k)) / k);
    }
    // j=2 sign alignment: defect still decays
    CHECK(mode_defect(s, 2, 4.0) < mode_defect(s, 2, 2.5));
}

TEST_CASE("projection distance") {
    FiberSpec s = dspec(300);
    CHECK(projection_distance(s, 1, 1.3, 1.3) < 1e-10);
    double d1 = projection_distance(s, 1, 1.0, 1.1);
    double d2 = projection_distance(s, 1, 1.1, 1.0);
    CHECK(d1 == Catch::Approx(d2).margin(1e-12));
    // Lipschitz ratio bounded over pairs in [K_1, K_1+2] = [0,2]
    double worst = 0.0;
    for (double k : {0.0, 0.7, 1.4}) {
        for (double h : {1e-3, 1e-2, 1e-1}) {
            worst = std::max(worst, projection_distance(s, 1, k, k + h) / h);
        }
    }
    CHECK(worst < 5.0);  // a uniform constant exists; 5 is generous for b=1
}

TEST_CASE("negative mass") {
    CHECK(neg_mass(1, 0.0, 1.0) == Catch::Approx(0.5).margin(1e-10));
    CHECK(neg_mass(1, 0.0, 4.0) == Catch::Approx(0.5).margin(1e-10));
    CHECK(neg_mass(1, 2.0, 1.0) == Catch::Approx(0.5 * std::erfc(2.0)).epsilon(1e-8));
    // order statement: mass / (k^{2j-3} e^{-k^2/b}) confined to a band
    for (int j : {1, 2}) {
        double lo = 1e300, hi = 0.0;
        for (double k = 2.0; k <= 4.01; k += 0.5) {
            double v = neg_mass(j, k, 1.0) / (std::pow(k, 2 * j - 3) * std::exp(-k * k));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK(lo > 0.0);
        CHECK(hi / lo < 4.0);
    }
}

TEST_CASE("band limit from below for very negative k") {
    // E_j(k)/k^2 -> 1 with an O(|k|^{2/3}) correction: the deviation at
    // k = -20 must be well below the one at k = -10
    FiberSpec s = dspec(400);
    double d10 = std::fabs(band_value(s, 1, -10.0).energy / 100.0 - 1.0);
    double d20 = std::fabs(band_value(s, 1, -20.0).energy / 400.0 - 1.0);
    CHECK(d20 < 0.5 * d10);
    CHECK(d10 < 0.25);
}
