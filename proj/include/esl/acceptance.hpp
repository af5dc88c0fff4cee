#pragma once
// Acceptance suite: twelve end-to-end checks with pinned tolerances, one
// PASS/FAIL line each.  Checks that the implementation cannot currently meet
// are left to fail honestly rather than being weakened.  Criterion 12 is
// qualitative and downgrades to a warning on failure.

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "esl/bands.hpp"
#include "esl/effective.hpp"
#include "esl/fiber.hpp"
#include "esl/numerics.hpp"
#include "esl/potentials.hpp"

namespace esl {

namespace acceptance_detail {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Lab {
    FiberSpec spec;    // Dirichlet, b = 1
    InverseBand inv;   // j = 1 over k in [-1.5, 4.3]
    GapLaw law;
};

inline const Lab& lab() {
    static Lab L = [] {
        FiberSpec s;
        s.n_x = 600;
        InverseBand inv = make_inverse_band(tabulate_band(s, 1, -1.5, 4.3, 48));
        GapLaw law = calibrate_gap_law(s, 1);
        return Lab{s, std::move(inv), law};
    }();
    return L;
}

struct NeumannLab {
    FiberSpec spec;
    InverseBand inv;
    GapLaw law;
};

inline const NeumannLab& nlab() {
    static NeumannLab L = [] {
        FiberSpec s;
        s.n_x = 600;
        s.bc = BoundaryCondition::Neumann;
        InverseBand inv = make_inverse_band(tabulate_band(s, 1, 0.85, 4.3, 48));
        GapLaw law = calibrate_gap_law(s, 1);
        return NeumannLab{s, std::move(inv), law};
    }();
    return L;
}

// memoized principal-value runs keyed by (C, signed lambda, budget)
inline SsfBracket pv_run(const PotentialModel& P, double lambda, int budget) {
    static std::map<std::string, SsfBracket> cache;
    std::ostringstream key;
    key.precision(17);
    key << P.C << "|" << lambda << "|" << budget;
    auto it = cache.find(key.str());
    if (it != cache.end()) return it->second;
    const Lab& L = lab();
    SsfBracket br = ssf_bracket(P, L.spec, L.inv, L.law, 1, lambda, 0.3, budget);
    cache.emplace(key.str(), br);
    return br;
}

inline PotentialModel radial(double C = 1.0, double m = 4.0) {
    PotentialModel P;
    P.kind = PotentialKind::radial_power;
    P.C = C;
    P.m = m;
    return P;
}

}  // namespace acceptance_detail

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    bool warning_only = false;
    std::string detail;
};

// Runs all twelve criteria, printing one line each.  Returns the number of
// hard (non-warning) failures.
inline int run_acceptance(std::ostream& os) {
    using namespace acceptance_detail;
    std::vector<CriterionResult> results;
    auto report = [&](CriterionResult r) {
        os << (r.pass ? "PASS" : (r.warning_only ? "WARN" : "FAIL"))
           << " criterion " << r.id << " [" << r.name << "]: " << r.detail
           << "\n";
        os.flush();
        results.push_back(std::move(r));
    };

    // 1. exact band anchors at k = 0 (odd/even oscillator symmetry)
    {
        CriterionResult r{1, "band anchors", true, false, ""};
        FiberSpec d;
        d.n_x = 600;
        FiberSpec n = d;
        n.bc = BoundaryCondition::Neumann;
        double worst = 0.0;
        for (int j = 1; j <= 3; ++j) {
            worst = std::max(worst,
                             std::fabs(band_value(d, j, 0.0).energy - (4.0 * j - 1.0)));
            worst = std::max(worst,
                             std::fabs(band_value(n, j, 0.0).energy - (4.0 * j - 3.0)));
        }
        r.pass = worst < 1e-8;
        r.detail = "max |E_j(0) - anchor| = " + fmt(worst) + " (tol 1e-8)";
        report(r);
    }

    // 2. band limits and monotonicity; quadratic growth at k = -10
    {
        CriterionResult r{2, "band limits", true, false, ""};
        FiberSpec d;
        d.n_x = 600;
        bool mono = true;
        double lim_worst = 0.0, quad_worst = 0.0;
        for (int j = 1; j <= 2; ++j) {
            BandTable t = tabulate_band(d, j, -6.0, 6.0, 48);
            for (std::size_t i = 0; i + 1 < t.energies.size(); ++i)
                if (!(t.energies[i] > t.energies[i + 1] -
                                          (t.disc_errors[i] + t.disc_errors[i + 1])))
                    mono = false;
            lim_worst = std::max(
                lim_worst, band_value(d, j, 6.0).energy - (2.0 * j - 1.0));
            quad_worst = std::max(
                quad_worst, std::fabs(band_value(d, j, -10.0).energy / 100.0 - 1.0));
        }
        bool lim_ok = lim_worst < 1e-6;
        bool quad_ok = quad_worst < 0.15;
        r.pass = mono && lim_ok && quad_ok;
        r.detail = "monotone=" + std::string(mono ? "yes" : "no") +
                   ", max E_j(6)-limit = " + fmt(lim_worst) +
                   " (tol 1e-6), max |E_j(-10)/100 - 1| = " + fmt(quad_worst) +
                   " (tol 0.15)";
        report(r);
    }

    // 3. gap-law plateau over k in [2.5, 3.5]
    {
        CriterionResult r{3, "gap law plateau", true, false, ""};
        FiberSpec d;
        d.n_x = 600;
        double lo = 1e300, hi = 0.0;
        for (int i = 0; i < 6; ++i) {
            double k = 2.5 + i * 0.2;
            double v = gap_asymptotic_ratio(d, 1, k);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        double spread = (hi - lo) / lo;
        r.pass = spread < 0.35;
        r.detail = "relative spread = " + fmt(spread) + " (tol 0.35), ratio ~ " +
                   fmt(0.5 * (hi + lo));
        report(r);
    }

    // 4. inverse-band logarithmic law over s in [1e-6, 1e-2]
    {
        CriterionResult r{4, "inverse band law", true, false, ""};
        const Lab& L = lab();
        double lo = 1e300, hi = 0.0;
        for (double s = 1e-6; s <= 1.01e-2; s *= std::pow(10.0, 0.5)) {
            double v = invert_band(L.inv, s) / std::sqrt(std::fabs(std::log(s)));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        r.pass = lo > 0.0 && hi / lo < 2.0;
        r.detail = "rho_1(s)/|ln s|^{1/2} in [" + fmt(lo) + ", " + fmt(hi) +
                   "], max/min = " + fmt(hi / lo) + " (tol 2)";
        report(r);
    }

    // 5. mode-defect scaling, constant frozen at k = 2
    {
        CriterionResult r{5, "mode defect", true, false, ""};
        FiberSpec d;
        d.n_x = 600;
        auto ratio = [&](double k) {
            double gap = band_value(d, 1, k).energy - 1.0;
            return mode_defect(d, 1, k) * k / std::sqrt(gap);
        };
        double c2 = ratio(2.0);
        double worst = 0.0;
        for (double k : {2.5, 3.0, 3.5}) worst = std::max(worst, ratio(k) / c2);
        r.pass = worst <= 2.0;
        r.detail = "max ratio(k)/ratio(2) = " + fmt(worst) + " (tol 2)";
        report(r);
    }

    // 6. numerics oracles
    {
        CriterionResult r{6, "numerics oracles", true, false, ""};
        // (a) FD Laplacian closed form, n = 500
        const int n = 500;
        const double h = 1.0 / (n + 1);
        TriDiag T;
        T.diag.assign(n, 2.0 / (h * h));
        T.offdiag.assign(n - 1, -1.0 / (h * h));
        std::vector<double> ev = tridiag_eigs(T, 8);
        double fd_err = 0.0;
        for (int i = 1; i <= 8; ++i) {
            double exact = (2.0 / (h * h)) * (1.0 - std::cos(i * M_PI * h));
            fd_err = std::max(fd_err, std::fabs(ev[i - 1] - exact) / exact);
        }
        // (b) Jacobi reconstruction on a seeded random 50x50
        std::mt19937 rng(12345);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        SymMatrix S(50);
        for (std::size_t i = 0; i < 50; ++i)
            for (std::size_t jj = 0; jj <= i; ++jj) {
                double v = uni(rng);
                S.at(i, jj) = v;
                S.at(jj, i) = v;
            }
        JacobiResult jr = jacobi_eigs(S);
        double rec_err = 0.0;
        {
            KahanSum fro;
            for (std::size_t i = 0; i < 50; ++i)
                for (std::size_t jj = 0; jj < 50; ++jj) {
                    KahanSum acc;
                    for (std::size_t q = 0; q < 50; ++q)
                        acc.add(jr.vectors.at(i, q) * jr.eigenvalues[q] *
                                jr.vectors.at(jj, q));
                    double d = acc.value() - S.at(i, jj);
                    fro.add(d * d);
                }
            rec_err = std::sqrt(fro.value());
        }
        // (c) sym_sqrt round trip on S shifted to be PSD
        double shift = 0.0;
        for (double e : jr.eigenvalues) shift = std::min(shift, e);
        SymMatrix Spsd = S;
        for (std::size_t i = 0; i < 50; ++i) Spsd.at(i, i) += 1.0 - shift;
        SymMatrix Rt = sym_sqrt(Spsd);
        double rt_err = 0.0;
        {
            KahanSum fro;
            for (std::size_t i = 0; i < 50; ++i)
                for (std::size_t jj = 0; jj < 50; ++jj) {
                    KahanSum acc;
                    for (std::size_t q = 0; q < 50; ++q)
                        acc.add(Rt.at(i, q) * Rt.at(q, jj));
                    double d = acc.value() - Spsd.at(i, jj);
                    fro.add(d * d);
                }
            rt_err = std::sqrt(fro.value());
        }
        r.pass = fd_err < 1e-10 && rec_err < 1e-10 && rt_err < 1e-10;
        r.detail = "fd rel err " + fmt(fd_err) + ", jacobi fro " + fmt(rec_err) +
                   ", sqrt fro " + fmt(rt_err) + " (tol 1e-10 each)";
        report(r);
    }

    // 7. trace-norm scaling over two decades
    {
        CriterionResult r{7, "trace-norm scaling", true, false, ""};
        PotentialModel P = radial();
        double lo = 1e300, hi = 0.0;
        std::string vals;
        for (double lam : {1e-3, 3e-3, 1e-2, 3e-2, 1e-1}) {
            SsfBracket br = pv_run(P, lam, 760);
            double v = br.spectrum.trace_norm * lam;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            vals += (vals.empty() ? "" : " ") + fmt(v);
        }
        r.pass = hi / lo <= 3.0;
        r.detail = "trace_norm*lambda = {" + vals + "}, span factor " +
                   fmt(hi / lo) + " (tol 3)";
        report(r);
    }

    // 8. main comparison: bracket midpoint vs b N(lambda, V)
    {
        CriterionResult r{8, "volume comparison", true, false, ""};
        PotentialModel P = radial();
        bool band_ok = true, trend_ok = true;
        double prev_dev = 1e300;
        std::string vals;
        for (double lam : {1e-3, 3e-4, 1e-4}) {
            SsfBracket br = pv_run(P, lam, 760);
            double bN = (std::pow(P.C / lam, 2.0 / P.m) - 1.0) / 4.0;
            double ratio = br.mid_plus() / bN;
            band_ok = band_ok && ratio >= 0.5 && ratio <= 1.5;
            double dev = std::fabs(ratio - 1.0);
            if (dev > prev_dev + 1e-12) trend_ok = false;
            prev_dev = dev;
            vals += (vals.empty() ? "" : " ") + fmt(ratio);
        }
        r.pass = band_ok && trend_ok;
        r.detail = "mid/bN = {" + vals + "} (band [0.5, 1.5], |ratio-1| nonincreasing)";
        report(r);
    }

    // 9. corollary contrasts
    {
        CriterionResult r{9, "corollary contrasts", true, false, ""};
        // (a) below threshold the +V side stays bounded
        PotentialModel P = radial();
        double ref = pv_run(P, -1e-2, 500).mid_plus();
        bool bounded = true;
        for (double lam : {-1e-3, -1e-4})
            if (pv_run(P, lam, 500).mid_plus() > ref + 1e-12) bounded = false;
        // (b) above threshold the -V side is o(lambda^{-1/2}) for m = 4: the
        // scaled value must roughly halve per decade.  Counts here are small
        // integers, so the halving is checked with half-a-count slack (0.6);
        // a lambda^{-1/2}-growing side would give a factor >= 1.
        PotentialModel P4 = radial(4.0);
        double v3 = pv_run(P4, 1e-3, 900).mid_minus() * std::sqrt(1e-3);
        double v4 = pv_run(P4, 1e-4, 900).mid_minus() * std::sqrt(1e-4);
        bool shrinking = v3 > 0.0 && v4 <= 0.60 * v3;
        r.pass = bounded && shrinking;
        r.detail = "below-threshold bound ref " + fmt(ref) +
                   (bounded ? " held" : " violated") +
                   "; scaled -V side " + fmt(v3) + " -> " + fmt(v4) +
                   " (need factor <= 0.6)";
        report(r);
    }

    // 10. Weyl law for the band-projected Toeplitz operator
    {
        CriterionResult r{10, "Toeplitz Weyl law", true, false, ""};
        PotentialModel P = radial();
        double rad = std::sqrt(std::sqrt(P.C / 1e-3) - 1.0);
        double K = rad + 6.0;
        SpectrumReport coarse = toeplitz_vj_spectrum(P, 1, 1.0, -K, K, 300);
        SpectrumReport fine = toeplitz_vj_spectrum(P, 1, 1.0, -K, K, 600);
        bool band_ok = true, drift_ok = true;
        std::string vals;
        for (double lam : {1e-2, 3e-3, 1e-3}) {
            int c1 = counting(coarse, lam).n_plus;
            int c2 = counting(fine, lam).n_plus;
            double weyl = (std::sqrt(P.C / lam) - 1.0) / 2.0;  // full plane
            double ratio = c2 / weyl;
            band_ok = band_ok && ratio >= 0.8 && ratio <= 1.2;
            int tol = (c2 < 50) ? 1 : int(0.02 * c2 + 0.5);
            if (std::abs(c1 - c2) > tol) drift_ok = false;
            vals += (vals.empty() ? "" : " ") + fmt(ratio);
        }
        r.pass = band_ok && drift_ok;
        r.detail = "count/weyl = {" + vals + "} (band [0.8, 1.2]), refinement drift " +
                   std::string(drift_ok ? "ok" : "too large");
        report(r);
    }

    // 11. Neumann minimum and role swap
    {
        CriterionResult r{11, "Neumann variant", true, false, ""};
        FiberSpec ns;
        ns.n_x = 600;
        ns.bc = BoundaryCondition::Neumann;
        auto dE = [&](const FiberSpec& s) {
            return [&s](double k) { return band_derivative(s, 1, k); };
        };
        double kmin = brent_root(dE(ns), 0.2, 1.6, 1e-10);
        double emin = band_value(ns, 1, kmin).energy;
        FiberSpec fine = ns;
        fine.n_x = 1200;
        double emin2 = band_value(fine, 1, brent_root(dE(fine), 0.2, 1.6, 1e-10)).energy;
        bool min_ok = emin < 1.0 && kmin > 0.0 && std::fabs(emin2 - emin) < 1e-6;

        // Role swap relative to criterion 9.  Here the band lies below its
        // limit, so the perturbation signs trade places: above the limit
        // (regular side) the -V count is O(1); below the limit -V carries
        // the Weyl-law growth while the scaled +V side shrinks.
        const NeumannLab& NL = nlab();
        PotentialModel P = radial();
        double ref = ssf_bracket(P, NL.spec, NL.inv, NL.law, 1, 1e-2, 0.3, 500)
                         .mid_minus();
        bool bounded = true;
        for (double lam : {1e-3, 1e-4})
            if (ssf_bracket(P, NL.spec, NL.inv, NL.law, 1, lam, 0.3, 500)
                    .mid_minus() > ref + 1e-12)
                bounded = false;
        SsfBracket b3 = ssf_bracket(P, NL.spec, NL.inv, NL.law, 1, -1e-3, 0.3, 700);
        SsfBracket b4 = ssf_bracket(P, NL.spec, NL.inv, NL.law, 1, -1e-4, 0.3, 700);
        bool growing = b3.mid_minus() >= 1.0 && b4.mid_minus() >= 2.0 * b3.mid_minus();
        double w3 = b3.mid_plus() * std::sqrt(1e-3);
        double w4 = b4.mid_plus() * std::sqrt(1e-4);
        bool small_side = w4 <= 0.75 * w3;
        bool swap_ok = bounded && growing && small_side;
        r.pass = min_ok && swap_ok;
        r.detail = "min E = " + fmt(emin) + " at k = " + fmt(kmin) +
                   " (shift under doubling " + fmt(std::fabs(emin2 - emin)) +
                   "); swap: regular-side -V bound " +
                   std::string(bounded ? "held" : "violated") + ", -V mids {" +
                   fmt(b3.mid_minus()) + " -> " + fmt(b4.mid_minus()) +
                   "} growing, scaled +V " + fmt(w3) + " -> " + fmt(w4) +
                   " (need factor <= 0.75)";
        report(r);
    }

    // 12. compact support: |ln lambda|^{1/2} growth (warning-only)
    {
        CriterionResult r{12, "compact support growth", true, true, ""};
        PotentialModel B;
        B.kind = PotentialKind::compact_bump;
        B.R = 3.0;
        B.A = 8.0;
        std::vector<double> lams = {1e-3, 1e-5, 1e-7};
        std::vector<double> v, u;
        const Lab& L = lab();
        for (double lam : lams) {
            SsfBracket br =
                ssf_bracket(B, L.spec, L.inv, L.law, 1, -lam, 0.3, 450);
            v.push_back(br.mid_minus());
            u.push_back(std::sqrt(std::fabs(std::log(lam))));
        }
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            num += v[i] * u[i];
            den += u[i] * u[i];
        }
        double c = num / den;
        double worst = 0.0;
        std::string vals;
        for (std::size_t i = 0; i < v.size(); ++i) {
            worst = std::max(worst, std::fabs(v[i] - c * u[i]) /
                                        std::max(v[i], 1e-300));
            vals += (vals.empty() ? "" : " ") + fmt(v[i]);
        }
        r.pass = v[0] > 0.0 && worst < 0.30;
        r.detail = "mids {" + vals + "}, fit c = " + fmt(c) +
                   ", max rel residual " + fmt(worst) + " (tol 0.30, warning-only)";
        report(r);
    }

    int hard_failures = 0;
    for (const CriterionResult& r : results)
        if (!r.pass && !r.warning_only) ++hard_failures;
    os << "acceptance: " << (results.size() - std::size_t(hard_failures)) << "/"
       << results.size() << " criteria passed or warning-only, " << hard_failures
       << " hard failure(s)\n";
    return hard_failures;
}

}  // namespace esl
