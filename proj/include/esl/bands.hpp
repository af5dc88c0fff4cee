#pragma once
// Band tabulation, inversion (the map s = E_j - E_limit back to momentum),
// and the asymptotic diagnostics: gap law, inverse-band law, mode defect,
// projection Lipschitz bound, negative mass.

#include <algorithm>
#include <cmath>
#include <vector>

#include "esl/fiber.hpp"
#include "esl/numerics.hpp"
#include "esl/threads.hpp"

namespace esl {

// Limit of the j-th band: E_limit = b(2j-1) for Dirichlet (approached from
// above as k -> +inf) and for Neumann (approached from below).
inline double band_limit(double b, int j) { return b * (2 * j - 1); }

struct BandTable {
    FiberSpec spec;
    int j = 1;
    std::vector<double> k_nodes;  // strictly increasing
    std::vector<double> energies;
    std::vector<double> derivatives;
    std::vector<double> disc_errors;
};

// Chebyshev-distributed nodes, solved in parallel over k.
inline BandTable tabulate_band(const FiberSpec& spec, int j, double k_min, double k_max,
                               int n_nodes) {
    spec.validate();
    if (!(k_min < k_max)) throw numeric_error("tabulate_band: empty k range");
    if (n_nodes < 16) throw numeric_error("tabulate_band: need at least 16 nodes");
    BandTable t;
    t.spec = spec;
    t.j = j;
    t.k_nodes.resize(n_nodes);
    t.energies.resize(n_nodes);
    t.derivatives.resize(n_nodes);
    t.disc_errors.resize(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
        // Chebyshev points mapped to [k_min, k_max], ascending
        double c = std::cos(M_PI * (2.0 * (n_nodes - 1 - i) + 1.0) / (2.0 * n_nodes));
        t.k_nodes[i] = 0.5 * (k_min + k_max) + 0.5 * (k_max - k_min) * c;
    }
    parallel_for(std::size_t(n_nodes), [&](std::size_t i) {
        BandValue bv = band_value(spec, j, t.k_nodes[i]);
        t.energies[i] = bv.energy;
        t.disc_errors[i] = bv.disc_error;
        t.derivatives[i] = band_derivative(spec, j, t.k_nodes[i]);
    });
    if (spec.bc == BoundaryCondition::Dirichlet) {
        for (int i = 0; i + 1 < n_nodes; ++i) {
            double slack = t.disc_errors[i] + t.disc_errors[i + 1];
            if (!(t.energies[i] > t.energies[i + 1] - slack))
                throw numeric_error("tabulate_band: Dirichlet monotonicity violated");
        }
    }
    return t;
}

struct InverseBand {
    BandTable table;
    double s_min = 0.0, s_max = 0.0;  // covered range of |E_j - E_limit|

    // s(k) with the orientation that makes s positive and decreasing in k:
    // Dirichlet s = E - E_limit, Neumann (right branch) s = E_limit - E.
    double orientation() const {
        return table.spec.bc == BoundaryCondition::Dirichlet ? 1.0 : -1.0;
    }
    double s_of_energy(double e) const {
        return orientation() * (e - band_limit(table.spec.b, table.j));
    }
};

// Dirichlet: usable on any table. Neumann: table must live right of the band
// minimum, where E increases back toward the limit.
inline InverseBand make_inverse_band(BandTable table) {
    InverseBand inv;
    {
        const auto& e = table.energies;
        double lim = band_limit(table.spec.b, table.j);
        double o = table.spec.bc == BoundaryCondition::Dirichlet ? 1.0 : -1.0;
        double lo = o * (e.back() - lim), hi = o * (e.front() - lim);
        if (!(lo > 0.0) || !(hi > lo))
            throw numeric_error("make_inverse_band: table does not define a monotone inverse");
        inv.s_min = lo;
        inv.s_max = hi;
    }
    inv.table = std::move(table);
    return inv;
}

// rho_j(s): Brent on the tabulated bracket, refined against the direct solver
// so that |E(rho(s)) - E_limit -/+ s| <= max(1e-10, 10*disc_error).
inline double invert_band(const InverseBand& inv, double s) {
    if (!(s >= inv.s_min && s <= inv.s_max))
        throw numeric_error("invert_band: s outside covered range");
    const BandTable& t = inv.table;
    // locate the table bracket: s decreases along increasing k
    std::size_t lo = 0, hi = t.k_nodes.size() - 1;
    auto sval = [&](std::size_t i) { return inv.s_of_energy(t.energies[i]); };
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (sval(mid) >= s)
            lo = mid;
        else
            hi = mid;
    }
    double ka = t.k_nodes[lo], kb = t.k_nodes[hi];
    double fa = sval(lo) - s, fb = sval(hi) - s;
    if (fa == 0.0) return ka;
    if (fb == 0.0) return kb;
    auto f = [&](double k) { return inv.s_of_energy(band_value(t.spec, t.j, k).energy) - s; };
    // direct-solver values may cross slightly outside the tabulated bracket
    double fa_d = f(ka), fb_d = f(kb);
    int widen = 0;
    double step = kb - ka;
    while (fa_d * fb_d > 0.0 && widen < 6) {
        ka -= step;
        kb += step;
        fa_d = f(ka);
        fb_d = f(kb);
        ++widen;
    }
    if (fa_d * fb_d > 0.0) throw numeric_error("invert_band: lost the bracket");
    // slope estimate from the table turns the energy tolerance into a k tolerance
    double slope = std::fabs(t.derivatives[lo]) + std::fabs(t.derivatives[hi]);
    slope = std::max(slope * 0.5, 1e-300);
    double ktol = std::min(1e-8, 1e-10 / slope);
    return brent_root(f, ka, kb, std::max(ktol, 1e-13));
}

// rho_j'(s) = 1 / E_j'(rho_j(s)) up to the orientation sign.
inline double rho_derivative(const InverseBand& inv, double s) {
    double k = invert_band(inv, s);
    double de = band_derivative(inv.table.spec, inv.table.j, k);
    double ds = inv.orientation() * de;  // d s / d k
    if (std::fabs(ds) < 1e-300) throw numeric_error("rho_derivative: inversion singular");
    return 1.0 / ds;
}

// (E_j(k) - E_limit)/(k^{2j-1} e^{-k^2/b}), only inside the trustworthy
// window where the gap dominates discretization error.
inline double gap_asymptotic_ratio(const FiberSpec& spec, int j, double k) {
    BandValue bv = band_value(spec, j, k);
    double gap = (spec.bc == BoundaryCondition::Dirichlet)
                     ? bv.energy - band_limit(spec.b, j)
                     : band_limit(spec.b, j) - bv.energy;
    if (!(gap >= 1e3 * bv.disc_error))
        throw numeric_error("gap_asymptotic_ratio: k outside trustworthy window (gap " +
                            std::to_string(gap) + " vs disc_error " +
                            std::to_string(bv.disc_error) + ")");
    return gap / (std::pow(k, 2 * j - 1) * std::exp(-k * k / spec.b));
}

// ||psi_j(.;k) - psi_{j,infty}(.;k)||_{L2(0,inf)}; the limit mode is
// orientation-aligned by the sign of the overlap (no global sign is canonical
// for j >= 2).
inline double mode_defect(const FiberSpec& spec, int j, double k) {
    Mode m = fiber_mode(spec, j, k);
    KahanSum ov;
    for (std::size_t i = 0; i < m.values.size(); ++i)
        ov.add(m.values[i] * limit_mode(j, k, spec.b, m.x_grid[i]));
    double sgn = (ov.value() < 0.0) ? -1.0 : 1.0;
    KahanSum d2;
    for (std::size_t i = 0; i < m.values.size(); ++i) {
        double d = m.values[i] - sgn * limit_mode(j, k, spec.b, m.x_grid[i]);
        d2.add(d * d);
    }
    return std::sqrt(d2.value() * m.dx);
}

// Operator-norm distance of the rank-one spectral projections,
// sqrt(1 - <psi_k, psi_k'>^2), with both modes on one master grid.
inline double projection_distance(const FiberSpec& spec, int j, double k, double kp) {
    double L = std::max(spec.domain_length(k), spec.domain_length(kp));
    const int n = refined_points(spec, spec.richardson - 1);
    auto solve = [&](double kk) {
        std::vector<double> x;
        double dx = 0;
        TriDiag T = assemble_fiber_matrix(spec, kk, n, &x, &dx, L);
        double mu = tridiag_eigs(T, std::size_t(j)).back();
        std::vector<double> v = inverse_iteration(T, mu);
        return v;  // unit Euclidean norm; common dx cancels in the normalized overlap
    };
    std::vector<double> a = solve(k), b = solve(kp);
    KahanSum s;
    for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
    double c2 = s.value() * s.value();
    return std::sqrt(std::max(0.0, 1.0 - std::min(1.0, c2)));
}

// Mass of the limit mode on the negative half-line.
inline double neg_mass(int j, double k, double b) {
    double lo = -(std::max(k, 0.0) / b + 14.0 / std::sqrt(b));
    auto gl = gauss_legendre(400, lo, 0.0);
    KahanSum s;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        double p = limit_mode(j, k, b, gl.nodes[i]);
        s.add(gl.weights[i] * p * p);
    }
    return s.value();
}

// ---------------------------------------------------------------------------
// Calibrated exponential gap law, used to extend the inversion far below what
// any tabulation can resolve: s(k) ~ A k^{2j-1} e^{-k^2/b} for large k, the
// constant fitted once in the trustworthy window.

struct GapLaw {
    int j = 1;
    double b = 1.0;
    double A = 0.0;
    double k_star = 0.0;  // validity threshold: law used for k >= k_star

    double s_of_k(double k) const {
        return A * std::pow(k, 2 * j - 1) * std::exp(-k * k / b);
    }
    // d s / d k expressed through s itself; stays finite where s underflows
    double dsdk_over_s(double k) const { return (2.0 * j - 1.0) / k - 2.0 * k / b; }
    // invert the law in logarithmic variables (Newton; monotone for k > k_star)
    double k_of_s(double s_ln) const {  // takes ln(s)
        double k = std::sqrt(b * std::max(std::log(A) - s_ln, 1.0));
        for (int it = 0; it < 80; ++it) {
            double f = std::log(A) + (2.0 * j - 1.0) * std::log(k) - k * k / b - s_ln;
            double fp = dsdk_over_s(k);
            double dk = f / fp;
            k -= dk;
            if (std::fabs(dk) < 1e-13 * k) break;
        }
        return k;
    }
};

inline GapLaw calibrate_gap_law(const FiberSpec& spec, int j) {
    GapLaw law;
    law.j = j;
    law.b = spec.b;
    double rb = std::sqrt(spec.b);
    law.k_star = 3.8 * rb;
    KahanSum acc;
    const int nfit = 6;
    for (int i = 0; i < nfit; ++i) {
        double k = (2.6 + i * (1.0 / (nfit - 1))) * rb;
        acc.add(gap_asymptotic_ratio(spec, j, k));
    }
    law.A = acc.value() / nfit;
    return law;
}

// Momentum at offset s, valid for arbitrarily small ln(s): table+solver above
// the law threshold, calibrated law below.
inline double extended_k_of_ln_s(const InverseBand& inv, const GapLaw& law, double s_ln) {
    double s_switch = law.s_of_k(law.k_star);
    if (s_ln > std::log(s_switch)) return invert_band(inv, std::exp(s_ln));
    return law.k_of_s(s_ln);
}

}  // namespace esl
