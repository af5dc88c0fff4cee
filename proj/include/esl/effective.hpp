#pragma once
// Effective Hamiltonians as finite symmetric matrices: the principal-value
// quadrature scheme for the band-resolvent boundary value, its Gram-matrix
// reduction, the band-projected Toeplitz operator, eigenvalue counting, and
// the spectral-shift bracket.

#include <algorithm>
#include <cmath>
#include <vector>

#include "esl/bands.hpp"
#include "esl/fiber.hpp"
#include "esl/numerics.hpp"
#include "esl/potentials.hpp"
#include "esl/threads.hpp"

namespace esl {

// ---------------------------------------------------------------------------
// Principal-value scheme

struct PvScheme {
    int j = 1;
    double lambda = 0.0;     // signed threshold offset: z = E_limit + lambda
    double lambda_pv = 0.0;  // singular point in the s variable (pv active iff > 0)
    double epsilon = 0.0;    // excluded half-width around lambda_pv
    double s_max = 0.0;
    double s_floor = 0.0;
    double k_cover = 0.0;
    double window_bound = 0.0;  // estimate of the discarded pv-window mass
    BoundaryCondition bc = BoundaryCondition::Dirichlet;
    double b = 1.0;

    // all arrays indexed together, s_nodes strictly increasing
    std::vector<double> s_nodes;
    std::vector<double> k_nodes;
    std::vector<double> base_weights;     // quadrature weights in s
    std::vector<double> node_weights;     // base * |rho'|, the dk measure
    std::vector<double> pv_denominators;  // 1/(lambda_pv - s)

    std::size_t size() const { return s_nodes.size(); }
};

// Momentum coverage needed so that everything the potential can couple to is
// represented in the scheme.
inline double coverage_momentum(const PotentialModel& P, double b, double lambda) {
    double lam = std::fabs(lambda);
    double rb = std::sqrt(b);
    switch (P.kind) {
        case PotentialKind::radial_power: {
            double r2 = std::pow(P.C / (0.05 * lam), 2.0 / P.m) - 1.0;
            return rb * (std::sqrt(std::max(r2, 1.0)) + 2.0);
        }
        case PotentialKind::compact_bump:
            return rb * (P.R * rb + std::sqrt(std::fabs(std::log(0.02 * lam))) + 1.0);
        case PotentialKind::separable:
            return rb * (8.0 + std::sqrt(std::fabs(std::log(lam))));
    }
    return 8.0 * rb;
}

namespace detail {

// d(ln s)/dk at a node: from the calibrated law deep in the tail, from the
// solved band derivative otherwise.
inline double dlns_dk(const InverseBand& inv, const GapLaw& law, double k, double s) {
    if (k >= law.k_star) return law.dsdk_over_s(k);
    double de = band_derivative(inv.table.spec, inv.table.j, k);
    return inv.orientation() * de / s;
}

struct NodeAcc {
    PvScheme* sch;
    void push(double s_ln, double base_w_over_s, double denom, const InverseBand& inv,
              const GapLaw& law) {
        double k = extended_k_of_ln_s(inv, law, s_ln);
        double s = std::exp(s_ln);
        double w = base_w_over_s / std::fabs(dlns_dk(inv, law, k, s));
        sch->s_nodes.push_back(s);
        sch->k_nodes.push_back(k);
        sch->base_weights.push_back(base_w_over_s * s);
        sch->node_weights.push_back(w);
        sch->pv_denominators.push_back(denom);
    }
};

}  // namespace detail

// Three-zone scheme in s = |E_j - E_limit|: log-graded tail below the
// singular point, symmetric pairs about it with an excluded window of
// half-width eps = lambda^{2-2/m}, log-graded upper zone to s_max = 2b.
// For a signed offset on the regular side (no singularity) a single
// log-graded zone is used and eps = 0.
inline PvScheme build_pv_scheme(const InverseBand& inv, const GapLaw& law, int j,
                                double lambda, double m_decay, int node_budget,
                                double k_cover) {
    const FiberSpec& spec = inv.table.spec;
    PvScheme sch;
    sch.j = j;
    sch.lambda = lambda;
    sch.bc = spec.bc;
    sch.b = spec.b;
    sch.k_cover = k_cover;
    // the s-variable singularity sits at +lambda for the side the band
    // approaches its limit from (Dirichlet: above; Neumann: below)
    sch.lambda_pv = (spec.bc == BoundaryCondition::Dirichlet) ? lambda : -lambda;
    sch.s_max = std::min(2.0 * spec.b, inv.s_max * (1.0 - 1e-9));
    double s_floor = law.s_of_k(std::max(k_cover, law.k_star + 0.5));
    sch.s_floor = std::max(s_floor, 1e-280);

    if (node_budget < 200) throw numeric_error("build_pv_scheme: node budget too small");

    detail::NodeAcc acc{&sch};
    const double lam = sch.lambda_pv;
    if (lam > 0.0) {
        if (!(lam < sch.s_max))
            throw numeric_error("build_pv_scheme: offset outside covered band range");
        sch.epsilon = std::pow(lam, 2.0 - 2.0 / m_decay);
        sch.window_bound =
            sch.epsilon / (lam * lam * std::sqrt(std::fabs(std::log(lam))));
        int npair = std::max(40, node_budget / 8);
        int ntail = std::max(60, int(0.36 * node_budget));
        int nup = node_budget - ntail - 2 * npair;
        if (nup < 60) throw numeric_error("build_pv_scheme: node budget too small to pair");

        // tail zone (s_floor, lam/2]
        double nu0 = std::log(sch.s_floor), nu1 = std::log(0.5 * lam);
        double dnu = (nu1 - nu0) / (ntail - 1);
        for (int i = 0; i < ntail; ++i) {
            double w = dnu * ((i == 0 || i == ntail - 1) ? 0.5 : 1.0);
            double nu = nu0 + i * dnu;
            acc.push(nu, w, 1.0 / (lam - std::exp(nu)), inv, law);
        }
        // symmetric pairs about lam on (lam/2, 3lam/2) minus the window
        double ls0 = std::log(sch.epsilon), ls1 = std::log(0.5 * lam);
        double dls = (ls1 - ls0) / (npair - 1);
        for (int i = 0; i < npair; ++i) {
            double sig = std::exp(ls0 + i * dls);
            double w_sigma = sig * dls * ((i == 0 || i == npair - 1) ? 0.5 : 1.0);
            for (int side : {+1, -1}) {
                double s = lam + side * sig;
                // base weight in s equals the sigma weight; push() wants it
                // divided by s to match the log-variable convention
                acc.push(std::log(s), w_sigma / s, -side / sig, inv, law);
            }
        }
        // upper zone [3lam/2, s_max]
        double mu0 = std::log(1.5 * lam), mu1 = std::log(sch.s_max);
        double dmu = (mu1 - mu0) / (nup - 1);
        for (int i = 0; i < nup; ++i) {
            double w = dmu * ((i == 0 || i == nup - 1) ? 0.5 : 1.0);
            double nu = mu0 + i * dmu;
            acc.push(nu, w, 1.0 / (lam - std::exp(nu)), inv, law);
        }
    } else {
        // regular side: no singularity, single log-graded zone
        sch.epsilon = 0.0;
        sch.window_bound = 0.0;
        double nu0 = std::log(sch.s_floor), nu1 = std::log(sch.s_max);
        double dnu = (nu1 - nu0) / (node_budget - 1);
        for (int i = 0; i < node_budget; ++i) {
            double w = dnu * ((i == 0 || i == node_budget - 1) ? 0.5 : 1.0);
            double nu = nu0 + i * dnu;
            acc.push(nu, w, 1.0 / (lam - std::exp(nu)), inv, law);
        }
    }

    // sort all arrays by s ascending
    std::vector<std::size_t> idx(sch.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b2) { return sch.s_nodes[a] < sch.s_nodes[b2]; });
    PvScheme out = sch;
    out.s_nodes.clear();
    out.k_nodes.clear();
    out.base_weights.clear();
    out.node_weights.clear();
    out.pv_denominators.clear();
    for (std::size_t i : idx) {
        double s = sch.s_nodes[i];
        // zone seams share a node; merge the trapezoid half-weights
        if (!out.s_nodes.empty() && s - out.s_nodes.back() <= 1e-14 * s) {
            out.base_weights.back() += sch.base_weights[i];
            out.node_weights.back() += sch.node_weights[i];
            continue;
        }
        out.s_nodes.push_back(s);
        out.k_nodes.push_back(sch.k_nodes[i]);
        out.base_weights.push_back(sch.base_weights[i]);
        out.node_weights.push_back(sch.node_weights[i]);
        out.pv_denominators.push_back(sch.pv_denominators[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gram assembly

struct GramOperator {
    PvScheme scheme;
    SymMatrix gram;  // sqrt(w_q w_q') <g_q, g_q'>
};

namespace detail {

// All modes of one Gram matrix solved on a single master grid.
struct MasterModes {
    std::vector<double> x;   // grid
    double dx = 0.0;
    std::vector<std::vector<double>> psi;  // unit L2 (continuum) normalization
};

inline MasterModes solve_master_modes(const FiberSpec& spec, int j,
                                      const std::vector<double>& ks) {
    double kmax = 0.0;
    for (double k : ks) kmax = std::max(kmax, k);
    const double L = spec.domain_length(kmax);
    const double dx_target = spec.domain_length(0.0) / spec.n_x;
    const int n = std::max(spec.n_x, int(std::ceil(L / dx_target)));

    MasterModes mm;
    mm.psi.resize(ks.size());
    {
        std::vector<double> x;
        double dx = 0;
        assemble_fiber_matrix(spec, ks.empty() ? 0.0 : ks[0], n, &x, &dx, L);
        mm.x = x;
        mm.dx = dx;
    }
    parallel_for(ks.size(), [&](std::size_t q) {
        TriDiag T = assemble_fiber_matrix(spec, ks[q], n, nullptr, nullptr, L);
        double mu = tridiag_eigs(T, std::size_t(j)).back();
        std::vector<double> v = inverse_iteration(T, mu);
        double nrm = 0.0, mx = 0.0;
        for (double vv : v) {
            nrm += vv * vv;
            mx = std::max(mx, std::fabs(vv));
        }
        nrm = std::sqrt(nrm * mm.dx);
        double lead = 0.0;
        for (double vv : v)
            if (std::fabs(vv) >= 1e-3 * mx) {
                lead = vv;
                break;
            }
        double sgn = (lead < 0.0) ? -1.0 : 1.0;
        for (double& vv : v) vv *= sgn / nrm;
        mm.psi[q] = std::move(v);
    });
    return mm;
}

}  // namespace detail

inline GramOperator assemble_gram(const PotentialModel& P, const FiberSpec& spec,
                                  const PvScheme& scheme) {
    P.validate();
    if (!P.y_symmetric) throw numeric_error("assemble_gram: potential must be even in y");
    const std::size_t Q = scheme.size();
    detail::MasterModes mm = detail::solve_master_modes(spec, scheme.j, scheme.k_nodes);
    const std::size_t n = mm.x.size();

    // modes are Gaussian-localized around k/b: pairs with far-separated
    // centers contribute below the assembly tolerance and are skipped
    const double skip2 = 240.0 * spec.b;

    GramOperator G;
    G.scheme = scheme;
    G.gram = SymMatrix(Q);
    parallel_for(Q, [&](std::size_t q) {
        for (std::size_t p = 0; p <= q; ++p) {
            double dk = scheme.k_nodes[q] - scheme.k_nodes[p];
            if (dk * dk > skip2) continue;
            KahanSum s;
            const std::vector<double>& a = mm.psi[q];
            const std::vector<double>& b2 = mm.psi[p];
            for (std::size_t i = 0; i < n; ++i) {
                double prod = a[i] * b2[i];
                if (prod == 0.0) continue;
                s.add(potential_cosine_transform(P, mm.x[i], dk) * prod);
            }
            double w = std::sqrt(scheme.node_weights[q] * scheme.node_weights[p]);
            G.gram.at(q, p) = s.value() * mm.dx * w;
        }
    });
    G.gram.symmetrize();
    return G;
}

// ---------------------------------------------------------------------------
// Spectrum, counting, bracket

struct SpectrumReport {
    std::vector<double> eigenvalues;  // descending by magnitude
    double trace_norm = 0.0;
    double lambda = 0.0;
    double epsilon = 0.0;
    std::size_t node_count = 0;
    std::size_t grid_size = 0;
};

namespace detail {

// C = A*B for dense symmetric-storage matrices (plain ikj loop)
inline SymMatrix matmul(const SymMatrix& A, const SymMatrix& B) {
    const std::size_t n = A.n;
    SymMatrix C(n);
    parallel_for(n, [&](std::size_t i) {
        for (std::size_t k = 0; k < n; ++k) {
            double aik = A.at(i, k);
            if (aik == 0.0) continue;
            const double* brow = &B.a[k * n];
            double* crow = &C.a[i * n];
            for (std::size_t j2 = 0; j2 < n; ++j2) crow[j2] += aik * brow[j2];
        }
    });
    return C;
}

}  // namespace detail

// Spectrum of the discretized boundary-value operator via the similarity
// R D R, R = gram^{1/2}, D = diag(pv_denominators).
inline SpectrumReport re_tj_spectrum(const GramOperator& G) {
    const std::size_t Q = G.gram.n;
    SymMatrix R = sym_sqrt(G.gram);
    SymMatrix RD(Q);
    for (std::size_t i = 0; i < Q; ++i)
        for (std::size_t j2 = 0; j2 < Q; ++j2)
            RD.at(i, j2) = R.at(i, j2) * G.scheme.pv_denominators[j2];
    SymMatrix M = detail::matmul(RD, R);
    // enforce exact symmetry against accumulation order differences
    for (std::size_t i = 0; i < Q; ++i)
        for (std::size_t j2 = 0; j2 < i; ++j2) {
            double v = 0.5 * (M.at(i, j2) + M.at(j2, i));
            M.at(i, j2) = v;
            M.at(j2, i) = v;
        }
    JacobiResult jr = jacobi_eigs(M);

    SpectrumReport rep;
    rep.lambda = G.scheme.lambda;
    rep.epsilon = G.scheme.epsilon;
    rep.node_count = Q;
    double top = 0.0;
    for (double e : jr.eigenvalues) top = std::max(top, std::fabs(e));
    for (double e : jr.eigenvalues)
        if (top > 0.0 && std::fabs(e) >= 1e-12 * top) rep.eigenvalues.push_back(e);
    std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(),
              [](double a, double b2) { return std::fabs(a) > std::fabs(b2); });
    KahanSum tn;
    for (double e : rep.eigenvalues) tn.add(std::fabs(e));
    rep.trace_norm = tn.value();
    return rep;
}

struct CountingReport {
    double threshold = 0.0;
    int n_plus = 0;
    int n_minus = 0;
};

inline CountingReport counting(const SpectrumReport& rep, double s) {
    if (!(s > 0.0)) throw numeric_error("counting: threshold must be > 0");
    CountingReport c;
    c.threshold = s;
    for (double e : rep.eigenvalues) {
        if (e > s) ++c.n_plus;
        if (e < -s) ++c.n_minus;
    }
    return c;
}

// Magnitude of the single nonzero eigenvalue of the imaginary part at the
// resolvent boundary value: pi |rho'(lambda)| (1/2pi) \int\int V psi^2.
inline double im_tj_trace(const PotentialModel& P, const FiberSpec& spec,
                          const InverseBand& inv, int j, double lambda) {
    if (!(lambda > 0.0)) throw numeric_error("im_tj_trace: lambda must be > 0");
    double k = invert_band(inv, lambda);
    double rp = std::fabs(rho_derivative(inv, lambda));
    Mode m = fiber_mode(spec, j, k);
    KahanSum s;
    for (std::size_t i = 0; i < m.values.size(); ++i)
        s.add(potential_cosine_transform(P, m.x_grid[i], 0.0) * m.values[i] * m.values[i]);
    return M_PI * rp * s.value() * m.dx;
}

// ---------------------------------------------------------------------------
// Toeplitz-type operator: Nystrom discretization with limit modes

inline SpectrumReport toeplitz_vj_spectrum(const PotentialModel& P, int j, double b,
                                           double k_lo, double k_hi, int n_nodes) {
    P.validate();
    if (!(k_lo < k_hi) || n_nodes < 8) throw numeric_error("toeplitz_vj_spectrum: bad window");
    const double h = (k_hi - k_lo) / (n_nodes - 1);
    const double rb = std::sqrt(b);
    const double xr = std::min(P.x_range(1e-13), 4.0 * (std::max(std::fabs(k_lo), k_hi)) / b);
    const double x0 = std::max(-xr, k_lo / b - 9.0 / rb);
    const double x1 = std::min(+xr, k_hi / b + 9.0 / rb);
    const double dx = 0.025 / rb;
    const int nx = int((x1 - x0) / dx) + 1;

    std::vector<double> ks(n_nodes);
    for (int i = 0; i < n_nodes; ++i) ks[i] = k_lo + i * h;

    // limit modes on the shared grid
    std::vector<std::vector<double>> psi(n_nodes, std::vector<double>(nx));
    parallel_for(std::size_t(n_nodes), [&](std::size_t q) {
        for (int i = 0; i < nx; ++i) psi[q][i] = limit_mode(j, ks[q], b, x0 + i * dx);
    });

    SymMatrix M(n_nodes);
    const double skip2 = 240.0 * b;
    parallel_for(std::size_t(n_nodes), [&](std::size_t q) {
        for (std::size_t p = 0; p <= q; ++p) {
            double dk = ks[q] - ks[p];
            if (dk * dk > skip2) continue;
            KahanSum s;
            for (int i = 0; i < nx; ++i) {
                double prod = psi[q][i] * psi[p][i];
                if (prod == 0.0) continue;
                s.add(potential_cosine_transform(P, x0 + i * dx, dk) * prod);
            }
            double wq = (q == 0 || q + 1 == std::size_t(n_nodes)) ? 0.5 * h : h;
            double wp = (p == 0 || p + 1 == std::size_t(n_nodes)) ? 0.5 * h : h;
            M.at(q, p) = s.value() * dx * std::sqrt(wq * wp);
        }
    });
    M.symmetrize();
    JacobiResult jr = jacobi_eigs(M);

    SpectrumReport rep;
    rep.node_count = std::size_t(n_nodes);
    rep.grid_size = std::size_t(nx);
    double top = 0.0;
    for (double e : jr.eigenvalues) top = std::max(top, std::fabs(e));
    for (double e : jr.eigenvalues)
        if (top > 0.0 && std::fabs(e) >= 1e-14 * top) rep.eigenvalues.push_back(e);
    std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(),
              [](double a, double b2) { return std::fabs(a) > std::fabs(b2); });
    KahanSum tn;
    for (double e : rep.eigenvalues) tn.add(std::fabs(e));
    rep.trace_norm = tn.value();
    return rep;
}

// ---------------------------------------------------------------------------
// Theorem-style bracket for the spectral shift function

struct SsfBracket {
    double lambda = 0.0;  // signed offset from the band limit
    double r = 0.3;
    // eigenvalue-count bracket for the +V and -V perturbations:
    // lower = count at threshold 1+r, upper = count at threshold 1-r
    int lower_plus = 0, upper_plus = 0;
    int lower_minus = 0, upper_minus = 0;
    BoundaryCondition bc = BoundaryCondition::Dirichlet;
    SpectrumReport spectrum;
    double epsilon = 0.0;
    double window_bound = 0.0;
    std::size_t nodes = 0;

    double mid_plus() const { return 0.5 * (lower_plus + upper_plus); }
    double mid_minus() const { return 0.5 * (lower_minus + upper_minus); }
};

// Which count of the discretized matrix corresponds to which perturbation
// sign.  The matrix carries denominators 1/(lambda_pv - s); for Dirichlet
// this is the negative of the boundary-value operator, for the Neumann
// (right-branch) parametrization it is the operator itself.  Chasing the
// signs through the counting identities gives:
//   Dirichlet:  +V <-> n_plus(M),   -V <-> n_minus(M)
//   Neumann:    +V <-> n_minus(M),  -V <-> n_plus(M)
inline SsfBracket ssf_bracket(const PotentialModel& P, const FiberSpec& spec,
                              const InverseBand& inv, const GapLaw& law, int j,
                              double lambda, double r, int node_budget) {
    if (!(r > 0.0 && r < 1.0)) throw numeric_error("ssf_bracket: r must be in (0,1)");
    if (lambda == 0.0) throw numeric_error("ssf_bracket: lambda must be nonzero");
    double m_decay = (P.kind == PotentialKind::radial_power) ? P.m : 4.0;
    double kcov = coverage_momentum(P, spec.b, lambda);
    PvScheme sch = build_pv_scheme(inv, law, j, lambda, m_decay, node_budget, kcov);
    GramOperator G = assemble_gram(P, spec, sch);
    SpectrumReport rep = re_tj_spectrum(G);
    CountingReport chi = counting(rep, 1.0 + r);
    CountingReport clo = counting(rep, 1.0 - r);

    SsfBracket br;
    br.lambda = lambda;
    br.r = r;
    br.bc = spec.bc;
    br.epsilon = sch.epsilon;
    br.window_bound = sch.window_bound;
    br.nodes = sch.size();
    if (spec.bc == BoundaryCondition::Dirichlet) {
        br.lower_plus = chi.n_plus;
        br.upper_plus = clo.n_plus;
        br.lower_minus = chi.n_minus;
        br.upper_minus = clo.n_minus;
    } else {
        br.lower_plus = chi.n_minus;
        br.upper_plus = clo.n_minus;
        br.lower_minus = chi.n_plus;
        br.upper_minus = clo.n_plus;
    }
    br.spectrum = std::move(rep);
    return br;
}

}  // namespace esl
