#pragma once
// Self-contained numerical kernels: symmetric tridiagonal and dense symmetric
// eigensolvers, matrix square root, Gauss-Legendre quadrature, Brent root
// finding, Hermite functions.  No external linear algebra on purpose: the
// eigenvalues we chase are exponentially close to their limits, and we want
// deterministic, predictable-accuracy solvers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace esl {

struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// Compensated (Kahan) accumulation; fixed left-to-right order so that results
// are reproducible regardless of threading.
class KahanSum {
public:
    void add(double x) {
        double y = x - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0, c_ = 0.0;
};

// ---------------------------------------------------------------------------
// Matrix carriers

// Real symmetric tridiagonal matrix.
struct TriDiag {
    std::vector<double> diag;     // length n
    std::vector<double> offdiag;  // length n-1

    std::size_t n() const { return diag.size(); }

    void validate() const {
        if (diag.empty()) throw numeric_error("TriDiag: empty diagonal");
        if (offdiag.size() + 1 != diag.size())
            throw numeric_error("TriDiag: offdiag length must be n-1");
        for (double v : diag)
            if (!std::isfinite(v)) throw numeric_error("TriDiag: non-finite entry");
        for (double v : offdiag)
            if (!std::isfinite(v)) throw numeric_error("TriDiag: non-finite entry");
    }

    // Gershgorin bounds on the spectrum.
    void gershgorin(double& lo, double& hi) const {
        lo = std::numeric_limits<double>::infinity();
        hi = -lo;
        const std::size_t m = n();
        for (std::size_t i = 0; i < m; ++i) {
            double r = 0.0;
            if (i > 0) r += std::fabs(offdiag[i - 1]);
            if (i + 1 < m) r += std::fabs(offdiag[i]);
            lo = std::min(lo, diag[i] - r);
            hi = std::max(hi, diag[i] + r);
        }
    }
};

// Dense real symmetric matrix, full storage, lower triangle authoritative.
struct SymMatrix {
    std::size_t n = 0;
    std::vector<double> a;  // row-major n*n

    SymMatrix() = default;
    explicit SymMatrix(std::size_t order) : n(order), a(order * order, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }

    // Copy the lower triangle onto the upper one.
    void symmetrize() {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) a[j * n + i] = a[i * n + j];
    }

    double frobenius() const {
        KahanSum s;
        for (double v : a) s.add(v * v);
        return std::sqrt(s.value());
    }
};

struct QuadratureRule {
    std::vector<double> nodes;    // strictly increasing
    std::vector<double> weights;  // positive
};

// ---------------------------------------------------------------------------
// Sturm-sequence machinery

// Number of eigenvalues of T strictly less than x.  Signed pivot sweep with
// underflow guarding: a vanishing pivot is replaced by a tiny value of the
// same sign so the recurrence never divides by zero.
inline std::size_t sturm_count(const TriDiag& T, double x) {
    const std::size_t m = T.n();
    std::size_t count = 0;
    double d = 1.0;
    const double tiny = std::numeric_limits<double>::min();
    for (std::size_t i = 0; i < m; ++i) {
        double off2 = (i > 0) ? T.offdiag[i - 1] * T.offdiag[i - 1] : 0.0;
        d = T.diag[i] - x - off2 / d;
        if (d == 0.0) d = tiny;
        if (std::fabs(d) < tiny) d = (d < 0.0) ? -tiny : tiny;
        if (d < 0.0) ++count;
    }
    return count;
}

// The `count` smallest eigenvalues of T, ascending, by bisection on
// sturm_count.  Relative tolerance 1e-13 (absolute near zero).
inline std::vector<double> tridiag_eigs(const TriDiag& T, std::size_t count) {
    T.validate();
    const std::size_t m = T.n();
    if (count < 1 || count > m) throw numeric_error("tridiag_eigs: bad count");
    double lo, hi;
    T.gershgorin(lo, hi);
    if (!(lo < hi)) {
        hi = lo + 1.0;
        lo -= 1.0;
    }
    // widen slightly so strict inequalities behave at the exact bounds
    double pad = 1e-12 * (1.0 + std::fabs(lo) + std::fabs(hi));
    lo -= pad;
    hi += pad;
    if (sturm_count(T, lo) != 0 || sturm_count(T, hi) < count)
        throw numeric_error("tridiag_eigs: Gershgorin bracket failed");

    std::vector<double> out(count);
    for (std::size_t idx = 1; idx <= count; ++idx) {
        double a = (idx == 1) ? lo : out[idx - 2];  // eigenvalues are ordered
        double b = hi;
        // bisection: find x with sturm_count(x) >= idx while count(a) < idx
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (a + b);
            if (sturm_count(T, mid) >= idx)
                b = mid;
            else
                a = mid;
            double tol = 1e-13 * std::max(1.0, std::fabs(mid));
            if (b - a <= tol) break;
        }
        out[idx - 1] = 0.5 * (a + b);
    }
    return out;
}

// Unit-norm eigenvector of T for the isolated eigenvalue near mu, by inverse
// iteration with Rayleigh-quotient refinement.  The caller fixes the sign.
inline std::vector<double> inverse_iteration(const TriDiag& T, double mu) {
    T.validate();
    const std::size_t m = T.n();
    double lo, hi;
    T.gershgorin(lo, hi);
    const double scale = std::max({std::fabs(lo), std::fabs(hi), 1.0});

    std::vector<double> v(m), w(m);
    // deterministic, not-too-symmetric start
    for (std::size_t i = 0; i < m; ++i) v[i] = 1.0 + 0.5 * std::sin(double(i + 1));
    auto normalize = [&](std::vector<double>& u) {
        double mx = 0.0;
        for (double x : u) mx = std::max(mx, std::fabs(x));
        if (mx == 0.0 || !std::isfinite(mx))
            throw numeric_error("inverse_iteration: degenerate iterate");
        for (double& x : u) x /= mx;  // prescale so squaring cannot overflow
        KahanSum s;
        for (double x : u) s.add(x * x);
        double nrm = std::sqrt(s.value());
        for (double& x : u) x /= nrm;
    };
    normalize(v);

    double mu_hat = mu;
    std::vector<double> dl(m), du(m), d2(m);  // LU factors workspace
    double resid = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 50; ++it) {
        // Solve (T - mu_hat I) w = v by LU with partial pivoting on the
        // tridiagonal structure (produces an extra superdiagonal d2).
        std::vector<double> a(m), b(m, 0.0), c(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) a[i] = T.diag[i] - mu_hat;
        for (std::size_t i = 0; i + 1 < m; ++i) b[i] = T.offdiag[i];  // super
        for (std::size_t i = 0; i + 1 < m; ++i) c[i] = T.offdiag[i];  // sub (c[i] couples row i+1 to col i)
        std::vector<double> rhs = v;
        std::vector<double> e(m, 0.0);  // second superdiagonal from pivoting
        // relative pivot floor: keeps iterates finite when mu_hat is (nearly)
        // an exact eigenvalue and a pivot vanishes
        const double tiny = std::numeric_limits<double>::epsilon() * scale;
        for (std::size_t i = 0; i + 1 < m; ++i) {
            if (std::fabs(c[i]) > std::fabs(a[i])) {
                std::swap(a[i], c[i]);  // c[i] now holds old a[i] (the multiplier denominator swap)
                double t = b[i];
                b[i] = a[i + 1];
                a[i + 1] = t;
                e[i] = b[i + 1];
                b[i + 1] = 0.0;
                std::swap(rhs[i], rhs[i + 1]);
            }
            double piv = (std::fabs(a[i]) < tiny) ? ((a[i] < 0) ? -tiny : tiny) : a[i];
            double mfac = c[i] / piv;
            a[i + 1] -= mfac * b[i];
            if (i + 2 < m) b[i + 1] -= mfac * e[i];
            rhs[i + 1] -= mfac * rhs[i];
        }
        // back substitution
        for (std::size_t ii = m; ii-- > 0;) {
            double s = rhs[ii];
            if (ii + 1 < m) s -= b[ii] * w[ii + 1];
            if (ii + 2 < m) s -= e[ii] * w[ii + 2];
            double piv = (std::fabs(a[ii]) < tiny) ? ((a[ii] < 0) ? -tiny : tiny) : a[ii];
            w[ii] = s / piv;
        }
        normalize(w);
        v = w;
        // Rayleigh quotient and residual
        KahanSum rq;
        for (std::size_t i = 0; i < m; ++i) {
            double tv = T.diag[i] * v[i];
            if (i > 0) tv += T.offdiag[i - 1] * v[i - 1];
            if (i + 1 < m) tv += T.offdiag[i] * v[i + 1];
            w[i] = tv;
            rq.add(v[i] * tv);
        }
        mu_hat = rq.value();
        KahanSum rs;
        for (std::size_t i = 0; i < m; ++i) {
            double r = w[i] - mu_hat * v[i];
            rs.add(r * r);
        }
        resid = std::sqrt(rs.value());
        if (resid <= 1e-10 * scale) return v;
    }
    throw numeric_error("inverse_iteration: no convergence, residual " + std::to_string(resid));
}

// ---------------------------------------------------------------------------
// Dense symmetric eigensolver: cyclic Jacobi

struct JacobiResult {
    std::vector<double> eigenvalues;  // ascending
    SymMatrix vectors;                // columns matched to eigenvalues, orthogonal
};

inline JacobiResult jacobi_eigs(SymMatrix S) {
    const std::size_t n = S.n;
    if (n == 0) throw numeric_error("jacobi_eigs: empty matrix");
    S.symmetrize();
    SymMatrix V(n);
    for (std::size_t i = 0; i < n; ++i) V.at(i, i) = 1.0;

    const double fro = S.frobenius();
    auto offnorm = [&]() {
        KahanSum s;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s.add(2.0 * S.at(i, j) * S.at(i, j));
        return std::sqrt(s.value());
    };

    const double target = 1e-12 * std::max(fro, 1e-300);
    bool done = (fro == 0.0) || offnorm() <= target;
    for (int sweep = 0; sweep < 30 && !done; ++sweep) {
        // rotation threshold shrinks with the sweep; classic cyclic scheme
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = S.at(p, q);
                if (std::fabs(apq) <= 1e-14 * target / std::max<std::size_t>(n, 1)) continue;
                double app = S.at(p, p), aqq = S.at(q, q);
                double theta = 0.5 * (aqq - app) / apq;
                double t = ((theta >= 0) ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double cs = 1.0 / std::sqrt(t * t + 1.0);
                double sn = t * cs;
                double tau = sn / (1.0 + cs);
                S.at(p, p) = app - t * apq;
                S.at(q, q) = aqq + t * apq;
                S.at(p, q) = 0.0;
                S.at(q, p) = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (i != p && i != q) {
                        double aip = S.at(i, p), aiq = S.at(i, q);
                        double nip = aip - sn * (aiq + tau * aip);
                        double niq = aiq + sn * (aip - tau * aiq);
                        S.at(i, p) = nip;
                        S.at(p, i) = nip;
                        S.at(i, q) = niq;
                        S.at(q, i) = niq;
                    }
                    double vip = V.at(i, p), viq = V.at(i, q);
                    V.at(i, p) = vip - sn * (viq + tau * vip);
                    V.at(i, q) = viq + sn * (vip - tau * viq);
                }
            }
        }
        if (offnorm() <= target) {
            done = true;
            break;
        }
    }
    if (!done) throw numeric_error("jacobi_eigs: no convergence in 30 sweeps");

    JacobiResult res;
    res.eigenvalues.resize(n);
    for (std::size_t i = 0; i < n; ++i) res.eigenvalues[i] = S.at(i, i);
    // sort ascending with matched columns
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return res.eigenvalues[a] < res.eigenvalues[b];
    });
    std::vector<double> ev(n);
    SymMatrix W(n);
    for (std::size_t c = 0; c < n; ++c) {
        ev[c] = res.eigenvalues[idx[c]];
        for (std::size_t r = 0; r < n; ++r) W.at(r, c) = V.at(r, idx[c]);
    }
    res.eigenvalues = std::move(ev);
    res.vectors = std::move(W);
    return res;
}

// Symmetric PSD square root via the spectral factorization.  Eigenvalues in
// [-1e-12*||S||, 0) are clamped to 0; anything more negative is an error.
inline SymMatrix sym_sqrt(const SymMatrix& S) {
    JacobiResult jr = jacobi_eigs(S);
    const std::size_t n = S.n;
    double norm = 0.0;
    for (double l : jr.eigenvalues) norm = std::max(norm, std::fabs(l));
    const double floor_neg = -1e-12 * std::max(norm, 1e-300);
    std::vector<double> rt(n);
    for (std::size_t i = 0; i < n; ++i) {
        double l = jr.eigenvalues[i];
        if (l < floor_neg) throw numeric_error("sym_sqrt: not PSD");
        rt[i] = (l > 0.0) ? std::sqrt(l) : 0.0;
    }
    SymMatrix R(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            KahanSum s;
            for (std::size_t c = 0; c < n; ++c)
                s.add(jr.vectors.at(i, c) * rt[c] * jr.vectors.at(j, c));
            R.at(i, j) = s.value();
        }
    }
    R.symmetrize();
    return R;
}

// ---------------------------------------------------------------------------
// Root finding

// Classic Brent: bisection / secant / inverse quadratic.  Requires a sign
// change on [a,b]; returns the root bracketed to width <= tol.
inline double brent_root(const std::function<double(double)>& f, double a, double b,
                         double tol) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw numeric_error("brent_root: no sign change on bracket");
    if (std::fabs(fa) < std::fabs(fb)) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < 200; ++it) {
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        double tol1 = 0.5 * tol + 2.0 * std::numeric_limits<double>::epsilon() * std::fabs(b);
        double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            double s = fb / fa, p, q;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                double qq = fa / fc, r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::fabs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::fabs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
        if ((fb > 0) == (fc > 0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    return b;
}

// ---------------------------------------------------------------------------
// Hermite functions

// Normalized Hermite function phi_j (j >= 1): phi_1 = pi^{-1/4} e^{-x^2/2},
// then the stable normalized three-term recurrence
//   phi_{q+1} = x sqrt(2/(q+1)) phi_q - sqrt(q/(q+1)) phi_{q-1}.
inline double hermite_phi(int j, double x) {
    if (j < 1) throw numeric_error("hermite_phi: j must be >= 1");
    double p0 = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
    if (j == 1) return p0;
    double p1 = x * std::sqrt(2.0) * p0;
    for (int q = 1; q < j - 1; ++q) {
        double p2 = x * std::sqrt(2.0 / (q + 1)) * p1 - std::sqrt(double(q) / (q + 1)) * p0;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

// ---------------------------------------------------------------------------
// Gauss-Legendre quadrature on [a,b] by Newton iteration on P_n roots.

inline QuadratureRule gauss_legendre(int n, double a, double b) {
    if (n < 1 || !(a < b)) throw numeric_error("gauss_legendre: bad arguments");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int mhalf = (n + 1) / 2;
    for (int i = 0; i < mhalf; ++i) {
        // Tricomi-style initial guess for the i-th root (descending order)
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::fabs(dz) < 1e-15) break;
        }
        double x_lo = 0.5 * (b - a) * (-z) + 0.5 * (b + a);
        double x_hi = 0.5 * (b - a) * z + 0.5 * (b + a);
        double w = (b - a) / ((1.0 - z * z) * pp * pp);
        rule.nodes[i] = x_lo;
        rule.weights[i] = w;
        rule.nodes[n - 1 - i] = x_hi;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

}  // namespace esl
