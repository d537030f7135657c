/**
 * @file reference.hpp
 * @brief Finite-difference/finite-volume reference solutions on space-time grids.
 *
 * Schemes:
 *   burgers   MUSCL reconstruction (MC limiter) + Rusanov flux for u u_x,
 *             explicit central viscosity, SSP-RK2 in time, periodic domain.
 *   fisher    Strang splitting: exact logistic reaction half-steps around a
 *             Crank-Nicolson diffusion step (cyclic Thomas solve), periodic.
 *   sorption  backward-Euler diffusion with the retardation factor lagged one
 *             substep (Picard-1), Dirichlet u=1 at x=0, Robin discretized in
 *             the stable inward form (1+beta) u_N - beta u_{N-1} = 0 with
 *             beta = C_d/dx.
 *
 * Every solver integrates the full space-time field with m substeps per
 * output interval and doubles m until two successive fields agree to
 * `tol` in max-norm (the substep count can also be pinned for convergence
 * studies).
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "gstpinn/errors.hpp"
#include "gstpinn/problems.hpp"

namespace gstpinn {

struct GridSpec {
    int n_t = 0, n_x = 0;
    double t0 = 0.0, t1 = 0.0, x0 = 0.0, x1 = 0.0;

    double dt() const { return (t1 - t0) / (n_t - 1); }
    double dx() const { return (x1 - x0) / (n_x - 1); }
    double t(int it) const { return t0 + it * dt(); }
    double x(int ix) const { return x0 + ix * dx(); }
    long size() const { return static_cast<long>(n_t) * n_x; }
};

/// Dense solution field, row-major over [time][space].
struct ReferenceSolution {
    PdeKind kind = PdeKind::burgers;
    GridSpec grid;
    std::vector<double> u;
    std::string scheme;

    double at(int it, int ix) const { return u[static_cast<size_t>(it) * grid.n_x + ix]; }
};

struct SolveOptions {
    double tol = 1e-6;       ///< successive-refinement max-norm tolerance
    int max_doublings = 21;  ///< refinement cap before giving up (BE is first order)
    int fixed_substeps = 0;  ///< >0: pin substeps per interval, skip refinement
    std::function<double(double)> ic;  ///< overrides the problem's initial profile
};

namespace detail {

/// Tridiagonal solve a_i x_{i-1} + b_i x_i + c_i x_{i+1} = r_i (Thomas).
inline void thomas(const std::vector<double>& a, const std::vector<double>& b,
                   const std::vector<double>& c, std::vector<double> r, std::vector<double>& x,
                   std::vector<double>& scratch) {
    const size_t n = b.size();
    scratch.resize(n);
    x.resize(n);
    double beta = b[0];
    x[0] = r[0] / beta;
    for (size_t i = 1; i < n; ++i) {
        scratch[i] = c[i - 1] / beta;
        beta = b[i] - a[i] * scratch[i];
        x[i] = (r[i] - a[i] * x[i - 1]) / beta;
    }
    for (size_t i = n - 1; i-- > 0;) x[i] -= scratch[i + 1] * x[i + 1];
}

/// Cyclic tridiagonal solve (constant wrap corners alpha/beta) via
/// Sherman-Morrison on top of two Thomas passes.
inline void cyclic_thomas(const std::vector<double>& a, const std::vector<double>& b,
                          const std::vector<double>& c, double alpha, double beta,
                          const std::vector<double>& r, std::vector<double>& x) {
    const size_t n = b.size();
    const double gamma = -b[0];
    std::vector<double> bb = b;
    bb[0] -= gamma;
    bb[n - 1] -= alpha * beta / gamma;
    std::vector<double> z, scratch, u(n, 0.0);
    thomas(a, bb, c, r, x, scratch);
    u[0] = gamma;
    u[n - 1] = alpha;
    thomas(a, bb, c, u, z, scratch);
    const double fact =
        (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    for (size_t i = 0; i < n; ++i) x[i] -= fact * z[i];
}

inline double mc_limiter(double a, double b) {
    // monotonized-central slope: minmod(2a, 2b, (a+b)/2)
    if (a * b <= 0.0) return 0.0;
    const double s = a > 0.0 ? 1.0 : -1.0;
    return s * std::min({2.0 * std::abs(a), 2.0 * std::abs(b), 0.5 * std::abs(a + b)});
}

/// One full space-time integration of Burgers with m substeps per interval.
inline std::vector<double> burgers_full(const PdeProblem& p, const GridSpec& g, int m,
                                        const std::function<double(double)>& ic) {
    const int n = g.n_x - 1;  // unique periodic nodes
    const double dx = g.dx(), nu = p.burgers.eta_v / kPi;
    std::vector<double> u(n), k1(n), rhs(n), slope(n), flux(n);
    for (int i = 0; i < n; ++i) u[i] = ic(g.x(i));

    auto eval_rhs = [&](const std::vector<double>& v, std::vector<double>& out) {
        auto at = [&](int i) { return v[(i % n + n) % n]; };
        for (int i = 0; i < n; ++i) slope[i] = mc_limiter(at(i + 1) - at(i), at(i) - at(i - 1));
        for (int i = 0; i < n; ++i) {
            // interface i+1/2: left state from cell i, right from cell i+1
            const double ul = at(i) + 0.5 * slope[i];
            const double ur = at(i + 1) - 0.5 * slope[(i + 1) % n];
            const double a = std::max(std::abs(ul), std::abs(ur));
            flux[i] = 0.5 * (0.5 * ul * ul + 0.5 * ur * ur) - 0.5 * a * (ur - ul);
        }
        for (int i = 0; i < n; ++i) {
            const double adv = (flux[i] - flux[(i - 1 + n) % n]) / dx;
            const double dif = nu * (at(i + 1) - 2.0 * at(i) + at(i - 1)) / (dx * dx);
            out[i] = -adv + dif;
        }
    };

    std::vector<double> field(g.size());
    auto emit = [&](int it) {
        double* row = field.data() + static_cast<size_t>(it) * g.n_x;
        for (int i = 0; i < n; ++i) row[i] = u[i];
        row[n] = u[0];  // closed periodic grid
    };
    emit(0);
    std::vector<double> u1(n);
    const double dtau = g.dt() / m;
    for (int it = 1; it < g.n_t; ++it) {
        for (int s = 0; s < m; ++s) {
            eval_rhs(u, rhs);
            for (int i = 0; i < n; ++i) u1[i] = u[i] + dtau * rhs[i];
            eval_rhs(u1, k1);
            for (int i = 0; i < n; ++i) u[i] = 0.5 * (u[i] + u1[i] + dtau * k1[i]);
        }
        emit(it);
    }
    return field;
}

inline std::vector<double> fisher_full(const PdeProblem& p, const GridSpec& g, int m,
                                       const std::function<double(double)>& ic) {
    const int n = g.n_x - 1;
    const double dx = g.dx(), xi = p.fisher.xi_v, rho = p.fisher.rho_m;
    std::vector<double> u(n);
    for (int i = 0; i < n; ++i) u[i] = ic(g.x(i));

    const double dtau = g.dt() / m;
    const double r = xi * dtau / (2.0 * dx * dx);
    const std::vector<double> a(n, -r), b(n, 1.0 + 2.0 * r), c(n, -r);
    std::vector<double> rhs(n), x(n);

    // exact logistic flow over half a substep
    const double decay = std::exp(-rho * dtau / 2.0);
    auto react = [&] {
        for (double& v : u) v = v / (v + (1.0 - v) * decay);
    };

    std::vector<double> field(g.size());
    auto emit = [&](int it) {
        double* row = field.data() + static_cast<size_t>(it) * g.n_x;
        for (int i = 0; i < n; ++i) row[i] = u[i];
        row[n] = u[0];
    };
    emit(0);
    for (int it = 1; it < g.n_t; ++it) {
        for (int s = 0; s < m; ++s) {
            react();
            for (int i = 0; i < n; ++i) {
                const double up = u[(i + 1) % n], um = u[(i - 1 + n) % n];
                rhs[i] = u[i] + r * (up - 2.0 * u[i] + um);
            }
            cyclic_thomas(a, b, c, -r, -r, rhs, x);
            u.swap(x);
            react();
        }
        emit(it);
    }
    return field;
}

inline std::vector<double> sorption_full(const PdeProblem& p, const GridSpec& g, int m,
                                         const std::function<double(double)>& ic) {
    const int n = g.n_x;  // boundary nodes included
    const SorptionParams& sp = p.sorption;
    const double dx = g.dx(), kap = sorption_kappa(sp), beta = sp.c_d / dx;
    std::vector<double> u(n);
    for (int i = 0; i < n; ++i) u[i] = ic(g.x(i));

    std::vector<double> a(n), b(n), c(n), rhs(n), x(n), scratch;

    auto be_step = [&](double dtau) {
        // Dirichlet row
        a[0] = 0.0; b[0] = 1.0; c[0] = 0.0; rhs[0] = 1.0;
        for (int i = 1; i + 1 < n; ++i) {
            const double uc = std::max(u[i], kSorptionClampFloor);
            const double R = 1.0 + kap * std::pow(uc, sp.n_f - 1.0);  // lagged
            const double ri = dtau * sp.c_d / (R * dx * dx);
            a[i] = -ri; b[i] = 1.0 + 2.0 * ri; c[i] = -ri; rhs[i] = u[i];
        }
        // Robin row, stable inward orientation
        a[n - 1] = -beta; b[n - 1] = 1.0 + beta; c[n - 1] = 0.0; rhs[n - 1] = 0.0;
        thomas(a, b, c, rhs, x, scratch);
        u.swap(x);
    };

    std::vector<double> field(g.size());
    auto emit = [&](int it) { std::copy(u.begin(), u.end(), field.begin() + static_cast<size_t>(it) * n); };
    emit(0);
    const double dT = g.dt();
    for (int it = 1; it < g.n_t; ++it) {
        if (it == 1) {
            // The Dirichlet jump at t=0 makes u_t singular; quadratically
            // graded substeps t_j = dT (j/m)^2 keep the first-order error of
            // backward Euler from being dominated by the transient.
            for (int s = 1; s <= m; ++s) {
                const double frac_prev = double(s - 1) / m, frac = double(s) / m;
                be_step(dT * (frac * frac - frac_prev * frac_prev));
            }
        } else {
            for (int s = 0; s < m; ++s) be_step(dT / m);
        }
        emit(it);
    }
    return field;
}

}  // namespace detail

/**
 * Integrates the problem on an (n_t x n_x) grid over [0, t_max] x [0, L_x].
 * Starts from a scheme-appropriate substep count and doubles it until two
 * successive fields agree to opts.tol in max-norm.
 */
inline ReferenceSolution solve_reference(const PdeProblem& p, int n_t, int n_x,
                                         SolveOptions opts = {}) {
    if (n_x < 16) throw ConfigError(strf("reference grid needs n_x >= 16, got %d", n_x));
    if (n_t < 2) throw ConfigError(strf("reference grid needs n_t >= 2, got %d", n_t));

    GridSpec g{n_t, n_x, 0.0, p.t_max, 0.0, p.L_x};
    std::function<double(double)> ic =
        opts.ic ? opts.ic : [&p](double x) { return ic_value(p, x); };

    const char* name = to_string(p.kind);
    auto full = [&](int m) {
        switch (p.kind) {
            case PdeKind::burgers: return detail::burgers_full(p, g, m, ic);
            case PdeKind::fisher: return detail::fisher_full(p, g, m, ic);
            default: return detail::sorption_full(p, g, m, ic);
        }
    };

    // scheme-mandated starting substep count
    int m0 = 1;
    if (p.kind == PdeKind::burgers) {
        double umax = 0.0;
        for (int i = 0; i < n_x; ++i) umax = std::max(umax, std::abs(ic(g.x(i))));
        const double dx = g.dx(), nu = p.burgers.eta_v / kPi;
        double dt_cfl = 0.4 * dx * dx / (2.0 * nu);
        if (umax > 0.0) dt_cfl = std::min(dt_cfl, 0.4 * dx / umax);
        m0 = std::max(1, static_cast<int>(std::ceil(g.dt() / dt_cfl)));
    }
    const int min_total = 4;  // even stable schemes take a few substeps overall
    m0 = std::max(m0, static_cast<int>(std::ceil(double(min_total) / (n_t - 1))));

    ReferenceSolution sol;
    sol.kind = p.kind;
    sol.grid = g;

    if (opts.fixed_substeps > 0) {
        sol.u = full(opts.fixed_substeps);
        sol.scheme = strf("%s substeps/interval=%d (pinned)", name, opts.fixed_substeps);
    } else {
        int m = m0;
        std::vector<double> prev = full(m);
        double diff = 0.0;
        bool converged = false;
        for (int k = 0; k < opts.max_doublings; ++k) {
            std::vector<double> next = full(2 * m);
            diff = 0.0;
            for (size_t i = 0; i < prev.size(); ++i)
                diff = std::max(diff, std::abs(next[i] - prev[i]));
            m *= 2;
            prev.swap(next);
            if (diff < opts.tol) {
                converged = true;
                break;
            }
        }
        if (!converged)
            throw RefinementError(strf(
                "%s reference did not reach tol %g after %d doublings (last diff %g, m=%d)",
                name, opts.tol, opts.max_doublings, diff, m));
        sol.u = std::move(prev);
        sol.scheme = strf("%s substeps/interval=%d refinement-diff=%.3g", name, m, diff);
    }

    for (double v : sol.u)
        if (!std::isfinite(v))
            throw RefinementError(strf("%s reference produced non-finite values", name));
    return sol;
}

/// Plain-text header (kind, grid, scheme, provenance) followed by a CSV body
/// of t,x,u rows in %.17g, so values round-trip bit-exactly.
inline void save_reference(const std::string& path, const ReferenceSolution& sol,
                           ArtifactMeta meta) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open reference file for writing: " + path);
    const GridSpec& g = sol.grid;
    f << "# gstpinn-reference 1\n";
    f << "# kind " << to_string(sol.kind) << '\n';
    f << strf("# grid n_t %d n_x %d t0 %.17g t1 %.17g x0 %.17g x1 %.17g\n", g.n_t, g.n_x, g.t0,
              g.t1, g.x0, g.x1);
    f << "# scheme " << sol.scheme << '\n';
    f << strf("# seed %llu hash %016llx\n", (unsigned long long)meta.seed,
              (unsigned long long)meta.config_hash);
    f << "t,x,u\n";
    for (int it = 0; it < g.n_t; ++it)
        for (int ix = 0; ix < g.n_x; ++ix)
            f << strf("%.17g,%.17g,%.17g\n", g.t(it), g.x(ix), sol.at(it, ix));
    if (!f) throw IoError("short write on reference file: " + path);
}

inline ReferenceSolution load_reference(const std::string& path, ArtifactMeta* meta = nullptr) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open reference file: " + path);
    ReferenceSolution sol;
    ArtifactMeta m;
    std::string line;
    bool magic_seen = false, grid_seen = false;
    while (std::getline(f, line)) {
        if (line.rfind("# ", 0) != 0) break;  // "t,x,u" column header ends the block
        const std::string body = line.substr(2);
        if (body.rfind("gstpinn-reference", 0) == 0) {
            magic_seen = true;
        } else if (body.rfind("kind ", 0) == 0) {
            const std::string k = body.substr(5);
            if (k == "burgers") sol.kind = PdeKind::burgers;
            else if (k == "fisher") sol.kind = PdeKind::fisher;
            else if (k == "sorption") sol.kind = PdeKind::sorption;
            else throw IoError("unknown problem kind in reference file: " + k);
        } else if (body.rfind("grid ", 0) == 0) {
            GridSpec& g = sol.grid;
            if (std::sscanf(body.c_str(), "grid n_t %d n_x %d t0 %lg t1 %lg x0 %lg x1 %lg",
                            &g.n_t, &g.n_x, &g.t0, &g.t1, &g.x0, &g.x1) != 6)
                throw IoError("malformed grid header in reference file: " + path);
            grid_seen = true;
        } else if (body.rfind("scheme ", 0) == 0) {
            sol.scheme = body.substr(7);
        } else if (body.rfind("seed ", 0) == 0) {
            unsigned long long seed = 0, hash = 0;
            if (std::sscanf(body.c_str(), "seed %llu hash %llx", &seed, &hash) != 2)
                throw IoError("malformed provenance header in reference file: " + path);
            m.seed = seed;
            m.config_hash = hash;
        }
    }
    if (!magic_seen || !grid_seen || line != "t,x,u")
        throw IoError("not a gstpinn reference file: " + path);
    if (sol.grid.n_t < 2 || sol.grid.n_x < 2 || sol.grid.size() > (1L << 31))
        throw IoError("implausible grid in reference file: " + path);
    sol.u.resize(sol.grid.size());
    for (long i = 0; i < sol.grid.size(); ++i) {
        if (!std::getline(f, line)) throw IoError("reference file body truncated: " + path);
        double t, x, u;
        if (std::sscanf(line.c_str(), "%lg,%lg,%lg", &t, &x, &u) != 3)
            throw IoError(strf("malformed reference row %ld: %s", i, line.c_str()));
        sol.u[i] = u;
    }
    if (meta) *meta = m;
    return sol;
}

}  // namespace gstpinn
