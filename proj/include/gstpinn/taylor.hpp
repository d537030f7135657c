/**
 * @file taylor.hpp
 * @brief Truncated multivariate Taylor arithmetic (forward jets) in 1 or 2 variables.
 *
 * A Jet<N, Order> stores the Taylor coefficients of a scalar function of N
 * inputs, truncated at total degree Order:
 *
 *     c[k] = (d^alpha u / dx^alpha) / alpha!   for the k-th multi-index alpha.
 *
 * Multi-indices are enumerated degree-major (all of degree d before d+1);
 * within a degree the first slot decreases, e.g. for N = 2:
 *
 *     (0,0) | (1,0) (0,1) | (2,0) (1,1) (0,2) | (3,0) (2,1) (1,2) (0,3)
 *
 * Slot 0 is t and slot 1 is x throughout the PDE code, so c[idx(1,0)] holds
 * du/dt. Products are truncated convolutions; the admissible coefficient
 * pairs are precomputed into a constexpr table so the hot loops are straight
 * multiply-adds (35 of them for N=2, Order=3).
 */
#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace gstpinn {

/// Derivative order per input slot. One-input networks use slot 0 only
/// (slot 1 must stay 0); for the PDE problems slot 0 is t, slot 1 is x.
struct MultiIndex {
    int dt = 0;
    int dx = 0;

    friend constexpr bool operator==(MultiIndex a, MultiIndex b) {
        return a.dt == b.dt && a.dx == b.dx;
    }
    /// Degree-major ordering, matching the jet coefficient layout.
    friend constexpr bool operator<(MultiIndex a, MultiIndex b) {
        const int da = a.dt + a.dx, db = b.dt + b.dx;
        if (da != db) return da < db;
        return a.dx < b.dx;
    }
    constexpr int total() const { return dt + dx; }
};

constexpr int binom(int n, int k) {
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return static_cast<int>(r);
}

/// Coefficient pair feeding one output coefficient of a truncated product.
struct MulTriple {
    std::int16_t out, a, b;
};

template <int N, int Order>
struct JetLayout {
    static_assert(N == 1 || N == 2, "jets support 1 or 2 input variables");
    static_assert(Order >= 0 && Order <= 3, "derivative order capped at 3");

    static constexpr int count = binom(N + Order, N);

    static constexpr auto make_exponents() {
        std::array<std::array<int, N>, count> e{};
        int n = 0;
        for (int d = 0; d <= Order; ++d) {
            std::array<int, N> c{};
            c[0] = d;
            while (true) {
                e[n++] = c;
                int k = -1;  // rightmost non-terminal slot that can donate
                for (int i = N - 2; i >= 0; --i)
                    if (c[i] > 0) { k = i; break; }
                if (k < 0) break;
                int rest = 0;
                for (int i = k + 1; i < N; ++i) { rest += c[i]; c[i] = 0; }
                c[k] -= 1;
                c[k + 1] = rest + 1;
            }
        }
        return e;
    }
    static constexpr std::array<std::array<int, N>, count> exponents = make_exponents();

    /// Index of a multi-index in the coefficient array; -1 if out of range.
    static constexpr int index_of(std::array<int, N> alpha) {
        for (int k = 0; k < count; ++k)
            if (exponents[k] == alpha) return k;
        return -1;
    }

    static constexpr auto make_factorials() {
        std::array<double, count> f{};
        for (int k = 0; k < count; ++k) {
            double p = 1;
            for (int i = 0; i < N; ++i)
                for (int j = 2; j <= exponents[k][i]; ++j) p *= j;
            f[k] = p;
        }
        return f;
    }
    /// alpha! per coefficient: converts Taylor coefficients to derivatives.
    static constexpr std::array<double, count> factorial = make_factorials();

    static constexpr int mul_size() {
        int n = 0;
        for (int out = 0; out < count; ++out)
            for (int a = 0; a < count; ++a)
                for (int b = 0; b < count; ++b) {
                    bool hit = true;
                    for (int i = 0; i < N; ++i)
                        if (exponents[a][i] + exponents[b][i] != exponents[out][i]) hit = false;
                    if (hit) ++n;
                }
        return n;
    }

    static constexpr auto make_mul_table() {
        std::array<MulTriple, mul_size()> t{};
        int n = 0;
        for (int out = 0; out < count; ++out)
            for (int a = 0; a < count; ++a)
                for (int b = 0; b < count; ++b) {
                    bool hit = true;
                    for (int i = 0; i < N; ++i)
                        if (exponents[a][i] + exponents[b][i] != exponents[out][i]) hit = false;
                    if (hit)
                        t[n++] = {static_cast<std::int16_t>(out), static_cast<std::int16_t>(a),
                                  static_cast<std::int16_t>(b)};
                }
        return t;
    }
    static constexpr std::array<MulTriple, mul_size()> mul_table = make_mul_table();
};

template <int N, int Order>
struct Jet {
    using Layout = JetLayout<N, Order>;
    static constexpr int size = Layout::count;

    std::array<double, size> c{};

    static Jet constant(double v) {
        Jet j;
        j.c[0] = v;
        return j;
    }
    /// Seed for input `slot`: value plus a unit first-order coefficient.
    static Jet variable(double v, int slot) {
        Jet j;
        j.c[0] = v;
        if constexpr (Order >= 1) j.c[1 + slot] = 1.0;
        return j;
    }

    double value() const { return c[0]; }

    /// True partial derivative of the given order (coefficient times alpha!).
    double deriv(std::array<int, N> alpha) const {
        const int k = Layout::index_of(alpha);
        return k < 0 ? 0.0 : c[k] * Layout::factorial[k];
    }

    Jet& operator+=(const Jet& o) {
        for (int k = 0; k < size; ++k) c[k] += o.c[k];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        for (int k = 0; k < size; ++k) c[k] -= o.c[k];
        return *this;
    }
    Jet& operator*=(double s) {
        for (int k = 0; k < size; ++k) c[k] *= s;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }

    friend Jet operator+(Jet a, double s) {
        a.c[0] += s;
        return a;
    }
    friend Jet operator-(Jet a, double s) {
        a.c[0] -= s;
        return a;
    }

    /// Truncated convolution: (a*b)[alpha] = sum_{beta+gamma=alpha} a[beta] b[gamma].
    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r;
        for (const MulTriple& t : Layout::mul_table) r.c[t.out] += a.c[t.a] * b.c[t.b];
        return r;
    }
};

/**
 * tanh of a jet by composing the univariate Taylor expansion of tanh at the
 * constant part z0 with the non-constant part h = z - z0*e0:
 *
 *     y = T + t1*h + (t2/2) h^2 + (t3/6) h^3   (truncated at Order)
 *
 * where T = tanh(z0), S = 1 - T^2 and the derivatives of tanh are
 *     t1 = S,  t2 = -2 T S,  t3 = -2 S (1 - 3 T^2),  t4 = 8 T S (2 - 3 T^2).
 * h has zero constant coefficient so h^k only touches degrees >= k.
 */
template <int N, int Order>
Jet<N, Order> tanh(const Jet<N, Order>& z) {
    const double T = std::tanh(z.c[0]);
    Jet<N, Order> y = Jet<N, Order>::constant(T);
    if constexpr (Order >= 1) {
        const double S = 1.0 - T * T;
        Jet<N, Order> h = z;
        h.c[0] = 0.0;
        y += S * h;
        if constexpr (Order >= 2) {
            const double t2 = -2.0 * T * S;
            const Jet<N, Order> h2 = h * h;
            y += (t2 / 2.0) * h2;
            if constexpr (Order >= 3) {
                const double t3 = -2.0 * S * (1.0 - 3.0 * T * T);
                y += (t3 / 6.0) * (h2 * h);
            }
        }
    }
    return y;
}

/**
 * Reverse step through y = tanh(z). Given the adjoint ybar = dL/dy (per
 * coefficient), returns zbar = dL/dz.
 *
 * The non-constant coefficients flow through dy = s (*) dh with
 * s = t1 + t2 h + (t3/2) h^2, so zbar[beta != 0] is the correlation
 * sum_{alpha >= beta} ybar[alpha] s[alpha - beta] — the same triple table as
 * multiplication, read with the roles rotated. The constant slot contributes
 * twice: through T directly and through every tk, whose z0-derivative is t(k+1):
 *
 *     zbar[0] = t1 ybar[0] + sum_{alpha != 0} ybar[alpha] w[alpha],
 *     w = t2 h + (t3/2) h^2 + (t4/6) h^3.
 */
template <int N, int Order>
Jet<N, Order> tanh_pullback(const Jet<N, Order>& z, const Jet<N, Order>& y,
                            const Jet<N, Order>& ybar) {
    using L = JetLayout<N, Order>;
    const double T = y.c[0];
    const double S = 1.0 - T * T;
    Jet<N, Order> zbar;
    if constexpr (Order == 0) {
        zbar.c[0] = S * ybar.c[0];
        return zbar;
    } else {
        const double t2 = -2.0 * T * S;
        const double t3 = -2.0 * S * (1.0 - 3.0 * T * T);
        const double t4 = 8.0 * T * S * (2.0 - 3.0 * T * T);

        Jet<N, Order> h = z;
        h.c[0] = 0.0;
        Jet<N, Order> h2{}, h3{};
        if constexpr (Order >= 2) h2 = h * h;
        if constexpr (Order >= 3) h3 = h2 * h;

        Jet<N, Order> s = t2 * h;
        s.c[0] = S;
        if constexpr (Order >= 2) s += (t3 / 2.0) * h2;

        Jet<N, Order> w = t2 * h;
        if constexpr (Order >= 2) w += (t3 / 2.0) * h2;
        if constexpr (Order >= 3) w += (t4 / 6.0) * h3;

        for (const MulTriple& t : L::mul_table) zbar.c[t.a] += ybar.c[t.out] * s.c[t.b];
        zbar.c[0] = S * ybar.c[0];
        for (int k = 1; k < Jet<N, Order>::size; ++k) zbar.c[0] += ybar.c[k] * w.c[k];
        return zbar;
    }
}

}  // namespace gstpinn
