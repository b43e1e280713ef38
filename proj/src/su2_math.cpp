#include "spintomo/su2_math.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spintomo {

namespace {

// Large enough for every factorial reachable at 2j = 100 (Racah sums touch
// (j1+j2+j+1)! <= 151!).
constexpr int kLogFactorialSize = 512;

const std::vector<double>& log_factorial_table() {
    static const std::vector<double> table = [] {
        std::vector<double> t(kLogFactorialSize, 0.0);
        for (int n = 2; n < kLogFactorialSize; ++n)
            t[n] = t[n - 1] + std::log(static_cast<double>(n));
        return t;
    }();
    return table;
}

double ipow(double base, int exponent) {
    if (exponent == 0) return 1.0;
    return std::pow(base, exponent);
}

} // namespace

double log_factorial(int n) {
    if (n < 0) throw std::domain_error("log_factorial of negative argument");
    if (n >= kLogFactorialSize) throw std::domain_error("log_factorial table exceeded (2j > 100?)");
    return log_factorial_table()[n];
}

double clebsch_gordan(HalfInteger j1, HalfInteger m1,
                      HalfInteger j2, HalfInteger m2,
                      HalfInteger j, HalfInteger m) {
    require_projection(j1, m1, "m1");
    require_projection(j2, m2, "m2");
    require_projection(j, m, "m");

    if (m1.twice() + m2.twice() != m.twice()) return 0.0;
    if (j.twice() < std::abs(j1.twice() - j2.twice()) || j.twice() > j1.twice() + j2.twice())
        return 0.0;
    // j1 + j2 + j must be an integer for the coupling to exist
    if ((j1.twice() + j2.twice() + j.twice()) % 2 != 0) return 0.0;

    // all arguments below are guaranteed non-negative integers
    const int a = (j1.twice() + j2.twice() - j.twice()) / 2;
    const int b = (j1.twice() - j2.twice() + j.twice()) / 2;
    const int c = (-j1.twice() + j2.twice() + j.twice()) / 2;
    const int d = (j1.twice() + j2.twice() + j.twice()) / 2 + 1;

    const int j1p = (j1.twice() + m1.twice()) / 2, j1m = (j1.twice() - m1.twice()) / 2;
    const int j2p = (j2.twice() + m2.twice()) / 2, j2m = (j2.twice() - m2.twice()) / 2;
    const int jp = (j.twice() + m.twice()) / 2, jm = (j.twice() - m.twice()) / 2;

    const double log_pre =
        0.5 * (std::log(j.twice() + 1.0) + log_factorial(a) + log_factorial(b) +
               log_factorial(c) - log_factorial(d) + log_factorial(j1p) + log_factorial(j1m) +
               log_factorial(j2p) + log_factorial(j2m) + log_factorial(jp) + log_factorial(jm));

    // Racah sum over k with all six factorial arguments non-negative
    const int t4_0 = (j.twice() - j2.twice() + m1.twice()) / 2;
    const int t5_0 = (j.twice() - j1.twice() - m2.twice()) / 2;
    const int k_min = std::max({0, -t4_0, -t5_0});
    const int k_max = std::min({a, j1m, j2p});

    double sum = 0.0;
    for (int k = k_min; k <= k_max; ++k) {
        const double log_den = log_factorial(k) + log_factorial(a - k) + log_factorial(j1m - k) +
                               log_factorial(j2p - k) + log_factorial(t4_0 + k) +
                               log_factorial(t5_0 + k);
        const double term = std::exp(log_pre - log_den);
        sum += (k % 2 == 0) ? term : -term;
    }
    return sum;
}

namespace {

// Wigner sum formula; well conditioned for small dimensions or small angles,
// where the alternating series has no catastrophic cancellation.
RealMatrix wigner_d_direct(HalfInteger j, double beta) {
    const int dim = dimension(j);
    const double c = std::cos(0.5 * beta);
    const double s = std::sin(0.5 * beta);

    RealMatrix d(dim, dim);
    for (int row = 0; row < dim; ++row) {
        const int tmp = j.twice() - 2 * row; // 2m'
        for (int col = 0; col < dim; ++col) {
            const int tm = j.twice() - 2 * col; // 2m
            const int jpmp = (j.twice() + tmp) / 2, jmmp = (j.twice() - tmp) / 2;
            const int jpm = (j.twice() + tm) / 2, jmm = (j.twice() - tm) / 2;
            const int mp_minus_m = (tmp - tm) / 2;

            const double log_pre = 0.5 * (log_factorial(jpmp) + log_factorial(jmmp) +
                                          log_factorial(jpm) + log_factorial(jmm));
            const int k_min = std::max(0, -mp_minus_m);
            const int k_max = std::min(jpm, jmmp);
            double sum = 0.0;
            for (int k = k_min; k <= k_max; ++k) {
                const double log_den = log_factorial(jpm - k) + log_factorial(k) +
                                       log_factorial(mp_minus_m + k) +
                                       log_factorial(jmmp - k);
                const int cos_pow = j.twice() - 2 * k - mp_minus_m;
                const int sin_pow = mp_minus_m + 2 * k;
                double term = std::exp(log_pre - log_den) * ipow(c, cos_pow) * ipow(s, sin_pow);
                if ((mp_minus_m + k) % 2 != 0) term = -term;
                sum += term;
            }
            d(row, col) = sum;
        }
    }
    return d;
}

} // namespace

RealMatrix wigner_d(HalfInteger j, double beta) {
    if (j.twice() < 0) throw std::domain_error("wigner_d: j must be >= 0");
    // exp(-i beta J_y) is 4*pi periodic for every j
    const double reduced = std::remainder(beta, 4.0 * std::numbers::pi);
    if (j.twice() <= 20) return wigner_d_direct(j, reduced);

    // the alternating sum cancels badly once the dimension grows; evaluate at
    // a scaled-down angle where it is stable and square back up
    const double seed_limit = 0.5 / std::sqrt(static_cast<double>(dimension(j)));
    int splits = 0;
    double seed = reduced;
    while (std::abs(seed) > seed_limit && splits < 16) {
        seed *= 0.5;
        ++splits;
    }
    RealMatrix d = wigner_d_direct(j, seed);
    for (int k = 0; k < splits; ++k) d = (d * d).eval();
    return d;
}

ComplexMatrix rotation_operator(HalfInteger j, const SpherePoint& n) {
    const int dim = dimension(j);
    const RealMatrix d = wigner_d(j, n.theta);
    ComplexMatrix g(dim, dim);
    for (int row = 0; row < dim; ++row) {
        const double mp = 0.5 * (j.twice() - 2 * row);
        const Complex phase = std::polar(1.0, -mp * n.phi);
        for (int col = 0; col < dim; ++col) g(row, col) = phase * d(row, col);
    }
    return g;
}

ComplexMatrix euler_rotation(HalfInteger j, double alpha, double beta, double gamma) {
    const int dim = dimension(j);
    const RealMatrix d = wigner_d(j, -beta); // exp(+i beta J_y) = d(-beta)
    ComplexMatrix g(dim, dim);
    for (int row = 0; row < dim; ++row) {
        const double mp = 0.5 * (j.twice() - 2 * row);
        for (int col = 0; col < dim; ++col) {
            const double m = 0.5 * (j.twice() - 2 * col);
            g(row, col) = std::polar(1.0, alpha * mp + gamma * m) * d(row, col);
        }
    }
    return g;
}

ComplexMatrix tensor_operator(HalfInteger j, int l, int m) {
    if (l < 0 || l > j.twice())
        throw std::domain_error("tensor_operator: l must satisfy 0 <= l <= 2j");
    if (std::abs(m) > l)
        throw std::domain_error("tensor_operator: |m| <= l required");

    const int dim = dimension(j);
    const double scale = std::sqrt((2.0 * l + 1.0) / dim);
    const HalfInteger hl = HalfInteger::from_int(l);
    const HalfInteger hm = HalfInteger::from_int(m);

    ComplexMatrix op = ComplexMatrix::Zero(dim, dim);
    for (int col = 0; col < dim; ++col) {
        const HalfInteger k = projection_at(j, col);
        const HalfInteger q = k + hm;
        if (std::abs(q.twice()) > j.twice()) continue;
        const int row = index_of(j, q);
        op(row, col) = scale * clebsch_gordan(j, k, hl, hm, j, q);
    }
    return op;
}

std::vector<double> spherical_harmonic_table(int lmax, double theta) {
    if (lmax < 0) throw std::domain_error("spherical_harmonic_table: lmax must be >= 0");
    const double x = std::cos(theta);
    const double sx = std::sin(theta);
    const auto idx = [](int l, int m) { return l * (l + 1) / 2 + m; };

    std::vector<double> table(idx(lmax, lmax) + 1, 0.0);
    table[0] = std::sqrt(0.25 / std::numbers::pi);
    // sectoral seed carries the Condon-Shortley phase
    for (int m = 1; m <= lmax; ++m)
        table[idx(m, m)] = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * sx * table[idx(m - 1, m - 1)];
    for (int m = 0; m < lmax; ++m)
        table[idx(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * table[idx(m, m)];
    for (int m = 0; m <= lmax; ++m) {
        for (int l = m + 2; l <= lmax; ++l) {
            const double ll = static_cast<double>(l), mm = static_cast<double>(m);
            const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
            const double b = std::sqrt((2.0 * ll + 1.0) / (2.0 * ll - 3.0) *
                                       ((ll - 1.0) * (ll - 1.0) - mm * mm) / (ll * ll - mm * mm));
            table[idx(l, m)] = a * x * table[idx(l - 1, m)] - b * table[idx(l - 2, m)];
        }
    }
    return table;
}

Complex spherical_harmonic(int l, int m, const SpherePoint& n) {
    if (l < 0) throw std::domain_error("spherical_harmonic: l must be >= 0");
    if (std::abs(m) > l) throw std::domain_error("spherical_harmonic: |m| <= l required");
    const int ma = std::abs(m);
    const auto table = spherical_harmonic_table(l, n.theta);
    const double part = table[l * (l + 1) / 2 + ma];
    Complex y = part * std::polar(1.0, ma * n.phi);
    if (m < 0) {
        y = std::conj(y);
        if (ma % 2 != 0) y = -y;
    }
    return y;
}

double legendre_p(int l, double x) {
    if (l < 0) throw std::domain_error("legendre_p: l must be >= 0");
    if (std::abs(x) > 1.0) throw std::domain_error("legendre_p: |x| <= 1 required");
    double pm2 = 1.0, pm1 = x;
    if (l == 0) return pm2;
    if (l == 1) return pm1;
    double p = 0.0;
    for (int k = 2; k <= l; ++k) {
        p = ((2.0 * k - 1.0) * x * pm1 - (k - 1.0) * pm2) / k;
        pm2 = pm1;
        pm1 = p;
    }
    return p;
}

std::vector<double> legendre_all(int lmax, double x) {
    if (lmax < 0) throw std::domain_error("legendre_all: lmax must be >= 0");
    if (std::abs(x) > 1.0) throw std::domain_error("legendre_all: |x| <= 1 required");
    std::vector<double> p(lmax + 1);
    p[0] = 1.0;
    if (lmax >= 1) p[1] = x;
    for (int k = 2; k <= lmax; ++k)
        p[k] = ((2.0 * k - 1.0) * x * p[k - 1] - (k - 1.0) * p[k - 2]) / k;
    return p;
}

ComplexMatrix jz_matrix(HalfInteger j) {
    const int dim = dimension(j);
    ComplexMatrix jz = ComplexMatrix::Zero(dim, dim);
    for (int row = 0; row < dim; ++row) jz(row, row) = 0.5 * (j.twice() - 2 * row);
    return jz;
}

namespace {

// J+ |j,m> = sqrt(j(j+1) - m(m+1)) |j,m+1>
ComplexMatrix jplus_matrix(HalfInteger j) {
    const int dim = dimension(j);
    const double jj = j.value() * (j.value() + 1.0);
    ComplexMatrix jp = ComplexMatrix::Zero(dim, dim);
    for (int col = 1; col < dim; ++col) {
        const double m = 0.5 * (j.twice() - 2 * col);
        jp(col - 1, col) = std::sqrt(jj - m * (m + 1.0));
    }
    return jp;
}

} // namespace

ComplexMatrix jx_matrix(HalfInteger j) {
    const ComplexMatrix jp = jplus_matrix(j);
    return 0.5 * (jp + jp.adjoint());
}

ComplexMatrix jy_matrix(HalfInteger j) {
    const ComplexMatrix jp = jplus_matrix(j);
    return Complex(0.0, -0.5) * (jp - jp.adjoint());
}

} // namespace spintomo
