#include "spintomo/sphere.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "spintomo/su2_math.hpp"

namespace spintomo {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_phi(double phi) {
    double w = std::fmod(phi, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    if (w >= kTwoPi) w = 0.0; // fmod rounding at the seam
    return w;
}
} // namespace

Eigen::Vector3d SpherePoint::unit() const {
    const double st = std::sin(theta);
    return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

double SpherePoint::dot(const SpherePoint& other) const {
    return unit().dot(other.unit());
}

SpherePoint SpherePoint::antipode() const {
    return from_unit(-unit());
}

SpherePoint SpherePoint::from_unit(const Eigen::Vector3d& v) {
    const double norm = v.norm();
    if (norm <= 0.0) throw std::domain_error("SpherePoint::from_unit: zero vector");
    const double z = std::clamp(v.z() / norm, -1.0, 1.0);
    SpherePoint p;
    p.theta = std::acos(z);
    if (std::abs(v.x()) < 1e-300 && std::abs(v.y()) < 1e-300) {
        p.phi = 0.0;
    } else {
        p.phi = wrap_phi(std::atan2(v.y(), v.x()));
    }
    return p;
}

SpherePoint SpherePoint::canonical(double theta_raw, double phi_raw) {
    if (theta_raw >= 0.0 && theta_raw <= std::numbers::pi) {
        return SpherePoint{theta_raw, wrap_phi(phi_raw)};
    }
    // negating theta flips the azimuth by pi; no trig round trip needed
    if (theta_raw >= -std::numbers::pi && theta_raw < 0.0) {
        return SpherePoint{-theta_raw, wrap_phi(phi_raw + std::numbers::pi)};
    }
    return from_unit(Eigen::Vector3d{std::sin(theta_raw) * std::cos(phi_raw),
                                     std::sin(theta_raw) * std::sin(phi_raw),
                                     std::cos(theta_raw)});
}

double SphereGrid::weight_sum() const {
    double sum = 0.0;
    for (double w : weights) sum += w;
    return sum;
}

bool SphereGrid::exact_to_degree(int degree, double tol) const {
    if (points.size() != weights.size()) return false;
    const auto idx = [](int l, int m) { return l * (l + 1) / 2 + m; };
    const int ncoef = idx(degree, degree) + 1;
    std::vector<std::complex<double>> acc(ncoef, 0.0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto table = spherical_harmonic_table(degree, points[i].theta);
        for (int m = 0; m <= degree; ++m) {
            const std::complex<double> phase =
                weights[i] * std::polar(1.0, m * points[i].phi);
            for (int l = m; l <= degree; ++l) acc[idx(l, m)] += table[idx(l, m)] * phase;
        }
    }
    const double y00_integral = std::sqrt(4.0 * std::numbers::pi);
    for (int l = 0; l <= degree; ++l) {
        for (int m = 0; m <= l; ++m) {
            const double expected = (l == 0 && m == 0) ? y00_integral : 0.0;
            if (std::abs(acc[idx(l, m)] - expected) > tol) return false;
        }
    }
    return true;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
    if (n < 1) throw std::domain_error("gauss_legendre: need at least one node");
    std::vector<double> nodes(n), weights(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Tricomi initial guess, then Newton on P_n
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) nodes[n / 2] = 0.0;
    return {nodes, weights};
}

SphereGrid build_grid(HalfInteger j, double oversample) {
    if (j.twice() < 0) throw std::domain_error("build_grid: j must be >= 0");
    if (oversample < 1.0) throw std::domain_error("build_grid: oversample must be >= 1");
    const int n_theta = std::max(1, static_cast<int>(std::ceil(oversample * (j.twice() + 1))));
    const int n_phi = std::max(1, static_cast<int>(std::ceil(oversample * (2 * j.twice() + 1))));

    const auto [nodes, gl_weights] = gauss_legendre(n_theta);
    const double dphi = kTwoPi / n_phi;

    SphereGrid grid;
    grid.points.reserve(static_cast<std::size_t>(n_theta) * n_phi);
    grid.weights.reserve(static_cast<std::size_t>(n_theta) * n_phi);
    for (int it = 0; it < n_theta; ++it) {
        const double theta = std::acos(std::clamp(nodes[it], -1.0, 1.0));
        const double w = gl_weights[it] * dphi;
        for (int ip = 0; ip < n_phi; ++ip) {
            grid.points.push_back(SpherePoint{theta, ip * dphi});
            grid.weights.push_back(w);
        }
    }
    return grid;
}

} // namespace spintomo
