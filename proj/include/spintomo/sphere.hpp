#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "spintomo/half_integer.hpp"

namespace spintomo {

// Point on the unit sphere, theta in [0, pi], phi in [0, 2*pi).
struct SpherePoint {
    double theta = 0.0;
    double phi = 0.0;

    Eigen::Vector3d unit() const;
    double dot(const SpherePoint& other) const;

    // Antipodal point -n, i.e. (pi - theta, phi + pi mod 2*pi).
    SpherePoint antipode() const;

    // Maps arbitrary raw angles to the unique point with canonical ranges.
    static SpherePoint canonical(double theta_raw, double phi_raw);
    static SpherePoint from_unit(const Eigen::Vector3d& v);
};

// Quadrature rule on the sphere: sum_i w_i f(n_i) approximates the integral
// of f over S^2 (weights in steradians, summing to 4*pi).
struct SphereGrid {
    std::vector<SpherePoint> points;
    std::vector<double> weights;

    std::size_t size() const { return points.size(); }
    double weight_sum() const;

    // True when the rule integrates every spherical harmonic with l <= degree
    // exactly (to tol). Used to validate externally supplied grids.
    bool exact_to_degree(int degree, double tol = 1e-8) const;
};

// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

// Product quadrature exact through spherical-harmonic degree 4j at
// oversample = 1: ceil(oversample*(2j+1)) Gauss-Legendre nodes in cos(theta)
// times ceil(oversample*(4j+1)) equispaced phi.
SphereGrid build_grid(HalfInteger j, double oversample = 1.0);

} // namespace spintomo
