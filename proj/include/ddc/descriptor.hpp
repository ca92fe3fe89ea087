#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "ddc/errors.hpp"
#include "ddc/trajectory.hpp"

namespace ddc {

/// Discrete-time linear descriptor system
///   E x(t+1) = A x(t) + B u(t),  y(t) = C x(t) + D u(t),
/// where E may be singular.
struct DescriptorSystem {
    Matrix E, A, B, C, D;

    int n() const { return static_cast<int>(E.rows()); }
    int m() const { return static_cast<int>(B.cols()); }
    int p() const { return static_cast<int>(C.rows()); }

    void validate() const {
        const auto N = E.rows();
        if (N < 1) throw input_error("descriptor system: empty E");
        if (E.cols() != N || A.rows() != N || A.cols() != N)
            throw input_error("descriptor system: E/A must be square of equal size");
        if (B.rows() != N) throw input_error("descriptor system: B row count != n");
        if (C.cols() != N) throw input_error("descriptor system: C column count != n");
        if (D.rows() != C.rows() || D.cols() != B.cols())
            throw input_error("descriptor system: D must be p x m");
        if (B.cols() < 1 || C.rows() < 1)
            throw input_error("descriptor system: m and p must be positive");
    }

    /// Max norm of the residual of the system equations over a full trajectory.
    double dynamics_residual(const Trajectory& traj) const {
        if (!traj.x) throw input_error("dynamics_residual: trajectory has no states");
        const Matrix& x = *traj.x;
        double res = 0.0;
        for (int k = 0; k + 1 < traj.length(); ++k)
            res = std::max(res, (E * x.col(k + 1) - A * x.col(k) - B * traj.u.col(k)).norm());
        for (int k = 0; k < traj.length(); ++k)
            res = std::max(res, (traj.y.col(k) - C * x.col(k) - D * traj.u.col(k)).norm());
        return res;
    }
};

/// Regularity of the pencil (E, A): det(lambda*E - A) is a polynomial of degree
/// at most n, so it vanishes identically iff it vanishes at n+1 distinct points.
/// Probes lambda = 0..n, falling back to random points if every deterministic
/// probe is borderline.
inline bool check_regularity(const DescriptorSystem& sys, double tol = 1e-9) {
    sys.validate();
    const int n = sys.n();
    const double scale_base = std::max({1.0, sys.E.norm(), sys.A.norm()});
    const double scale = std::pow(scale_base, n);

    auto probe = [&](double lambda) {
        return std::abs((lambda * sys.E - sys.A).determinant());
    };
    for (int i = 0; i <= n; ++i)
        if (probe(static_cast<double>(i)) > tol * scale) return true;

    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    for (int i = 0; i <= n; ++i)
        if (probe(dist(rng)) > tol * scale) return true;
    return false;
}

}  // namespace ddc
