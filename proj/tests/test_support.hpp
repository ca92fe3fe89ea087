#pragma once

#include <random>

#include "ddc/ddc.hpp"

namespace ddc::testing {

inline Matrix random_matrix(std::mt19937_64& rng, int rows, int cols,
                            double scale = 1.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    Matrix M(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) M(i, j) = dist(rng);
    return M;
}

/// Random orthogonal matrix (QR of a Gaussian draw), kept well conditioned by
/// construction.
inline Matrix random_orthogonal(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Matrix G(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G(i, j) = dist(rng);
    Eigen::HouseholderQR<Matrix> qr(G);
    return qr.householderQ() * Matrix::Identity(n, n);
}

struct RandomSystemOptions {
    int n_max = 6;
    bool require_observable = false;
    bool require_controllable = false;
    bool force_singular_E = true;  // r >= 1 where possible
    double slow_spectral_scale = 0.9;
};

/// Random regular descriptor system with known invariants, built from a
/// quasi-Weierstrass skeleton conjugated by random orthogonal transforms.
struct RandomSystem {
    DescriptorSystem sys;
    int q = 0, r = 0, s = 1;
};

inline RandomSystem random_regular_system(std::mt19937_64& rng,
                                          const RandomSystemOptions& opt = {}) {
    std::uniform_int_distribution<int> ndist(2, opt.n_max);
    for (int attempt = 0; attempt < 200; ++attempt) {
        const int n = ndist(rng);
        std::uniform_int_distribution<int> qdist(opt.force_singular_E ? 1 : 0, n - 1);
        int q = opt.force_singular_E ? qdist(rng) : std::uniform_int_distribution<int>(1, n)(rng);
        int r = n - q;
        int s = 1;
        if (r > 0) s = std::uniform_int_distribution<int>(1, r)(rng);

        Matrix A1 = random_matrix(rng, q, q);
        if (q > 0) {
            Eigen::EigenSolver<Matrix> es(A1);
            const double rho = es.eigenvalues().cwiseAbs().maxCoeff();
            if (rho > 0.0) A1 *= opt.slow_spectral_scale / rho;
        }
        // Nilpotent block of index exactly s: superdiagonal ones in the first
        // s rows, zero elsewhere.
        Matrix N = Matrix::Zero(r, r);
        for (int i = 0; i + 1 < s; ++i) N(i, i + 1) = 1.0;

        const int m = std::uniform_int_distribution<int>(1, 2)(rng);
        const int p = std::uniform_int_distribution<int>(1, 3)(rng);
        Matrix B1 = random_matrix(rng, q, m);
        Matrix B2 = random_matrix(rng, r, m);
        Matrix C1 = random_matrix(rng, p, q);
        Matrix C2 = random_matrix(rng, p, r);
        Matrix D = random_matrix(rng, p, m);

        Matrix blkE = Matrix::Zero(n, n);
        blkE.topLeftCorner(q, q).setIdentity();
        blkE.bottomRightCorner(r, r) = N;
        Matrix blkA = Matrix::Zero(n, n);
        blkA.topLeftCorner(q, q) = A1;
        blkA.bottomRightCorner(r, r).setIdentity();

        Matrix Pinv = random_orthogonal(rng, n);
        Matrix Sinv = random_orthogonal(rng, n);

        Matrix Bfull(n, m);
        Bfull << B1, B2;
        Matrix Cfull(p, n);
        Cfull << C1, C2;

        RandomSystem out;
        out.sys.E = Sinv * blkE * Pinv;
        out.sys.A = Sinv * blkA * Pinv;
        out.sys.B = Sinv * Bfull;
        out.sys.C = Cfull * Pinv;
        out.sys.D = D;
        out.q = q;
        out.r = r;
        out.s = s;

        if (opt.require_observable || opt.require_controllable) {
            auto qw = quasi_weierstrass(out.sys);
            if (opt.require_observable && !r_observable(qw)) continue;
            if (opt.require_controllable && !r_controllable(qw)) continue;
        }
        return out;
    }
    throw std::runtime_error("random_regular_system: no admissible draw");
}

/// Data trajectory for the given decomposition: PE input of the requested
/// order, simulated from the origin of the slow subsystem.
inline Trajectory collect_pe_data(const QuasiWeierstrass& qw, int length, int order,
                                  std::uint64_t seed) {
    Matrix u = generate_pe_input(length, qw.m(), order, -1.0, 1.0, seed);
    std::mt19937_64 rng(seed ^ 0xabcdef);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix u_ext(qw.m(), length + qw.s - 1);
    u_ext.leftCols(length) = u;
    for (int t = length; t < u_ext.cols(); ++t)
        for (int i = 0; i < qw.m(); ++i) u_ext(i, t) = dist(rng);
    auto traj = simulate(qw, Vector::Zero(qw.q), u_ext);
    traj.x.reset();
    return traj;
}

/// Fresh manifest window of the given length from a random initial slow state
/// and random inputs.
inline Trajectory random_manifest_window(const QuasiWeierstrass& qw, int length,
                                         std::mt19937_64& rng, double scale = 1.0) {
    Matrix u = random_matrix(rng, qw.m(), length + qw.s - 1, scale);
    Vector z1_0 = random_matrix(rng, qw.q, 1, scale);
    auto traj = simulate(qw, z1_0, u);
    traj.x.reset();
    return traj;
}

}  // namespace ddc::testing
