#pragma once

#include <Eigen/Dense>

#include "ddc/errors.hpp"
#include "ddc/linalg.hpp"
#include "ddc/trajectory.hpp"

namespace ddc {

/// Block Hankel matrix of depth L: column j stacks the samples at times
/// j .. j+L-1.
inline Matrix hankel(const Matrix& samples, int depth) {
    const int k = static_cast<int>(samples.rows());
    const int len = static_cast<int>(samples.cols());
    if (depth < 1 || depth > len) throw input_error("hankel: depth out of range");
    const int cols = len - depth + 1;
    Matrix H(k * depth, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < depth; ++i) H.block(i * k, j, k, 1) = samples.col(j + i);
    return H;
}

/// Flat variant taking an already vectorized signal of block size k.
inline Matrix hankel(const Vector& fvec, int block_size, int depth) {
    return hankel(unstack(fvec, block_size), depth);
}

/// Minimal persistency-of-excitation order of the data input needed to span
/// all length-L windows of the manifest behavior: L + q + s - 1.
inline int required_pe_order(int horizon, int q, int s) {
    if (horizon < 1 || q < 0 || s < 1) throw input_error("required_pe_order: bad arguments");
    return horizon + q + s - 1;
}

/// Conservative variant when (q, s) are unknown: the state dimension n bounds
/// q + s - 1 from above.
inline int required_pe_order_unknown_structure(int horizon, int n) {
    if (horizon < 1 || n < 0) throw input_error("required_pe_order: bad arguments");
    return horizon + n;
}

/// Block Hankel pair built from one recorded data trajectory, truncated at
/// time T-s. With s = 1 this is the classical full-data representation.
class HankelRepresentation {
public:
    HankelRepresentation(const Trajectory& data, int depth, int truncation = 1)
        : depth_(depth), truncation_(truncation) {
        data.validate();
        if (truncation < 1) throw input_error("hankel representation: truncation index < 1");
        const int T = data.length();
        if (T - truncation - depth + 2 < 1)
            throw input_error("hankel representation: insufficient data for depth/truncation");
        m_ = static_cast<int>(data.u.rows());
        p_ = static_cast<int>(data.y.rows());
        data_length_ = T;
        const int used = T - truncation + 1;  // samples on [0, T-s]
        Hu_ = hankel(data.u.leftCols(used), depth);
        Hy_ = hankel(data.y.leftCols(used), depth);
    }

    int depth() const { return depth_; }
    int truncation() const { return truncation_; }
    int cols() const { return static_cast<int>(Hu_.cols()); }
    int m() const { return m_; }
    int p() const { return p_; }
    int data_length() const { return data_length_; }
    const Matrix& Hu() const { return Hu_; }
    const Matrix& Hy() const { return Hy_; }

    /// Stacked [Hu; Hy].
    Matrix stacked() const {
        Matrix S(Hu_.rows() + Hy_.rows(), cols());
        S << Hu_, Hy_;
        return S;
    }

private:
    int depth_, truncation_, m_ = 0, p_ = 0, data_length_ = 0;
    Matrix Hu_, Hy_;
};

struct MembershipResult {
    bool member = false;
    Vector alpha;
    double residual = 0.0;
};

/// Trajectory membership: the candidate lies in the length-L manifest behavior
/// iff [Hu; Hy] alpha reproduces its vectorization. Solved as minimum-norm
/// least squares so alpha is deterministic.
inline MembershipResult membership(const HankelRepresentation& rep,
                                   const Trajectory& candidate, double tol = 1e-7) {
    candidate.validate();
    if (candidate.length() != rep.depth())
        throw input_error("membership: candidate length != representation depth");
    if (candidate.u.rows() != rep.m() || candidate.y.rows() != rep.p())
        throw input_error("membership: candidate dimensions mismatch");

    Vector rhs(rep.depth() * (rep.m() + rep.p()));
    rhs << vectorize(candidate.u), vectorize(candidate.y);
    Matrix H = rep.stacked();

    MembershipResult res;
    res.alpha = min_norm_lstsq(H, rhs);
    res.residual = (H * res.alpha - rhs).norm();
    res.member = res.residual <= tol * (1.0 + rhs.norm());
    return res;
}

/// Reads the Hankel span right-to-left: any coefficient vector yields a
/// manifest trajectory under the persistency-of-excitation hypotheses.
inline Trajectory synthesize(const HankelRepresentation& rep, const Vector& alpha) {
    if (alpha.size() != rep.cols())
        throw input_error("synthesize: alpha length != column count");
    Trajectory traj;
    traj.t0 = 0;
    traj.u = unstack(rep.Hu() * alpha, rep.m());
    traj.y = unstack(rep.Hy() * alpha, rep.p());
    return traj;
}

}  // namespace ddc
