#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "ddc/errors.hpp"

namespace ddc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A time-indexed sequence of fixed-size vectors, stored as matrix columns
/// (column t-t0 holds the sample at time t).
struct Signal {
    int t0 = 0;
    Matrix samples;  // dim x length

    int length() const { return static_cast<int>(samples.cols()); }
    int dim() const { return static_cast<int>(samples.rows()); }
    int t1() const { return t0 + length() - 1; }

    Vector at(int t) const { return samples.col(t - t0); }
};

/// Input/output (and optionally state) sequences over one integer interval.
struct Trajectory {
    int t0 = 0;
    Matrix u;                 // m x length
    Matrix y;                 // p x length
    std::optional<Matrix> x;  // n x length, present for full-behavior trajectories

    int length() const { return static_cast<int>(u.cols()); }
    int t1() const { return t0 + length() - 1; }

    void validate() const {
        if (u.cols() < 1) throw input_error("trajectory: empty interval");
        if (y.cols() != u.cols()) throw input_error("trajectory: u/y length mismatch");
        if (x && x->cols() != u.cols()) throw input_error("trajectory: x length mismatch");
    }

    /// Sub-trajectory on [a, b] (absolute times), states dropped.
    Trajectory manifest_window(int a, int b) const {
        if (a < t0 || b > t1() || a > b) throw input_error("trajectory: window out of range");
        Trajectory w;
        w.t0 = a;
        w.u = u.middleCols(a - t0, b - a + 1);
        w.y = y.middleCols(a - t0, b - a + 1);
        return w;
    }
};

/// Stacks the columns of a sequence into one long vector, time order.
inline Vector vectorize(const Matrix& samples) {
    if (samples.cols() < 1) throw input_error("vectorize: empty sequence");
    return Eigen::Map<const Vector>(samples.data(), samples.size());
}

/// Inverse of vectorize for a known block size.
inline Matrix unstack(const Vector& v, int block_size) {
    if (block_size < 1 || v.size() % block_size != 0)
        throw input_error("unstack: length not a multiple of block size");
    return Eigen::Map<const Matrix>(v.data(), block_size, v.size() / block_size);
}

}  // namespace ddc
