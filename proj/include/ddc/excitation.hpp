#pragma once

#include <Eigen/Dense>
#include <random>

#include "ddc/errors.hpp"
#include "ddc/hankel.hpp"
#include "ddc/linalg.hpp"

namespace ddc {

/// Outcome of a persistency-of-excitation rank test.
struct PEReport {
    int order = 0;
    int required_rank = 0;
    int achieved_rank = 0;
    double smallest_retained_sv = 0.0;
    bool length_ok = false;  // necessary condition (m+1)L - 1 <= T
    bool verdict = false;
};

/// Persistency of excitation of order L: rank(H_L(u)) = mL. Fails fast when
/// the necessary length condition (m+1)L - 1 <= T is violated.
inline PEReport is_persistently_exciting(const Matrix& u, int order,
                                         double tol = kDefaultRankTol) {
    const int m = static_cast<int>(u.rows());
    const int T = static_cast<int>(u.cols());
    if (order < 1) throw input_error("is_persistently_exciting: order < 1");

    PEReport report;
    report.order = order;
    report.required_rank = m * order;
    report.length_ok = (m + 1) * order - 1 <= T;
    if (!report.length_ok || order > T) return report;

    Matrix H = hankel(u, order);
    Eigen::JacobiSVD<Matrix> svd(H);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(0) > 0.0 && sv(i) > tol * sv(0)) ++rank;
    report.achieved_rank = rank;
    if (rank > 0) report.smallest_retained_sv = sv(rank - 1);
    report.verdict = rank == report.required_rank;
    return report;
}

/// Seeded i.i.d. uniform input, redrawn until persistently exciting of the
/// requested order. Deterministic given the seed; bounded retries.
inline Matrix generate_pe_input(int length, int m, int order, double lo, double hi,
                                std::uint64_t seed, int max_retries = 100) {
    if (length < 1 || m < 1 || order < 1)
        throw input_error("generate_pe_input: bad dimensions");
    if ((m + 1) * order - 1 > length)
        throw input_error("generate_pe_input: length violates (m+1)L-1 <= T");
    if (lo > hi) throw input_error("generate_pe_input: empty bounds interval");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        Matrix u(m, length);
        for (int t = 0; t < length; ++t)
            for (int i = 0; i < m; ++i) u(i, t) = dist(rng);
        if (is_persistently_exciting(u, order).verdict) return u;
    }
    throw numerical_error("generate_pe_input: retries exhausted without a PE signal");
}

}  // namespace ddc
