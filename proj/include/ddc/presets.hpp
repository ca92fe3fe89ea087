#pragma once

#include "ddc/descriptor.hpp"
#include "ddc/trajectory.hpp"

namespace ddc {

/// Reference benchmark: a 4-state descriptor plant with singular E, one input
/// and four outputs, slow/fast dimensions q = r = 2 and nilpotency index 2.
/// Used by the `paper-example` CLI preset and the test suites.
inline DescriptorSystem benchmark_system() {
    DescriptorSystem sys;
    sys.E = Matrix{{0, 0, 1, 0}, {1, 2, 0, 2}, {2, 3, 1, 3}, {1, 2, 0, 2}};
    sys.A = Matrix{{1, 1, 0, 2}, {0, 2, 1, 1}, {1, 4, 2, 3}, {-1, 1, 1, 0}};
    sys.B = Matrix{{-1}, {2}, {2}, {3}};
    sys.C = Matrix{{1, 2, 1, 2}, {0, 1, 0, 1}, {1, 2, 1, 1}, {2, 2, 1, 2}};
    sys.D = Matrix::Zero(4, 1);
    return sys;
}

/// Transformation pair for which the benchmark pencil is already in
/// quasi-Weierstrass block form (reference values for validation).
inline void benchmark_transformation(Matrix& P, Matrix& S) {
    P = Matrix{{0, -1, 0, 1}, {-1, 0, 1, 1}, {1, 0, 0, -1}, {1, 1, -1, -1}};
    S = Matrix{{0, -1, 1, 0}, {1, 2, -1, 0}, {-1, -1, 1, 0}, {0, 1, 0, -1}};
}

/// Two setpoints the benchmark loop is steered through.
inline Vector benchmark_setpoint_1() { return Vector{{20.0, 0.0, 0.0, 20.0}}; }
inline Vector benchmark_setpoint_2() { return Vector{{-10.0, 0.0, 0.0, -10.0}}; }

}  // namespace ddc
