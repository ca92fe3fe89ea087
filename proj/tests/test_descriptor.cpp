#include <doctest.h>

#include "test_support.hpp"

using namespace ddc;

TEST_CASE("regularity of the benchmark pencil") {
    CHECK(check_regularity(benchmark_system()));
}

TEST_CASE("identity E is always regular") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 10; ++i) {
        DescriptorSystem sys;
        const int n = 2 + static_cast<int>(rng() % 4);
        sys.E = Matrix::Identity(n, n);
        sys.A = testing::random_matrix(rng, n, n);
        sys.B = testing::random_matrix(rng, n, 1);
        sys.C = testing::random_matrix(rng, 1, n);
        sys.D = Matrix::Zero(1, 1);
        CHECK(check_regularity(sys));
    }
}

TEST_CASE("singular pencil detected") {
    // det(lambda*0 - A) = det(-A) = 0 for all lambda.
    DescriptorSystem sys;
    sys.E = Matrix::Zero(2, 2);
    sys.A = Matrix{{1, 0}, {0, 0}};
    sys.B = Matrix{{1}, {1}};
    sys.C = Matrix{{1, 0}};
    sys.D = Matrix::Zero(1, 1);
    CHECK_FALSE(check_regularity(sys));
}

TEST_CASE("dimension mismatch rejected") {
    DescriptorSystem sys = benchmark_system();
    sys.B = Matrix::Zero(3, 1);
    CHECK_THROWS_AS(check_regularity(sys), input_error);
}

TEST_CASE("dynamics residual flags a corrupted state sequence") {
    std::mt19937_64 rng(11);
    auto rs = testing::random_regular_system(rng);
    auto qw = quasi_weierstrass(rs.sys);
    auto traj = simulate(qw, Vector::Zero(qw.q),
                         testing::random_matrix(rng, qw.m(), 12 + qw.s - 1));
    CHECK(rs.sys.dynamics_residual(traj) < 1e-10);
    (*traj.x)(0, 3) += 1.0;
    CHECK(rs.sys.dynamics_residual(traj) > 1e-3);
}
