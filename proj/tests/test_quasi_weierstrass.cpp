#include <doctest.h>

#include "test_support.hpp"

using namespace ddc;

TEST_CASE("benchmark invariants q = r = s = 2") {
    auto qw = quasi_weierstrass(benchmark_system());
    CHECK(qw.q == 2);
    CHECK(qw.r == 2);
    CHECK(qw.s == 2);
}

TEST_CASE("published transformation pair block-diagonalizes the benchmark pencil") {
    auto sys = benchmark_system();
    Matrix P, S;
    benchmark_transformation(P, S);
    Matrix sep = S * sys.E * P;
    Matrix sap = S * sys.A * P;
    CHECK(sep.bottomLeftCorner(2, 2).norm() == doctest::Approx(0.0));
    CHECK(sep.topRightCorner(2, 2).norm() == doctest::Approx(0.0));
    CHECK(sap.bottomLeftCorner(2, 2).norm() == doctest::Approx(0.0));
    CHECK(sap.topRightCorner(2, 2).norm() == doctest::Approx(0.0));
    CHECK((sep.topLeftCorner(2, 2) - Matrix::Identity(2, 2)).norm() == doctest::Approx(0.0));
    CHECK((sap.bottomRightCorner(2, 2) - Matrix::Identity(2, 2)).norm() == doctest::Approx(0.0));
    // Fast block nilpotent of index 2.
    Matrix N = sep.bottomRightCorner(2, 2);
    CHECK(N.norm() > 0.0);
    CHECK((N * N).norm() == doctest::Approx(0.0));
}

TEST_CASE("invertible E gives the explicit LTI case") {
    std::mt19937_64 rng(3);
    const int n = 4;
    DescriptorSystem sys;
    sys.E = Matrix::Identity(n, n);
    sys.A = testing::random_matrix(rng, n, n);
    sys.B = testing::random_matrix(rng, n, 2);
    sys.C = testing::random_matrix(rng, 2, n);
    sys.D = Matrix::Zero(2, 2);
    auto qw = quasi_weierstrass(sys);
    CHECK(qw.q == n);
    CHECK(qw.r == 0);
    CHECK(qw.s == 1);
    CHECK(qw.reconstruction_error(sys.E, sys.A) < 1e-12);
}

TEST_CASE("reconstruction residual on random regular systems") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 100; ++i) {
        auto rs = testing::random_regular_system(rng);
        auto qw = quasi_weierstrass(rs.sys);
        CHECK(qw.q == rs.q);
        CHECK(qw.r == rs.r);
        CHECK(qw.s == rs.s);
        CHECK(qw.reconstruction_error(rs.sys.E, rs.sys.A) <=
              1e-10 * (1.0 + rs.sys.E.norm() + rs.sys.A.norm()));
    }
}

TEST_CASE("indices are invariant under coordinate changes") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 20; ++i) {
        auto rs = testing::random_regular_system(rng);
        auto qw = quasi_weierstrass(rs.sys);
        DescriptorSystem transformed = rs.sys;
        Matrix T1 = testing::random_orthogonal(rng, rs.sys.n());
        Matrix T2 = testing::random_orthogonal(rng, rs.sys.n());
        transformed.E = T1 * rs.sys.E * T2;
        transformed.A = T1 * rs.sys.A * T2;
        transformed.B = T1 * rs.sys.B;
        transformed.C = rs.sys.C * T2;
        auto qw2 = quasi_weierstrass(transformed);
        CHECK(qw2.q == qw.q);
        CHECK(qw2.r == qw.r);
        CHECK(qw2.s == qw.s);
    }
}

TEST_CASE("non-regular pencil rejected") {
    DescriptorSystem sys;
    sys.E = Matrix::Zero(2, 2);
    sys.A = Matrix{{1, 0}, {0, 0}};
    sys.B = Matrix{{1}, {1}};
    sys.C = Matrix{{1, 0}};
    sys.D = Matrix::Zero(1, 1);
    CHECK_THROWS_AS(quasi_weierstrass(sys), domain_error);
}

TEST_CASE("rank tests on the benchmark system") {
    auto qw = quasi_weierstrass(benchmark_system());
    CHECK(r_controllable(qw));
    CHECK(r_observable(qw));
    CHECK(observability_index(qw) <= 2);
}

TEST_CASE("controllability edge cases") {
    QuasiWeierstrass qw;
    qw.q = 1;
    qw.r = 0;
    qw.s = 1;
    qw.A1 = Matrix::Zero(1, 1);
    qw.B1 = Matrix::Zero(1, 1);
    qw.B2 = Matrix(0, 1);
    qw.C1 = Matrix::Ones(1, 1);
    qw.C2 = Matrix(1, 0);
    qw.N = Matrix(0, 0);
    qw.D = Matrix::Zero(1, 1);
    CHECK_FALSE(r_controllable(qw));

    qw.q = 2;
    qw.A1 = Matrix{{0, 1}, {0, 0}};
    qw.B1 = Matrix{{0}, {1}};
    qw.C1 = Matrix{{1, 0}};
    qw.B2 = Matrix(0, 1);
    qw.C2 = Matrix(1, 0);
    CHECK(r_controllable(qw));
    CHECK(r_observable(qw));
    CHECK(observability_index(qw) == 2);

    qw.C1 = Matrix::Zero(1, 2);
    CHECK_FALSE(r_observable(qw));
    CHECK_THROWS_AS(observability_index(qw), domain_error);
}

TEST_CASE("observability index is 1 for invertible square C1") {
    QuasiWeierstrass qw;
    qw.q = 3;
    qw.r = 0;
    qw.s = 1;
    qw.A1 = Matrix::Identity(3, 3);
    qw.B1 = Matrix::Ones(3, 1);
    qw.B2 = Matrix(0, 1);
    qw.C1 = Matrix::Identity(3, 3);
    qw.C2 = Matrix(3, 0);
    qw.N = Matrix(0, 0);
    qw.D = Matrix::Zero(3, 1);
    CHECK(observability_index(qw) == 1);
}

TEST_CASE("consistent initial values") {
    auto sys = benchmark_system();
    auto qw = quasi_weierstrass(sys);

    SUBCASE("origin is always consistent") {
        CHECK(is_consistent_initial(qw, Vector::Zero(4)));
    }

    SUBCASE("values generated by the explicit solution are consistent") {
        std::mt19937_64 rng(5);
        for (int i = 0; i < 20; ++i) {
            auto traj = simulate(qw, testing::random_matrix(rng, qw.q, 1),
                                 testing::random_matrix(rng, 1, 6));
            Vector x0 = sys.E * traj.x->col(0);
            CHECK(is_consistent_initial(qw, x0));
        }
    }

    SUBCASE("fast part outside the admissible image is rejected") {
        // Hand-built decomposition with N B2 = 0, so the image is {0}.
        QuasiWeierstrass hand;
        hand.q = 0;
        hand.r = 2;
        hand.s = 2;
        hand.P = Matrix::Identity(2, 2);
        hand.S = Matrix::Identity(2, 2);
        hand.A1 = Matrix(0, 0);
        hand.B1 = Matrix(0, 1);
        hand.B2 = Matrix{{1}, {0}};
        hand.C1 = Matrix(1, 0);
        hand.C2 = Matrix{{1, 1}};
        hand.N = Matrix{{0, 1}, {0, 0}};
        hand.D = Matrix::Zero(1, 1);
        CHECK((hand.N * hand.B2).norm() == 0.0);
        CHECK_FALSE(is_consistent_initial(hand, Vector{{0.0, 1.0}}));
        CHECK(is_consistent_initial(hand, Vector::Zero(2)));
    }

    SUBCASE("membership matches a brute-force column-space rank test") {
        std::mt19937_64 rng(29);
        for (int i = 0; i < 40; ++i) {
            testing::RandomSystemOptions opt;
            opt.n_max = 5;
            auto rs = testing::random_regular_system(rng, opt);
            if (rs.r > 3) continue;
            auto qw2 = quasi_weierstrass(rs.sys);
            Matrix img(qw2.r, std::max(0, (qw2.s - 1)) * qw2.m());
            Matrix power = qw2.N;
            for (int k = 0; k < qw2.s - 1; ++k) {
                img.middleCols(k * qw2.m(), qw2.m()) = power * qw2.B2;
                power = qw2.N * power;
            }
            Vector x0 = testing::random_matrix(rng, qw2.n(), 1);
            Vector v2 = (qw2.S * x0).tail(qw2.r);
            Matrix aug(qw2.r, img.cols() + 1);
            aug << img, v2;
            const bool brute = qw2.r == 0 || numerical_rank(aug) == numerical_rank(img);
            CHECK(is_consistent_initial(qw2, x0) == brute);
        }
    }
}
