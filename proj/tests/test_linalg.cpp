#include <doctest.h>

#include <cmath>

#include "clt/linalg.hpp"
#include "support.hpp"

using clt::Matrix;
using clt::Vector;
using namespace clt::linalg;
using test_support::random_hurwitz;
using test_support::random_matrix;
using test_support::random_psd;

TEST_CASE("is_hurwitz on canonical cases") {
    CHECK(is_hurwitz(-Matrix::Identity(2, 2)));
    CHECK_FALSE(is_hurwitz(Matrix::Identity(2, 2)));

    Matrix rotation(2, 2);  // eigenvalues +-i, zero real part
    rotation << 0, 1, -1, 0;
    CHECK_FALSE(is_hurwitz(rotation));

    CHECK_THROWS_AS(is_hurwitz(Matrix::Zero(2, 3)), clt::DimensionError);
}

TEST_CASE("is_hurwitz rejects marginally stable matrices") {
    Matrix a(1, 1);
    a << -1e-12;  // inside the tolerance band
    CHECK_FALSE(is_hurwitz(a));
    a << -1e-6;
    CHECK(is_hurwitz(a));
}

TEST_CASE("solve_lyapunov closed-form cases") {
    const Matrix sigma = solve_lyapunov(-Matrix::Identity(2, 2), 2.0 * Matrix::Identity(2, 2));
    CHECK(hs_norm(sigma - Matrix::Identity(2, 2)) < 1e-12);

    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = -1.0;
    a(1, 1) = -2.0;
    const Matrix s2 = solve_lyapunov(a, Matrix::Identity(2, 2));
    CHECK(s2(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s2(1, 1) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(std::abs(s2(0, 1)) < 1e-14);
}

TEST_CASE("solve_lyapunov residual on random Hurwitz systems") {
    clt::Rng rng(5056);
    for (int rep = 0; rep < 20; ++rep) {
        const int d = 2 + static_cast<int>(rng.next_index(5));
        const Matrix a = random_hurwitz(rng, d);
        const Matrix q = random_psd(rng, d);
        const Matrix sigma = solve_lyapunov(a, q);

        CHECK(asymmetry(sigma) < 1e-12 * (1.0 + hs_norm(sigma)));
        const double residual = hs_norm(sigma * a.transpose() + a * sigma + q);
        CHECK(residual <= 1e-10 * (1.0 + hs_norm(q)));
        CHECK(min_symmetric_eigenvalue(sigma) > -1e-12 * (1.0 + hs_norm(sigma)));
    }
}

TEST_CASE("solve_lyapunov error paths") {
    CHECK_THROWS_AS(solve_lyapunov(Matrix::Identity(2, 2), Matrix::Identity(2, 2)),
                    clt::StabilityError);
    CHECK_THROWS_AS(solve_lyapunov(-Matrix::Identity(2, 2), Matrix::Identity(3, 3)),
                    clt::DimensionError);
}

TEST_CASE("sqrt_psd diagonal and identity") {
    CHECK(hs_norm(sqrt_psd(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)) < 1e-14);

    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 4.0;
    m(1, 1) = 9.0;
    const Matrix s = sqrt_psd(m);
    CHECK(s(0, 0) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(s(1, 1) == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("sqrt_psd eigendecomposition oracle") {
    Matrix m(2, 2);
    m << 2, 1, 1, 2;  // eigenvalues 1 and 3
    const Matrix s = sqrt_psd(m);
    // Oracle: assemble from the known eigensystem directly.
    const double sq3 = std::sqrt(3.0);
    Matrix expected(2, 2);
    expected << (sq3 + 1) / 2, (sq3 - 1) / 2, (sq3 - 1) / 2, (sq3 + 1) / 2;
    CHECK(hs_norm(s - expected) < 1e-12);
    CHECK(hs_norm(s * s - m) <= 1e-10 * (1.0 + hs_norm(m)));
}

TEST_CASE("sqrt_psd reconstructs random PSD matrices") {
    clt::Rng rng(7);
    for (int rep = 0; rep < 25; ++rep) {
        const int d = 1 + static_cast<int>(rng.next_index(8));
        const Matrix m = random_psd(rng, d, 2.0);
        const Matrix s = sqrt_psd(m);
        CHECK(asymmetry(s) < 1e-11 * (1.0 + hs_norm(s)));
        CHECK(hs_norm(s * s - m) <= 1e-10 * (1.0 + hs_norm(m)));
    }
}

TEST_CASE("sqrt_psd clips tiny negative eigenvalues and rejects real ones") {
    Matrix almost = Matrix::Zero(2, 2);
    almost(0, 0) = 1.0;
    almost(1, 1) = -1e-13;  // within the relative clip band
    const Matrix s = sqrt_psd(almost);
    CHECK(s(0, 0) == doctest::Approx(1.0));
    CHECK(s(1, 1) == 0.0);

    Matrix negative = -Matrix::Identity(2, 2);
    CHECK_THROWS_AS(sqrt_psd(negative), clt::NotPsdError);
}

TEST_CASE("operator_norm basics") {
    CHECK(operator_norm(Matrix::Identity(4, 4)) == doctest::Approx(1.0).epsilon(1e-12));

    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    CHECK(operator_norm(d) == doctest::Approx(3.0).epsilon(1e-12));

    Matrix nilpotent = Matrix::Zero(2, 2);
    nilpotent(0, 1) = 2.0;
    CHECK(operator_norm(nilpotent) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("hs_norm basics") {
    CHECK(hs_norm(Matrix::Identity(2, 2)) == doctest::Approx(std::sqrt(2.0)));
    CHECK(hs_norm(Matrix::Zero(3, 3)) == 0.0);
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 3.0;
    m(0, 1) = 4.0;
    CHECK(hs_norm(m) == doctest::Approx(5.0));
}

TEST_CASE("norm inequalities on random matrices") {
    clt::Rng rng(11);
    for (int rep = 0; rep < 30; ++rep) {
        const int d = 1 + static_cast<int>(rng.next_index(6));
        const Matrix m = random_matrix(rng, d, d, 3.0);
        const double op = operator_norm(m);
        const double hs = hs_norm(m);
        CHECK(op <= hs * (1.0 + 1e-12));
        CHECK(hs <= std::sqrt(static_cast<double>(d)) * op * (1.0 + 1e-12));
    }
}

TEST_CASE("is_hurwitz agrees with Lyapunov solvability") {
    clt::Rng rng(13);
    for (int rep = 0; rep < 20; ++rep) {
        const int d = 1 + static_cast<int>(rng.next_index(6));
        const Matrix a = rep % 2 == 0 ? random_hurwitz(rng, d) : random_matrix(rng, d, d);
        if (is_hurwitz(a)) {
            const Matrix sigma = solve_lyapunov(a, Matrix::Identity(d, d));
            CHECK(min_symmetric_eigenvalue(sigma) > 0.0);
        } else {
            CHECK_THROWS_AS(solve_lyapunov(a, Matrix::Identity(d, d)), clt::StabilityError);
        }
    }
}
