#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "sprec/error.hpp"
#include "sprec/linalg.hpp"
#include "test_util.hpp"

using namespace sprec;

TEST_CASE("gen_matrix is deterministic and validates its shape") {
  Stream a(42), b(42);
  const auto m1 = gen_matrix(4, 1, a);
  const auto m2 = gen_matrix(4, 1, b);
  CHECK(m1.rows() == 4);
  CHECK(m1.cols() == 1);
  CHECK(m1.entries() == m2.entries());

  Stream r(1);
  CHECK_THROWS_AS(gen_matrix(0, 5, r), ValidationError);
  CHECK_THROWS_AS(gen_matrix(5, 0, r), ValidationError);
  CHECK_THROWS_AS(gen_matrix(1000, 1000, r, 999'999), GuardExceeded);
}

TEST_CASE("gen_matrix entries have mean 0 and variance 1/m") {
  Stream rng(7);
  const auto a = gen_matrix(100, 100, rng);
  const double mean = a.entries().mean();
  // sigma = 1/sqrt(100) = 0.1, 3 sigma / sqrt(mn) = 0.003.
  CHECK(std::abs(mean) < 0.003);
  const double var = (a.entries().array() - mean).square().sum() / 1e4;
  CHECK(var == doctest::Approx(0.01).epsilon(0.2));
  CHECK(a.entries().allFinite());
}

TEST_CASE("projection_energy edge cases") {
  Stream rng(3);
  const auto a = gen_matrix(6, 9, rng);
  const Vector y = testutil::gaussian_vector(6, rng);
  const double y2 = y.squaredNorm();

  CHECK(projection_energy(a, Subset{}, as_span(y)) == 0.0);

  Subset all(9);
  std::iota(all.begin(), all.end(), Index{0});
  CHECK(projection_energy(a, all, as_span(y)) == doctest::Approx(y2).epsilon(1e-9));

  // y = a_3 lies in its own span.
  const Vector a3 = a.entries().col(3);
  CHECK(projection_energy(a, Subset{3}, as_span(a3)) ==
        doctest::Approx(a3.squaredNorm()).epsilon(1e-10));

  CHECK_THROWS_AS(projection_energy(a, Subset{1, 1}, as_span(y)), ValidationError);
  CHECK_THROWS_AS(projection_energy(a, Subset{9}, as_span(y)), ValidationError);
}

TEST_CASE("projection_energy matches a least-squares oracle") {
  Stream rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    const Index m = 1 + rng() % 12, n = 1 + rng() % 10;
    const auto a = gen_matrix(m, n, rng);
    const Vector y = testutil::gaussian_vector(m, rng);
    const Subset j = testutil::random_subset(n, 1 + rng() % n, rng);
    const double oracle = testutil::ls_energy(a.entries(), j, y);
    CHECK(projection_energy(a, j, as_span(y)) ==
          doctest::Approx(oracle).epsilon(1e-9).scale(y.squaredNorm()));
  }
}

TEST_CASE("projection_energy properties: bounds, monotonicity, permutation") {
  Stream rng(5);
  for (int rep = 0; rep < 300; ++rep) {
    const Index m = 1 + rng() % 15, n = 2 + rng() % 12;
    const auto a = gen_matrix(m, n, rng);
    const Vector y = testutil::gaussian_vector(m, rng);
    const double y2 = y.squaredNorm();

    Subset big = testutil::random_subset(n, 1 + rng() % n, rng);
    Subset small = big;
    std::shuffle(small.begin(), small.end(), rng);
    small.resize(rng() % (big.size() + 1));

    const double e_big = projection_energy(a, big, as_span(y));
    const double e_small = projection_energy(a, small, as_span(y));
    CHECK(e_small <= e_big + 1e-12 * std::max(1.0, y2));
    CHECK(e_big >= 0.0);
    CHECK(e_big <= y2 * (1 + 1e-12));

    Subset shuffled = big;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(projection_energy(a, shuffled, as_span(y)) == e_big);
  }
}

TEST_CASE("workspace basis is orthonormal and spans the pushed columns") {
  Stream rng(9);
  const auto a = gen_matrix(12, 8, rng);
  const Vector y = testutil::gaussian_vector(12, rng);
  ProjectionWorkspace ws(a, as_span(y));
  for (Index j : {0, 3, 5, 6, 7}) ws.push(j);
  const Eigen::MatrixXd q = ws.basis();
  REQUIRE(q.cols() == 5);
  const Eigen::MatrixXd gram = q.transpose() * q;
  CHECK((gram - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-10);
  for (Index j : {0, 3, 5, 6, 7}) {
    const Vector col = a.entries().col(j);
    const Vector resid = col - q * (q.transpose() * col);
    CHECK(resid.norm() <= 1e-8 * col.norm());
  }
}

TEST_CASE("dependent columns are dropped from the basis") {
  Eigen::MatrixXd e(3, 3);
  e << 1, 2, 0,
       0, 0, 1,
       0, 0, 0;
  const MeasMatrix a(e);
  Vector y(3);
  y << 3, 4, 12;
  ProjectionWorkspace ws(a, as_span(y));
  ws.push(0);
  ws.push(1);  // parallel to column 0
  CHECK(ws.rank() == 1);
  CHECK(ws.energy() == doctest::Approx(9.0));
  ws.push(2);
  CHECK(ws.rank() == 2);
  CHECK(ws.energy() == doctest::Approx(25.0));
  ws.pop();
  ws.pop();
  CHECK(ws.rank() == 1);
  CHECK(ws.energy() == doctest::Approx(9.0));
}

TEST_CASE("energy_with agrees bit-for-bit with push") {
  Stream rng(13);
  const auto a = gen_matrix(10, 7, rng);
  const Vector y = testutil::gaussian_vector(10, rng);
  ProjectionWorkspace ws(a, as_span(y));
  ws.push(1);
  ws.push(4);
  const double predicted = ws.energy_with(6);
  ws.push(6);
  CHECK(ws.energy() == predicted);
}

TEST_CASE("residual_correlation_gain examples") {
  Stream rng(17);
  const auto a = gen_matrix(10, 5, rng);

  SUBCASE("empty base reduces to one-column projection") {
    const Vector a2 = a.entries().col(2);
    CHECK(residual_correlation_gain(a, Subset{}, 2, as_span(a2)) ==
          doctest::Approx(a2.squaredNorm()).epsilon(1e-10));
  }

  SUBCASE("matches the two-projection difference") {
    const Vector y = testutil::gaussian_vector(10, rng);
    const Subset k{0, 3};
    for (Index i : {1, 2, 4}) {
      Subset ki = k;
      ki.push_back(i);
      const double diff = projection_energy(a, ki, as_span(y)) -
                          projection_energy(a, k, as_span(y));
      CHECK(std::abs(residual_correlation_gain(a, k, i, as_span(y)) - diff) < 1e-9);
    }
  }

  SUBCASE("orthogonal data gives zero") {
    // y = P^perp of a random vector against span{a_0, a_1, a_4}.
    Eigen::MatrixXd basis(10, 3);
    basis << a.entries().col(0), a.entries().col(1), a.entries().col(4);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(10, 3);
    Vector y = testutil::gaussian_vector(10, rng);
    y -= q * (q.transpose() * y);
    CHECK(std::abs(residual_correlation_gain(a, Subset{0, 1}, 4, as_span(y))) < 1e-9);
  }

  SUBCASE("errors") {
    const Vector y = testutil::gaussian_vector(10, rng);
    CHECK_THROWS_AS(residual_correlation_gain(a, Subset{0, 1}, 1, as_span(y)),
                    ValidationError);
    Eigen::MatrixXd e = a.entries();
    e.col(4) = 2.0 * e.col(0) - e.col(1);
    const MeasMatrix dep(e);
    CHECK_THROWS_AS(residual_correlation_gain(dep, Subset{0, 1}, 4, as_span(y)),
                    DegenerateColumn);
  }
}

TEST_CASE("gain identity holds across random shapes") {
  Stream rng(19);
  for (int rep = 0; rep < 500; ++rep) {
    const Index m = 2 + rng() % 30, n = 2 + rng() % 20;
    const auto a = gen_matrix(m, n, rng);
    const Vector y = testutil::gaussian_vector(m, rng);
    const Index kmax = std::min(m - 1, n - 1);
    Subset all = testutil::random_subset(n, 1 + rng() % (kmax + 1), rng);
    const Index i = all.back();
    all.pop_back();
    Subset ki = all;
    ki.push_back(i);
    const double lhs = residual_correlation_gain(a, all, i, as_span(y));
    const double rhs = projection_energy(a, ki, as_span(y)) -
                       projection_energy(a, all, as_span(y));
    CHECK(std::abs(lhs - rhs) < 1e-9);
  }
}
