#include "doctest.h"

#include <random>

#include "magflow/algebra.hpp"

using namespace magflow;

namespace {

AlgebraVector basis(const MetricTwoStepAlgebra& alg, int idx) {
  AlgebraVector e = AlgebraVector::zero(alg.dim_v(), alg.dim_z());
  if (idx < alg.dim_v())
    e.v[idx] = 1.0;
  else
    e.z[idx - alg.dim_v()] = 1.0;
  return e;
}

AlgebraVector random_vec(const MetricTwoStepAlgebra& alg, std::mt19937& rng) {
  std::normal_distribution<double> g;
  AlgebraVector x = AlgebraVector::zero(alg.dim_v(), alg.dim_z());
  for (int i = 0; i < alg.dim_v(); ++i) x.v[i] = g(rng);
  for (int i = 0; i < alg.dim_z(); ++i) x.z[i] = g(rng);
  return x;
}

}  // namespace

TEST_CASE("h_1 bracket relations") {
  const auto alg = make_heisenberg(Eigen::VectorXd::Constant(1, 1.0));
  const auto X = basis(alg, 0), Y = basis(alg, 1), Z = basis(alg, 2);
  CHECK(alg.bracket(X, Y).z[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(alg.bracket(X, X).full().norm() == 0.0);
  CHECK(alg.bracket(Y, X).z[0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(alg.bracket(X, Z).full().norm() == 0.0);
}

TEST_CASE("six-dim example bracket relations") {
  const auto alg = make_ht_example();
  const auto X2 = basis(alg, 1), X4 = basis(alg, 3);
  const auto b = alg.bracket(X2, X4);
  CHECK(b.z[0] == doctest::Approx(0.0));
  CHECK(b.z[1] == doctest::Approx(-1.0));
}

TEST_CASE("group law: identity, inverse, associativity") {
  const auto alg = make_heisenberg(Eigen::VectorXd::Constant(1, 2.0));
  std::mt19937 rng(12345);
  for (int trial = 0; trial < 10; ++trial) {
    GroupElement a{random_vec(alg, rng)}, b{random_vec(alg, rng)},
        c{random_vec(alg, rng)};
    const auto id = alg.group_identity();
    CHECK((alg.group_multiply(a, id).coords - a.coords).full().norm() < 1e-14);
    CHECK(alg.group_multiply(a, alg.group_inverse(a)).coords.full().norm() < 1e-14);
    const auto lhs = alg.group_multiply(alg.group_multiply(a, b), c);
    const auto rhs = alg.group_multiply(a, alg.group_multiply(b, c));
    CHECK((lhs.coords - rhs.coords).full().norm() < 1e-12);
  }
}

TEST_CASE("j-map on h_1 with metric parameter A") {
  const double A = 2.5;
  const auto alg = make_heisenberg(Eigen::VectorXd::Constant(1, A));
  const auto Z = basis(alg, 2);
  const Eigen::MatrixXd J = alg.j_map(Z);
  // g(j(Z)X, .) = g([X, .], Z) forces j(Z)X = Y/A, j(Z)Y = -X/A.
  CHECK(J(1, 0) == doctest::Approx(1.0 / A).epsilon(1e-12));
  CHECK(J(0, 1) == doctest::Approx(-1.0 / A).epsilon(1e-12));
  CHECK(J(0, 0) == doctest::Approx(0.0));
  CHECK(J(1, 1) == doctest::Approx(0.0));

  AlgebraVector zero = AlgebraVector::zero(2, 1);
  CHECK(alg.j_map(zero).norm() == 0.0);

  AlgebraVector noncentral = basis(alg, 0);
  CHECK_THROWS(alg.j_map(noncentral));
}

TEST_CASE("j-map skew-symmetry property") {
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> ud(0.3, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd Av(2);
    Av << ud(rng), ud(rng);
    const auto alg = make_heisenberg(Av);
    AlgebraVector Z = AlgebraVector::zero(alg.dim_v(), alg.dim_z());
    std::normal_distribution<double> g;
    for (int i = 0; i < alg.dim_z(); ++i) Z.z[i] = g(rng);
    const Eigen::MatrixXd J = alg.j_map(Z);
    const Eigen::MatrixXd Gvv = alg.gram().topLeftCorner(alg.dim_v(), alg.dim_v());
    // Skew with respect to the metric: (GJ)^T = -GJ.
    const Eigen::MatrixXd GJ = Gvv * J;
    CHECK((GJ + GJ.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("Heisenberg-type identity") {
  CHECK(is_heisenberg_type(make_heisenberg(Eigen::VectorXd::Constant(1, 1.0))));
  // A != 1 scales j(Z)^2 to -I/A^2.
  CHECK(!is_heisenberg_type(make_heisenberg(Eigen::VectorXd::Constant(1, 2.0))));
  const auto ht = make_ht_example();
  CHECK(is_heisenberg_type(ht));
  const auto Z1 = basis(ht, 4), Z2 = basis(ht, 5);
  CHECK((ht.j_map(Z1) * ht.j_map(Z1) + Eigen::MatrixXd::Identity(4, 4))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  CHECK((ht.j_map(Z2) * ht.j_map(Z2) + Eigen::MatrixXd::Identity(4, 4))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("sharp and flat") {
  const double A = 2.0;
  const auto alg = make_heisenberg(Eigen::VectorXd::Constant(1, A));
  std::mt19937 rng(42);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 10; ++trial) {
    Covector p = Covector::zero(2, 1);
    p.v << g(rng), g(rng);
    p.z << g(rng);
    const auto X = alg.sharp(p);
    // sharp o flat = identity, pairing is the squared dual norm.
    CHECK((alg.flat(X).full() - p.full()).norm() < 1e-13);
    CHECK(p.pair(X) == doctest::Approx(alg.co_norm(p) * alg.co_norm(p)).epsilon(1e-12));
    CHECK(p.pair(X) > 0.0);
  }
  // sharp maps the dual of the center to the center.
  Covector zeta = Covector::zero(2, 1);
  zeta.z << 1.0;
  CHECK(alg.sharp(zeta).v.norm() == 0.0);
  // flat(X_i/sqrt(A)) = sqrt(A) alpha_i.
  AlgebraVector X = AlgebraVector::zero(2, 1);
  X.v << 1.0 / std::sqrt(A), 0.0;
  CHECK(alg.flat(X).v[0] == doctest::Approx(std::sqrt(A)).epsilon(1e-12));
}

TEST_CASE("Levi-Civita connection rules") {
  const auto alg = make_heisenberg(Eigen::VectorXd::Constant(1, 1.5));
  const auto X = basis(alg, 0), Y = basis(alg, 1), Z = basis(alg, 2);
  // nabla_V W = (1/2)[V, W] for horizontal fields.
  CHECK((alg.levi_civita(X, Y).full() - alg.bracket(X, Y).full() * 0.5).norm() < 1e-13);
  // nabla_V Z = nabla_Z V = -(1/2) j(Z) V.
  AlgebraVector jzx = AlgebraVector::zero(2, 1);
  jzx.v = alg.j_map(Z) * X.v;
  CHECK((alg.levi_civita(X, Z).full() + 0.5 * jzx.full()).norm() < 1e-13);
  CHECK((alg.levi_civita(Z, X).full() + 0.5 * jzx.full()).norm() < 1e-13);
  // Central directions are parallel.
  CHECK(alg.levi_civita(Z, Z).full().norm() == 0.0);

  // Torsion-free and metric compatibility on random left-invariant fields
  // (derivative terms vanish for constant coefficients).
  std::mt19937 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto U = random_vec(alg, rng), V = random_vec(alg, rng),
               W = random_vec(alg, rng);
    const auto torsion =
        alg.levi_civita(U, V) - alg.levi_civita(V, U) - alg.bracket(U, V);
    CHECK(torsion.full().norm() < 1e-12);
    const double compat = alg.inner(alg.levi_civita(U, V), W) +
                          alg.inner(V, alg.levi_civita(U, W));
    CHECK(compat == doctest::Approx(0.0).epsilon(1e-10));
  }
}

TEST_CASE("metric normalization: standard Gram is already normal") {
  const double A = 2.0;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(3, 3);
  gram(0, 0) = A;
  gram(1, 1) = A;
  const auto norm = normalize_heisenberg_metric(1, gram);
  REQUIRE(norm.A.size() == 1);
  CHECK(norm.A[0] == doctest::Approx(A).epsilon(1e-12));
  CHECK((norm.automorphism - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <
        1e-9);
}

TEST_CASE("metric normalization: random SPD Gram") {
  std::mt19937 rng(2024);
  std::normal_distribution<double> g;
  for (int n : {1, 2}) {
    const int d = 2 * n + 1;
    Eigen::MatrixXd M(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) M(i, j) = g(rng);
    Eigen::MatrixXd gram = M * M.transpose() + 0.5 * Eigen::MatrixXd::Identity(d, d);
    const auto norm = normalize_heisenberg_metric(n, gram);
    const Eigen::MatrixXd& Phi = norm.automorphism;

    // Pulled-back metric is diag(A_1..A_n, A_1..A_n, 1).
    Eigen::VectorXd expect(d);
    expect << norm.A, norm.A, 1.0;
    const Eigen::MatrixXd pulled = Phi.transpose() * gram * Phi;
    CHECK((pulled - Eigen::MatrixXd(expect.asDiagonal())).cwiseAbs().maxCoeff() < 1e-9);

    // Phi is an automorphism: [Phi e_i, Phi e_j] = Phi [e_i, e_j].
    const auto alg = make_heisenberg(n, Eigen::MatrixXd::Identity(d, d));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const auto ei = AlgebraVector::from_full(Phi.col(i), 2 * n);
        const auto ej = AlgebraVector::from_full(Phi.col(j), 2 * n);
        const auto lhs = alg.bracket(ei, ej);
        const auto eb = alg.bracket(AlgebraVector::from_full(
                                        Eigen::VectorXd::Unit(d, i), 2 * n),
                                    AlgebraVector::from_full(
                                        Eigen::VectorXd::Unit(d, j), 2 * n));
        const Eigen::VectorXd rhs = Phi * eb.full();
        CHECK((lhs.full() - rhs).norm() < 1e-9);
      }

    // Ascending parameters.
    for (int i = 0; i + 1 < norm.A.size(); ++i) CHECK(norm.A[i] <= norm.A[i + 1]);
  }
}

TEST_CASE("algebra round trip through JSON") {
  nlohmann::json j;
  j["dim_v"] = 2;
  j["dim_z"] = 1;
  j["bracket"] = {{0, 1, 0, 1.0}};
  j["gram"] = {2.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0};
  const auto alg = algebra_from_json(j);
  CHECK(alg.dim_v() == 2);
  CHECK(alg.dim_z() == 1);
  const auto ref = make_heisenberg(Eigen::VectorXd::Constant(1, 2.0));
  CHECK((alg.gram() - ref.gram()).cwiseAbs().maxCoeff() == 0.0);
  const auto X = basis(alg, 0), Y = basis(alg, 1);
  CHECK(alg.bracket(X, Y).z[0] == doctest::Approx(1.0));
}

TEST_CASE("invalid Gram matrices are rejected") {
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(3, 3);
  bad(0, 0) = -1.0;
  CHECK_THROWS(make_heisenberg(1, bad));
}
