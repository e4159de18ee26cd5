#include "doctest.h"

#include <random>

#include "magflow/httype.hpp"

using namespace magflow;

namespace {

constexpr double kPi = 3.14159265358979323846;

HTInitialData draw_data(std::mt19937& rng) {
  std::normal_distribution<double> g;
  HTInitialData d;
  d.u = Eigen::Vector4d(g(rng), g(rng), g(rng), g(rng));
  d.z1 = g(rng);
  d.z2 = g(rng);
  d.B = 0.5 * g(rng);
  return d;
}

double oracle_dev(const HTInitialData& d, double T) {
  const auto sys = ht_system(d.B);
  const auto traj = integrate_numeric(sys, ht_momentum(d), T);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < traj.times.size(); ++i) {
    const auto g = ht_geodesic_eval(d, traj.times[i]);
    worst = std::max(worst,
                     (g.coords.full() - traj.points[i].coords.full()).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace

TEST_CASE("euler curve initial value and simple rotation") {
  HTInitialData d;
  d.u = Eigen::Vector4d(1, 0, 0, 0);
  d.z1 = 1.0;
  d.z2 = 0.0;
  d.B = 0.3;
  CHECK((ht_euler_curve(d, 0.0).full() - ht_momentum(d).full()).norm() == 0.0);
  for (double t : {0.4, 1.1, 2.9}) {
    const auto p = ht_euler_curve(d, t);
    CHECK(p.v[0] == doctest::Approx(std::cos(t)).epsilon(1e-13));
    CHECK(p.v[1] == doctest::Approx(std::sin(t)).epsilon(1e-13));
    CHECK(p.v[2] == doctest::Approx(0.0));
    CHECK(p.v[3] == doctest::Approx(0.0));
    CHECK(p.z[0] == doctest::Approx(1.0));
    CHECK(p.z[1] == doctest::Approx(0.0));
  }
}

TEST_CASE("euler curve satisfies p' = E_h(p) by finite differences") {
  std::mt19937 rng(11);
  const auto sys = ht_system(0.7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto d = draw_data(rng);
    for (double t : {0.3, 1.7}) {
      const double h = 1e-6;
      const Eigen::VectorXd fd =
          (ht_euler_curve(d, t + h).full() - ht_euler_curve(d, t - h).full()) /
          (2.0 * h);
      const auto e = euler_field(sys, ht_euler_curve(d, t));
      CHECK((fd - e.full()).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("geodesic starts at the identity with constant speed") {
  std::mt19937 rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const auto d = draw_data(rng);
    CHECK(ht_geodesic_eval(d, 0.0).coords.full().norm() == 0.0);
    const auto sys = ht_system(d.B);
    const double E = d.energy();
    // Energy drift along the closed form, via dh at the euler momenta.
    for (int s = 0; s < 200; ++s) {
      const double t = 10.0 * s / 199.0;
      const auto vel = dh(sys, ht_euler_curve(d, t));
      CHECK(std::abs(sys.alg().norm(vel) - E) <= 1e-10 * std::max(1.0, E));
    }
  }
}

TEST_CASE("bracket term identity") {
  // [X'(t), X(t)] = (1 - cos zh t)(-z1 uh^2/zh^2 Z1 - z2 uh^2/zh^2 Z2).
  std::mt19937 rng(33);
  const auto sys = ht_system(0.0);
  for (int trial = 0; trial < 5; ++trial) {
    const auto d = draw_data(rng);
    const double zh = d.z_hat(), us = d.u_hat_sq();
    for (double t : {0.5, 1.9}) {
      const double h = 1e-6;
      const auto Xp = (ht_geodesic_eval(d, t + h).coords -
                       ht_geodesic_eval(d, t - h).coords) *
                      (1.0 / (2.0 * h));
      const auto br = sys.alg().bracket(Xp, ht_geodesic_eval(d, t).coords);
      const double f = (1.0 - std::cos(zh * t)) * us / (zh * zh);
      CHECK(br.z[0] == doctest::Approx(-d.z1 * f).epsilon(1e-6));
      CHECK(br.z[1] == doctest::Approx(-d.z2 * f).epsilon(1e-6));
    }
  }
}

TEST_CASE("closed form matches the numeric oracle") {
  std::mt19937 rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = draw_data(rng);
    CHECK(oracle_dev(d, 10.0) <= 1e-6);
  }
}

TEST_CASE("frozen central branch at z_hat = 0") {
  HTInitialData d;
  d.u = Eigen::Vector4d(1, -2, 0.5, 0);
  d.z1 = 0.0;
  d.z2 = 0.0;
  d.B = 0.8;
  const auto g = ht_geodesic_eval(d, 2.0);
  CHECK((g.coords.v - 2.0 * d.u).norm() < 1e-13);
  CHECK(g.coords.z[0] == doctest::Approx(1.6));
  CHECK(g.coords.z[1] == doctest::Approx(0.0));
  CHECK(oracle_dev(d, 5.0) <= 1e-6);
}

TEST_CASE("parallel-case roots reduce to the three-dimensional condition") {
  const double E = 1.0, B = 0.25;
  const double xi1 = 8.0 * kPi;
  const long k = 1;
  const auto roots = ht_central_period_solve(xi1, 0.0, E, B, k,
                                             ht_default_seeds(xi1, 0.0, E, B, k));
  REQUIRE(!roots.empty());
  for (const auto& r : roots) {
    CHECK(std::abs(r.data.z2) <= 1e-12);
    CHECK(r.residual <= 1e-10);
    // z1 solves z1^2 (ratio - 1) = E^2 - B^2 with ratio = xi1/(pi k).
    const double ratio = xi1 / (kPi * k);
    CHECK(r.data.z1 * r.data.z1 * (ratio - 1.0) ==
          doctest::Approx(E * E - B * B).epsilon(1e-8));
    // Energy constraint.
    CHECK(r.data.energy() == doctest::Approx(E).epsilon(1e-10));
  }
}

TEST_CASE("generic roots pass the periodicity verification") {
  const double E = 1.0, B = 0.2;
  const double xi1 = 6.0 * kPi, xi2 = 1.5;
  const long k = 1;
  const auto roots = ht_central_period_solve(xi1, xi2, E, B, k,
                                             ht_default_seeds(xi1, xi2, E, B, k));
  for (const auto& r : roots) {
    CHECK(r.residual <= 1e-10);
    CHECK(r.u_sq > 0.0);
    // u-direction independence: a different direction with the same u_hat^2
    // is periodic with the same omega.
    HTInitialData alt = r.data;
    alt.u = Eigen::Vector4d(0.0, std::sqrt(r.u_sq), 0.0, 0.0);
    const auto a = ht_geodesic_eval(alt, 0.8);
    const auto b = ht_geodesic_eval(alt, 0.8 + r.omega);
    CHECK((b.coords.v - a.coords.v).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(b.coords.z[0] - a.coords.z[0] == doctest::Approx(xi1).epsilon(1e-8));
    CHECK(b.coords.z[1] - a.coords.z[1] == doctest::Approx(xi2).epsilon(1e-8));
  }
}

TEST_CASE("solver argument validation and diagnostics") {
  CHECK_THROWS(ht_central_period_solve(1.0, 0.0, 1.0, 0.0, 0, {}));
  CHECK_THROWS(ht_central_period_solve(1.0, 0.0, -1.0, 0.0, 1, {}));
  std::vector<std::string> diags;
  // xi = 0 forces z1 = z2 = 0, contradicting z_hat > 0: no roots exist.
  const auto roots = ht_central_period_solve(0.0, 0.0, 1.0, 0.0, 1,
                                             {Eigen::Vector3d(0.5, 0.1, 0.1)}, &diags);
  CHECK(roots.empty());
  CHECK(!diags.empty());
}
