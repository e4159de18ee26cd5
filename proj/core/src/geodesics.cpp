#include "magflow/geodesics.hpp"

#include <cmath>
#include <stdexcept>

namespace magflow {

namespace {

// Guarded trigonometric quotients, stable through x -> 0. These make the
// spiraling closed forms usable across the z0 = 0 branch point without a
// separate formula: at z0 = 0 they reduce exactly to the straight-line case.
double sinc_q(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

// (1 - cos x)/x
double versine_q(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return x * (0.5 - x2 / 24.0 + x2 * x2 / 720.0);
  }
  const double s = std::sin(0.5 * x);
  return 2.0 * s * s / x;
}

// (x - sin x)/x^3
double cubic_q(double x) {
  if (std::abs(x) < 1e-2) {
    const double x2 = x * x;
    return 1.0 / 6.0 - x2 / 120.0 + x2 * x2 / 5040.0;
  }
  return (x - std::sin(x)) / (x * x * x);
}

}  // namespace

void HeisGeodesic::validate() const {
  const int m = n();
  if (m < 1) throw std::invalid_argument("HeisGeodesic needs at least one mode");
  if (u.size() != m || v.size() != m)
    throw std::invalid_argument("HeisGeodesic u/v size mismatch");
  for (int i = 0; i < m; ++i)
    if (!(A[i] > 0)) throw std::invalid_argument("HeisGeodesic requires A_i > 0");
}

Covector euler_curve(const HeisGeodesic& geo, double t) {
  geo.validate();
  const int m = geo.n();
  Covector p = Covector::zero(2 * m, 1);
  for (int i = 0; i < m; ++i) {
    const double th = geo.z0 * t / geo.A[i];
    const double c = std::cos(th), s = std::sin(th);
    p.v[i] = geo.u[i] * c - geo.v[i] * s;
    p.v[m + i] = geo.u[i] * s + geo.v[i] * c;
  }
  p.z[0] = geo.z0;
  return p;
}

GroupElement heis_eval(const HeisGeodesic& geo, double t) {
  geo.validate();
  const int m = geo.n();
  AlgebraVector c = AlgebraVector::zero(2 * m, 1);
  double zc = (geo.z0 + geo.B) * t;
  for (int i = 0; i < m; ++i) {
    const double th = geo.z0 * t / geo.A[i];
    const double sc = sinc_q(th), vs = versine_q(th);
    c.v[i] = (t / geo.A[i]) * (geo.u[i] * sc - geo.v[i] * vs);
    c.v[m + i] = (t / geo.A[i]) * (geo.u[i] * vs + geo.v[i] * sc);
    const double r2 = geo.u[i] * geo.u[i] + geo.v[i] * geo.v[i];
    zc += r2 * geo.z0 * t * t * t * cubic_q(th) / (2.0 * geo.A[i] * geo.A[i] * geo.A[i]);
  }
  c.z[0] = zc;
  return GroupElement(std::move(c));
}

AlgebraVector velocity(const HeisGeodesic& geo, double t) {
  geo.validate();
  const int m = geo.n();
  const Covector p = euler_curve(geo, t);
  AlgebraVector w = AlgebraVector::zero(2 * m, 1);
  for (int i = 0; i < m; ++i) {
    w.v[i] = p.v[i] / geo.A[i];
    w.v[m + i] = p.v[m + i] / geo.A[i];
  }
  w.z[0] = geo.z0 + geo.B;
  return w;
}

double energy(const HeisGeodesic& geo) {
  geo.validate();
  double e2 = (geo.z0 + geo.B) * (geo.z0 + geo.B);
  for (int i = 0; i < geo.n(); ++i)
    e2 += (geo.u[i] * geo.u[i] + geo.v[i] * geo.v[i]) / geo.A[i];
  return std::sqrt(e2);
}

Trajectory integrate_numeric(const MagneticSystem& sys, const Covector& p0, double T,
                             int steps) {
  const auto& alg = sys.alg();
  alg.check_covector(p0);
  if (steps < 2) throw std::invalid_argument("steps must be at least 2");
  const int d = alg.dim();
  const int dv = alg.dim_v();

  // State: (p, U) stacked as full coordinate vectors.
  auto rhs = [&](const Eigen::VectorXd& y) {
    const Covector p = Covector::from_full(y.head(d), dv);
    const AlgebraVector U = AlgebraVector::from_full(y.tail(d), dv);
    const Covector pdot = euler_field(sys, p);
    const AlgebraVector W = dh(sys, p);
    AlgebraVector Udot = AlgebraVector::zero(dv, alg.dim_z());
    Udot.v = W.v;
    Udot.z = W.z - 0.5 * alg.bracket(Udot, U).z;
    Eigen::VectorXd out(2 * d);
    out << pdot.full(), Udot.full();
    return out;
  };

  const double h = T / steps;
  Eigen::VectorXd y(2 * d);
  y << p0.full(), Eigen::VectorXd::Zero(d);

  Trajectory traj;
  traj.times.resize(steps + 1);
  traj.points.reserve(steps + 1);
  traj.velocities.reserve(steps + 1);
  auto record = [&](int idx, double t) {
    traj.times[idx] = t;
    const Covector p = Covector::from_full(y.head(d), dv);
    traj.points.emplace_back(AlgebraVector::from_full(y.tail(d), dv));
    traj.velocities.push_back(dh(sys, p));
  };
  record(0, 0.0);
  for (int k = 0; k < steps; ++k) {
    const Eigen::VectorXd k1 = rhs(y);
    const Eigen::VectorXd k2 = rhs(y + 0.5 * h * k1);
    const Eigen::VectorXd k3 = rhs(y + 0.5 * h * k2);
    const Eigen::VectorXd k4 = rhs(y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!y.allFinite())
      throw std::runtime_error("integrate_numeric: non-finite state (blow-up)");
    record(k + 1, (k + 1) * h);
  }
  return traj;
}

Trajectory integrate_numeric(const MagneticSystem& sys, const Covector& p0, double T) {
  const int steps = std::max(2, static_cast<int>(std::ceil(std::abs(T) / 1e-3)));
  return integrate_numeric(sys, p0, T, steps);
}

GroupElement tangent_eval(double A, double B, double x0, double y0, double z0_tan,
                          double t) {
  if (!(A > 0)) throw std::invalid_argument("tangent_eval requires A > 0");
  AlgebraVector c = AlgebraVector::zero(2, 1);
  const double zb = z0_tan - B;
  if (std::abs(zb) < 1e-13 * std::max(1.0, std::abs(B))) {
    c.v[0] = x0 * t;
    c.v[1] = y0 * t;
    c.z[0] = z0_tan * t;
    return GroupElement(std::move(c));
  }
  const double nu = zb / A;
  const double s = std::sin(nu * t), cv = 1.0 - std::cos(nu * t);
  c.v[0] = (A / zb) * (x0 * s - y0 * cv);
  c.v[1] = (A / zb) * (x0 * cv + y0 * s);
  const double r2 = x0 * x0 + y0 * y0;
  c.z[0] = (z0_tan + A * r2 / (2.0 * zb)) * t - A * A * r2 / (2.0 * zb * zb) * s;
  return GroupElement(std::move(c));
}

std::pair<double, double> euclidean_reference(double x0, double y0, double B, double t) {
  if (B == 0.0)
    throw std::invalid_argument("euclidean_reference requires B != 0");
  const double s = std::sin(t * B), cv = 1.0 - std::cos(t * B);
  return {-y0 / B * cv + x0 / B * s, x0 / B * cv + y0 / B * s};
}

MagneticSystem heis_system(const HeisGeodesic& geo) {
  geo.validate();
  return MagneticSystem(make_heisenberg(geo.A), geo.B);
}

Covector heis_momentum(const HeisGeodesic& geo) {
  geo.validate();
  const int m = geo.n();
  Covector p = Covector::zero(2 * m, 1);
  p.v.head(m) = geo.u;
  p.v.tail(m) = geo.v;
  p.z[0] = geo.z0;
  return p;
}

}  // namespace magflow
