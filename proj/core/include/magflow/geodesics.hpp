#ifndef MAGFLOW_GEODESICS_HPP
#define MAGFLOW_GEODESICS_HPP

#include <utility>
#include <vector>

#include "magflow/magnetic.hpp"

namespace magflow {

/// Closed-form magnetic geodesic on the Heisenberg group h_n through the
/// identity, parameterized by initial momentum (u_i, v_i, z0) and the
/// metric/field data (A_i, B).
struct HeisGeodesic {
  Eigen::VectorXd A;  // metric parameters, A_i > 0
  double B = 0.0;
  Eigen::VectorXd u, v;  // initial non-central momentum components
  double z0 = 0.0;       // initial central momentum

  int n() const { return static_cast<int>(A.size()); }
  void validate() const;
};

struct Trajectory {
  Eigen::VectorXd times;
  std::vector<GroupElement> points;
  std::vector<AlgebraVector> velocities;  // left-trivialized
};

/// Momentum curve p(t): rotating (a_i, b_i) sinusoids, constant center.
Covector euler_curve(const HeisGeodesic& geo, double t);

/// Exponential coordinates of the geodesic at time t.
GroupElement heis_eval(const HeisGeodesic& geo, double t);

/// Left-trivialized velocity; its norm is constant in t.
AlgebraVector velocity(const HeisGeodesic& geo, double t);

/// Conserved speed E = sqrt(sum (u_i^2+v_i^2)/A_i + (z0+B)^2).
double energy(const HeisGeodesic& geo);

/// Fixed-step classical RK4 on the coupled momentum/coordinate system.
/// Works for any metric two-step algebra; this is the oracle.
Trajectory integrate_numeric(const MagneticSystem& sys, const Covector& p0, double T,
                             int steps);
/// Default step count max(2, ceil(T/1e-3)).
Trajectory integrate_numeric(const MagneticSystem& sys, const Covector& p0, double T);

/// Three-dimensional geodesic in the tangent parameterization
/// (x0, y0, z0_tan) = (u0/A, v0/A, z0 + B); frequency (z0_tan - B)/A.
GroupElement tangent_eval(double A, double B, double x0, double y0, double z0_tan,
                          double t);

/// Magnetic geodesic of the Euclidean plane: circle of radius E/|B| with
/// center (-y0/B, x0/B). Rejects B = 0.
std::pair<double, double> euclidean_reference(double x0, double y0, double B, double t);

/// The magnetic system on h_n matching a HeisGeodesic's (A, B).
MagneticSystem heis_system(const HeisGeodesic& geo);
/// Initial momentum covector of a HeisGeodesic.
Covector heis_momentum(const HeisGeodesic& geo);

}  // namespace magflow

#endif
