#ifndef MAGFLOW_HTTYPE_HPP
#define MAGFLOW_HTTYPE_HPP

#include <cmath>
#include <string>
#include <vector>

#include "magflow/geodesics.hpp"

namespace magflow {

/// Initial data for a magnetic geodesic through the identity of the
/// six-dimensional Heisenberg-type group (4-dim horizontal, 2-dim center).
struct HTInitialData {
  Eigen::Vector4d u;   // horizontal momenta u_1..u_4
  double z1 = 0.0;     // central momenta
  double z2 = 0.0;
  double B = 0.0;      // field strength on the first central direction

  double z_hat() const { return std::sqrt(z1 * z1 + z2 * z2); }
  double u_hat_sq() const { return u.squaredNorm(); }
  double energy() const {
    return std::sqrt(u_hat_sq() + (z1 + B) * (z1 + B) + z2 * z2);
  }
};

/// The magnetic system on the built-in Heisenberg-type algebra with the
/// field supported on the first central direction.
MagneticSystem ht_system(double B);

/// Initial momentum covector for d on the built-in algebra.
Covector ht_momentum(const HTInitialData& d);

/// Integral curve of the Euler vector field: four sinusoidal horizontal
/// components, constant central components. z_hat = 0 returns p(0).
Covector ht_euler_curve(const HTInitialData& d, double t);

/// Closed-form magnetic geodesic through the identity. z_hat = 0 falls back
/// to the straight branch x_i = u_i t with central drift (B t, 0).
GroupElement ht_geodesic_eval(const HTInitialData& d, double t);

struct HTRoot {
  HTInitialData data;  // representative u = (u_hat, 0, 0, 0)
  double u_sq = 0.0;
  double omega = 0.0;
  double residual = 0.0;
};

/// Seed points (u_sq, z1, z2) for the central-period solver.
std::vector<Eigen::Vector3d> ht_default_seeds(double xi1, double xi2, double E,
                                              double B, long k);

/// Solve the three-equation central-period system for gamma =
/// exp(xi1 Z1 + xi2 Z2) at winding number k and energy E. Accepted roots
/// have residual <= 1e-10, u_sq > 0, z_hat > 0, and pass the periodicity
/// check gamma sigma(t) = sigma(t + omega) at 1e-8. Failed seeds are
/// reported in diagnostics if the result is empty.
std::vector<HTRoot> ht_central_period_solve(double xi1, double xi2, double E,
                                            double B, long k,
                                            const std::vector<Eigen::Vector3d>& seeds,
                                            std::vector<std::string>* diagnostics = nullptr);

}  // namespace magflow

#endif
