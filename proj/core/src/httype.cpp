#include "magflow/httype.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace magflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

// a-coefficients of the sin(z_hat t) terms, times z_hat.
Eigen::Vector4d rotation_coefs(const HTInitialData& d) {
  Eigen::Vector4d c;
  c[0] = -d.z1 * d.u[1] - d.z2 * d.u[2];
  c[1] = d.z1 * d.u[0] + d.z2 * d.u[3];
  c[2] = d.z2 * d.u[0] - d.z1 * d.u[3];
  c[3] = -d.z2 * d.u[1] + d.z1 * d.u[2];
  return c;
}

}  // namespace

MagneticSystem ht_system(double B) {
  MetricTwoStepAlgebra alg = make_ht_example();
  Covector zeta = Covector::zero(4, 2);
  zeta.z[0] = 1.0;
  return MagneticSystem(std::move(alg), B, zeta);
}

Covector ht_momentum(const HTInitialData& d) {
  Covector p = Covector::zero(4, 2);
  p.v = d.u;
  p.z << d.z1, d.z2;
  return p;
}

Covector ht_euler_curve(const HTInitialData& d, double t) {
  const double zh = d.z_hat();
  Covector p = ht_momentum(d);
  if (zh == 0.0) return p;
  const Eigen::Vector4d c = rotation_coefs(d);
  p.v = d.u * std::cos(zh * t) + (c / zh) * std::sin(zh * t);
  return p;
}

GroupElement ht_geodesic_eval(const HTInitialData& d, double t) {
  const double zh = d.z_hat();
  AlgebraVector x = AlgebraVector::zero(4, 2);
  if (zh == 0.0) {
    // Straight branch: one-parameter subgroup with the field drift.
    x.v = d.u * t;
    x.z << d.B * t, 0.0;
    return GroupElement{std::move(x)};
  }
  const Eigen::Vector4d c = rotation_coefs(d);
  const double s = std::sin(zh * t), vc = 1.0 - std::cos(zh * t);
  x.v = (d.u / zh) * s + (c / (zh * zh)) * vc;
  const double us = d.u_hat_sq();
  x.z[0] = (d.z1 + d.B + d.z1 * us / (2.0 * zh * zh)) * t -
           d.z1 * us / (2.0 * zh * zh * zh) * s;
  x.z[1] = (d.z2 + d.z2 * us / (2.0 * zh * zh)) * t -
           d.z2 * us / (2.0 * zh * zh * zh) * s;
  return GroupElement{std::move(x)};
}

std::vector<Eigen::Vector3d> ht_default_seeds(double xi1, double xi2, double E,
                                              double B, long k) {
  std::vector<Eigen::Vector3d> seeds;
  const double absB = std::abs(B);
  for (int i = 1; i <= 5; ++i) {
    const double us = E * E * i / 5.0;
    for (int j = 0; j < 5; ++j) {
      const double z1 = -E - absB + (2.0 * E + 2.0 * absB) * j / 4.0;
      for (int m = 0; m < 5; ++m) {
        const double z2 = -E + 2.0 * E * m / 4.0;
        seeds.emplace_back(us, z1, z2);
      }
    }
  }
  // Analytic seed for the parallel case xi2 = 0: z2 = 0 reduces the system
  // to the three-dimensional Heisenberg condition.
  if (std::abs(xi2) < 1e-12 && E > absB) {
    const double ratio = xi1 / (kPi * static_cast<double>(k));
    if (ratio > 1.0) {
      const double mag = std::sqrt((E * E - B * B) / (ratio - 1.0));
      for (double z1 : {-mag, mag}) {
        const double us = E * E - (z1 + B) * (z1 + B);
        if (us > 0.0) seeds.emplace_back(us, z1, 0.0);
      }
    }
  }
  return seeds;
}

namespace {

Eigen::Vector3d period_system(const Eigen::Vector3d& w, double xi1, double xi2,
                              double E, double B, long k) {
  const double us = w[0], z1 = w[1], z2 = w[2];
  const double zh = std::sqrt(z1 * z1 + z2 * z2);
  Eigen::Vector3d f;
  if (zh < 1e-14) {
    f.setConstant(1e6);
    return f;
  }
  const double omega = 2.0 * kPi * static_cast<double>(k) / zh;
  f[0] = (z1 + B + z1 * us / (2.0 * zh * zh)) * omega - xi1;
  f[1] = (z2 + z2 * us / (2.0 * zh * zh)) * omega - xi2;
  f[2] = us + (z1 + B) * (z1 + B) + z2 * z2 - E * E;
  return f;
}

// gamma sigma(t) = sigma(t + omega) with central gamma: horizontal parts
// periodic, central increment (xi1, xi2).
double periodicity_residual(const HTInitialData& d, double omega, double xi1,
                            double xi2) {
  double worst = 0.0;
  const int samples = 16;
  for (int j = 0; j < samples; ++j) {
    const double t = (j + 0.37) * std::abs(omega) / samples;
    const GroupElement a = ht_geodesic_eval(d, t);
    const GroupElement b = ht_geodesic_eval(d, t + omega);
    worst = std::max(worst, (b.coords.v - a.coords.v).cwiseAbs().maxCoeff());
    worst = std::max(worst, std::abs(b.coords.z[0] - a.coords.z[0] - xi1));
    worst = std::max(worst, std::abs(b.coords.z[1] - a.coords.z[1] - xi2));
  }
  return worst;
}

}  // namespace

std::vector<HTRoot> ht_central_period_solve(double xi1, double xi2, double E,
                                            double B, long k,
                                            const std::vector<Eigen::Vector3d>& seeds,
                                            std::vector<std::string>* diagnostics) {
  if (k == 0) throw std::invalid_argument("winding number k must be nonzero");
  if (!(E > 0)) throw std::invalid_argument("energy must be positive");

  std::vector<HTRoot> roots;
  std::vector<std::string> diags;
  for (size_t si = 0; si < seeds.size(); ++si) {
    Eigen::Vector3d w = seeds[si];
    Eigen::Vector3d f = period_system(w, xi1, xi2, E, B, k);
    double res = f.norm();
    bool converged = false;
    for (int iter = 0; iter < 200; ++iter) {
      // Finite-difference Jacobian.
      Eigen::Matrix3d J;
      for (int c = 0; c < 3; ++c) {
        const double h = 1e-7 * std::max(1.0, std::abs(w[c]));
        Eigen::Vector3d wp = w, wm = w;
        wp[c] += h;
        wm[c] -= h;
        J.col(c) = (period_system(wp, xi1, xi2, E, B, k) -
                    period_system(wm, xi1, xi2, E, B, k)) /
                   (2.0 * h);
      }
      Eigen::Vector3d step = J.fullPivLu().solve(-f);
      if (!step.allFinite()) break;
      // Damp while the residual increases.
      double lambda = 1.0;
      Eigen::Vector3d wn;
      Eigen::Vector3d fn;
      double rn = res;
      for (int d = 0; d < 30; ++d) {
        wn = w + lambda * step;
        fn = period_system(wn, xi1, xi2, E, B, k);
        rn = fn.norm();
        if (rn < res || lambda < 1e-10) break;
        lambda *= 0.5;
      }
      const double moved = (wn - w).norm();
      w = wn;
      f = fn;
      res = rn;
      if (res <= 1e-12 || moved <= 1e-13) {
        converged = res <= 1e-10;
        break;
      }
    }
    if (!converged) {
      std::ostringstream os;
      os << "seed " << si << ": no convergence, residual " << res;
      diags.push_back(os.str());
      continue;
    }
    const double us = w[0], z1 = w[1], z2 = w[2];
    const double zh = std::sqrt(z1 * z1 + z2 * z2);
    if (!(us > 0.0) || !(zh > 0.0)) {
      std::ostringstream os;
      os << "seed " << si << ": root discarded (u_sq " << us << ")";
      diags.push_back(os.str());
      continue;
    }
    bool dup = false;
    for (const auto& r : roots)
      if (std::abs(r.u_sq - us) <= 1e-8 && std::abs(r.data.z1 - z1) <= 1e-8 &&
          std::abs(r.data.z2 - z2) <= 1e-8)
        dup = true;
    if (dup) continue;

    HTRoot root;
    root.data.u = Eigen::Vector4d(std::sqrt(us), 0.0, 0.0, 0.0);
    root.data.z1 = z1;
    root.data.z2 = z2;
    root.data.B = B;
    root.u_sq = us;
    root.omega = 2.0 * kPi * static_cast<double>(k) / zh;
    root.residual = res;
    if (periodicity_residual(root.data, root.omega, xi1, xi2) > 1e-8) {
      std::ostringstream os;
      os << "seed " << si << ": root failed periodicity check";
      diags.push_back(os.str());
      continue;
    }
    roots.push_back(std::move(root));
  }
  std::sort(roots.begin(), roots.end(), [](const HTRoot& a, const HTRoot& b) {
    if (a.data.z1 != b.data.z1) return a.data.z1 < b.data.z1;
    return a.data.z2 < b.data.z2;
  });
  if (diagnostics && roots.empty()) *diagnostics = std::move(diags);
  return roots;
}

}  // namespace magflow
