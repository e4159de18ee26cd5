#include "magflow/spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace magflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool near_integer(double x, double tol = 1e-9) {
  return std::abs(x - std::round(x)) <= tol * std::max(1.0, std::abs(x));
}

// Strict inequality with a relative guard band, so boundary cases (which
// correspond to degenerate zero-radius circles) are excluded deterministically.
bool strictly_above(double x, double bound, double tol = 1e-9) {
  return x - bound > tol * std::max(1.0, std::abs(bound));
}

double sgn(double x) { return x < 0 ? -1.0 : 1.0; }

PeriodicFamily make_spiral(FamilyBranch br, long ell, double z0, double E, double B,
                           double A) {
  PeriodicFamily f;
  f.branch = br;
  f.ell = ell;
  f.z0 = z0;
  f.omega = 2.0 * kPi * A * static_cast<double>(ell) / z0;
  f.radius_sq = A * (E * E - (z0 + B) * (z0 + B));
  f.length = E * std::abs(f.omega);
  return f;
}

// 33-point grid over an open interval, endpoints pulled in by a relative
// margin; the underlying family set is a continuum.
std::vector<double> continuum_grid(double lo, double hi) {
  const double margin = 1e-6 * (hi - lo);
  std::vector<double> out;
  out.reserve(33);
  const double a = lo + margin, b = hi - margin;
  for (int j = 0; j < 33; ++j) out.push_back(a + (b - a) * j / 32.0);
  return out;
}

// Scalar duplicates of the guarded trig quotients used by heis_eval; the
// brute-force oracle needs them allocation-free.
double sinc_q(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}
double versine_q(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return x * (0.5 - x2 / 24.0 + x2 * x2 / 720.0);
  }
  const double s = std::sin(0.5 * x);
  return 2.0 * s * s / x;
}
double cubic_q(double x) {
  if (std::abs(x) < 1e-2) {
    const double x2 = x * x;
    return 1.0 / 6.0 - x2 / 120.0 + x2 * x2 / 5040.0;
  }
  return (x - std::sin(x)) / (x * x * x);
}

}  // namespace

std::string branch_name(FamilyBranch b) {
  switch (b) {
    case FamilyBranch::contractible: return "contractible";
    case FamilyBranch::noncentral_pos: return "noncentral+";
    case FamilyBranch::noncentral_neg: return "noncentral-";
    case FamilyBranch::central_line_pos: return "central-line+";
    case FamilyBranch::central_line_neg: return "central-line-";
    case FamilyBranch::spiral_1a: return "spiral-1a";
    case FamilyBranch::spiral_1b: return "spiral-1b";
    case FamilyBranch::spiral_2a: return "spiral-2a";
    case FamilyBranch::spiral_2b: return "spiral-2b";
    case FamilyBranch::spiral_3a: return "spiral-3a";
    case FamilyBranch::spiral_3b: return "spiral-3b";
  }
  return "?";
}

std::vector<PeriodicFamily> contractible_families(double E, double B,
                                                  const Eigen::VectorXd& A_list) {
  if (!(E > 0)) throw std::invalid_argument("contractible_families requires E > 0");
  if (A_list.size() < 1) throw std::invalid_argument("empty metric parameter list");
  std::vector<PeriodicFamily> out;
  if (E >= std::abs(B)) return out;
  const double z0 = -sgn(B) * std::sqrt(B * B - E * E);
  // One single-active-mode family per distinct metric parameter; when the
  // A_i coincide the families coincide as well.
  std::vector<double> seen;
  for (int i = 0; i < A_list.size(); ++i) {
    const double A = A_list[i];
    if (!(A > 0)) throw std::invalid_argument("metric parameters must be positive");
    bool dup = false;
    for (double a : seen)
      if (std::abs(a - A) <= 1e-12 * std::max(1.0, A)) dup = true;
    if (dup) continue;
    seen.push_back(A);
    PeriodicFamily f;
    f.branch = FamilyBranch::contractible;
    f.z0 = z0;
    f.omega = 2.0 * kPi * A / z0;
    f.radius_sq = A * (E * E - (z0 + B) * (z0 + B));
    f.length = E * std::abs(f.omega);
    out.push_back(f);
  }
  return out;
}

std::vector<PeriodicFamily> noncentral_families(const FreeHomotopyClass& cls, double E,
                                                double B) {
  if (!(cls.v_norm > 0))
    throw std::invalid_argument("noncentral_families requires |V_gamma| > 0");
  if (!(E > 0)) throw std::invalid_argument("noncentral_families requires E > 0");
  std::vector<PeriodicFamily> out;
  if (E <= std::abs(B)) return out;
  const double w = cls.v_norm / std::sqrt(E * E - B * B);
  for (double s : {+1.0, -1.0}) {
    PeriodicFamily f;
    f.branch = s > 0 ? FamilyBranch::noncentral_pos : FamilyBranch::noncentral_neg;
    f.z0 = 0.0;
    f.omega = s * w;
    f.radius_sq = 0.0;  // straight family: no spiral circle
    f.length = E * w;
    out.push_back(f);
  }
  return out;
}

std::vector<PeriodicFamily> central_line_families(double z_gamma, double E) {
  if (z_gamma == 0.0) throw std::invalid_argument("central class requires z_gamma != 0");
  if (!(E > 0)) throw std::invalid_argument("central_line_families requires E > 0");
  std::vector<PeriodicFamily> out;
  for (double s : {+1.0, -1.0}) {
    PeriodicFamily f;
    f.branch = s > 0 ? FamilyBranch::central_line_pos : FamilyBranch::central_line_neg;
    f.z0 = s * E;  // central velocity of the line exp(t (sE) Z)
    f.omega = z_gamma / (s * E);
    f.radius_sq = 0.0;
    f.length = std::abs(z_gamma);
    out.push_back(f);
  }
  return out;
}

std::vector<PeriodicFamily> central_spiral_families(double z_gamma, double E, double B,
                                                    double A, long max_abs_ell) {
  if (z_gamma == 0.0) throw std::invalid_argument("central class requires z_gamma != 0");
  if (!(E > 0) || !(A > 0))
    throw std::invalid_argument("central_spiral_families requires E > 0, A > 0");
  std::vector<PeriodicFamily> out;
  const double absB = std::abs(B);
  const double piA = kPi * A;
  const double sz = sgn(z_gamma);

  if (E > absB) {
    const double ca = 2.0 * E / (E + B);  // negative-root admissibility
    const double cb = 2.0 * E / (E - B);  // positive-root admissibility
    for (long k = 1; k <= max_abs_ell; ++k) {
      const long ell = static_cast<long>(sz) * k;
      const double ratio = z_gamma / (piA * static_cast<double>(ell));
      bool any = false;
      if (strictly_above(ratio, ca)) {
        const double z0 = -std::sqrt((E * E - B * B) / (ratio - 1.0));
        out.push_back(make_spiral(FamilyBranch::spiral_1a, ell, z0, E, B, A));
        any = true;
      }
      if (strictly_above(ratio, cb)) {
        const double z0 = std::sqrt((E * E - B * B) / (ratio - 1.0));
        out.push_back(make_spiral(FamilyBranch::spiral_1b, ell, z0, E, B, A));
        any = true;
      }
      if (!any) break;  // ratio shrinks with k; no further integers qualify
    }
    return out;
  }

  if (E < absB) {
    const double clo = 2.0 * E / (E - absB);
    const double chi = 2.0 * E / (E + absB);
    const FamilyBranch br = B > 0 ? FamilyBranch::spiral_2a : FamilyBranch::spiral_2b;
    const double sign = B > 0 ? -1.0 : 1.0;
    for (long k = 1; k <= max_abs_ell; ++k) {
      for (double ls : {+1.0, -1.0}) {
        const long ell = static_cast<long>(ls * sz) * k;
        const double ratio = z_gamma / (piA * static_cast<double>(ell));
        if (!strictly_above(ratio, clo) || !strictly_above(chi, ratio)) continue;
        const double z0 = sign * std::sqrt((E * E - B * B) / (ratio - 1.0));
        out.push_back(make_spiral(br, ell, z0, E, B, A));
      }
    }
    return out;
  }

  // E = |B|: families exist only when z_gamma/(pi A) is an integer; the z0
  // values form a continuum represented by a fixed grid.
  const double q = z_gamma / piA;
  if (!near_integer(q)) return out;
  const long ell = static_cast<long>(std::llround(q));
  if (ell == 0) return out;
  const bool pos = B > 0;
  const double lo = pos ? -2.0 * B : 0.0;
  const double hi = pos ? 0.0 : -2.0 * B;
  for (double z0 : continuum_grid(lo, hi))
    out.push_back(make_spiral(pos ? FamilyBranch::spiral_3a : FamilyBranch::spiral_3b,
                              ell, z0, E, B, A));
  return out;
}

LengthSet length_set(const FreeHomotopyClass& cls, double E, double B, double A,
                     long enumeration_cap) {
  if (!(E > 0) || !(A > 0))
    throw std::invalid_argument("length_set requires E > 0, A > 0");
  const double absB = std::abs(B);
  LengthSet out;
  std::vector<double> vals;
  if (cls.is_identity()) {
    if (E < absB) vals.push_back(2.0 * kPi * A / std::sqrt(B * B / (E * E) - 1.0));
  } else if (!cls.is_central()) {
    if (E > absB) vals.push_back(cls.v_norm / std::sqrt(1.0 - B * B / (E * E)));
  } else {
    auto fams = central_spiral_families(cls.z_gamma, E, B, A, enumeration_cap);
    for (const auto& f : fams) vals.push_back(f.length);
    vals.push_back(std::abs(cls.z_gamma));
    if (E < absB) {
      out.truncated = true;
    } else if (E == absB) {
      out.truncated = !fams.empty();
    } else {
      const double kmax = std::abs(cls.z_gamma) * (E + absB) / (kPi * A * 2.0 * E);
      out.truncated = kmax > static_cast<double>(enumeration_cap);
    }
  }
  std::sort(vals.begin(), vals.end());
  for (double v : vals) {
    if (!out.values.empty() &&
        std::abs(v - out.values.back()) <= 1e-9 * std::max(1.0, std::abs(v)))
      continue;
    out.values.push_back(v);
  }
  return out;
}

LengthBounds length_bounds(double z_gamma, double E, double B, double A) {
  if (z_gamma == 0.0) throw std::invalid_argument("length_bounds requires z_gamma != 0");
  if (!(E > 0) || !(A > 0))
    throw std::invalid_argument("length_bounds requires E > 0, A > 0");
  LengthBounds out;
  const double absB = std::abs(B);
  if (E > absB) {
    out.upper = std::abs(z_gamma) / std::sqrt(1.0 - B * B / (E * E));
    out.regime = "supercritical";
  } else if (E < absB) {
    out.lower = std::abs(z_gamma);
    out.regime = "subcritical";
  } else {
    out.lower = std::abs(z_gamma);
    out.regime = "critical";
  }
  return out;
}

std::vector<PeriodicFamily> tangent_spiral_classifier(double z_gamma, double E, double B,
                                                       double A, long max_abs_ell) {
  if (z_gamma == 0.0) throw std::invalid_argument("central class requires z_gamma != 0");
  if (B == 0.0)
    throw std::invalid_argument("tangent classifier requires B != 0 (mu undefined)");
  if (!(E > 0) || !(A > 0))
    throw std::invalid_argument("tangent classifier requires E > 0, A > 0");
  const double absB = std::abs(B);
  const double mu = E / absB;
  const double piA = kPi * A;
  const double sz = sgn(z_gamma);
  std::vector<PeriodicFamily> out;

  // Translate tangent data back to momentum data: z0 = z0_tan - B and
  // radius^2 = u0^2 + v0^2 = A * Ebar^2, with omega from the tangent-space
  // period formula 2 z_gamma A / (zeta_ell (z0_tan - B)).
  auto push_tangent = [&](long ell, double z0_tan, double energy_bar_sq) {
    const double z0 = z0_tan - B;
    const double zeta_ell = z_gamma / (kPi * static_cast<double>(ell));
    PeriodicFamily f;
    if (mu > 1.0)
      f.branch = z0 < 0 ? FamilyBranch::spiral_1a : FamilyBranch::spiral_1b;
    else
      f.branch = B > 0 ? FamilyBranch::spiral_2a : FamilyBranch::spiral_2b;
    f.ell = ell;
    f.z0 = z0;
    f.omega = 2.0 * z_gamma * A / (zeta_ell * (z0_tan - B));
    f.radius_sq = A * energy_bar_sq;
    f.length = E * std::abs(f.omega);
    out.push_back(f);
  };

  if (std::abs(mu - 1.0) <= 1e-12) {
    // Case 6: zeta_ell/A = 1, only when z_gamma/(pi A) is an integer;
    // z0_tan sweeps the open interval with squared radius E^2 - z0_tan^2.
    const double q = z_gamma / piA;
    if (!near_integer(q)) return out;
    const long ell = static_cast<long>(std::llround(q));
    if (ell == 0) return out;
    for (double z0 : continuum_grid(B > 0 ? -2.0 * B : 0.0, B > 0 ? 0.0 : -2.0 * B)) {
      const double z0_tan = z0 + B;
      PeriodicFamily f;
      f.branch = B > 0 ? FamilyBranch::spiral_3a : FamilyBranch::spiral_3b;
      f.ell = ell;
      f.z0 = z0;
      f.omega = 2.0 * z_gamma / (z0_tan - B);
      f.radius_sq = A * (E * E - z0_tan * z0_tan);
      f.length = E * std::abs(f.omega);
      out.push_back(f);
    }
    return out;
  }

  if (mu < 1.0) {
    // Case 1: -2mu/(1-mu) < zeta_ell/A < 2mu/(1+mu); plus branch only.
    const double lo = -2.0 * mu / (1.0 - mu);
    const double hi = 2.0 * mu / (1.0 + mu);
    for (long k = 1; k <= max_abs_ell; ++k) {
      for (double ls : {+1.0, -1.0}) {
        const long ell = static_cast<long>(ls * sz) * k;
        const double ratio = z_gamma / (piA * static_cast<double>(ell));
        if (!strictly_above(ratio, lo) || !strictly_above(hi, ratio)) continue;
        const double r = (mu * mu - 1.0) / (ratio - 1.0);
        const double sr = std::sqrt(r);
        const double eb2 = B * B * (r * (ratio - 2.0) + 2.0 * sr);
        push_tangent(ell, -B * (-1.0 + sr), eb2);
      }
    }
    return out;
  }

  // mu > 1 (cases 2-5): zeta_ell/A must exceed 2mu/(1+mu) > 0, so ell has
  // the sign of z_gamma and the admissible k range is finite.
  const double c1 = 2.0 * mu / (1.0 + mu);
  const double c2 = 2.0 * mu / (mu - 1.0);
  for (long k = 1; k <= max_abs_ell; ++k) {
    const long ell = static_cast<long>(sz) * k;
    const double ratio = z_gamma / (piA * static_cast<double>(ell));
    if (!strictly_above(ratio, c1)) break;
    if (std::abs(ratio - 2.0) <= 2e-9) {
      // Case 5: zeta_ell/A = 2 exactly (z_gamma in 2 pi A Z).
      const double rad_v = 2.0 * absB * std::sqrt(E * E - B * B);  // A(x0^2+y0^2)
      const double z0_tan = B - rad_v / (2.0 * B);
      PeriodicFamily f;
      f.branch = z0_tan - B < 0 ? FamilyBranch::spiral_1a : FamilyBranch::spiral_1b;
      f.ell = ell;
      f.z0 = z0_tan - B;
      f.omega = -sgn(B) * z_gamma / std::sqrt(E * E - B * B);
      f.radius_sq = A * rad_v;
      f.length = E * std::abs(f.omega);
      out.push_back(f);
      continue;
    }
    const double r = (mu * mu - 1.0) / (ratio - 1.0);
    const double sr = std::sqrt(r);
    // Cases 2 and 3 plus branch (also the plus half of case 4).
    push_tangent(ell, -B * (-1.0 + sr), B * B * (r * (ratio - 2.0) + 2.0 * sr));
    if (strictly_above(ratio, c2)) {
      // Case 4 minus branch.
      push_tangent(ell, -B * (-1.0 - sr), B * B * (r * (ratio - 2.0) - 2.0 * sr));
    }
  }
  return out;
}

bool resonance_check(const HeisGeodesic& geo, double omega, double tol) {
  geo.validate();
  for (int i = 0; i < geo.n(); ++i) {
    if (geo.u[i] * geo.u[i] + geo.v[i] * geo.v[i] == 0.0) continue;
    const double m = omega * geo.z0 / (2.0 * kPi * geo.A[i]);
    if (!near_integer(m, tol)) return false;
  }
  return true;
}

HeisGeodesic family_representative(const PeriodicFamily& fam, double B, double A) {
  HeisGeodesic geo;
  geo.A = Eigen::VectorXd::Constant(1, A);
  geo.B = B;
  geo.u = Eigen::VectorXd::Zero(1);
  geo.v = Eigen::VectorXd::Zero(1);
  switch (fam.branch) {
    case FamilyBranch::central_line_pos:
    case FamilyBranch::central_line_neg:
      geo.z0 = fam.z0 - B;  // stored z0 is the central velocity
      break;
    case FamilyBranch::noncentral_pos:
    case FamilyBranch::noncentral_neg:
      geo.z0 = 0.0;
      break;
    default:
      geo.z0 = fam.z0;
      geo.u[0] = std::sqrt(std::max(0.0, fam.radius_sq));
      break;
  }
  return geo;
}

double family_residual(const PeriodicFamily& fam, const FreeHomotopyClass& cls, double E,
                       double B, double A, int t_samples) {
  MetricTwoStepAlgebra alg = make_heisenberg(Eigen::VectorXd::Constant(1, A));
  HeisGeodesic geo = family_representative(fam, B, A);
  GroupElement gamma = alg.group_identity();
  if (fam.branch == FamilyBranch::noncentral_pos ||
      fam.branch == FamilyBranch::noncentral_neg) {
    // Straight representative: the conjugacy class of gamma sweeps the
    // center, so pick the conjugate hit by the geodesic itself.
    const double xdot = sgn(fam.omega) * std::sqrt((E * E - B * B) / A);
    geo.u[0] = A * xdot;
    gamma.coords.v[0] = fam.omega * xdot;
    gamma.coords.z[0] = B * fam.omega;
  } else if (cls.is_central()) {
    gamma.coords.z[0] = cls.z_gamma;
  }
  double worst = 0.0;
  for (int j = 0; j < t_samples; ++j) {
    const double t = (j + 0.37) * std::abs(fam.omega) / t_samples;
    const GroupElement lhs = alg.group_multiply(gamma, heis_eval(geo, t));
    const GroupElement rhs = heis_eval(geo, t + fam.omega);
    worst = std::max(worst, (lhs.coords - rhs.coords).full().norm());
  }
  return worst;
}

namespace {

// Allocation-free residual of gamma sigma(t) = sigma(t + omega) on h_1 for
// spiral candidates (u0, 0, z0) at energy E, with central gamma = exp(zg Z).
struct SpiralResidual {
  double A, B, E, zg;
  int t_samples;

  void eval(double u0, double z0, double t, double& x, double& y, double& z) const {
    const double th = z0 * t / A;
    x = (t / A) * u0 * sinc_q(th);
    y = (t / A) * u0 * versine_q(th);
    z = (z0 + B) * t + u0 * u0 * z0 * t * t * t * cubic_q(th) / (2.0 * A * A * A);
  }

  double operator()(double z0, double omega) const {
    const double r2 = A * (E * E - (z0 + B) * (z0 + B));
    if (r2 <= 0.0) return 1e9;
    const double u0 = std::sqrt(r2);
    const double span = std::max(1.0, std::abs(omega));
    double worst = 0.0;
    for (int j = 0; j < t_samples; ++j) {
      const double t = (j + 0.37) * span / t_samples;
      double x1, y1, z1, x2, y2, z2;
      eval(u0, z0, t, x1, y1, z1);
      eval(u0, z0, t + omega, x2, y2, z2);
      const double dx = x1 - x2, dy = y1 - y2, dz = z1 + zg - z2;
      worst = std::max(worst, std::sqrt(dx * dx + dy * dy + dz * dz));
    }
    return worst;
  }
};

// Nelder-Mead on (z0, omega). The residual's near-zero set is a curved
// narrow valley (resonance curve), where coordinate descent stalls; the
// reflecting simplex tracks it.
template <typename F>
void nelder_mead_2d(F f, double& z0, double& w, double step_z, double step_w,
                    int iters) {
  using Pt = std::array<double, 3>;  // z0, omega, value
  Pt s[3] = {{z0, w, f(z0, w)},
             {z0 + step_z, w, f(z0 + step_z, w)},
             {z0, w + step_w, f(z0, w + step_w)}};
  auto by_value = [](const Pt& a, const Pt& b) { return a[2] < b[2]; };
  for (int it = 0; it < iters; ++it) {
    std::sort(s, s + 3, by_value);
    if (s[2][2] - s[0][2] < 1e-14 && s[0][2] < 1e-9) break;
    const double cz = (s[0][0] + s[1][0]) / 2, cw = (s[0][1] + s[1][1]) / 2;
    const double rz = 2 * cz - s[2][0], rw = 2 * cw - s[2][1];
    const double fr = f(rz, rw);
    if (fr < s[0][2]) {
      const double ez = 3 * cz - 2 * s[2][0], ew = 3 * cw - 2 * s[2][1];
      const double fe = f(ez, ew);
      s[2] = fe < fr ? Pt{ez, ew, fe} : Pt{rz, rw, fr};
    } else if (fr < s[1][2]) {
      s[2] = {rz, rw, fr};
    } else {
      const double kz = cz + 0.5 * (s[2][0] - cz), kw = cw + 0.5 * (s[2][1] - cw);
      const double fk = f(kz, kw);
      if (fk < s[2][2]) {
        s[2] = {kz, kw, fk};
      } else {
        for (int i = 1; i < 3; ++i) {
          s[i][0] = s[0][0] + 0.5 * (s[i][0] - s[0][0]);
          s[i][1] = s[0][1] + 0.5 * (s[i][1] - s[0][1]);
          s[i][2] = f(s[i][0], s[i][1]);
        }
      }
    }
  }
  std::sort(s, s + 3, by_value);
  z0 = s[0][0];
  w = s[0][1];
}

// Golden-section minimization of a 1-d slice.
template <typename F>
double golden_min(F f, double lo, double hi, int iters = 60) {
  const double phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 < f2 ? x1 : x2;
}

}  // namespace

std::vector<PeriodicFamily> brute_force_periodic_search(const MagneticSystem& sys,
                                                        const GroupElement& gamma,
                                                        double E,
                                                        const SearchGrid& grid) {
  const auto& alg = sys.alg();
  if (alg.dim_v() != 2 || alg.dim_z() != 1)
    throw std::invalid_argument("brute_force_periodic_search expects h_1");
  const Eigen::MatrixXd& G = alg.gram();
  const double A = G(0, 0);
  if (std::abs(G(1, 1) - A) > 1e-9 || std::abs(G(2, 2) - 1.0) > 1e-9)
    throw std::invalid_argument("brute_force_periodic_search expects a normalized metric");
  const double B = sys.B() * sys.zeta_m().z[0];
  if (!(E > 0)) throw std::invalid_argument("E must be positive");

  const double vno = std::sqrt(A) * gamma.coords.v.norm();  // metric |V_gamma|
  const double zg = gamma.coords.z[0];
  std::vector<PeriodicFamily> hits;

  if (vno > 1e-12) {
    // Noncentral class: the translation by V_gamma must be realized by the
    // v part of the curve for every t; the conjugacy class absorbs the
    // center, so the residual is measured on v parts only.
    const Eigen::Vector2d w = gamma.coords.v;
    const Eigen::Vector2d wh = w / w.norm();
    if (E > std::abs(B)) {
      const double xdot = std::sqrt((E * E - B * B) / A);
      for (double s : {+1.0, -1.0}) {
        const double omega =
            golden_min([&](double om) { return (w - om * s * xdot * wh).norm(); },
                       -grid.omega_window, grid.omega_window, 80);
        const double res = (w - omega * s * xdot * wh).norm();
        if (res < grid.accept_residual && std::abs(omega) <= grid.omega_window) {
          PeriodicFamily f;
          f.branch = omega > 0 ? FamilyBranch::noncentral_pos
                               : FamilyBranch::noncentral_neg;
          f.z0 = 0.0;
          f.omega = omega;
          f.radius_sq = 0.0;
          f.length = E * std::abs(omega);
          hits.push_back(f);
        }
      }
    }
    // Spiral scan for false-hit detection: a bounded rotating v part can
    // never realize a fixed nonzero translation for all t.
    SpiralResidual res{A, B, E, 0.0, grid.t_samples};
    for (int i = 1; i < grid.z0_steps; ++i) {
      const double z0 = -E - B + (2.0 * E) * i / grid.z0_steps;
      const double r2 = A * (E * E - (z0 + B) * (z0 + B));
      if (r2 <= 0.0) continue;
      const double u0 = std::sqrt(r2);
      for (int j = 1; j <= grid.omega_steps; ++j) {
        const double omega =
            grid.omega_window * (2.0 * j - grid.omega_steps) / grid.omega_steps;
        if (std::abs(omega) < 1e-6) continue;
        double worst = 0.0;
        for (int m = 0; m < grid.t_samples; ++m) {
          const double t = (m + 0.37) * std::max(1.0, std::abs(omega)) / grid.t_samples;
          double x1, y1, z1, x2, y2, z2;
          res.eval(u0, z0, t, x1, y1, z1);
          res.eval(u0, z0, t + omega, x2, y2, z2);
          const double dx = w[0] + x1 - x2, dy = w[1] + y1 - y2;
          worst = std::max(worst, std::sqrt(dx * dx + dy * dy));
        }
        if (worst < grid.accept_residual) {
          PeriodicFamily f;
          f.branch = FamilyBranch::spiral_1a;
          f.z0 = z0;
          f.omega = omega;
          f.radius_sq = r2;
          f.length = E * std::abs(omega);
          hits.push_back(f);
        }
      }
    }
    return hits;
  }

  // Central or identity class: coarse scan over (z0, omega), refine local
  // minima by coordinate descent, accept near-zero residuals.
  SpiralResidual res{A, B, E, zg, grid.t_samples};
  const double z_lo = -E - B, z_hi = E - B;
  const int nz = grid.z0_steps, nw = grid.omega_steps;
  Eigen::MatrixXd R(nz - 1, nw);
  std::vector<double> zs(nz - 1), ws(nw);
  for (int i = 1; i < nz; ++i) zs[i - 1] = z_lo + (z_hi - z_lo) * i / nz;
  for (int j = 0; j < nw; ++j) {
    double w = grid.omega_window * (2.0 * (j + 1) - nw) / nw;
    if (std::abs(w) < 1e-9) w = 1e-9;
    ws[j] = w;
  }
  for (int i = 0; i < nz - 1; ++i)
    for (int j = 0; j < nw; ++j) R(i, j) = res(zs[i], ws[j]);

  struct Seed {
    int i, j;
    double val;
  };
  std::vector<Seed> seeds;
  for (int i = 0; i < nz - 1; ++i)
    for (int j = 0; j < nw; ++j) {
      const double v = R(i, j);
      bool locmin = true;
      for (int di = -1; di <= 1 && locmin; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          const int ii = i + di, jj = j + dj;
          if (ii < 0 || ii >= nz - 1 || jj < 0 || jj >= nw || (di == 0 && dj == 0))
            continue;
          if (R(ii, jj) < v) {
            locmin = false;
            break;
          }
        }
      if (locmin) seeds.push_back({i, j, v});
    }
  std::sort(seeds.begin(), seeds.end(),
            [](const Seed& a, const Seed& b) { return a.val < b.val; });
  if (seeds.size() > 60) seeds.resize(60);

  const double dz = (z_hi - z_lo) / nz;
  const double dw = 2.0 * grid.omega_window / nw;
  for (const auto& sd : seeds) {
    double z0 = zs[sd.i], w = ws[sd.j];
    nelder_mead_2d([&](double a, double b) { return res(a, b); }, z0, w, 0.5 * dz,
                   0.5 * dw, 400);
    const double r = res(z0, w);
    if (r >= grid.accept_residual) continue;
    // Any resonant spiral has |omega| = 2 pi A |ell| / |z0| with |z0| <
    // E + |B|; below that the residual vanishes only in the trivial
    // omega -> 0 limit of the identity class.
    if (std::abs(w) < kPi * A / (E + std::abs(B))) continue;
    PeriodicFamily f;
    const double absB = std::abs(B);
    if (std::abs(zg) < 1e-12) {
      f.branch = FamilyBranch::contractible;
    } else if (E > absB) {
      f.branch = z0 < 0 ? FamilyBranch::spiral_1a : FamilyBranch::spiral_1b;
      f.ell = std::llround(w * z0 / (2.0 * kPi * A));
    } else if (E < absB) {
      f.branch = B > 0 ? FamilyBranch::spiral_2a : FamilyBranch::spiral_2b;
      f.ell = std::llround(w * z0 / (2.0 * kPi * A));
    } else {
      f.branch = B > 0 ? FamilyBranch::spiral_3a : FamilyBranch::spiral_3b;
      f.ell = std::llround(w * z0 / (2.0 * kPi * A));
    }
    f.z0 = z0;
    f.omega = w;
    f.radius_sq = A * (E * E - (z0 + B) * (z0 + B));
    f.length = E * std::abs(w);
    // Deduplicate: same hit found from several seeds, or (identity class)
    // an omega multiple of a previously found fundamental period.
    bool dup = false;
    for (const auto& h : hits) {
      if (std::abs(h.z0 - f.z0) < 10 * dz &&
          (std::abs(h.omega - f.omega) < 1e-5 ||
           (std::abs(zg) < 1e-12 && f.omega * h.omega > 0 &&
            near_integer(f.omega / h.omega, 1e-6))))
        dup = true;
    }
    if (!dup) hits.push_back(f);
  }

  if (std::abs(zg) > 1e-12) {
    // Central lines exp(t(+-E)Z) are isolated zero-radius candidates the
    // spiral scan cannot see.
    for (double s : {+1.0, -1.0}) {
      const double omega = zg / (s * E);
      if (std::abs(omega) > grid.omega_window) continue;
      PeriodicFamily f;
      f.branch = s > 0 ? FamilyBranch::central_line_pos : FamilyBranch::central_line_neg;
      f.z0 = s * E;
      f.omega = omega;
      f.radius_sq = 0.0;
      f.length = std::abs(zg);
      hits.push_back(f);
    }
  }
  return hits;
}

}  // namespace magflow
