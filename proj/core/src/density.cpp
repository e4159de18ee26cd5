#include "magflow/density.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace magflow {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

DensityReport admissible_z0(double z_bar, double E, double B, double A, long bound) {
  if (!(E > std::abs(B))) throw std::invalid_argument("density requires E > |B|");
  if (!(z_bar > 0)) throw std::invalid_argument("density requires z_bar > 0");
  if (!(A > 0)) throw std::invalid_argument("density requires A > 0");
  if (bound < 1) throw std::invalid_argument("density requires bound >= 1");

  DensityReport rep;
  rep.bound = bound;
  rep.lo = -E - B;
  rep.hi = E - B;

  const double E2B2 = E * E - B * B;
  // Negative branch: z0 = -sqrt((E^2-B^2)/(h z_bar/(pi A ell) - 1)) whenever
  // h z_bar/(pi A ell) > 2E/(E+B); mirrored positive branch with 2E/(E-B).
  const double ca = 2.0 * E / (E + B);
  const double cb = 2.0 * E / (E - B);
  for (long ell = 1; ell <= bound; ++ell) {
    const double denom = kPi * A * static_cast<double>(ell);
    for (long h = 1; h <= bound; ++h) {
      const double ratio = static_cast<double>(h) * z_bar / denom;
      if (ratio > ca) {
        const double z0 = -std::sqrt(E2B2 / (ratio - 1.0));
        rep.admissible_z0.push_back(z0);
        rep.witnesses.push_back({static_cast<double>(h), static_cast<double>(ell), z0});
      }
      if (ratio > cb) {
        const double z0 = std::sqrt(E2B2 / (ratio - 1.0));
        rep.admissible_z0.push_back(z0);
        rep.witnesses.push_back({static_cast<double>(h), static_cast<double>(ell), z0});
      }
    }
  }
  std::sort(rep.admissible_z0.begin(), rep.admissible_z0.end());
  // Each branch fills its own half-interval: (lo, 0) for the negative set,
  // (0, hi) for the positive one. The gap statistic measures that fill with
  // the outer endpoint as sentinel. The hole around z0 = 0 is excluded: its
  // radius is sqrt((E^2-B^2) pi A/(z_bar h_max)), set by the enumeration cap
  // rather than by the spacing of the sets, and it vanishes only as the cap
  // grows. An empty branch counts as one gap spanning its half-interval.
  double gap = 0.0;
  double prev = rep.lo;
  bool any_neg = false;
  for (double z : rep.admissible_z0) {
    if (z >= 0.0) break;
    gap = std::max(gap, z - prev);
    prev = z;
    any_neg = true;
  }
  if (!any_neg) gap = std::max(gap, 0.0 - rep.lo);
  double next = rep.hi;
  bool any_pos = false;
  for (auto it = rep.admissible_z0.rbegin(); it != rep.admissible_z0.rend(); ++it) {
    if (*it <= 0.0) break;
    gap = std::max(gap, next - *it);
    next = *it;
    any_pos = true;
  }
  if (!any_pos) gap = std::max(gap, rep.hi);
  rep.max_gap = gap;
  return rep;
}

std::vector<std::pair<long, double>> density_trend(double z_bar, double E, double B,
                                                   double A,
                                                   const std::vector<long>& bounds) {
  std::vector<std::pair<long, double>> out;
  out.reserve(bounds.size());
  for (long b : bounds) out.emplace_back(b, admissible_z0(z_bar, E, B, A, b).max_gap);
  return out;
}

}  // namespace magflow
