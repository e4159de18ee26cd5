#ifndef MAGFLOW_DENSITY_HPP
#define MAGFLOW_DENSITY_HPP

#include <array>
#include <utility>
#include <vector>

namespace magflow {

/// Admissible initial central momenta of gamma-periodic spirals with
/// gamma ranging over the central lattice powers exp(h z_bar Z).
struct DensityReport {
  long bound = 0;
  double lo = 0.0, hi = 0.0;  // (-E-B, E-B)
  std::vector<double> admissible_z0;  // sorted
  double max_gap = 0.0;
  /// (h, ell, z0) triples behind admissible_z0, for verification sampling.
  std::vector<std::array<double, 3>> witnesses;
};

/// Enumerate both branch sets of admissible z0 for h, ell in {1..bound}.
DensityReport admissible_z0(double z_bar, double E, double B, double A, long bound);

std::vector<std::pair<long, double>> density_trend(double z_bar, double E, double B,
                                                   double A,
                                                   const std::vector<long>& bounds);

}  // namespace magflow

#endif
