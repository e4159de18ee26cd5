#ifndef MAGFLOW_SPECTRUM_HPP
#define MAGFLOW_SPECTRUM_HPP

#include <optional>
#include <string>
#include <vector>

#include "magflow/geodesics.hpp"

namespace magflow {

/// Free homotopy class invariant of gamma = exp(V + z Z) on a quotient of
/// h_1: lengths depend only on (|V|, z), and the conjugacy class of a
/// noncentral element sweeps the whole center.
struct FreeHomotopyClass {
  double v_norm = 0.0;  // |V_gamma|, metric units, >= 0
  double z_gamma = 0.0;

  bool is_identity() const { return v_norm == 0.0 && z_gamma == 0.0; }
  bool is_central() const { return v_norm == 0.0 && z_gamma != 0.0; }
};

enum class FamilyBranch {
  contractible,
  noncentral_pos,
  noncentral_neg,
  central_line_pos,
  central_line_neg,
  spiral_1a,  // E > |B|, negative z0 root
  spiral_1b,  // E > |B|, positive z0 root
  spiral_2a,  // E < |B|, B > 0
  spiral_2b,  // E < |B|, B < 0
  spiral_3a,  // E = B > 0, z0 grid in (-2B, 0)
  spiral_3b,  // E = -B, B < 0, z0 grid in (0, -2B)
};

std::string branch_name(FamilyBranch b);

/// One classified family of gamma-periodic geodesics. For spiral branches
/// z0 is the initial central momentum and radius_sq = u0^2 + v0^2 of the
/// family circle; for central-line branches z0 holds the central velocity
/// (+-E) of the line, with radius_sq = 0.
struct PeriodicFamily {
  FamilyBranch branch;
  std::optional<long> ell;
  double z0 = 0.0;
  double omega = 0.0;
  double radius_sq = 0.0;
  double length = 0.0;
};

struct LengthSet {
  std::vector<double> values;  // strictly increasing after dedup
  bool truncated = false;
};

/// Closed contractible (gamma = identity) families: nonempty iff
/// 0 < E < |B|. For n > 1 with unequal A_i, one single-active-mode family
/// per distinct A_i.
std::vector<PeriodicFamily> contractible_families(double E, double B,
                                                  const Eigen::VectorXd& A_list);

/// Noncentral classes: two straight families iff E > |B|.
std::vector<PeriodicFamily> noncentral_families(const FreeHomotopyClass& cls, double E,
                                                double B);

/// Central lines exp(t(+-E)Z) translated by gamma = exp(z_gamma Z).
std::vector<PeriodicFamily> central_line_families(double z_gamma, double E);

/// Spiraling gamma-periodic families for central gamma on h_1, enumerated
/// over the admissible resonance integers ell; for E = |B| (continuum case)
/// a deterministic 33-point z0 grid represents each branch.
std::vector<PeriodicFamily> central_spiral_families(double z_gamma, double E, double B,
                                                    double A, long max_abs_ell = 10000);

LengthSet length_set(const FreeHomotopyClass& cls, double E, double B, double A,
                     long enumeration_cap = 10000);

struct LengthBounds {
  std::optional<double> upper;
  std::optional<double> lower;
  std::string regime;  // "supercritical", "subcritical", "critical"
};

LengthBounds length_bounds(double z_gamma, double E, double B, double A);

/// Independent classifier of the central spiraling families through the
/// tangent-space six-case analysis (mu = E/|B|, zeta_ell = z_gamma/(pi ell)),
/// translated back to momentum data. Rejects B = 0.
std::vector<PeriodicFamily> tangent_spiral_classifier(double z_gamma, double E, double B,
                                                       double A, long max_abs_ell = 10000);

/// Necessary resonance condition: omega*z0/A_i in 2*pi*Z for every active mode.
bool resonance_check(const HeisGeodesic& geo, double omega, double tol = 1e-9);

struct SearchGrid {
  int z0_steps = 80;
  int omega_steps = 400;
  double omega_window = 40.0;  // search |omega| <= window
  int t_samples = 8;
  double accept_residual = 1e-7;
};

/// Brute-force oracle on h_1: dense scan over initial momenta at energy E
/// and candidate periods, accepting (z0, omega) pairs whose translation
/// residual vanishes. Central gamma and identity are handled by momentum
/// scan; noncentral gamma by the straight-geodesic construction.
std::vector<PeriodicFamily> brute_force_periodic_search(const MagneticSystem& sys,
                                                        const GroupElement& gamma,
                                                        double E,
                                                        const SearchGrid& grid);

/// Direct verification of a classified family: builds a representative
/// geodesic and gamma and returns the max log-coordinate residual of
/// gamma*sigma(t) - sigma(t + omega) over sampled t.
double family_residual(const PeriodicFamily& fam, const FreeHomotopyClass& cls, double E,
                       double B, double A, int t_samples = 16);

/// The representative geodesic used by family_residual.
HeisGeodesic family_representative(const PeriodicFamily& fam, double B, double A);

}  // namespace magflow

#endif
