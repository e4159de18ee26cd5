#ifndef MAGFLOW_LATTICE_HPP
#define MAGFLOW_LATTICE_HPP

#include <map>
#include <string>
#include <vector>

#include "magflow/spectrum.hpp"

namespace magflow {

/// Cocompact lattice in the three-dimensional Heisenberg group, given by
/// generator log-coordinates; z_bar generates the central sublattice.
struct Lattice {
  std::vector<GroupElement> generators;
  double z_bar = 0.0;  // derived, > 0
};

Lattice make_lattice(const std::vector<Eigen::Vector3d>& generator_coords);

/// Smallest positive central log-coordinate generated by commutators of the
/// generators (plus any central generators themselves).
double central_generator(const Lattice& lat);

/// Class key after rounding: (v_norm, z_gamma) with the central coordinate
/// discarded for noncentral classes (the conjugacy class sweeps the center).
struct ClassKey {
  double v_norm = 0.0;
  double z_gamma = 0.0;
  bool operator<(const ClassKey& o) const {
    if (v_norm != o.v_norm) return v_norm < o.v_norm;
    return z_gamma < o.z_gamma;
  }
  bool operator==(const ClassKey& o) const {
    return v_norm == o.v_norm && z_gamma == o.z_gamma;
  }
};

/// Free homotopy classes of words of length <= word_len in the generators
/// and their inverses; v norms are metric norms for the parameter A.
std::vector<FreeHomotopyClass> enumerate_classes(const Lattice& lat, int word_len,
                                                 double A = 1.0);

struct MarkedSpectrum {
  std::map<ClassKey, LengthSet> entries;
  double E = 0.0;
  long cap = 0;
};

MarkedSpectrum marked_spectrum(const Lattice& lat, double E, double B, double A,
                               int word_len, long cap);

struct MlsReport {
  bool equal = false;
  std::vector<std::string> lines;
  std::string first_differing_key;
};

/// Compare two marked spectra under a bijective marking of class keys.
MlsReport compare_mls(const MarkedSpectrum& s1, const MarkedSpectrum& s2,
                      const std::map<ClassKey, ClassKey>& marking);

/// Word-induced marking: identical words in the two generator lists give
/// corresponding classes. Requires equal generator counts.
std::map<ClassKey, ClassKey> natural_marking(const Lattice& l1, const Lattice& l2,
                                             int word_len, double A1 = 1.0,
                                             double A2 = 1.0);

/// sup over h in {1..h_max} of max(L([exp(h z_bar Z)]; E))/h; converges to
/// z_bar/sqrt(1 - B^2/E^2) from below.
double central_rigidity_statistic(const Lattice& lat, double E, double B, double A,
                                  long h_max);

struct MarkingDecomposition {
  Eigen::Matrix2d R1;
  Eigen::RowVector2d R2;
  double S = 0.0;
  bool is_isometric_pair = false;
};

/// Block decomposition of an automorphism of the 3-dim Heisenberg algebra
/// (bracket equivariance checked); isometric pair iff R1 is orthogonal for
/// the A-scaled metric and |S| = 1.
MarkingDecomposition marking_decompose(const Eigen::Matrix3d& phi_star, double A = 1.0);

ClassKey round_key(double v_norm, double z_gamma);

}  // namespace magflow

#endif
