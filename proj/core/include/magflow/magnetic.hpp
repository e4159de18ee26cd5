#ifndef MAGFLOW_MAGNETIC_HPP
#define MAGFLOW_MAGNETIC_HPP

#include <nlohmann/json.hpp>

#include "magflow/algebra.hpp"

namespace magflow {

/// An exact left-invariant magnetic field d(B zeta_m) on a metric two-step
/// group: field strength B and a unit central covector zeta_m.
class MagneticSystem {
 public:
  MagneticSystem(MetricTwoStepAlgebra alg, double B, Covector zeta_m);
  /// Defaults zeta_m to the normalized first central dual basis vector.
  MagneticSystem(MetricTwoStepAlgebra alg, double B);

  const MetricTwoStepAlgebra& alg() const { return alg_; }
  double B() const { return B_; }
  const Covector& zeta_m() const { return zeta_m_; }
  /// Z_m = sharp(zeta_m).
  const AlgebraVector& Z_m() const { return Zm_; }

 private:
  MetricTwoStepAlgebra alg_;
  double B_;
  Covector zeta_m_;
  AlgebraVector Zm_;
};

struct ExactFormData {
  double B;
  Covector zeta_m;
  bool degenerate;  // true when the central part of theta vanished
};

/// Split an arbitrary potential covector theta into field strength and unit
/// central direction; the non-central part of theta is closed and dropped.
ExactFormData exact_form_normalize(const MetricTwoStepAlgebra& alg, const Covector& theta);

/// Lorentz force F = j(-B Z_m) on the non-central part, zero on the center.
AlgebraVector lorentz_force(const MagneticSystem& sys, const AlgebraVector& v);

/// Reduced Hamiltonian h(p) = (1/2)|p + B zeta_m|^2.
double hamiltonian(const MagneticSystem& sys, const Covector& p);

/// dh_p = sharp(p + B zeta_m).
AlgebraVector dh(const MagneticSystem& sys, const Covector& p);

/// Euler vector field E_h(p) = -ad*_{dh_p} p on the dual algebra.
/// Independent of B; central component always zero.
Covector euler_field(const MagneticSystem& sys, const Covector& p);

MagneticSystem system_from_json(const nlohmann::json& j);

}  // namespace magflow

#endif
