#include "magflow/magnetic.hpp"

#include <cmath>
#include <stdexcept>

namespace magflow {

namespace {

Covector default_zeta(const MetricTwoStepAlgebra& alg) {
  Covector zeta = Covector::zero(alg.dim_v(), alg.dim_z());
  zeta.z[0] = 1.0;
  const double n = alg.co_norm(zeta);
  zeta.z /= n;
  return zeta;
}

}  // namespace

MagneticSystem::MagneticSystem(MetricTwoStepAlgebra alg, double B, Covector zeta_m)
    : alg_(std::move(alg)), B_(B), zeta_m_(std::move(zeta_m)) {
  alg_.check_covector(zeta_m_);
  if (zeta_m_.v.cwiseAbs().maxCoeff() > 0.0)
    throw std::invalid_argument("zeta_m must be central");
  if (std::abs(alg_.co_norm(zeta_m_) - 1.0) > 1e-12)
    throw std::invalid_argument("zeta_m must be a unit covector");
  Zm_ = alg_.sharp(zeta_m_);
}

MagneticSystem::MagneticSystem(MetricTwoStepAlgebra alg, double B)
    : alg_(std::move(alg)), B_(B), zeta_m_(default_zeta(alg_)) {
  Zm_ = alg_.sharp(zeta_m_);
}

ExactFormData exact_form_normalize(const MetricTwoStepAlgebra& alg, const Covector& theta) {
  alg.check_covector(theta);
  Covector central = Covector::zero(alg.dim_v(), alg.dim_z());
  central.z = theta.z;
  const double B = alg.co_norm(central);
  if (B < 1e-300) {
    return {0.0, default_zeta(alg), true};
  }
  central.z /= B;
  return {B, central, false};
}

AlgebraVector lorentz_force(const MagneticSystem& sys, const AlgebraVector& v) {
  const auto& alg = sys.alg();
  alg.check_vector(v);
  AlgebraVector Zc = AlgebraVector::zero(alg.dim_v(), alg.dim_z());
  Zc.z = -sys.B() * sys.Z_m().z;
  AlgebraVector out = AlgebraVector::zero(alg.dim_v(), alg.dim_z());
  out.v = alg.j_map(Zc) * v.v;
  return out;
}

double hamiltonian(const MagneticSystem& sys, const Covector& p) {
  Covector q = p + sys.zeta_m() * sys.B();
  const double n = sys.alg().co_norm(q);
  return 0.5 * n * n;
}

AlgebraVector dh(const MagneticSystem& sys, const Covector& p) {
  return sys.alg().sharp(p + sys.zeta_m() * sys.B());
}

Covector euler_field(const MagneticSystem& sys, const Covector& p) {
  const auto& alg = sys.alg();
  alg.check_covector(p);
  // <E_h(p), Y> = <p, [sharp(p), Y]>; only the non-central part of sharp(p)
  // enters, which is what makes the field independent of B.
  const AlgebraVector X = alg.sharp(p);
  Covector out = Covector::zero(alg.dim_v(), alg.dim_z());
  for (int a = 0; a < alg.dim_v(); ++a) {
    double acc = 0.0;
    for (int k = 0; k < alg.dim_z(); ++k)
      acc += p.z[k] * X.v.dot(alg.structure_matrix(k).col(a));
    out.v[a] = acc;
  }
  return out;
}

MagneticSystem system_from_json(const nlohmann::json& j) {
  MetricTwoStepAlgebra alg = algebra_from_json(j.at("algebra"));
  const double B = j.at("B").get<double>();
  if (j.contains("zeta_m")) {
    const auto& zj = j.at("zeta_m");
    if (static_cast<int>(zj.size()) != alg.dim_z())
      throw std::invalid_argument("zeta_m must list dim_z central components");
    Covector zeta = Covector::zero(alg.dim_v(), alg.dim_z());
    for (int k = 0; k < alg.dim_z(); ++k) zeta.z[k] = zj[k].get<double>();
    const double n = alg.co_norm(zeta);
    if (n < 1e-300) throw std::invalid_argument("zeta_m must be nonzero");
    zeta.z /= n;
    return MagneticSystem(std::move(alg), B, std::move(zeta));
  }
  return MagneticSystem(std::move(alg), B);
}

}  // namespace magflow
