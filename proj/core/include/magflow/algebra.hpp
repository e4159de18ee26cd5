#ifndef MAGFLOW_ALGEBRA_HPP
#define MAGFLOW_ALGEBRA_HPP

#include <Eigen/Dense>
#include <nlohmann/json.hpp>
#include <vector>

namespace magflow {

/// Element of a two-step nilpotent Lie algebra, split into the
/// non-central part v and the central part z (exponential coordinates).
struct AlgebraVector {
  Eigen::VectorXd v;
  Eigen::VectorXd z;

  AlgebraVector() = default;
  AlgebraVector(Eigen::VectorXd v_, Eigen::VectorXd z_)
      : v(std::move(v_)), z(std::move(z_)) {}
  static AlgebraVector zero(int dim_v, int dim_z) {
    return {Eigen::VectorXd::Zero(dim_v), Eigen::VectorXd::Zero(dim_z)};
  }

  Eigen::VectorXd full() const {
    Eigen::VectorXd out(v.size() + z.size());
    out << v, z;
    return out;
  }
  static AlgebraVector from_full(const Eigen::VectorXd& w, int dim_v) {
    return {w.head(dim_v), w.tail(w.size() - dim_v)};
  }

  AlgebraVector operator+(const AlgebraVector& o) const { return {v + o.v, z + o.z}; }
  AlgebraVector operator-(const AlgebraVector& o) const { return {v - o.v, z - o.z}; }
  AlgebraVector operator*(double s) const { return {v * s, z * s}; }
  AlgebraVector operator-() const { return {-v, -z}; }
};

/// Element of the dual algebra; components against the dual basis,
/// with the same v/z split.
struct Covector {
  Eigen::VectorXd v;
  Eigen::VectorXd z;

  Covector() = default;
  Covector(Eigen::VectorXd v_, Eigen::VectorXd z_)
      : v(std::move(v_)), z(std::move(z_)) {}
  static Covector zero(int dim_v, int dim_z) {
    return {Eigen::VectorXd::Zero(dim_v), Eigen::VectorXd::Zero(dim_z)};
  }

  Eigen::VectorXd full() const {
    Eigen::VectorXd out(v.size() + z.size());
    out << v, z;
    return out;
  }
  static Covector from_full(const Eigen::VectorXd& w, int dim_v) {
    return {w.head(dim_v), w.tail(w.size() - dim_v)};
  }

  Covector operator+(const Covector& o) const { return {v + o.v, z + o.z}; }
  Covector operator-(const Covector& o) const { return {v - o.v, z - o.z}; }
  Covector operator*(double s) const { return {v * s, z * s}; }

  /// Natural pairing with an algebra vector.
  double pair(const AlgebraVector& X) const { return v.dot(X.v) + z.dot(X.z); }
};

/// Group element stored by its logarithm (exp is a global diffeomorphism
/// on simply connected two-step groups).
struct GroupElement {
  AlgebraVector coords;

  GroupElement() = default;
  explicit GroupElement(AlgebraVector c) : coords(std::move(c)) {}
  static GroupElement identity(int dim_v, int dim_z) {
    return GroupElement(AlgebraVector::zero(dim_v, dim_z));
  }
};

struct BracketTriplet {
  int i, j, k;
  double value;
};

/// Metric two-step nilpotent Lie algebra: structure constants for
/// [e_i, e_j] = sum_k c_ijk f_k (e spanning the non-central complement,
/// f spanning the center) together with a positive definite Gram matrix
/// on the basis (e_1..e_dv, f_1..f_dz).
class MetricTwoStepAlgebra {
 public:
  MetricTwoStepAlgebra(int dim_v, int dim_z,
                       const std::vector<BracketTriplet>& brackets,
                       Eigen::MatrixXd gram);

  int dim_v() const { return dv_; }
  int dim_z() const { return dz_; }
  int dim() const { return dv_ + dz_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::MatrixXd& gram_inverse() const { return gram_inv_; }
  /// Structure constant matrix for central coordinate k: ([e_i,e_j])_k.
  const Eigen::MatrixXd& structure_matrix(int k) const { return c_[k]; }

  AlgebraVector bracket(const AlgebraVector& X, const AlgebraVector& Y) const;

  GroupElement group_multiply(const GroupElement& a, const GroupElement& b) const;
  GroupElement group_inverse(const GroupElement& a) const;
  GroupElement group_identity() const { return GroupElement::identity(dv_, dz_); }

  /// Skew map j(Z) on the non-central complement, g(j(Z)V1,V2)=g([V1,V2],Z).
  /// Rejects input with a nonzero v part.
  Eigen::MatrixXd j_map(const AlgebraVector& Z) const;

  AlgebraVector sharp(const Covector& p) const;
  Covector flat(const AlgebraVector& X) const;

  double inner(const AlgebraVector& X, const AlgebraVector& Y) const;
  double norm(const AlgebraVector& X) const;
  /// Dual inner product of covectors.
  double co_inner(const Covector& p, const Covector& q) const;
  double co_norm(const Covector& p) const;

  /// Levi-Civita connection of the left-invariant metric evaluated on
  /// left-invariant fields.
  AlgebraVector levi_civita(const AlgebraVector& X, const AlgebraVector& Y) const;

  void check_vector(const AlgebraVector& X) const;
  void check_covector(const Covector& p) const;

 private:
  int dv_, dz_;
  std::vector<Eigen::MatrixXd> c_;  // dz matrices of size dv x dv, skew
  Eigen::MatrixXd gram_, gram_inv_;
};

struct HeisNormalization {
  Eigen::MatrixXd automorphism;  // column-action matrix on (X_1..X_n, Y_1..Y_n, Z)
  Eigen::VectorXd A;             // metric parameters, ascending
};

/// Given an arbitrary SPD Gram matrix on the (2n+1)-dim Heisenberg algebra
/// with the standard brackets [X_i, Y_i] = Z, produce an automorphism whose
/// pulled-back metric is diag(A_1..A_n, A_1..A_n, 1).
HeisNormalization normalize_heisenberg_metric(int n, const Eigen::MatrixXd& gram);

/// True iff j(Z)^2 = -|Z|^2 I on the complement for all central Z
/// (checked on basis vectors and pairwise sums; enough by polarization).
bool is_heisenberg_type(const MetricTwoStepAlgebra& alg, double tol = 1e-9);

/// Heisenberg algebra h_n with |X_i|^2 = |Y_i|^2 = A_i, |Z| = 1,
/// basis order (X_1..X_n, Y_1..Y_n, Z).
MetricTwoStepAlgebra make_heisenberg(const Eigen::VectorXd& A);
MetricTwoStepAlgebra make_heisenberg(int n, const Eigen::MatrixXd& gram);

/// The six-dimensional Heisenberg-type algebra with two-dimensional center:
/// [X1,X2]=Z1, [X1,X3]=Z2, [X2,X4]=-Z2, [X3,X4]=Z1, orthonormal basis.
MetricTwoStepAlgebra make_ht_example();

MetricTwoStepAlgebra algebra_from_json(const nlohmann::json& j);

}  // namespace magflow

#endif
