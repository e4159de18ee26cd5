#include "magflow/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace magflow {

namespace {

// Cholesky with an explicit pivot tolerance so that near-singular input is
// rejected rather than silently factorized.
void require_spd(const Eigen::MatrixXd& G, double pivot_tol = 1e-12) {
  if (G.rows() != G.cols()) throw std::invalid_argument("gram matrix not square");
  if ((G - G.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, G.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("gram matrix not symmetric");
  const int n = static_cast<int>(G.rows());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  const double scale = std::max(1.0, G.diagonal().maxCoeff());
  for (int j = 0; j < n; ++j) {
    double d = G(j, j) - L.row(j).head(j).squaredNorm();
    if (d <= pivot_tol * scale)
      throw std::invalid_argument("gram matrix not positive definite");
    L(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i)
      L(i, j) = (G(i, j) - L.row(i).head(j).dot(L.row(j).head(j))) / L(j, j);
  }
}

}  // namespace

MetricTwoStepAlgebra::MetricTwoStepAlgebra(int dim_v, int dim_z,
                                           const std::vector<BracketTriplet>& brackets,
                                           Eigen::MatrixXd gram)
    : dv_(dim_v), dz_(dim_z), gram_(std::move(gram)) {
  if (dv_ < 1 || dz_ < 1) throw std::invalid_argument("dimensions must be positive");
  if (gram_.rows() != dv_ + dz_)
    throw std::invalid_argument("gram matrix size does not match dim_v + dim_z");
  require_spd(gram_);
  gram_inv_ = gram_.llt().solve(Eigen::MatrixXd::Identity(dv_ + dz_, dv_ + dz_));

  c_.assign(dz_, Eigen::MatrixXd::Zero(dv_, dv_));
  for (const auto& t : brackets) {
    if (t.i < 0 || t.i >= dv_ || t.j < 0 || t.j >= dv_ || t.k < 0 || t.k >= dz_)
      throw std::invalid_argument("bracket triplet index out of range");
    c_[t.k](t.i, t.j) += t.value;
    c_[t.k](t.j, t.i) -= t.value;
  }
}

void MetricTwoStepAlgebra::check_vector(const AlgebraVector& X) const {
  if (X.v.size() != dv_ || X.z.size() != dz_)
    throw std::invalid_argument("algebra vector dimension mismatch");
}

void MetricTwoStepAlgebra::check_covector(const Covector& p) const {
  if (p.v.size() != dv_ || p.z.size() != dz_)
    throw std::invalid_argument("covector dimension mismatch");
}

AlgebraVector MetricTwoStepAlgebra::bracket(const AlgebraVector& X,
                                            const AlgebraVector& Y) const {
  check_vector(X);
  check_vector(Y);
  AlgebraVector out = AlgebraVector::zero(dv_, dz_);
  for (int k = 0; k < dz_; ++k) out.z[k] = X.v.dot(c_[k] * Y.v);
  return out;
}

GroupElement MetricTwoStepAlgebra::group_multiply(const GroupElement& a,
                                                  const GroupElement& b) const {
  AlgebraVector s = a.coords + b.coords + bracket(a.coords, b.coords) * 0.5;
  return GroupElement(std::move(s));
}

GroupElement MetricTwoStepAlgebra::group_inverse(const GroupElement& a) const {
  return GroupElement(-a.coords);
}

Eigen::MatrixXd MetricTwoStepAlgebra::j_map(const AlgebraVector& Z) const {
  check_vector(Z);
  if (Z.v.cwiseAbs().maxCoeff() > 0.0)
    throw std::invalid_argument("j_map requires a central argument");
  const Eigen::MatrixXd Gvv = gram_.topLeftCorner(dv_, dv_);
  const Eigen::MatrixXd Gzz = gram_.bottomRightCorner(dz_, dz_);
  const Eigen::VectorXd m = Gzz * Z.z;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(dv_, dv_);
  for (int k = 0; k < dz_; ++k) S += c_[k] * m[k];
  // g(j(Z)V1, V2) = g([V1,V2], Z)  <=>  J^T Gvv = S.
  return Gvv.llt().solve(S.transpose());
}

AlgebraVector MetricTwoStepAlgebra::sharp(const Covector& p) const {
  check_covector(p);
  return AlgebraVector::from_full(gram_inv_ * p.full(), dv_);
}

Covector MetricTwoStepAlgebra::flat(const AlgebraVector& X) const {
  check_vector(X);
  return Covector::from_full(gram_ * X.full(), dv_);
}

double MetricTwoStepAlgebra::inner(const AlgebraVector& X, const AlgebraVector& Y) const {
  check_vector(X);
  check_vector(Y);
  return X.full().dot(gram_ * Y.full());
}

double MetricTwoStepAlgebra::norm(const AlgebraVector& X) const {
  return std::sqrt(std::max(0.0, inner(X, X)));
}

double MetricTwoStepAlgebra::co_inner(const Covector& p, const Covector& q) const {
  check_covector(p);
  check_covector(q);
  return p.full().dot(gram_inv_ * q.full());
}

double MetricTwoStepAlgebra::co_norm(const Covector& p) const {
  return std::sqrt(std::max(0.0, co_inner(p, p)));
}

AlgebraVector MetricTwoStepAlgebra::levi_civita(const AlgebraVector& X,
                                                const AlgebraVector& Y) const {
  check_vector(X);
  check_vector(Y);
  // nabla_{V1+Z1}(V2+Z2) = (1/2)[V1,V2] - (1/2) j(Z2)V1 - (1/2) j(Z1)V2.
  AlgebraVector V1{X.v, Eigen::VectorXd::Zero(dz_)};
  AlgebraVector V2{Y.v, Eigen::VectorXd::Zero(dz_)};
  AlgebraVector out = bracket(V1, V2) * 0.5;
  AlgebraVector Z1{Eigen::VectorXd::Zero(dv_), X.z};
  AlgebraVector Z2{Eigen::VectorXd::Zero(dv_), Y.z};
  out.v -= 0.5 * (j_map(Z2) * X.v);
  out.v -= 0.5 * (j_map(Z1) * Y.v);
  return out;
}

HeisNormalization normalize_heisenberg_metric(int n, const Eigen::MatrixXd& gram) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  const int d = 2 * n + 1;
  if (gram.rows() != d || gram.cols() != d)
    throw std::invalid_argument("gram size does not match 2n+1");
  require_spd(gram);

  // Step 1: scale X_i and Z by 1/|Z| so the center becomes unit length.
  const double s = std::sqrt(gram(d - 1, d - 1));
  Eigen::MatrixXd D0 = Eigen::MatrixXd::Identity(d, d);
  for (int i = 0; i < n; ++i) D0(i, i) = 1.0 / s;
  D0(d - 1, d - 1) = 1.0 / s;
  Eigen::MatrixXd G1 = D0.transpose() * gram * D0;

  // Step 2: project the non-central basis off the center.
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(d, d);
  for (int a = 0; a < 2 * n; ++a) P(d - 1, a) = -G1(a, d - 1);
  Eigen::MatrixXd G2 = P.transpose() * G1 * P;

  // Step 3: canonical form of j(Z) on the complement. In an orthonormal
  // frame y = L^T x the operator becomes skew-symmetric; its real Schur
  // form is block diagonal with 2x2 rotation generators.
  Eigen::MatrixXd Gv = G2.topLeftCorner(2 * n, 2 * n);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    S(i, n + i) = 1.0;  // g([X_i, Y_i], Z) = 1 with |Z| = 1
    S(n + i, i) = -1.0;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(Gv);
  Eigen::MatrixXd L = llt.matrixL();
  // Jhat = L^{-1} S^T L^{-T}, skew-symmetric; symmetrized against roundoff.
  Eigen::MatrixXd M1 = L.triangularView<Eigen::Lower>().solve(S.transpose());
  Eigen::MatrixXd Jhat =
      L.triangularView<Eigen::Lower>().solve(M1.transpose()).transpose();
  Jhat = 0.5 * (Jhat - Jhat.transpose().eval());

  Eigen::RealSchur<Eigen::MatrixXd> schur(Jhat);
  Eigen::MatrixXd U = schur.matrixU();
  Eigen::MatrixXd T = schur.matrixT();

  struct Pair {
    Eigen::VectorXd x, y;
    double dinv;  // A = 1/d for the block eigenvalue d
  };
  std::vector<Pair> pairs;
  for (int b = 0; b + 1 < 2 * n; b += 2) {
    double dblock = 0.5 * (T(b + 1, b) - T(b, b + 1));
    if (std::abs(dblock) < 1e-12)
      throw std::invalid_argument("degenerate eigen-split in metric normalization");
    Eigen::VectorXd u1 = U.col(b), u2 = U.col(b + 1);
    Pair pr;
    if (dblock > 0) {
      pr.x = u1;
      pr.y = u2;
      pr.dinv = 1.0 / dblock;
    } else {
      pr.x = u2;
      pr.y = u1;
      pr.dinv = -1.0 / dblock;
    }
    pairs.push_back(std::move(pr));
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const Pair& a, const Pair& b) { return a.dinv < b.dinv; });

  // Deterministic orientation: first significant component of each X column
  // positive, with Y adjusted to keep j(Z)X = dY.
  for (auto& pr : pairs) {
    int lead = 0;
    for (int i = 0; i < pr.x.size(); ++i)
      if (std::abs(pr.x[i]) > 1e-8) {
        lead = i;
        break;
      }
    if (pr.x[lead] < 0) {
      pr.x = -pr.x;
      pr.y = -pr.y;
    }
  }

  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd A(n);
  for (int i = 0; i < n; ++i) {
    const double scl = std::sqrt(pairs[i].dinv);  // 1/sqrt(d)
    Eigen::VectorXd xcol =
        L.transpose().triangularView<Eigen::Upper>().solve(pairs[i].x) * scl;
    Eigen::VectorXd ycol =
        L.transpose().triangularView<Eigen::Upper>().solve(pairs[i].y) * scl;
    Q.col(i).head(2 * n) = xcol;
    Q.col(i)[d - 1] = 0.0;
    Q.col(n + i).head(2 * n) = ycol;
    Q.col(n + i)[d - 1] = 0.0;
    A[i] = pairs[i].dinv;
  }

  HeisNormalization out;
  out.automorphism = D0 * P * Q;
  out.A = A;
  return out;
}

bool is_heisenberg_type(const MetricTwoStepAlgebra& alg, double tol) {
  const int dv = alg.dim_v(), dz = alg.dim_z();
  auto check = [&](const Eigen::VectorXd& zc) {
    AlgebraVector Z{Eigen::VectorXd::Zero(dv), zc};
    const double n2 = alg.inner(Z, Z);
    Eigen::MatrixXd J = alg.j_map(Z);
    return ((J * J + n2 * Eigen::MatrixXd::Identity(dv, dv)).cwiseAbs().maxCoeff() <=
            tol * std::max(1.0, n2));
  };
  for (int k = 0; k < dz; ++k) {
    Eigen::VectorXd zc = Eigen::VectorXd::Zero(dz);
    zc[k] = 1.0;
    if (!check(zc)) return false;
  }
  for (int k = 0; k < dz; ++k)
    for (int l = k + 1; l < dz; ++l) {
      Eigen::VectorXd zc = Eigen::VectorXd::Zero(dz);
      zc[k] = 1.0;
      zc[l] = 1.0;
      if (!check(zc)) return false;
    }
  return true;
}

MetricTwoStepAlgebra make_heisenberg(const Eigen::VectorXd& A) {
  const int n = static_cast<int>(A.size());
  if (n < 1) throw std::invalid_argument("heisenberg rank must be positive");
  for (int i = 0; i < n; ++i)
    if (!(A[i] > 0)) throw std::invalid_argument("metric parameters must be positive");
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2 * n + 1, 2 * n + 1);
  for (int i = 0; i < n; ++i) {
    G(i, i) = A[i];
    G(n + i, n + i) = A[i];
  }
  G(2 * n, 2 * n) = 1.0;
  return make_heisenberg(n, G);
}

MetricTwoStepAlgebra make_heisenberg(int n, const Eigen::MatrixXd& gram) {
  std::vector<BracketTriplet> br;
  br.reserve(n);
  for (int i = 0; i < n; ++i) br.push_back({i, n + i, 0, 1.0});
  return MetricTwoStepAlgebra(2 * n, 1, br, gram);
}

MetricTwoStepAlgebra make_ht_example() {
  std::vector<BracketTriplet> br = {
      {0, 1, 0, 1.0},   // [X1,X2] = Z1
      {0, 2, 1, 1.0},   // [X1,X3] = Z2
      {1, 3, 1, -1.0},  // [X2,X4] = -Z2
      {2, 3, 0, 1.0},   // [X3,X4] = Z1
  };
  return MetricTwoStepAlgebra(4, 2, br, Eigen::MatrixXd::Identity(6, 6));
}

MetricTwoStepAlgebra algebra_from_json(const nlohmann::json& j) {
  const int dv = j.at("dim_v").get<int>();
  const int dz = j.at("dim_z").get<int>();
  std::vector<BracketTriplet> br;
  for (const auto& t : j.at("bracket")) {
    if (t.size() != 4) throw std::invalid_argument("bracket entries must be [i,j,k,value]");
    br.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>(), t[3].get<double>()});
  }
  const auto& gj = j.at("gram");
  const int d = dv + dz;
  if (static_cast<int>(gj.size()) != d * d)
    throw std::invalid_argument("gram must be a row-major (dim_v+dim_z)^2 list");
  Eigen::MatrixXd G(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) G(r, c) = gj[r * d + c].get<double>();
  return MetricTwoStepAlgebra(dv, dz, br, G);
}

}  // namespace magflow
