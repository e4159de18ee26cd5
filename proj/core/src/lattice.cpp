#include "magflow/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace magflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

double round9(double x) { return std::round(x * 1e9) / 1e9; }

// Positive generator of the subgroup of (R,+) generated by the inputs,
// via a tolerance-aware Euclidean reduction.
double real_gcd(std::vector<double> vals, double tol = 1e-9) {
  double g = 0.0;
  for (double v : vals) {
    v = std::abs(v);
    if (v <= tol) continue;
    if (g == 0.0) {
      g = v;
      continue;
    }
    double a = std::max(g, v), b = std::min(g, v);
    while (b > tol) {
      double r = std::fmod(a, b);
      if (r > b - tol) r = 0.0;  // landed on a multiple, up to noise
      a = b;
      b = r;
    }
    g = a;
  }
  return g;
}

MetricTwoStepAlgebra h1_unit() {
  return make_heisenberg(Eigen::VectorXd::Constant(1, 1.0));
}

}  // namespace

ClassKey round_key(double v_norm, double z_gamma) {
  return {round9(v_norm), round9(z_gamma)};
}

Lattice make_lattice(const std::vector<Eigen::Vector3d>& generator_coords) {
  if (generator_coords.empty()) throw std::invalid_argument("lattice needs generators");
  Lattice lat;
  for (const auto& c : generator_coords) {
    AlgebraVector a = AlgebraVector::zero(2, 1);
    a.v << c[0], c[1];
    a.z << c[2];
    lat.generators.emplace_back(std::move(a));
  }
  lat.z_bar = central_generator(lat);
  return lat;
}

double central_generator(const Lattice& lat) {
  const MetricTwoStepAlgebra alg = h1_unit();
  std::vector<double> central;
  const auto& g = lat.generators;
  for (size_t i = 0; i < g.size(); ++i) {
    if (g[i].coords.v.norm() <= 1e-12) central.push_back(g[i].coords.z[0]);
    for (size_t j = i + 1; j < g.size(); ++j)
      central.push_back(alg.bracket(g[i].coords, g[j].coords).z[0]);
  }
  const double zbar = real_gcd(central);
  if (zbar <= 1e-12)
    throw std::runtime_error(
        "central_generator: generators produce no central element");
  return zbar;
}

std::vector<FreeHomotopyClass> enumerate_classes(const Lattice& lat, int word_len,
                                                 double A) {
  if (word_len < 1) throw std::invalid_argument("word_len must be >= 1");
  const MetricTwoStepAlgebra alg = h1_unit();

  std::vector<GroupElement> alphabet;
  for (const auto& g : lat.generators) {
    alphabet.push_back(g);
    alphabet.push_back(alg.group_inverse(g));
  }

  auto coord_key = [](const GroupElement& e) {
    return std::array<double, 3>{round9(e.coords.v[0]), round9(e.coords.v[1]),
                                 round9(e.coords.z[0])};
  };

  std::set<std::array<double, 3>> seen;
  std::vector<GroupElement> frontier{alg.group_identity()}, all;
  seen.insert(coord_key(frontier[0]));
  all.push_back(frontier[0]);
  for (int step = 0; step < word_len; ++step) {
    std::vector<GroupElement> next;
    for (const auto& e : frontier)
      for (const auto& a : alphabet) {
        GroupElement p = alg.group_multiply(e, a);
        if (seen.insert(coord_key(p)).second) {
          next.push_back(p);
          all.push_back(p);
        }
      }
    frontier = std::move(next);
  }

  std::set<ClassKey> keys;
  for (const auto& e : all) {
    const double vn = e.coords.v.norm();
    if (vn <= 1e-9)
      keys.insert(round_key(0.0, e.coords.z[0]));
    else
      keys.insert(round_key(std::sqrt(A) * vn, 0.0));
  }
  std::vector<FreeHomotopyClass> out;
  out.reserve(keys.size());
  for (const auto& k : keys) out.push_back({k.v_norm, k.z_gamma});
  return out;
}

MarkedSpectrum marked_spectrum(const Lattice& lat, double E, double B, double A,
                               int word_len, long cap) {
  if (!(E > std::abs(B)))
    throw std::invalid_argument("marked_spectrum requires E > |B|");
  MarkedSpectrum ms;
  ms.E = E;
  ms.cap = cap;
  for (const auto& cls : enumerate_classes(lat, word_len, A)) {
    if (cls.is_identity()) continue;
    ms.entries[round_key(cls.v_norm, cls.z_gamma)] = length_set(cls, E, B, A, cap);
  }
  return ms;
}

namespace {

bool sets_match(const LengthSet& a, const LengthSet& b, size_t* mismatch_at) {
  const size_t n = std::min(a.values.size(), b.values.size());
  for (size_t i = 0; i < n; ++i) {
    if (std::abs(a.values[i] - b.values[i]) >
        1e-9 * std::max(1.0, std::abs(b.values[i]))) {
      *mismatch_at = i;
      return false;
    }
  }
  if (!a.truncated && !b.truncated && a.values.size() != b.values.size()) {
    *mismatch_at = n;
    return false;
  }
  return true;
}

std::string key_str(const ClassKey& k) {
  std::ostringstream os;
  os << "(" << k.v_norm << "," << k.z_gamma << ")";
  return os.str();
}

}  // namespace

MlsReport compare_mls(const MarkedSpectrum& s1, const MarkedSpectrum& s2,
                      const std::map<ClassKey, ClassKey>& marking) {
  // The marking must be a bijection between the two key sets.
  if (marking.size() != s1.entries.size())
    throw std::invalid_argument("marking does not cover the first spectrum's keys");
  std::set<ClassKey> image;
  for (const auto& [k, v] : marking) {
    if (!s1.entries.count(k))
      throw std::invalid_argument("marking key missing from first spectrum");
    if (!s2.entries.count(v))
      throw std::invalid_argument("marking image missing from second spectrum");
    if (!image.insert(v).second)
      throw std::invalid_argument("marking is not injective");
  }
  if (image.size() != s2.entries.size())
    throw std::invalid_argument("marking does not cover the second spectrum's keys");

  MlsReport rep;
  rep.equal = true;
  for (const auto& [k, v] : marking) {
    size_t at = 0;
    const bool ok = sets_match(s1.entries.at(k), s2.entries.at(v), &at);
    std::ostringstream os;
    os << key_str(k) << " -> " << key_str(v) << (ok ? " OK" : " DIFF");
    rep.lines.push_back(os.str());
    if (!ok && rep.equal) {
      rep.equal = false;
      rep.first_differing_key = key_str(k);
    }
  }
  return rep;
}

std::map<ClassKey, ClassKey> natural_marking(const Lattice& l1, const Lattice& l2,
                                             int word_len, double A1, double A2) {
  if (l1.generators.size() != l2.generators.size())
    throw std::invalid_argument("natural marking requires equal generator counts");
  const MetricTwoStepAlgebra alg = h1_unit();
  const size_t g = l1.generators.size();
  std::vector<GroupElement> alpha1, alpha2;
  for (size_t i = 0; i < g; ++i) {
    alpha1.push_back(l1.generators[i]);
    alpha1.push_back(alg.group_inverse(l1.generators[i]));
    alpha2.push_back(l2.generators[i]);
    alpha2.push_back(alg.group_inverse(l2.generators[i]));
  }
  auto key_of = [](const GroupElement& e, double A) {
    const double vn = e.coords.v.norm();
    return vn <= 1e-9 ? round_key(0.0, e.coords.z[0]) : round_key(std::sqrt(A) * vn, 0.0);
  };

  std::map<ClassKey, ClassKey> marking;
  std::vector<std::pair<GroupElement, GroupElement>> frontier{
      {alg.group_identity(), alg.group_identity()}};
  for (int step = 0; step < word_len; ++step) {
    std::vector<std::pair<GroupElement, GroupElement>> next;
    for (const auto& [e1, e2] : frontier)
      for (size_t a = 0; a < alpha1.size(); ++a) {
        GroupElement p1 = alg.group_multiply(e1, alpha1[a]);
        GroupElement p2 = alg.group_multiply(e2, alpha2[a]);
        const ClassKey k1 = key_of(p1, A1);
        if (!(k1 == ClassKey{}) && !marking.count(k1))
          marking.emplace(k1, key_of(p2, A2));
        next.emplace_back(std::move(p1), std::move(p2));
      }
    frontier = std::move(next);
  }
  return marking;
}

double central_rigidity_statistic(const Lattice& lat, double E, double B, double A,
                                  long h_max) {
  if (!(E > std::abs(B)))
    throw std::invalid_argument("central_rigidity_statistic requires E > |B|");
  if (h_max < 1) throw std::invalid_argument("h_max must be >= 1");
  const double absB = std::abs(B);
  const double factor = std::sqrt(1.0 - B * B / (E * E));
  double sup = 0.0;
  for (long h = 1; h <= h_max; ++h) {
    const double zg = h * lat.z_bar;
    double best = zg;  // central line length
    // Spiral lengths sqrt(4 pi A l (zg - pi A l))/factor peak at
    // l* = zg/(2 pi A); the best admissible integer is adjacent to l*.
    const double lstar = zg / (2.0 * kPi * A);
    const double kmax_real = zg * (E + absB) / (2.0 * kPi * A * E);
    const long kmax = static_cast<long>(std::floor(kmax_real - 1e-12 * kmax_real));
    if (kmax >= 1) {
      for (long l : {static_cast<long>(std::floor(lstar)),
                     static_cast<long>(std::ceil(lstar))}) {
        l = std::clamp(l, 1L, kmax);
        const double q = 4.0 * kPi * A * l * (zg - kPi * A * l);
        if (q > 0) best = std::max(best, std::sqrt(q) / factor);
      }
    }
    sup = std::max(sup, best / h);
  }
  return sup;
}

MarkingDecomposition marking_decompose(const Eigen::Matrix3d& phi_star, double A) {
  // Bracket equivariance on basis pairs; the only nonzero bracket of the
  // basis is [X, Y] = Z, and brackets see v parts only.
  auto brk = [](const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    return a[0] * b[1] - a[1] * b[0];
  };
  const Eigen::Vector3d cX = phi_star.col(0), cY = phi_star.col(1), cZ = phi_star.col(2);
  const char* names[3] = {"[X,Y]", "[X,Z]", "[Y,Z]"};
  const Eigen::Vector3d lhs[3] = {
      Eigen::Vector3d(0, 0, brk(cX, cY)),
      Eigen::Vector3d(0, 0, brk(cX, cZ)),
      Eigen::Vector3d(0, 0, brk(cY, cZ)),
  };
  const Eigen::Vector3d rhs[3] = {cZ, Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()};
  for (int i = 0; i < 3; ++i)
    if ((lhs[i] - rhs[i]).cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument(std::string("not an automorphism: ") + names[i]);
  if (std::abs(phi_star.determinant()) < 1e-12)
    throw std::invalid_argument("not an automorphism: singular matrix");

  MarkingDecomposition out;
  out.R1 = phi_star.topLeftCorner<2, 2>();
  out.R2 = phi_star.bottomLeftCorner<1, 2>();
  out.S = phi_star(2, 2);
  // R1 is an isometry of the A-scaled plane iff R1^T R1 = I.
  (void)A;
  const bool r1_iso =
      (out.R1.transpose() * out.R1 - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <=
      1e-10;
  out.is_isometric_pair = r1_iso && std::abs(std::abs(out.S) - 1.0) <= 1e-10;
  return out;
}

}  // namespace magflow
