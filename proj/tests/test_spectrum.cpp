#include "doctest.h"

#include <algorithm>
#include <random>

#include "magflow/spectrum.hpp"

using namespace magflow;

namespace {

constexpr double kPi = 3.14159265358979323846;

long count_branch(const std::vector<PeriodicFamily>& fams, FamilyBranch b) {
  long n = 0;
  for (const auto& f : fams)
    if (f.branch == b) ++n;
  return n;
}

}  // namespace

TEST_CASE("worked example: A=1, B=1, E=2, z_gamma=20pi") {
  const double zg = 20.0 * kPi;
  const auto fams = central_spiral_families(zg, 2.0, 1.0, 1.0);

  // Negative-root families for exactly ell in {1..14}.
  std::vector<long> ells_1a;
  for (const auto& f : fams)
    if (f.branch == FamilyBranch::spiral_1a) ells_1a.push_back(*f.ell);
  std::sort(ells_1a.begin(), ells_1a.end());
  REQUIRE(ells_1a.size() == 14);
  for (long i = 0; i < 14; ++i) CHECK(ells_1a[i] == i + 1);

  // ell = 10 has length (2/sqrt(3)) 20 pi.
  for (const auto& f : fams)
    if (f.branch == FamilyBranch::spiral_1a && *f.ell == 10)
      CHECK(std::abs(f.length - 2.0 / std::sqrt(3.0) * zg) <= 1e-9);

  // Every family passes the translation residual check.
  const FreeHomotopyClass cls{0.0, zg};
  for (const auto& f : fams) CHECK(family_residual(f, cls, 2.0, 1.0, 1.0) <= 1e-8);
}

TEST_CASE("contractible families exist iff 0 < E < |B|") {
  Eigen::VectorXd A1 = Eigen::VectorXd::Constant(1, 1.0);
  CHECK(contractible_families(0.5, 1.0, A1).size() == 1);
  CHECK(contractible_families(1.5, 1.0, A1).empty());
  CHECK(contractible_families(1.0, 1.0, A1).empty());
  CHECK(contractible_families(0.5, 0.0, A1).empty());

  const auto fams = contractible_families(0.6, -1.0, A1);
  REQUIRE(fams.size() == 1);
  // z0 = -sgn(B) sqrt(B^2 - E^2), omega = 2 pi A / z0.
  CHECK(fams[0].z0 == doctest::Approx(std::sqrt(1.0 - 0.36)).epsilon(1e-12));
  CHECK(fams[0].omega == doctest::Approx(2.0 * kPi / fams[0].z0).epsilon(1e-12));
  CHECK(family_residual(fams[0], FreeHomotopyClass{}, 0.6, -1.0, 1.0) <= 1e-8);
}

TEST_CASE("contractible families for n = 2: one per distinct parameter") {
  Eigen::VectorXd A2(2);
  A2 << 1.0, 2.0;
  CHECK(contractible_families(0.5, 1.0, A2).size() == 2);
  Eigen::VectorXd Aeq(2);
  Aeq << 1.5, 1.5;
  CHECK(contractible_families(0.5, 1.0, Aeq).size() == 1);
}

TEST_CASE("noncentral families exist iff E > |B|") {
  const FreeHomotopyClass cls{2.0, 0.0};
  CHECK(noncentral_families(cls, 3.0, 1.0).size() == 2);
  CHECK(noncentral_families(cls, 0.5, 1.0).empty());
  CHECK(noncentral_families(cls, 1.0, 1.0).empty());

  const auto fams = noncentral_families(cls, 3.0, 1.0);
  for (const auto& f : fams) {
    CHECK(std::abs(f.omega) ==
          doctest::Approx(2.0 / std::sqrt(9.0 - 1.0)).epsilon(1e-12));
    CHECK(f.length == doctest::Approx(2.0 / std::sqrt(1.0 - 1.0 / 9.0)).epsilon(1e-12));
    CHECK(family_residual(f, cls, 3.0, 1.0, 1.0) <= 1e-8);
  }
}

TEST_CASE("central lines translate by exactly z_gamma") {
  const double zg = 4.0;
  const auto fams = central_line_families(zg, 2.0);
  REQUIRE(fams.size() == 2);
  const FreeHomotopyClass cls{0.0, zg};
  for (const auto& f : fams) {
    CHECK(f.length == doctest::Approx(zg));
    CHECK(family_residual(f, cls, 2.0, 0.7, 1.0) <= 1e-8);
  }
}

TEST_CASE("subcritical spirals: countably infinite, both resonance signs") {
  // E < |B|: admissible ratio window (2E/(E-|B|), 2E/(E+|B|)) is hit for
  // every large |ell| of one sign and no small ones.
  const double E = 1.0, B = 2.0, A = 1.0, zg = 2.0;
  const auto fams = central_spiral_families(zg, E, B, A, 200);
  CHECK(!fams.empty());
  for (const auto& f : fams) {
    CHECK(f.branch == FamilyBranch::spiral_2a);
    CHECK(f.z0 < 0.0);  // B > 0 picks the negative root
    CHECK(f.length >= std::abs(zg) - 1e-9);
    CHECK(family_residual(f, FreeHomotopyClass{0.0, zg}, E, B, A) <= 1e-8);
  }
  // Enumeration grows with the cap: the family count is infinite.
  CHECK(central_spiral_families(zg, E, B, A, 400).size() > fams.size());
}

TEST_CASE("critical case E = |B| requires integer z_gamma/(pi A)") {
  const double B = 1.5, A = 1.0;
  CHECK(central_spiral_families(5.0, B, B, A).empty());  // 5/pi not integer
  const double zg = 3.0 * kPi * A;
  const auto fams = central_spiral_families(zg, B, B, A);
  CHECK(fams.size() == 33);
  for (const auto& f : fams) {
    CHECK(f.branch == FamilyBranch::spiral_3a);
    CHECK(f.z0 > -2.0 * B);
    CHECK(f.z0 < 0.0);
    // Near the z0 -> 0 endpoint the period and displacement reach ~1e7, so
    // the periodicity residual is judged relative to the family's length.
    CHECK(family_residual(f, FreeHomotopyClass{0.0, zg}, B, B, A) <=
          1e-8 * std::max(1.0, f.length));
  }
}

TEST_CASE("length sets by regime") {
  const double A = 1.0;
  // Identity class: one value iff E < |B|.
  CHECK(length_set(FreeHomotopyClass{}, 2.0, 1.0, A).values.empty());
  const auto id_ls = length_set(FreeHomotopyClass{}, 0.5, 1.0, A);
  REQUIRE(id_ls.values.size() == 1);
  CHECK(id_ls.values[0] ==
        doctest::Approx(2.0 * kPi * A / std::sqrt(1.0 / 0.25 - 1.0)).epsilon(1e-12));

  // Noncentral class.
  const auto nc = length_set(FreeHomotopyClass{3.0, 0.0}, 2.0, 1.0, A);
  REQUIRE(nc.values.size() == 1);
  CHECK(nc.values[0] == doctest::Approx(3.0 / std::sqrt(0.75)).epsilon(1e-12));
  CHECK(length_set(FreeHomotopyClass{3.0, 0.0}, 0.5, 1.0, A).values.empty());

  // Central class: sorted, deduped, includes |z_gamma|.
  const double zg = 20.0 * kPi;
  const auto ls = length_set(FreeHomotopyClass{0.0, zg}, 2.0, 1.0, A);
  CHECK(std::is_sorted(ls.values.begin(), ls.values.end()));
  bool has_zg = false;
  for (double v : ls.values)
    if (std::abs(v - zg) < 1e-9) has_zg = true;
  CHECK(has_zg);
  CHECK(!ls.truncated);

  // Subcritical central sets are always truncated (infinite family list).
  CHECK(length_set(FreeHomotopyClass{0.0, 2.0}, 1.0, 2.0, A).truncated);
}

TEST_CASE("length bounds") {
  const double zg = 7.0;
  const auto sup = length_bounds(zg, 2.0, 1.0, 1.0);
  CHECK(sup.regime == "supercritical");
  REQUIRE(sup.upper.has_value());
  CHECK(*sup.upper == doctest::Approx(zg / std::sqrt(0.75)).epsilon(1e-12));

  const auto sub = length_bounds(zg, 1.0, 2.0, 1.0);
  CHECK(sub.regime == "subcritical");
  REQUIRE(sub.lower.has_value());
  CHECK(*sub.lower == doctest::Approx(zg));

  CHECK(length_bounds(zg, 2.0, 2.0, 1.0).regime == "critical");
}

TEST_CASE("supercritical lengths respect the upper bound, equality on resonance") {
  const double E = 2.0, B = 0.5, A = 1.3;
  const double zg = 2.0 * kPi * A * 6.0;  // z_gamma/(2 pi A) = 6
  const auto fams = central_spiral_families(zg, E, B, A);
  const double bound = zg / std::sqrt(1.0 - B * B / (E * E));
  double max_len = 0.0;
  for (const auto& f : fams) max_len = std::max(max_len, f.length);
  CHECK(max_len <= bound + 1e-9);
  CHECK(max_len == doctest::Approx(bound).epsilon(1e-12));
}

TEST_CASE("tangent classifier agrees with the momentum classifier") {
  std::mt19937 rng(60601);
  std::uniform_real_distribution<double> ud(0.5, 3.0);
  for (int trial = 0; trial < 8; ++trial) {
    const double A = ud(rng);
    double B = ud(rng) - 1.5;
    if (std::abs(B) < 0.1) B = 0.3;
    double E = ud(rng);
    if (std::abs(E - std::abs(B)) < 1e-3) E += 0.1;
    const double zg = (trial % 2 ? -1.0 : 1.0) * ud(rng) * 12.0;

    auto a = central_spiral_families(zg, E, B, A, 500);
    auto b = tangent_spiral_classifier(zg, E, B, A, 500);
    REQUIRE(a.size() == b.size());
    auto key = [](const PeriodicFamily& f) { return std::make_pair(f.omega, f.radius_sq); };
    std::sort(a.begin(), a.end(),
              [&](const auto& x, const auto& y) { return key(x) < key(y); });
    std::sort(b.begin(), b.end(),
              [&](const auto& x, const auto& y) { return key(x) < key(y); });
    for (size_t i = 0; i < a.size(); ++i) {
      CHECK(std::abs(a[i].omega - b[i].omega) <=
            1e-9 * std::max(1.0, std::abs(a[i].omega)));
      CHECK(std::abs(a[i].radius_sq - b[i].radius_sq) <=
            1e-9 * std::max(1.0, a[i].radius_sq));
    }
  }
  CHECK_THROWS(tangent_spiral_classifier(5.0, 1.0, 0.0, 1.0));
}

TEST_CASE("resonance check") {
  HeisGeodesic geo;
  geo.A = Eigen::VectorXd::Constant(1, 1.0);
  geo.B = 0.0;
  geo.u = Eigen::VectorXd::Constant(1, 1.0);
  geo.v = Eigen::VectorXd::Constant(1, 0.0);
  geo.z0 = 1.0;
  CHECK(resonance_check(geo, 2.0 * kPi));
  CHECK(resonance_check(geo, 6.0 * kPi));
  CHECK(!resonance_check(geo, 3.0));
  // Inactive modes are exempt.
  geo.u[0] = 0.0;
  CHECK(resonance_check(geo, 3.0));
}

TEST_CASE("brute-force oracle recovers the classified families") {
  const double A = 1.0, B = 0.5, E = 2.0;
  MagneticSystem sys(make_heisenberg(Eigen::VectorXd::Constant(1, A)), B);
  SearchGrid grid;
  grid.omega_window = 12.0;

  SUBCASE("central class") {
    const double zg = 2.0 * kPi;
    GroupElement gamma = sys.alg().group_identity();
    gamma.coords.z[0] = zg;
    const auto hits = brute_force_periodic_search(sys, gamma, E, grid);
    const auto expect = central_spiral_families(zg, E, B, A);
    for (const auto& f : expect) {
      if (std::abs(f.omega) > grid.omega_window * 0.95) continue;
      bool found = false;
      for (const auto& h : hits)
        if (std::abs(h.omega - f.omega) < 1e-3 * std::max(1.0, std::abs(f.omega)))
          found = true;
      CHECK(found);
    }
    // Central lines are present too.
    long lines = count_branch(hits, FamilyBranch::central_line_pos) +
                 count_branch(hits, FamilyBranch::central_line_neg);
    CHECK(lines == 2);
  }

  SUBCASE("identity class, supercritical: no hits") {
    const auto hits =
        brute_force_periodic_search(sys, sys.alg().group_identity(), E, grid);
    CHECK(hits.empty());
  }

  SUBCASE("identity class, subcritical: contractible found") {
    MagneticSystem sub(make_heisenberg(Eigen::VectorXd::Constant(1, A)), 2.0);
    const auto hits =
        brute_force_periodic_search(sub, sub.alg().group_identity(), 1.0, grid);
    const auto expect = contractible_families(1.0, 2.0, Eigen::VectorXd::Constant(1, A));
    REQUIRE(expect.size() == 1);
    bool found = false;
    for (const auto& h : hits)
      if (std::abs(h.omega - expect[0].omega) < 1e-3 * std::abs(expect[0].omega))
        found = true;
    CHECK(found);
  }

  SUBCASE("noncentral class") {
    GroupElement gamma = sys.alg().group_identity();
    gamma.coords.v << 1.0, 0.0;
    const auto hits = brute_force_periodic_search(sys, gamma, E, grid);
    const auto expect = noncentral_families(FreeHomotopyClass{1.0, 0.0}, E, B);
    for (const auto& f : expect) {
      bool found = false;
      for (const auto& h : hits)
        if (std::abs(h.omega - f.omega) < 1e-3) found = true;
      CHECK(found);
    }
  }
}
