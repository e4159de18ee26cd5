// magflow: magnetic geodesics on two-step nilpotent groups.
//
// Subcommands: geodesic, spectrum, density, mls, httype, verify-all.
// Exit codes: 0 success, 1 computation error (with an "ERROR <code> <detail>"
// line), 2 argument errors.

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "magflow/density.hpp"
#include "magflow/geodesics.hpp"
#include "magflow/httype.hpp"
#include "magflow/lattice.hpp"
#include "magflow/spectrum.hpp"

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

// Shortest round-trip decimal, 17 significant digits max.
std::string fmt(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

int fail(const std::string& code, const std::string& detail) {
  std::cout << "ERROR " << code << " " << detail << "\n";
  return 1;
}

int usage_error(const std::string& detail) {
  std::cerr << "usage error: " << detail << "\n";
  return 2;
}

int thread_cap() {
  if (const char* s = std::getenv("MAGFLOW_THREADS")) {
    const int v = std::atoi(s);
    if (v > 0) return v;
  }
  return 0;  // unlimited
}

std::optional<json> load_config(const std::string& path, std::string* err) {
  std::ifstream in(path);
  if (!in) {
    *err = "cannot open config file " + path;
    return std::nullopt;
  }
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    *err = "config file is not valid JSON";
    return std::nullopt;
  }
  return j;
}

// Flags override config values: fill an optional only when the flag is absent.
template <typename T>
void merge(std::optional<T>& slot, const json& cfg, const char* key) {
  if (!slot && cfg.contains(key)) slot = cfg.at(key).get<T>();
}

std::ostream& open_sink(std::ofstream& file, const std::string& path) {
  if (path.empty()) return std::cout;
  file.open(path);
  return file;
}

magflow::Lattice lattice_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open lattice file " + path);
  json j = json::parse(in);
  std::vector<Eigen::Vector3d> gens;
  for (const auto& g : j.at("generators"))
    gens.emplace_back(g.at(0).get<double>(), g.at(1).get<double>(),
                      g.at(2).get<double>());
  return magflow::make_lattice(gens);
}

std::vector<magflow::PeriodicFamily> families_for_class(
    const magflow::FreeHomotopyClass& cls, double E, double B, double A, long cap) {
  if (cls.is_identity()) {
    Eigen::VectorXd Av(1);
    Av << A;
    return magflow::contractible_families(E, B, Av);
  }
  if (cls.is_central()) {
    auto fams = magflow::central_line_families(cls.z_gamma, E);
    auto spirals = magflow::central_spiral_families(cls.z_gamma, E, B, A, cap);
    fams.insert(fams.end(), spirals.begin(), spirals.end());
    return fams;
  }
  return magflow::noncentral_families(cls, E, B);
}

void print_families(std::ostream& os, const std::vector<magflow::PeriodicFamily>& fams) {
  os << "branch,ell,z0,omega,radius_sq,length\n";
  for (const auto& f : fams) {
    os << magflow::branch_name(f.branch) << ","
       << (f.ell ? std::to_string(*f.ell) : "") << "," << fmt(f.z0) << ","
       << fmt(f.omega) << "," << fmt(f.radius_sq) << "," << fmt(f.length) << "\n";
  }
}

int run_geodesic(const std::optional<double>& A, const std::optional<double>& B,
                 const std::optional<double>& u, const std::optional<double>& v,
                 const std::optional<double>& z0, const std::optional<double>& T,
                 int samples, const std::string& out, bool verify) {
  if (!A || !B || !u || !v || !z0 || !T)
    return usage_error("geodesic requires --A --B --u --v --z0 --T");
  if (!(*A > 0)) return usage_error("--A must be positive");
  if (!(*T > 0)) return usage_error("--T must be positive");

  magflow::HeisGeodesic geo;
  geo.A = Eigen::VectorXd::Constant(1, *A);
  geo.B = *B;
  geo.u = Eigen::VectorXd::Constant(1, *u);
  geo.v = Eigen::VectorXd::Constant(1, *v);
  geo.z0 = *z0;

  std::ofstream file;
  std::ostream& os = open_sink(file, out);
  os << "t,x,y,z\n";
  for (int i = 0; i <= samples; ++i) {
    const double t = *T * i / samples;
    const auto g = magflow::heis_eval(geo, t);
    os << fmt(t) << "," << fmt(g.coords.v[0]) << "," << fmt(g.coords.v[1]) << ","
       << fmt(g.coords.z[0]) << "\n";
  }
  if (verify) {
    const auto sys = magflow::heis_system(geo);
    const auto traj = magflow::integrate_numeric(sys, magflow::heis_momentum(geo), *T);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < traj.times.size(); ++i) {
      const auto g = magflow::heis_eval(geo, traj.times[i]);
      worst = std::max(worst,
                       (g.coords.full() - traj.points[i].coords.full())
                           .cwiseAbs()
                           .maxCoeff());
    }
    if (worst > 1e-6) return fail("VERIFY_GEODESIC", "oracle deviation " + fmt(worst));
  }
  return 0;
}

int run_spectrum(const std::string& cls_str, const std::optional<double>& E,
                 const std::optional<double>& B, const std::optional<double>& A,
                 long cap, const std::string& out, bool verify) {
  if (cls_str.empty() || !E || !B || !A)
    return usage_error("spectrum requires --class --E --B --A");
  double vn = 0, zg = 0;
  if (std::sscanf(cls_str.c_str(), "%lf,%lf", &vn, &zg) != 2)
    return usage_error("--class expects v_norm,z_gamma");
  if (vn < 0) return usage_error("class v_norm must be >= 0");
  if (vn != 0 && zg != 0)
    return usage_error("class must be central (0,z) or noncentral (v,0)");

  magflow::FreeHomotopyClass cls{vn, zg};
  std::vector<magflow::PeriodicFamily> fams;
  try {
    fams = families_for_class(cls, *E, *B, *A, cap);
  } catch (const std::exception& e) {
    return fail("SPECTRUM", e.what());
  }
  std::ofstream file;
  std::ostream& os = open_sink(file, out);
  print_families(os, fams);
  if (verify) {
    for (const auto& f : fams) {
      const double r = magflow::family_residual(f, cls, *E, *B, *A);
      if (r > 1e-8)
        return fail("VERIFY_SPECTRUM",
                    magflow::branch_name(f.branch) + " residual " + fmt(r));
    }
  }
  return 0;
}

int run_density(const std::optional<double>& zbar, const std::optional<double>& E,
                const std::optional<double>& B, const std::optional<double>& A,
                const std::vector<long>& bounds, const std::string& out, bool verify) {
  if (!zbar || !E || !B || !A || bounds.empty())
    return usage_error("density requires --zbar --E --B --A --bounds");
  std::ofstream file;
  std::ostream& os = open_sink(file, out);
  try {
    if (bounds.size() > 1) {
      os << "bound,max_gap\n";
      for (const auto& [b, gap] : magflow::density_trend(*zbar, *E, *B, *A, bounds))
        os << b << "," << fmt(gap) << "\n";
    } else {
      const auto rep = magflow::admissible_z0(*zbar, *E, *B, *A, bounds[0]);
      os << "h,ell,z0\n";
      for (const auto& w : rep.witnesses)
        os << fmt(w[0]) << "," << fmt(w[1]) << "," << fmt(w[2]) << "\n";
    }
    if (verify) {
      const auto rep = magflow::admissible_z0(*zbar, *E, *B, *A, bounds.back());
      const size_t stride = std::max<size_t>(1, rep.witnesses.size() / 50);
      for (size_t i = 0; i < rep.witnesses.size(); i += stride) {
        const auto& w = rep.witnesses[i];
        const double z0 = w[2];
        magflow::HeisGeodesic geo;
        geo.A = Eigen::VectorXd::Constant(1, *A);
        geo.B = *B;
        const double rsq = *A * (*E * *E - (z0 + *B) * (z0 + *B));
        geo.u = Eigen::VectorXd::Constant(1, std::sqrt(std::max(0.0, rsq)));
        geo.v = Eigen::VectorXd::Constant(1, 0.0);
        geo.z0 = z0;
        const double omega = 2.0 * kPi * *A * w[1] / z0;
        if (!magflow::resonance_check(geo, omega))
          return fail("VERIFY_DENSITY", "witness failed resonance at z0 " + fmt(z0));
      }
    }
  } catch (const std::exception& e) {
    return fail("DENSITY", e.what());
  }
  return 0;
}

int run_mls(const std::string& lat1_path, const std::string& lat2_path,
            const std::optional<double>& E, const std::optional<double>& B,
            double A1, double A2, int word_len, long cap, const std::string& out,
            bool verify) {
  if (lat1_path.empty() || lat2_path.empty() || !E || !B)
    return usage_error("mls requires --lattice1 --lattice2 --E --B");
  try {
    const auto l1 = lattice_from_file(lat1_path);
    const auto l2 = lattice_from_file(lat2_path);
    const auto s1 = magflow::marked_spectrum(l1, *E, *B, A1, word_len, cap);
    const auto s2 = magflow::marked_spectrum(l2, *E, *B, A2, word_len, cap);
    const auto marking = magflow::natural_marking(l1, l2, word_len, A1, A2);
    const auto rep = magflow::compare_mls(s1, s2, marking);
    std::ofstream file;
    std::ostream& os = open_sink(file, out);
    os << "comparison,result\n";
    for (const auto& line : rep.lines) os << "\"" << line << "\",\n";
    os << "equal," << (rep.equal ? "true" : "false") << "\n";
    if (verify) {
      // Cross-check a few central length sets against the independent
      // classifier.
      int checked = 0;
      for (const auto& [key, ls] : s1.entries) {
        if (key.v_norm != 0.0 || checked >= 5) continue;
        const auto alt =
            magflow::tangent_spiral_classifier(key.z_gamma, *E, *B, A1, cap);
        for (const auto& f : alt) {
          bool found = false;
          for (double v : ls.values)
            if (std::abs(v - f.length) <= 1e-9 * std::max(1.0, f.length)) found = true;
          if (!found && !ls.truncated)
            return fail("VERIFY_MLS", "length mismatch at z " + fmt(key.z_gamma));
        }
        ++checked;
      }
    }
  } catch (const std::exception& e) {
    return fail("MLS", e.what());
  }
  return 0;
}

int run_httype(const std::optional<double>& xi1, const std::optional<double>& xi2,
               const std::optional<double>& E, const std::optional<double>& B,
               const std::optional<long>& k, const std::string& out, bool verify) {
  if (!xi1 || !xi2 || !E || !B || !k)
    return usage_error("httype requires --xi1 --xi2 --E --B --k");
  if (*k == 0) return usage_error("--k must be nonzero");
  std::vector<std::string> diags;
  std::vector<magflow::HTRoot> roots;
  try {
    const auto seeds = magflow::ht_default_seeds(*xi1, *xi2, *E, *B, *k);
    roots = magflow::ht_central_period_solve(*xi1, *xi2, *E, *B, *k, seeds, &diags);
  } catch (const std::exception& e) {
    return fail("HTTYPE", e.what());
  }
  if (roots.empty())
    return fail("HTTYPE_NO_ROOTS",
                "no convergent seed (" + std::to_string(diags.size()) + " diagnostics)");
  std::ofstream file;
  std::ostream& os = open_sink(file, out);
  os << "u_sq,z1,z2,omega,residual\n";
  for (const auto& r : roots)
    os << fmt(r.u_sq) << "," << fmt(r.data.z1) << "," << fmt(r.data.z2) << ","
       << fmt(r.omega) << "," << fmt(r.residual) << "\n";
  if (verify) {
    // Roots are periodicity-checked by the solver; re-verify against the
    // numeric oracle at one sample each.
    const auto sys = magflow::ht_system(*B);
    for (const auto& r : roots) {
      const auto traj =
          magflow::integrate_numeric(sys, magflow::ht_momentum(r.data), 1.0);
      double worst = 0.0;
      for (Eigen::Index i = 0; i < traj.times.size(); i += 100) {
        const auto g = magflow::ht_geodesic_eval(r.data, traj.times[i]);
        worst = std::max(worst, (g.coords.full() - traj.points[i].coords.full())
                                    .cwiseAbs()
                                    .maxCoeff());
      }
      if (worst > 1e-6) return fail("VERIFY_HTTYPE", "oracle deviation " + fmt(worst));
    }
  }
  return 0;
}

int run_verify_all() {
  // Small built-in battery; the full suites live in the test binaries.
  struct Check {
    const char* name;
    bool ok;
  };
  std::vector<Check> checks;

  {
    magflow::HeisGeodesic geo;
    geo.A = Eigen::VectorXd::Constant(1, 2.0);
    geo.B = 0.7;
    geo.u = Eigen::VectorXd::Constant(1, 1.1);
    geo.v = Eigen::VectorXd::Constant(1, -0.4);
    geo.z0 = 0.3;
    const auto sys = magflow::heis_system(geo);
    const auto traj = magflow::integrate_numeric(sys, magflow::heis_momentum(geo), 5.0);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < traj.times.size(); ++i)
      worst = std::max(worst, (magflow::heis_eval(geo, traj.times[i]).coords.full() -
                               traj.points[i].coords.full())
                                  .cwiseAbs()
                                  .maxCoeff());
    checks.push_back({"closed-form vs numeric oracle", worst <= 1e-6});
  }
  {
    const auto fams = magflow::central_spiral_families(20.0 * kPi, 2.0, 1.0, 1.0);
    long count_1a = 0;
    for (const auto& f : fams)
      if (f.branch == magflow::FamilyBranch::spiral_1a) ++count_1a;
    checks.push_back({"spectrum example families", count_1a == 14});
  }
  {
    const auto roots = magflow::ht_central_period_solve(
        8.0 * kPi, 0.0, 1.0, 0.25, 1,
        magflow::ht_default_seeds(8.0 * kPi, 0.0, 1.0, 0.25, 1));
    bool ok = !roots.empty();
    for (const auto& r : roots) ok = ok && std::abs(r.data.z2) <= 1e-10;
    checks.push_back({"httype parallel case", ok});
  }

  bool all = true;
  for (const auto& c : checks) {
    std::cout << (c.ok ? "PASS " : "FAIL ") << c.name << "\n";
    all = all && c.ok;
  }
  return all ? 0 : fail("VERIFY_ALL", "one or more checks failed");
}

}  // namespace

int main(int argc, char** argv) {
  (void)thread_cap();

  CLI::App app{"magnetic geodesics on two-step nilpotent groups"};
  app.require_subcommand(1);

  std::string config_path, out, cls_str, lat1, lat2;
  std::optional<double> A, B, E, u, v, z0, T, zbar, xi1, xi2;
  std::optional<long> k;
  std::vector<long> bounds;
  double A1 = 1.0, A2 = 1.0;
  int samples = 200, word_len = 3;
  long cap = 10000;
  bool verify = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file; flags override");
    sub->add_option("--out", out, "output CSV path (default stdout)");
    sub->add_flag("--verify", verify, "re-run residual/oracle checks");
  };

  auto* sc_geo = app.add_subcommand("geodesic", "sample a closed-form geodesic");
  sc_geo->add_option("--A", A);
  sc_geo->add_option("--B", B);
  sc_geo->add_option("--u", u);
  sc_geo->add_option("--v", v);
  sc_geo->add_option("--z0", z0);
  sc_geo->add_option("--T", T);
  sc_geo->add_option("--samples", samples);
  add_common(sc_geo);

  auto* sc_spec = app.add_subcommand("spectrum", "periodic families for a class");
  sc_spec->add_option("--class", cls_str, "v_norm,z_gamma");
  sc_spec->add_option("--E", E);
  sc_spec->add_option("--B", B);
  sc_spec->add_option("--A", A);
  sc_spec->add_option("--cap", cap);
  add_common(sc_spec);

  auto* sc_den = app.add_subcommand("density", "admissible central momenta");
  sc_den->add_option("--zbar", zbar);
  sc_den->add_option("--E", E);
  sc_den->add_option("--B", B);
  sc_den->add_option("--A", A);
  sc_den->add_option("--bounds", bounds)->delimiter(',');
  add_common(sc_den);

  auto* sc_mls = app.add_subcommand("mls", "compare marked length spectra");
  sc_mls->add_option("--lattice1", lat1);
  sc_mls->add_option("--lattice2", lat2);
  sc_mls->add_option("--E", E);
  sc_mls->add_option("--B", B);
  sc_mls->add_option("--A1", A1);
  sc_mls->add_option("--A2", A2);
  sc_mls->add_option("--word-len", word_len);
  sc_mls->add_option("--cap", cap);
  add_common(sc_mls);

  auto* sc_ht = app.add_subcommand("httype", "central-period roots, 6-dim example");
  sc_ht->add_option("--xi1", xi1);
  sc_ht->add_option("--xi2", xi2);
  sc_ht->add_option("--E", E);
  sc_ht->add_option("--B", B);
  sc_ht->add_option("--k", k);
  add_common(sc_ht);

  app.add_subcommand("verify-all", "run the built-in check battery");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (!config_path.empty()) {
    std::string err;
    const auto cfg = load_config(config_path, &err);
    if (!cfg) return usage_error(err);
    merge(A, *cfg, "A");
    merge(B, *cfg, "B");
    merge(E, *cfg, "E");
    merge(u, *cfg, "u");
    merge(v, *cfg, "v");
    merge(z0, *cfg, "z0");
    merge(T, *cfg, "T");
    merge(zbar, *cfg, "zbar");
    merge(xi1, *cfg, "xi1");
    merge(xi2, *cfg, "xi2");
    merge(k, *cfg, "k");
    if (cls_str.empty() && cfg->contains("class"))
      cls_str = cfg->at("class").get<std::string>();
    if (bounds.empty() && cfg->contains("bounds"))
      bounds = cfg->at("bounds").get<std::vector<long>>();
  }

  if (app.got_subcommand("geodesic"))
    return run_geodesic(A, B, u, v, z0, T, samples, out, verify);
  if (app.got_subcommand("spectrum"))
    return run_spectrum(cls_str, E, B, A, cap, out, verify);
  if (app.got_subcommand("density"))
    return run_density(zbar, E, B, A, bounds, out, verify);
  if (app.got_subcommand("mls"))
    return run_mls(lat1, lat2, E, B, A1, A2, word_len, cap, out, verify);
  if (app.got_subcommand("httype"))
    return run_httype(xi1, xi2, E, B, k, out, verify);
  if (app.got_subcommand("verify-all")) return run_verify_all();
  return usage_error("unknown subcommand");
}
