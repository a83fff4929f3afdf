// Command-line driver: parameter sweeps, degree probes, invertibility
// checks, figure generation, and the frozen validation suite.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cav/acceptance.hpp"
#include "cav/capmin.hpp"
#include "cav/degree.hpp"
#include "cav/invcheck.hpp"
#include "cav/quadrature.hpp"

using nlohmann::json;
using namespace cav;

namespace {

constexpr const char* kFormatVersion = "1";

// ---------------------------------------------------------------------------
// config file support: flat JSON, command-line flags win

json load_config(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      std::ifstream in(argv[i + 1]);
      if (!in) throw CLI::ValidationError("--config", "cannot open config file");
      json cfg = json::parse(in, nullptr, true, true);
      if (!cfg.is_object())
        throw CLI::ValidationError("--config", "config must be a flat JSON object");
      return cfg;
    }
  }
  return json::object();
}

template <typename T>
void seed_default(const json& cfg, const std::string& key, T& var) {
  if (cfg.contains(key)) var = cfg.at(key).get<T>();
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

std::unique_ptr<RadialMap> make_map(const std::string& kind, double eps,
                                    double a, std::optional<double> p) {
  if (kind == "identity") return std::make_unique<IdentityMap>();
  if (kind == "limit") {
    double pe = p ? *p : make_params(0.1, a).p;
    return std::make_unique<LimitMap>(pe);
  }
  if (kind == "family") return std::make_unique<FamilyMap>(make_params(eps, a, p));
  throw CLI::ValidationError("--map", "must be family, limit or identity");
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << body;
}

// ---------------------------------------------------------------------------
// energy-sweep

int cmd_energy_sweep(const std::vector<double>& eps_list, double a,
                     std::optional<double> p, double tol,
                     const std::string& out_csv, const std::string& out_json,
                     const json& resolved) {
  if (eps_list.empty())
    throw CLI::ValidationError("--eps", "at least one value required");

  struct Row {
    double eps;
    EnergyEntry dirichlet, jac_a, jac_2, distortion;
  };
  std::vector<Row> rows;
  bool all_converged = true;
  for (double eps : eps_list) {
    MapParams mp = make_params(eps, a, p);
    FamilyMap f(mp);
    CellDecomposition dec = region_cells(mp);
    Row row{eps,
            integrate_energy(f, dec, {EnergyKind::dirichlet, 1.0}, tol),
            integrate_energy(f, dec, {EnergyKind::jac_neg_power, a}, tol),
            integrate_energy(f, dec, {EnergyKind::jac_neg_power, 2.0}, tol),
            integrate_energy(f, dec, {EnergyKind::distortion_half, 1.0}, tol)};
    all_converged = all_converged && row.dirichlet.converged &&
                    row.jac_a.converged && row.jac_2.converged &&
                    row.distortion.converged;
    rows.push_back(std::move(row));
  }

  // log-log slope of the divergence probe against eps
  std::vector<double> lx, ly;
  for (const Row& r : rows) {
    lx.push_back(std::log(r.eps));
    ly.push_back(std::log(r.jac_2.total));
  }
  double slope = 0.0;
  if (rows.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < lx.size(); ++i) {
      sx += lx[i];
      sy += ly[i];
      sxx += lx[i] * lx[i];
      sxy += lx[i] * ly[i];
    }
    const double n = static_cast<double>(lx.size());
    slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }

  std::vector<std::string> regions;
  for (const auto& [name, v] : rows.front().dirichlet.per_region)
    regions.push_back(name);

  std::ostringstream csv;
  csv << "format_version,config,eps,dirichlet,dirichlet_err,jac_neg_power_a,"
         "jac_neg_power_a_err,jac_neg_power_2,jac_neg_power_2_err,distortion_half,"
         "distortion_half_err,converged";
  for (const auto& r : regions) {
    csv << ",dirichlet_region_" << r << ",jac_neg_power_2_region_" << r;
  }
  csv << "\r\n";
  for (const Row& r : rows) {
    csv << kFormatVersion << ',' << csv_quote(resolved.dump()) << ',' << fmt(r.eps)
        << ',' << fmt(r.dirichlet.total) << ',' << fmt(r.dirichlet.est_error)
        << ',' << fmt(r.jac_a.total) << ',' << fmt(r.jac_a.est_error) << ','
        << fmt(r.jac_2.total) << ',' << fmt(r.jac_2.est_error) << ','
        << fmt(r.distortion.total) << ',' << fmt(r.distortion.est_error) << ','
        << (r.dirichlet.converged && r.jac_a.converged && r.jac_2.converged &&
                    r.distortion.converged
                ? "true"
                : "false");
    for (const auto& name : regions) {
      csv << ',' << fmt(r.dirichlet.per_region.at(name)) << ','
          << fmt(r.jac_2.per_region.at(name));
    }
    csv << "\r\n";
  }
  if (!out_csv.empty()) write_text(out_csv, csv.str());

  json rep;
  rep["format_version"] = kFormatVersion;
  rep["config"] = resolved;
  rep["jac_neg_power_2_loglog_slope"] = slope;
  rep["rows"] = json::array();
  for (const Row& r : rows) {
    json jr;
    jr["eps"] = r.eps;
    auto entry = [](const EnergyEntry& e) {
      json je;
      je["total"] = e.total;
      je["est_error"] = e.est_error;
      je["converged"] = e.converged;
      je["cells"] = e.cells;
      je["flagged_cells"] = e.flagged_cells;
      je["per_region"] = e.per_region;
      return je;
    };
    jr["dirichlet"] = entry(r.dirichlet);
    jr["jac_neg_power_a"] = entry(r.jac_a);
    jr["jac_neg_power_2"] = entry(r.jac_2);
    jr["distortion_half"] = entry(r.distortion);
    rep["rows"].push_back(jr);
  }
  std::string body = rep.dump(2) + "\n";
  if (!out_json.empty()) write_text(out_json, body);
  std::cout << body;
  return all_converged ? 0 : 3;
}

// ---------------------------------------------------------------------------
// inv-check

int cmd_inv_check(const std::string& map_kind, double eps, double a,
                  std::optional<double> p, const std::vector<double>& radii,
                  long long samples, int level, double tube, uint64_t seed,
                  const std::string& out_prefix, const json& resolved) {
  if (radii.empty())
    throw CLI::ValidationError("--balls", "at least one radius required");
  auto map = make_map(map_kind, eps, a, p);

  json summary;
  summary["format_version"] = kFormatVersion;
  summary["config"] = resolved;
  summary["reports"] = json::array();
  for (double r : radii) {
    InvReport rep = check_inv(*map, Ball{CartesianPoint::Zero(), r}, samples,
                              level, tube, seed);
    json jr = json::parse(rep.to_json());
    summary["reports"].push_back(jr);
    if (!out_prefix.empty()) {
      std::ostringstream name;
      name << out_prefix << "_r" << fmt(r) << ".json";
      json single;
      single["format_version"] = kFormatVersion;
      single["config"] = resolved;
      single["report"] = jr;
      write_text(name.str(), single.dump(2) + "\n");
    }
    std::cout << "B(0," << r << "): " << to_string(rep.verdict)
              << "  inside " << rep.inside_in_image << "/" << rep.inside_tested
              << "  outside " << rep.outside_out_of_image << "/"
              << rep.outside_tested << "\n";
  }
  if (!out_prefix.empty())
    write_text(out_prefix + "_summary.json", summary.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// degree-probe

int cmd_degree_probe(const std::string& map_kind, double eps, double a,
                     std::optional<double> p, double radius, int level,
                     const std::vector<double>& probe_flat, int weak_grid,
                     const std::string& out_json, const json& resolved) {
  if (probe_flat.size() % 3 != 0)
    throw CLI::ValidationError("--probe", "expects triples x y z");
  auto map = make_map(map_kind, eps, a, p);
  ImageSurface img = push_mesh(
      [&](const CartesianPoint& x) { return map->map(x); },
      icosphere(CartesianPoint::Zero(), radius, level));

  json rep;
  rep["format_version"] = kFormatVersion;
  rep["config"] = resolved;
  rep["probes"] = json::array();
  for (size_t i = 0; i + 2 < probe_flat.size(); i += 3) {
    CartesianPoint y(probe_flat[i], probe_flat[i + 1], probe_flat[i + 2]);
    DegreeResult d = degree_at(img, y);
    json jp;
    jp["y"] = {y.x(), y.y(), y.z()};
    jp["degree"] = d.degree;
    jp["residue"] = d.residue;
    jp["guard_margin"] = d.guard_margin;
    jp["guard_ok"] = d.guard_ok;
    rep["probes"].push_back(jp);
    std::cout << "deg(" << y.x() << "," << y.y() << "," << y.z()
              << ") = " << d.degree << "  residue " << d.residue
              << "  guard " << d.guard_margin << "\n";
  }
  if (weak_grid > 0) {
    WeakIdentityReport w = verify_weak_identity(img, linear_field(), weak_grid);
    json jw;
    jw["lhs"] = w.lhs;
    jw["rhs"] = w.rhs;
    jw["residual"] = w.residual;
    jw["components"] = w.components;
    jw["residue_fraction_ok"] = w.residue_fraction_ok;
    rep["weak_identity"] = jw;
    std::cout << "weak identity: lhs " << w.lhs << "  rhs " << w.rhs
              << "  residual " << w.residual << "\n";
  }
  if (!out_json.empty()) write_text(out_json, rep.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// horseshoe-plot

std::string svg_polyline(const std::vector<std::pair<double, double>>& pts,
                         const std::string& color, double width) {
  std::ostringstream os;
  os << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
     << width << "\" points=\"";
  os << std::setprecision(8);
  for (const auto& [x, y] : pts) os << x << ',' << -y << ' ';
  os << "\"/>\n";
  return os.str();
}

int cmd_horseshoe_plot(const std::string& map_kind, double eps, double a,
                       std::optional<double> p,
                       const std::vector<double>& radii,
                       const std::string& out_prefix, const json& resolved) {
  if (radii.empty())
    throw CLI::ValidationError("--radii", "at least one radius required");
  auto map = make_map(map_kind, eps, a, p);
  const int n_pts = 800;

  for (double r : radii) {
    double window = std::max(1.2, 1.2 * r);
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
        << "viewBox=\"" << -window << " " << -window << " " << 4.4 * window
        << " " << 2 * window << "\">\n";
    svg << "  <!-- format_version " << kFormatVersion << " config "
        << resolved.dump() << " -->\n";

    // domain cross-section (left): the sphere circle and, for the family,
    // the branch curves alpha = S(r') and alpha = S(r') - delta(r')
    std::vector<std::pair<double, double>> circle;
    for (int i = 0; i <= n_pts; ++i) {
      double t = 2.0 * M_PI * i / n_pts;
      circle.push_back({r * std::sin(t), r * std::cos(t)});
    }
    svg << svg_polyline(circle, "#888888", window / 400.0);
    if (map_kind == "family") {
      MapParams mp = make_params(eps, a, p);
      std::vector<std::pair<double, double>> ws, wt;
      for (int i = 1; i < n_pts; ++i) {
        double rr = 2.0 * i / n_pts;
        double s = s_curve(mp, rr), st = s - thickness(mp, rr);
        ws.push_back({rr * std::sin(s), rr * std::cos(s)});
        wt.push_back({rr * std::sin(st), rr * std::cos(st)});
      }
      svg << svg_polyline(ws, "#cc4444", window / 600.0);
      svg << svg_polyline(wt, "#4444cc", window / 600.0);
    }

    // image cross-section (right, shifted by 2.4 * window): beta = 0 and
    // beta = pi half-planes traced over alpha
    std::vector<std::pair<double, double>> image;
    const double shift = 2.4 * window;
    for (int i = 0; i <= n_pts; ++i) {
      double alpha = M_PI * i / n_pts;
      CartesianPoint y = map->map(SphericalPoint::canonical(r, alpha, 0.0));
      image.push_back({shift + y.x(), y.z()});
    }
    for (int i = n_pts; i >= 0; --i) {
      double alpha = M_PI * i / n_pts;
      CartesianPoint y = map->map(SphericalPoint::canonical(r, alpha, M_PI));
      image.push_back({shift + y.x(), y.z()});
    }
    svg << svg_polyline(image, "#000000", window / 400.0);
    svg << "</svg>\n";

    std::ostringstream name;
    name << out_prefix << "_r" << fmt(r) << ".svg";
    write_text(name.str(), svg.str());
    std::cout << "wrote " << name.str() << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// capmin-solve

int cmd_capmin_solve(const std::string& kind, double disk_radius,
                     double sphere_radius, double cap_theta, double mesh_h,
                     const std::string& trace, const std::string& out_off,
                     const std::string& out_json, const json& resolved) {
  CapProblem prob;
  prob.disk_radius = disk_radius;
  prob.sphere_radius = sphere_radius;
  prob.cap_angular_radius = cap_theta;
  prob.mesh_h = mesh_h;
  if (kind == "flat")
    prob.kind = CapKind::flat_disk;
  else if (kind == "spherical")
    prob.kind = CapKind::spherical_cap;
  else
    throw CLI::ValidationError("--kind", "must be flat or spherical");

  if (trace == "constant") {
    prob.boundary_trace = [](double) { return Eigen::Vector3d(0, 0, 1); };
  } else if (trace == "linear") {
    prob.boundary_trace = [disk_radius](double phi) {
      return Eigen::Vector3d(disk_radius * std::cos(phi), 0, 0);
    };
  } else if (trace == "quadratic") {
    prob.boundary_trace = [disk_radius](double phi) {
      double c = std::cos(phi), s = std::sin(phi);
      return Eigen::Vector3d(disk_radius * disk_radius * (c * c - s * s), 0, 0);
    };
  } else if (trace == "rim") {
    prob.boundary_trace = [sphere_radius, cap_theta](double phi) {
      return Eigen::Vector3d(sphere_radius * std::sin(cap_theta) * std::cos(phi),
                             sphere_radius * std::sin(cap_theta) * std::sin(phi),
                             sphere_radius * std::cos(cap_theta));
    };
  } else {
    throw CLI::ValidationError("--trace",
                               "must be constant, linear, quadratic or rim");
  }

  CapSolution sol = solve_cap(prob);
  json rep;
  rep["format_version"] = kFormatVersion;
  rep["config"] = resolved;
  rep["energy"] = sol.energy;
  rep["boundary_residual"] = sol.boundary_residual;
  rep["min_angle_deg"] = sol.min_angle_deg;
  rep["nodes"] = sol.values.rows();
  rep["triangles"] = sol.triangles.size();
  std::string body = rep.dump(2) + "\n";
  if (!out_json.empty()) write_text(out_json, body);
  std::cout << body;

  if (!out_off.empty()) {
    std::vector<CartesianPoint> verts;
    for (int i = 0; i < sol.values.rows(); ++i)
      verts.push_back(sol.values.row(i).transpose());
    write_off(verts, sol.triangles, out_off);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// validate

int cmd_validate(const std::vector<int>& only, const std::string& out_json,
                 bool mutate_jacobian_sign, int inv_mesh_level,
                 const json& resolved) {
  if (mutate_jacobian_sign) {
    // Mutation check: flipping the image orientation must break the degree
    // oracles; a suite that still passes would prove nothing.
    TriangulatedSphere mesh = icosphere(CartesianPoint::Zero(), 1.0, 4);
    for (auto& t : mesh.triangles) std::swap(t[1], t[2]);
    ImageSurface img =
        push_mesh([](const CartesianPoint& y) { return y; }, mesh);
    DegreeResult d = degree_at(img, CartesianPoint::Zero());
    std::cout << "[" << (d.degree == 1 ? "PASS" : "FAIL")
              << "] 3 degree_oracles (mutated)  degree at origin = "
              << d.degree << " (expected 1 to pass, got broken by design)\n";
    return d.degree == 1 ? 0 : 1;
  }
  if (inv_mesh_level >= 0) {
    // Re-run the invertibility checks at a user-forced mesh level; too
    // coarse a mesh must abort loudly (exit 3), never pass silently.
    FamilyMap f(make_params(0.1, 1.0));
    for (double r : {0.5, 1.5}) {
      InvReport rep = check_inv(f, Ball{CartesianPoint::Zero(), r}, 1000,
                                inv_mesh_level);
      std::cout << "B(0," << r << ") at level " << inv_mesh_level << ": "
                << to_string(rep.verdict) << "\n";
      if (rep.verdict != InvVerdict::satisfied) return 1;
    }
    return 0;
  }

  std::vector<Criterion> results = run_acceptance(only);
  json rep;
  rep["format_version"] = kFormatVersion;
  rep["config"] = resolved;
  rep["criteria"] = json::array();
  bool all_pass = true;
  for (const Criterion& c : results) {
    json jc;
    jc["id"] = c.id;
    jc["name"] = c.name;
    jc["pass"] = c.pass;
    jc["detail"] = c.detail;
    jc["seconds"] = c.seconds;
    rep["criteria"].push_back(jc);
    all_pass = all_pass && c.pass;
    std::printf("[%s] %d %s (%.1fs)  %s\n", c.pass ? "PASS" : "FAIL", c.id,
                c.name.c_str(), c.seconds, c.detail.c_str());
  }
  if (!out_json.empty()) write_text(out_json, rep.dump(2) + "\n");
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  json cfg;
  try {
    cfg = load_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  CLI::App app{"Numerical laboratory for a family of ball homeomorphisms, "
               "their weak limit, energies and topological degree"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "flat JSON config; flags win");

  // shared map-selection options, seeded from the config file
  std::string map_kind = "family";
  double eps = 0.1, a = 1.0;
  double p_flag = -1.0;
  seed_default(cfg, "map", map_kind);
  seed_default(cfg, "eps", eps);
  seed_default(cfg, "a", a);
  seed_default(cfg, "p", p_flag);
  auto popt = [&]() -> std::optional<double> {
    return p_flag > 0 ? std::optional<double>(p_flag) : std::nullopt;
  };

  // energy-sweep
  auto* sweep = app.add_subcommand("energy-sweep",
                                   "energy functionals across an eps list");
  std::vector<double> eps_list;
  double tol = 1e-3;
  std::string out_csv = "energy_sweep.csv", out_json = "energy_sweep.json";
  seed_default(cfg, "eps_list", eps_list);
  seed_default(cfg, "tol", tol);
  seed_default(cfg, "out_csv", out_csv);
  seed_default(cfg, "out_json", out_json);
  sweep->add_option("--eps", eps_list, "eps values");
  sweep->add_option("--a", a, "distortion exponent a");
  sweep->add_option("--p", p_flag, "profile exponent override");
  sweep->add_option("--tol", tol, "relative quadrature tolerance");
  sweep->add_option("--out-csv", out_csv, "CSV output path");
  sweep->add_option("--out-json", out_json, "JSON output path");

  // inv-check
  auto* inv = app.add_subcommand("inv-check",
                                 "invertibility condition on a list of balls");
  std::vector<double> balls;
  long long samples = 1000;
  int level = 10;
  double tube = 1e-3;
  uint64_t seed = 0;
  bool seed_given = cfg.contains("seed");
  std::string inv_out;
  seed_default(cfg, "balls", balls);
  seed_default(cfg, "samples", samples);
  seed_default(cfg, "level", level);
  seed_default(cfg, "tube", tube);
  seed_default(cfg, "seed", seed);
  seed_default(cfg, "out_prefix", inv_out);
  inv->add_option("--map", map_kind, "family | limit | identity");
  inv->add_option("--eps", eps, "family eps");
  inv->add_option("--a", a, "family a");
  inv->add_option("--p", p_flag, "profile exponent override");
  inv->add_option("--balls", balls, "ball radii, centered at the origin");
  inv->add_option("--samples", samples, "samples per ball");
  inv->add_option("--level", level,
                  "mesh level: pushed triangles at most image diam / 2^level");
  inv->add_option("--tube", tube, "polar-axis exclusion tube radius");
  auto* seed_opt = inv->add_option("--seed", seed, "sampling seed (required)");
  inv->add_option("--out-prefix", inv_out, "per-ball JSON output prefix");

  // degree-probe
  auto* probe = app.add_subcommand("degree-probe",
                                   "degree at points / weak-identity check");
  double radius = 1.0;
  std::vector<double> probe_flat;
  int probe_level = 6;
  int weak_grid = 0;
  std::string probe_out;
  seed_default(cfg, "radius", radius);
  seed_default(cfg, "probe", probe_flat);
  seed_default(cfg, "weak_grid", weak_grid);
  seed_default(cfg, "out_json", probe_out);
  probe->add_option("--map", map_kind, "family | limit | identity");
  probe->add_option("--eps", eps, "family eps");
  probe->add_option("--a", a, "family a");
  probe->add_option("--p", p_flag, "profile exponent override");
  probe->add_option("--radius", radius, "source sphere radius");
  probe->add_option("--level", probe_level, "icosphere subdivision level");
  probe->add_option("--probe", probe_flat, "probe points as x y z triples");
  probe->add_option("--weak-grid", weak_grid,
                    "grid n for the weak-identity check (0 = skip)");
  probe->add_option("--out-json", probe_out, "JSON output path");

  // horseshoe-plot
  auto* plot = app.add_subcommand("horseshoe-plot",
                                  "xz cross-sections of sphere images");
  std::vector<double> radii;
  std::string plot_prefix = "horseshoe";
  seed_default(cfg, "radii", radii);
  seed_default(cfg, "plot_prefix", plot_prefix);
  plot->add_option("--map", map_kind, "family | limit | identity");
  plot->add_option("--eps", eps, "family eps");
  plot->add_option("--a", a, "family a");
  plot->add_option("--p", p_flag, "profile exponent override");
  plot->add_option("--radii", radii, "sphere radii");
  plot->add_option("--out-prefix", plot_prefix, "SVG output prefix");

  // capmin-solve
  auto* cap = app.add_subcommand("capmin-solve",
                                 "minimizing P1 map into a disk or small cap");
  std::string cap_kind = "flat", cap_trace = "linear";
  double disk_radius = 1.0, sphere_radius = 1.0, cap_theta = 0.02,
         mesh_h = 0.05;
  std::string cap_off, cap_json;
  seed_default(cfg, "kind", cap_kind);
  seed_default(cfg, "trace", cap_trace);
  seed_default(cfg, "disk_radius", disk_radius);
  seed_default(cfg, "sphere_radius", sphere_radius);
  seed_default(cfg, "cap_theta", cap_theta);
  seed_default(cfg, "mesh_h", mesh_h);
  seed_default(cfg, "out_off", cap_off);
  seed_default(cfg, "out_json", cap_json);
  cap->add_option("--kind", cap_kind, "flat | spherical");
  cap->add_option("--trace", cap_trace, "constant | linear | quadratic | rim");
  cap->add_option("--disk-radius", disk_radius, "flat chart radius");
  cap->add_option("--sphere-radius", sphere_radius, "target sphere radius");
  cap->add_option("--cap-theta", cap_theta, "cap angular radius");
  cap->add_option("--mesh-h", mesh_h, "mesh size relative to chart radius");
  cap->add_option("--out-off", cap_off, "OFF mesh output path");
  cap->add_option("--out-json", cap_json, "JSON report path");

  // validate
  auto* val = app.add_subcommand("validate", "run the acceptance suite");
  std::vector<int> only;
  std::string val_json;
  bool mutate = false;
  int inv_level_override = -1;
  seed_default(cfg, "only", only);
  seed_default(cfg, "out_json", val_json);
  val->add_option("--only", only, "restrict to criterion ids (1-10)");
  val->add_option("--out-json", val_json, "JSON report path");
  val->add_flag("--mutate-jacobian-sign", mutate,
                "sanity mutation: flipped orientation must fail");
  val->add_option("--mesh-level", inv_level_override,
                  "force the invertibility-check mesh level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  // resolved config for embedding into outputs
  json resolved = cfg;
  resolved["map"] = map_kind;
  resolved["eps"] = eps;
  resolved["a"] = a;
  if (p_flag > 0) resolved["p"] = p_flag;

  try {
    if (sweep->parsed()) {
      resolved["eps_list"] = eps_list;
      resolved["tol"] = tol;
      return cmd_energy_sweep(eps_list, a, popt(), tol, out_csv, out_json,
                              resolved);
    }
    if (inv->parsed()) {
      if (!seed_given && seed_opt->count() == 0)
        throw CLI::ValidationError("--seed", "a seed is required for sampling");
      resolved["balls"] = balls;
      resolved["samples"] = samples;
      resolved["level"] = level;
      resolved["tube"] = tube;
      resolved["seed"] = seed;
      return cmd_inv_check(map_kind, eps, a, popt(), balls, samples, level,
                           tube, seed, inv_out, resolved);
    }
    if (probe->parsed()) {
      resolved["radius"] = radius;
      resolved["level"] = probe_level;
      return cmd_degree_probe(map_kind, eps, a, popt(), radius, probe_level,
                              probe_flat, weak_grid, probe_out, resolved);
    }
    if (plot->parsed()) {
      resolved["radii"] = radii;
      return cmd_horseshoe_plot(map_kind, eps, a, popt(), radii, plot_prefix,
                                resolved);
    }
    if (cap->parsed()) {
      resolved["kind"] = cap_kind;
      resolved["trace"] = cap_trace;
      resolved["mesh_h"] = mesh_h;
      return cmd_capmin_solve(cap_kind, disk_radius, sphere_radius, cap_theta,
                              mesh_h, cap_trace, cap_off, cap_json, resolved);
    }
    if (val->parsed()) {
      return cmd_validate(only, val_json, mutate, inv_level_override,
                          resolved);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
