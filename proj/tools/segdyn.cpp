// segdyn command-line front end.
//
//   segdyn potential   --at x,y,z --A a
//   segdyn circular    --s S --A a | --c C --A a | --family smin:smax:n --A a
//   segdyn propagate   --chart cylindrical --state r,theta,x,P_r,P_theta,P_x --t-end T --A a
//   segdyn poincare    --A a --c C --h H --seed-grid rmin:rmax:n,prmin:prmax:m --crossings N
//   segdyn fixpoint    --A a --tuple r,x,P_r,P_x [--c C] [--k K]
//   segdyn reconstruct --A a --c C --state r,x,P_r,P_x --t-end T [--period-k K]
//
// Exit status: 0 success, 2 usage or input error, 3 numerical failure.
// With --output FILE the resolved options are echoed to FILE.config.json,
// which `segdyn --config FILE.config.json` replays.

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "segdyn/segdyn.hpp"

namespace {

using namespace segdyn;
using nlohmann::json;

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

// ---------------------------------------------------------------------------
// JSON configuration files: top-level keys are subcommand names, each holding
// that subcommand's options by long name.

class ConfigJSON : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    return dump(app, default_also).dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    json j;
    try {
      in >> j;
    } catch (const json::parse_error& e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    std::vector<CLI::ConfigItem> out;
    collect(j, "", {}, out);
    return out;
  }

 private:
  static json dump(const CLI::App* app, bool default_also) {
    json j = json::object();
    dump_options(app, default_also, j);
    // Option groups are nameless sub-apps; their options belong to this level.
    for (const CLI::App* group : const_cast<CLI::App*>(app)->get_subcommands([](CLI::App* s) { return s->get_name().empty(); })) {
      dump_options(group, default_also, j);
    }
    for (const CLI::App* sub : app->get_subcommands()) {
      if (!sub->get_name().empty()) j[sub->get_name()] = dump(sub, default_also);
    }
    return j;
  }

  static void dump_options(const CLI::App* app, bool default_also, json& j) {
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string& name = opt->get_lnames().front();
      if (opt->get_type_size() == 0) {
        if (opt->count() > 0 || default_also) j[name] = opt->count() > 0;
      } else if (opt->count() == 1) {
        j[name] = opt->results().front();
      } else if (opt->count() > 1) {
        j[name] = opt->results();
      } else if (default_also && !opt->get_default_str().empty() && opt->get_needs().empty()) {
        j[name] = opt->get_default_str();
      }
    }
  }

  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("unsupported config value " + v.dump());
  }

  static void collect(const json& j, const std::string& name, std::vector<std::string> parents,
                      std::vector<CLI::ConfigItem>& out) {
    if (j.is_object()) {
      // "++" and "--" open and close a subcommand section, which triggers it.
      if (!name.empty()) {
        parents.push_back(name);
        out.push_back({parents, "++", {}});
      }
      for (auto it = j.begin(); it != j.end(); ++it) collect(*it, it.key(), parents, out);
      if (!name.empty()) out.push_back({parents, "--", {}});
      return;
    }
    if (name.empty()) throw CLI::ConversionError("config file must hold a JSON object");
    CLI::ConfigItem item;
    item.name = name;
    item.parents = parents;
    if (j.is_array()) {
      for (const auto& v : j) item.inputs.push_back(scalar(v));
    } else {
      item.inputs.push_back(scalar(j));
    }
    out.push_back(std::move(item));
  }
};

// ---------------------------------------------------------------------------
// Options shared by the subcommands.

struct Model {
  double A = 0.0;
  double alpha = 0.0, M = 1.0, L = 1.0, G = 1.0;
  std::string units = "L";
  CLI::Option* A_opt = nullptr;
  CLI::Option* alpha_opt = nullptr;

  void add(CLI::App* app) {
    auto* group = app->add_option_group("model", "segment model: either --A or --alpha with --M, --L, --G");
    A_opt = group->add_option("--A", A, "dimensionless density slope, 0 <= A < 1/3");
    alpha_opt = group->add_option("--alpha", alpha, "physical density slope");
    auto* m = group->add_option("--M", M, "physical mass")->capture_default_str();
    auto* l = group->add_option("--L", L, "physical half-length")->capture_default_str();
    auto* g = group->add_option("--G", G, "gravitational constant")->capture_default_str();
    A_opt->excludes(alpha_opt);
    for (auto* o : {m, l, g}) o->needs(alpha_opt);
    group->require_option(1, 4);
    app->add_option("--units", units, "length unit of inputs and outputs: L (half-length) or 2L (full length)")
        ->check(CLI::IsMember({"L", "2L"}))
        ->capture_default_str();
  }

  bool physical() const { return alpha_opt->count() > 0; }

  double scaled_A() const {
    if (physical()) return to_scaled(derive_segment(alpha, M, L, G)).A;
    validate_A(A);
    return A;
  }

  UnitConvention convention() const { return {units == "2L" ? Units::TwoL : Units::L}; }
};

void add_integration(CLI::App* app, PropagateOptions& o) {
  app->add_option("--abs-tol", o.abs_tol, "integrator absolute tolerance, in [1e-14, 1e-3]")->capture_default_str();
  app->add_option("--rel-tol", o.rel_tol, "integrator relative tolerance, in [1e-14, 1e-3]")->capture_default_str();
  app->add_option("--max-steps", o.max_steps, "integrator step limit")->capture_default_str();
  app->add_option("--escape-radius", o.escape_radius, "escape threshold on s")->capture_default_str();
  app->add_option("--collision-gap", o.collision_gap, "collision threshold on s - 2")->capture_default_str();
}

std::vector<double> parse_list(const std::string& text, std::size_t expected, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError(what, "cannot parse '" + item + "' as a number");
    }
  }
  if (expected != 0 && out.size() != expected) {
    throw CLI::ValidationError(what, "expected " + std::to_string(expected) + " comma-separated values");
  }
  return out;
}

struct Range {
  double lo, hi;
  std::size_t n;
};

Range parse_range(const std::string& text, const char* what) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw CLI::ValidationError(what, "expected lo:hi:n, got '" + text + "'");
  const auto lo = parse_list(parts[0], 1, what)[0], hi = parse_list(parts[1], 1, what)[0];
  const auto n = parse_list(parts[2], 1, what)[0];
  if (!(n >= 1.0) || n != std::floor(n)) throw CLI::ValidationError(what, "count must be a positive integer");
  return {lo, hi, static_cast<std::size_t>(n)};
}

/// Output sink: a file when a path is given, otherwise stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw DomainViolation("cannot open output file " + path);
    }
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void echo_config(const CLI::App& app, const std::string& output) {
  if (output.empty()) return;
  std::ofstream f(output + ".config.json");
  if (!f) throw DomainViolation("cannot write " + output + ".config.json");
  f << app.config_to_str(true, false) << '\n';
}

// Unit conversion at the boundary: lengths, times and angular momentum scale,
// momenta and energies do not.
CylState cyl_to_internal(CylState s, const UnitConvention& u) {
  s.r = u.length_to_internal(s.r);
  s.x = u.length_to_internal(s.x);
  s.P_theta = u.c_to_internal(s.P_theta);
  return s;
}

ReducedState reduced_to_internal(ReducedState s, const UnitConvention& u) {
  s.r = u.length_to_internal(s.r);
  s.x = u.length_to_internal(s.x);
  return s;
}

template <std::size_t N>
void trajectory_to_reporting(Trajectory<N>& traj, const UnitConvention& u, std::initializer_list<std::size_t> lengths,
                             int angular_index) {
  for (double& t : traj.t) t *= u.time();
  for (auto& y : traj.states) {
    for (std::size_t k : lengths) y[k] *= u.length();
    if (angular_index >= 0) y[angular_index] *= u.angular_momentum();
  }
}

// ---------------------------------------------------------------------------

struct PotentialCmd {
  Model model;
  std::string at;
  bool physical = false;

  void add(CLI::App* app) {
    model.add(app);
    app->add_option("--at", at, "evaluation point x,y,z (axial coordinate first)")->required();
    app->add_flag("--physical", physical, "interpret --at in physical coordinates and print V (needs --alpha)");
  }

  void run(std::ostream& os) const {
    const auto p = parse_list(at, 3, "--at");
    io::set_precision(os);
    if (physical) {
      if (!model.physical()) throw DomainViolation("--physical needs --alpha, --M, --L and --G");
      const SegmentParams seg = derive_segment(model.alpha, model.M, model.L, model.G);
      os << "A = " << to_scaled(seg).A << '\n';
      os << "V = " << potential_physical({p[0], p[1], p[2]}, seg) << '\n';
      return;
    }
    const double A = model.scaled_A();
    const UnitConvention u = model.convention();
    const Vec3 q{u.length_to_internal(p[0]), u.length_to_internal(p[1]), u.length_to_internal(p[2])};
    const AuxSD a = aux_sd(q, A);
    const Vec3 f = force_scaled(q, A);
    os << "A = " << A << '\n';
    os << "s = " << a.s << '\n';
    os << "d = " << a.d << '\n';
    os << "U = " << potential_scaled(q, A) << '\n';
    os << "F = " << f[0] / u.time() << ',' << f[1] / u.time() << ',' << f[2] / u.time() << '\n';
  }
};

struct CircularCmd {
  Model model;
  double s = 0.0, c = 0.0;
  std::string family, output;
  NewtonOptions newton;
  unsigned jobs = 1;
  CLI::Option *s_opt = nullptr, *c_opt = nullptr;

  void add(CLI::App* app) {
    model.add(app);
    auto* which = app->add_option_group("orbit", "select the family member");
    s_opt = which->add_option("--s", s, "sum of end-point distances s* > 2 (always in units of L)");
    c_opt = which->add_option("--c", c, "angular momentum c > 0");
    which->add_option("--family", family, "sweep s over smin:smax:n");
    which->require_option(1);
    app->add_option("--newton-tol", newton.tolerance, "Newton tolerance on max(|F1|, |F2|)")->capture_default_str();
    app->add_option("--max-iter", newton.max_iterations, "Newton iteration limit")->capture_default_str();
    app->add_option("--jobs", jobs, "worker threads for --family")->capture_default_str();
    app->add_option("--output,-o", output, "CSV output file (default stdout)");
  }

  void run(std::ostream& os) const {
    const double A = model.scaled_A();
    const UnitConvention u = model.convention();
    std::vector<CircularOrbit> rows;
    if (!family.empty()) {
      const Range r = parse_range(family, "--family");
      validate_family_A(A);
      const auto grid = family_grid(r.lo, r.hi, r.n);
      rows = parallel_map(grid.size(), jobs, [&](std::size_t i) { return solve_circular(grid[i], A, newton); });
    } else if (s_opt->count() > 0) {
      rows.push_back(solve_circular(s, A, newton));
    } else {
      rows.push_back(solve_circular_by_c(u.c_to_internal(c), A, newton));
    }
    for (auto& o : rows) {
      o.r_star *= u.length();
      o.x_star *= u.length();
      o.c_star *= u.angular_momentum();
      o.T *= u.time();
    }
    io::write_family_csv(os, rows);
  }
};

struct PropagateCmd {
  Model model;
  std::string chart = "cylindrical", state, output;
  double c = 0.0, t_end = 0.0, stride = 0.0;
  PropagateOptions integ;

  void add(CLI::App* app) {
    model.add(app);
    app->add_option("--chart", chart, "cartesian (xi,eta,zeta,p_xi,p_eta,p_zeta), cylindrical (r,theta,x,P_r,P_theta,P_x) "
                                      "or reduced (r,x,P_r,P_x with --c)")
        ->check(CLI::IsMember({"cartesian", "cylindrical", "reduced"}))
        ->capture_default_str();
    app->add_option("--state", state, "initial state, comma separated in the order of --chart")->required();
    app->add_option("--c", c, "angular momentum for the reduced chart");
    app->add_option("--t-end", t_end, "final time")->required();
    app->add_option("--stride", stride, "sampling interval (0 records every step)")->capture_default_str();
    add_integration(app, integ);
    app->add_option("--output,-o", output, "CSV output file (default stdout)");
  }

  // angle_index marks a component compared modulo 2 pi.
  template <std::size_t N>
  static void report(const Trajectory<N>& traj, const Vec<N>& y0, int angle_index = -1) {
    double closure = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      double diff = traj.states.back()[k] - y0[k];
      if (static_cast<int>(k) == angle_index) diff = std::remainder(diff, 2.0 * std::numbers::pi);
      closure = std::max(closure, std::abs(diff));
    }
    std::cerr << std::setprecision(io::kDigits) << "termination = " << to_string(traj.termination)
              << "\nsteps = " << traj.steps << "\nrelative energy drift = " << traj.max_relative_energy_drift()
              << "\nclosure max|y(t_end) - y(0)| = " << closure << '\n';
  }

  void run(std::ostream& os) const {
    const double A = model.scaled_A();
    const UnitConvention u = model.convention();
    PropagateOptions opts = integ;
    opts.sample_stride = u.time_to_internal(stride);
    const double t1 = u.time_to_internal(t_end);
    if (chart == "reduced") {
      const auto v = parse_list(state, 4, "--state");
      const double ci = u.c_to_internal(c);
      const ReducedState s = reduced_to_internal({v[0], v[1], v[2], v[3]}, u);
      auto traj = propagate(ReducedSystem{A, ci}, s.to_array(), 0.0, t1, opts);
      report(traj, s.to_array());
      trajectory_to_reporting(traj, u, {0, 1}, -1);
      io::write_reduced_csv(os, traj, c);
      return;
    }
    const auto v = parse_list(state, 6, "--state");
    if (chart == "cylindrical") {
      const CylState s = cyl_to_internal({v[0], v[1], v[2], v[3], v[4], v[5]}, u);
      auto traj = propagate(CylindricalSystem{A}, s.to_array(), 0.0, t1, opts);
      report(traj, s.to_array(), 1);
      trajectory_to_reporting(traj, u, {0, 2}, 4);
      io::write_cylindrical_csv(os, traj);
    } else {
      const CartState s{u.length_to_internal(v[0]), u.length_to_internal(v[1]), u.length_to_internal(v[2]), v[3], v[4],
                        v[5]};
      auto traj = propagate(CartesianSystem{A}, s.to_array(), 0.0, t1, opts);
      report(traj, s.to_array());
      trajectory_to_reporting(traj, u, {0, 1, 2}, -1);
      io::write_cartesian_csv(os, traj);
    }
  }
};

struct PoincareCmd {
  Model model;
  double c = 0.0, h = 0.0;
  std::string h_from, seed_grid, output, format = "json";
  std::vector<std::string> seeds;
  std::size_t crossings = 100;
  double max_time = 1e4;
  unsigned jobs = 1;
  PropagateOptions integ;
  CLI::Option* h_opt = nullptr;

  void add(CLI::App* app) {
    app->set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
    model.add(app);
    app->add_option("--c", c, "angular momentum")->required();
    auto* energy_group = app->add_option_group("energy", "energy level");
    h_opt = energy_group->add_option("--h", h, "energy level");
    energy_group->add_option("--h-from", h_from, "take h from a reference state r,x,P_r,P_x");
    energy_group->require_option(1);
    auto* seed_group = app->add_option_group("seeds", "section seeds (r, P_r)");
    seed_group->add_option("--seed-grid", seed_grid, "rmin:rmax:n,prmin:prmax:m; seeds outside the shell are dropped");
    seed_group->add_option("--seed", seeds, "explicit seed r,P_r (repeatable)");
    seed_group->require_option(1, 2);
    app->add_option("--crossings", crossings, "crossings per seed")->capture_default_str();
    app->add_option("--max-time", max_time, "integration time limit per seed")->capture_default_str();
    app->add_option("--jobs", jobs, "worker threads")->capture_default_str();
    app->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    add_integration(app, integ);
    app->add_option("--output,-o", output, "output file (default stdout)");
  }

  void run(std::ostream& os) const {
    const UnitConvention u = model.convention();
    SectionSpec spec;
    spec.A = model.scaled_A();
    spec.c = u.c_to_internal(c);
    if (h_opt->count() > 0) {
      spec.h = h;
    } else {
      const auto v = parse_list(h_from, 4, "--h-from");
      spec.h = energy(reduced_to_internal({v[0], v[1], v[2], v[3]}, u), spec.A, spec.c);
    }
    spec.n_crossings = crossings;
    spec.max_time = u.time_to_internal(max_time);
    spec.integration = integ;
    spec.jobs = jobs;
    if (!seed_grid.empty()) {
      const auto comma = seed_grid.find(',');
      if (comma == std::string::npos) throw CLI::ValidationError("--seed-grid", "expected rmin:rmax:n,prmin:prmax:m");
      const Range rr = parse_range(seed_grid.substr(0, comma), "--seed-grid");
      const Range pr = parse_range(seed_grid.substr(comma + 1), "--seed-grid");
      spec.seeds = seed_grid_points(spec, rr, pr, u);
    }
    for (const auto& s : seeds) {
      const auto v = parse_list(s, 2, "--seed");
      spec.seeds.push_back({u.length_to_internal(v[0]), v[1]});
    }
    if (spec.seeds.empty()) throw OutsideEnergyShell("no seed lies inside the energy shell");
    const PoincareSection sec = compute_section(spec);
    if (format == "json") {
      os << io::dump_json(io::section_to_json(sec, u)) << '\n';
      return;
    }
    io::set_precision(os);
    os << "seed,k,r,P_r\n";
    for (std::size_t i = 0; i < sec.seeds.size(); ++i) {
      for (std::size_t k = 0; k < sec.seeds[i].crossings.size(); ++k) {
        const auto& z = sec.seeds[i].crossings[k];
        os << i << ',' << k << ',' << z.r * u.length() << ',' << z.P_r << '\n';
      }
    }
  }

  static std::vector<SectionPoint> seed_grid_points(const SectionSpec& spec, const Range& rr, const Range& pr,
                                                   const UnitConvention& u) {
    return segdyn::seed_grid(spec, u.length_to_internal(rr.lo), u.length_to_internal(rr.hi), rr.n, pr.lo, pr.hi, pr.n);
  }
};

struct FixpointCmd {
  Model model;
  double c = 0.0, h = 0.0, return_time_max = 1e3;
  std::string tuple, guess, output, c_candidates = "0.7,1";
  int k = 1, max_k = 2;
  FixedPointOptions fp;
  PropagateOptions integ;
  CLI::Option *c_opt = nullptr, *h_opt = nullptr, *k_opt = nullptr;

  void add(CLI::App* app) {
    integ.abs_tol = integ.rel_tol = kFixedPointTolerance;
    app->set_help_flag("--help", "Print this help message and exit");
    model.add(app);
    c_opt = app->add_option("--c", c, "angular momentum (without it, --tuple picks c from --c-candidates)");
    h_opt = app->add_option("--h", h, "energy level (default: energy of --tuple)");
    app->add_option("--tuple", tuple, "section state r,x,P_r,P_x supplying h and the default guess");
    app->add_option("--guess", guess, "Newton start r,P_r");
    k_opt = app->add_option("--k", k, "period (number of returns)")->capture_default_str();
    app->add_option("--c-candidates", c_candidates, "angular momenta tried when --c is absent")->capture_default_str();
    app->add_option("--max-k", max_k, "largest period tried when --c is absent")->capture_default_str();
    app->add_option("--residual-tol", fp.residual_tolerance, "accepted |P^k(z) - z|")->capture_default_str();
    app->add_option("--fd-step", fp.fd_step, "finite-difference step of the return-map Jacobian")
        ->capture_default_str();
    app->add_option("--max-iter", fp.max_iterations, "Newton iteration limit")->capture_default_str();
    app->add_option("--return-time-max", return_time_max, "first-return search window")->capture_default_str();
    add_integration(app, integ);
    app->add_option("--output,-o", output, "CSV output file (default stdout)");
  }

  void run(std::ostream& os) const {
    const UnitConvention u = model.convention();
    const double A = model.scaled_A();
    ReducedState z{};
    if (!tuple.empty()) {
      const auto v = parse_list(tuple, 4, "--tuple");
      z = reduced_to_internal({v[0], v[1], v[2], v[3]}, u);
    }
    if (c_opt->count() == 0) {
      if (tuple.empty()) throw DomainViolation("fixpoint needs --c, or --tuple to assign c by residual testing");
      std::vector<double> cands;
      for (double v : parse_list(c_candidates, 0, "--c-candidates")) cands.push_back(u.c_to_internal(v));
      const TupleMatch m = match_tuple(z, A, cands, max_k, integ, fp);
      std::cerr << std::setprecision(io::kDigits) << "assigned c = " << m.c * u.angular_momentum()
                << ", k = " << m.period_k << ", distance to tuple = " << m.distance * u.length() << '\n';
      write(os, A, m.c, m.h, m.point, u);
      return;
    }
    SectionSpec spec;
    spec.A = A;
    spec.c = u.c_to_internal(c);
    if (h_opt->count() > 0) {
      spec.h = h;
    } else if (!tuple.empty()) {
      spec.h = energy(z, A, spec.c);
    } else {
      throw DomainViolation("fixpoint needs --h or --tuple");
    }
    spec.integration = integ;
    spec.return_time_max = u.time_to_internal(return_time_max);
    SectionPoint start{z.r, z.P_r};
    if (!guess.empty()) {
      const auto g = parse_list(guess, 2, "--guess");
      start = {u.length_to_internal(g[0]), g[1]};
    } else if (tuple.empty()) {
      throw DomainViolation("fixpoint needs --guess or --tuple");
    }
    write(os, A, spec.c, spec.h, find_fixed_point(start, spec, k, fp), u);
  }

  static void write(std::ostream& os, double A, double c, double h, FixedPoint p, const UnitConvention& u) {
    p.r *= u.length();
    io::write_fixed_point_header(os);
    io::write_fixed_point_row(os, A, c * u.angular_momentum(), h, p);
    std::cerr << std::setprecision(io::kDigits) << "kind = " << to_string(p.kind)
              << "\nmultiplier product = " << p.multiplier_product() << "\nreduced period = " << p.return_time * u.time()
              << '\n';
  }
};

struct ReconstructCmd {
  Model model;
  double c = 0.0, theta0 = 0.0, t_end = 0.0, stride = 0.0, comm_tol = 1e-9;
  std::string state, output;
  int period_k = 0;
  std::int64_t max_den = 64;
  PropagateOptions integ;

  void add(CLI::App* app) {
    model.add(app);
    app->add_option("--c", c, "angular momentum")->required();
    app->add_option("--state", state, "reduced state r,x,P_r,P_x")->required();
    app->add_option("--theta0", theta0, "initial azimuth")->capture_default_str();
    app->add_option("--t-end", t_end, "final time (default: k reduced periods with --period-k)");
    app->add_option("--stride", stride, "sampling interval (0 records every step)")->capture_default_str();
    app->add_option("--period-k", period_k,
                    "treat the state as a period-k section point: report rotation number and commensurability");
    app->add_option("--comm-tol", comm_tol, "commensurability tolerance")->capture_default_str();
    app->add_option("--max-den", max_den, "largest denominator tested")->capture_default_str();
    add_integration(app, integ);
    app->add_option("--output,-o", output, "CSV output file (default stdout)");
  }

  void run(std::ostream& os) const {
    const UnitConvention u = model.convention();
    const double A = model.scaled_A();
    const double ci = u.c_to_internal(c);
    const auto v = parse_list(state, 4, "--state");
    const ReducedState s = reduced_to_internal({v[0], v[1], v[2], v[3]}, u);
    double T_red = 0.0;
    if (period_k > 0) {
      SectionSpec spec;
      spec.A = A;
      spec.c = ci;
      spec.h = energy(s, A, ci);
      spec.integration = integ;
      if (s.x != 0.0 || !(s.P_x > 0.0)) throw DomainViolation("--period-k needs a section state (x = 0, P_x > 0)");
      T_red = return_map_iterate({s.r, s.P_r}, spec, period_k).time;
    }
    double t1 = u.time_to_internal(t_end);
    if (!(t1 > 0.0)) {
      if (!(T_red > 0.0)) throw DomainViolation("reconstruct needs --t-end or --period-k");
      t1 = T_red;
    }
    PropagateOptions opts = integ;
    opts.keep_dense = true;
    opts.sample_stride = u.time_to_internal(stride);
    const auto traj = propagate(ReducedSystem{A, ci}, s.to_array(), 0.0, std::max(t1, T_red), opts);
    if (T_red > 0.0) {
      const double adv = theta_advance(traj, ci, 0.0, T_red);
      const Commensurability cm = commensurability(T_red, adv, comm_tol, max_den);
      std::cerr << std::setprecision(io::kDigits) << "reduced period = " << T_red * u.time()
                << "\ntheta advance = " << adv << "\nrotation number = " << cm.ratio;
      if (cm.rational) {
        std::cerr << "\nrational " << cm.p << "/" << cm.q << ", full period = " << cm.full_period * u.time() << '\n';
      } else {
        std::cerr << "\nquasi-periodic (no p/q with q <= " << max_den << " within " << comm_tol << ")\n";
      }
    }
    ReconstructedOrbit orbit = reconstruct(traj, ci, theta0);
    std::size_t keep = 0;
    while (keep < orbit.t.size() && orbit.t[keep] <= t1) ++keep;
    orbit.t.resize(keep);
    orbit.cylindrical.resize(keep);
    orbit.cartesian.resize(keep);
    for (std::size_t i = 0; i < keep; ++i) {
      orbit.t[i] *= u.time();
      orbit.cylindrical[i].r *= u.length();
      orbit.cylindrical[i].x *= u.length();
      for (double& q : orbit.cartesian[i]) q *= u.length();
    }
    io::write_orbit_csv(os, orbit);
  }
};

const char* error_kind(const Error& e) {
#define SEGDYN_KIND(T) \
  if (dynamic_cast<const T*>(&e)) return #T;
  SEGDYN_KIND(OnSegment)
  SEGDYN_KIND(DomainViolation)
  SEGDYN_KIND(SlopeOutOfRange)
  SEGDYN_KIND(NonPositiveDimension)
  SEGDYN_KIND(AxisSingularity)
  SEGDYN_KIND(ZeroAngularMomentum)
  SEGDYN_KIND(OutsideEnergyShell)
  SEGDYN_KIND(AxisCrossing)
  SEGDYN_KIND(StepSizeUnderflow)
  SEGDYN_KIND(MaxStepsExceeded)
  SEGDYN_KIND(NewtonDiverged)
  SEGDYN_KIND(NoReturn)
  SEGDYN_KIND(QuadratureNotConverged)
#undef SEGDYN_KIND
  return dynamic_cast<const InputError*>(&e) ? "InputError" : "NumericalError";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orbits around an inhomogeneous straight segment"};
  app.config_formatter(std::make_shared<ConfigJSON>());
  app.set_config("--config", "", "JSON run configuration; command-line flags override it");
  app.require_subcommand(1);

  PotentialCmd potential;
  CircularCmd circular;
  PropagateCmd prop;
  PoincareCmd poincare;
  FixpointCmd fixpoint;
  ReconstructCmd recon;

  auto* sub_pot = app.add_subcommand("potential", "scaled potential and force at a point");
  auto* sub_circ = app.add_subcommand("circular", "circular orbit (relative equilibrium) or a family of them");
  auto* sub_prop = app.add_subcommand("propagate", "integrate one initial state");
  auto* sub_poinc = app.add_subcommand("poincare", "Poincare section x = 0, P_x > 0 of the reduced flow");
  auto* sub_fix = app.add_subcommand("fixpoint", "refine and classify a fixed point of the section return map");
  auto* sub_rec = app.add_subcommand("reconstruct", "rebuild the full orbit from a reduced one");
  potential.add(sub_pot);
  circular.add(sub_circ);
  prop.add(sub_prop);
  poincare.add(sub_poinc);
  fixpoint.add(sub_fix);
  recon.add(sub_rec);
  for (auto* s : {sub_pot, sub_circ, sub_prop, sub_poinc, sub_fix, sub_rec}) s->configurable();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  auto run = [&](auto& cmd, const std::string& output) {
    Sink sink(output);
    cmd.run(sink.os());
    echo_config(app, output);
  };

  try {
    if (sub_pot->parsed()) run(potential, "");
    if (sub_circ->parsed()) run(circular, circular.output);
    if (sub_prop->parsed()) run(prop, prop.output);
    if (sub_poinc->parsed()) run(poincare, poincare.output);
    if (sub_fix->parsed()) run(fixpoint, fixpoint.output);
    if (sub_rec->parsed()) run(recon, recon.output);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InputError& e) {
    std::cerr << error_kind(e) << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    std::cerr << error_kind(e) << ": " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
