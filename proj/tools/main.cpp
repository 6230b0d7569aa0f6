// contactflow command line tool: runs the library's experiments and writes
// deterministic CSV tables, fit summaries, and optional SVG plots.
//
// Exit codes: 0 success, 1 usage error, 2 numerical failure.
//
// Every numeric option can also come from a plain key=value config file
// passed with --config; explicit command-line flags override file values.

#include <cstdint>
#include <exception>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "contactflow/fitting.hpp"
#include "contactflow/io.hpp"
#include "contactflow/models.hpp"
#include "contactflow/periodic.hpp"
#include "contactflow/polyalg.hpp"
#include "contactflow/reeb.hpp"
#include "contactflow/spiral.hpp"
#include "contactflow/symplectic.hpp"

namespace cf = contactflow;
using cf::io::format_double;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<double> parse_doubles(const std::string& s, const char* what) {
  std::vector<double> out;
  for (const std::string& tok : split(s, ',')) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError(std::string(what) + ": cannot parse '" + tok + "' in '" + s + "'");
    }
  }
  return out;
}

cf::Vec3 parse_vec3(const std::string& s, const char* what) {
  const std::vector<double> v = parse_doubles(s, what);
  if (v.size() != 3) throw UsageError(std::string(what) + ": need 3 components, got '" + s + "'");
  return {v[0], v[1], v[2]};
}

cf::Vec2 parse_vec2(const std::string& s, const char* what) {
  const std::vector<double> v = parse_doubles(s, what);
  if (v.size() != 2) throw UsageError(std::string(what) + ": need 2 components, got '" + s + "'");
  return {v[0], v[1]};
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out.push_back(',');
    out += format_double(v[i]);
  }
  return out;
}

// Shared model options.
struct ModelArgs {
  std::string name;
  double T0 = 6.283185307179586;
};

void check_model(const ModelArgs& m) {
  if (m.name != "heisenberg" && m.name != "heisenberg-quotient" && m.name != "s3") {
    throw UsageError("unknown model '" + m.name +
                     "' (known: heisenberg, heisenberg-quotient, s3)");
  }
  if (!(m.T0 > 0)) throw UsageError("T0 must be positive");
}

std::string model_config(const ModelArgs& m) {
  return "model=" + m.name + " T0=" + format_double(m.T0);
}

void emit_csv(const std::string& path, const std::string& comment,
              const std::vector<std::string>& columns, const std::vector<cf::io::Row>& rows) {
  if (path.empty()) {
    cf::io::write_csv(std::cout, comment, columns, rows);
  } else {
    cf::io::write_csv_file(path, comment, columns, rows);
    std::cout << "wrote " << path << "\n";
  }
}

void emit_svg(const std::string& path, const std::string& svg) {
  if (path.empty()) return;
  cf::io::write_text_file(path, svg);
  std::cout << "wrote " << path << "\n";
}

std::string describe(const cf::FitOrExact& fe, double floor) {
  if (fe.exact) return "exact (all points at or below the noise floor " + format_double(floor) + ")";
  if (!fe.fit) return "no fit (fewer than 2 points above the noise floor)";
  return cf::format_fit(*fe.fit);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sub-Riemannian geodesic flow experiments on contact 3-manifolds"};
  app.require_subcommand(1);

  // --config pre-scan: file values become option defaults, flags override.
  std::map<std::string, std::string> cfg;
  {
    std::vector<std::string> args(argv + 1, argv + argc);
    for (std::size_t i = 0; i < args.size(); ++i) {
      std::string path;
      if (args[i] == "--config" && i + 1 < args.size()) {
        path = args[i + 1];
      } else if (args[i].rfind("--config=", 0) == 0) {
        path = args[i].substr(9);
      }
      if (!path.empty()) {
        try {
          cfg = cf::io::parse_config_file(path);
        } catch (const std::exception& e) {
          std::cerr << "error: " << e.what() << "\n";
          return 1;
        }
      }
    }
  }
  const auto with_cfg = [&cfg](CLI::Option* opt, const std::string& key) {
    if (auto it = cfg.find(key); it != cfg.end()) {
      try {
        opt->default_val(it->second);
      } catch (const std::exception&) {
        std::cerr << "error: bad config value for '" << key << "': " << it->second << "\n";
        std::exit(1);
      }
    }
    return opt;
  };
  std::string cfg_path_sink;
  app.add_option("--config", cfg_path_sink, "key=value config file (flags override)");

  std::map<std::string, std::function<int()>> runners;

  const auto add_model = [&](CLI::App* sub, ModelArgs& m) {
    with_cfg(sub->add_option("--model", m.name, "model name: heisenberg, heisenberg-quotient, s3"),
             "model");
    with_cfg(sub->add_option("--T0", m.T0, "coordinate period of the quotient model"), "T0");
    sub->add_option("--config", cfg_path_sink, "key=value config file (flags override)");
  };

  // ---------------------------------------------------------------- validate
  {
    auto* sub = app.add_subcommand("validate", "check the contact/Reeb frame identities");
    auto m = std::make_shared<ModelArgs>();
    auto points = std::make_shared<int>(100);
    auto seed = std::make_shared<std::uint64_t>(0x5eed0301u);
    auto tol = std::make_shared<double>(1e-6);
    auto out = std::make_shared<std::string>();
    add_model(sub, *m);
    with_cfg(sub->add_option("--points", *points, "random sample points"), "points");
    with_cfg(sub->add_option("--seed", *seed, "RNG seed"), "seed");
    with_cfg(sub->add_option("--tol", *tol, "pass tolerance"), "tol");
    with_cfg(sub->add_option("--out", *out, "also write the report to this file"), "out");
    runners["validate"] = [=]() {
      check_model(*m);
      const cf::ContactModel model = cf::builtin_model(m->name, m->T0);
      const cf::ValidationReport rep = cf::validate_model(model, *points, *seed);
      std::string text = "# command=validate " + model_config(*m) +
                         " points=" + std::to_string(*points) + " seed=" + std::to_string(*seed) +
                         " tol=" + format_double(*tol) + "\n" + cf::format_report(rep) +
                         (rep.pass(*tol) ? "PASS\n" : "FAIL\n");
      std::cout << text;
      if (!out->empty()) cf::io::write_text_file(*out, text);
      return rep.pass(*tol) ? 0 : 2;
    };
  }

  // ---------------------------------------------------------------- geodesic
  {
    auto* sub = app.add_subcommand("geodesic", "integrate one unit-speed geodesic");
    auto m = std::make_shared<ModelArgs>();
    auto chart = std::make_shared<int>(0);
    auto q0s = std::make_shared<std::string>("0,0,0");
    auto dirs = std::make_shared<std::string>("1,0");
    auto hz = std::make_shared<double>(10.0);
    auto p0s = std::make_shared<std::string>();
    auto T = std::make_shared<double>(20.0);
    auto tol = std::make_shared<double>(1e-10);
    auto max_step = std::make_shared<double>(0.1);
    auto out = std::make_shared<std::string>();
    auto svg = std::make_shared<std::string>();
    add_model(sub, *m);
    with_cfg(sub->add_option("--chart", *chart, "chart of q0"), "chart");
    with_cfg(sub->add_option("--q0", *q0s, "initial point x,y,z"), "q0");
    with_cfg(sub->add_option("--dir", *dirs, "initial horizontal direction a,b (frame components)"),
             "dir");
    with_cfg(sub->add_option("--hz", *hz, "initial h_Z"), "hz");
    with_cfg(sub->add_option("--p0", *p0s, "raw initial covector px,py,pz (overrides --dir/--hz)"),
             "p0");
    with_cfg(sub->add_option("--T", *T, "integration time (arclength)"), "T");
    with_cfg(sub->add_option("--tol", *tol, "integrator tolerance"), "tol");
    with_cfg(sub->add_option("--max-step", *max_step, "integrator max step"), "max-step");
    with_cfg(sub->add_option("--out", *out, "CSV output path (default stdout)"), "out");
    with_cfg(sub->add_option("--svg", *svg, "SVG plot path"), "svg");
    runners["geodesic"] = [=]() {
      check_model(*m);
      const cf::ContactModel model = cf::builtin_model(m->name, m->T0);
      const cf::ManifoldPoint q0{*chart, parse_vec3(*q0s, "--q0")};
      cf::Vec3 p0;
      if (!p0s->empty()) {
        p0 = parse_vec3(*p0s, "--p0");
      } else {
        const cf::Vec2 dir = parse_vec2(*dirs, "--dir");
        if (!(dir.norm() > 0)) throw UsageError("--dir must be nonzero");
        const cf::Vec2 u = dir.normalized();
        p0 = cf::covector_from_components(model, q0, u[0], u[1], *hz);
      }
      cf::IntegratorConfig icfg;
      icfg.rel_tol = icfg.abs_tol = *tol;
      icfg.max_step = *max_step;
      const cf::Trajectory traj = cf::geodesic(model, q0, p0, *T, icfg);

      const std::string comment =
          "command=geodesic " + model_config(*m) + " chart=" + std::to_string(*chart) +
          " q0=" + join_doubles({q0.x[0], q0.x[1], q0.x[2]}) +
          " p0=" + join_doubles({traj.front().p[0], traj.front().p[1], traj.front().p[2]}) +
          " T=" + format_double(*T) + " tol=" + format_double(*tol) +
          " max-step=" + format_double(*max_step);
      std::vector<cf::io::Row> rows;
      for (std::size_t i = 0; i < traj.size(); ++i) {
        const cf::PhasePoint& z = traj.z[i];
        rows.push_back({format_double(traj.t[i]), std::to_string(z.q.chart),
                        format_double(z.q.x[0]), format_double(z.q.x[1]), format_double(z.q.x[2]),
                        format_double(z.p[0]), format_double(z.p[1]), format_double(z.p[2]),
                        format_double(traj.gstar[i]), format_double(traj.h_reeb[i])});
      }
      emit_csv(*out, comment,
               {"t", "chart", "q1", "q2", "q3", "p1", "p2", "p3", "gstar", "h_reeb"}, rows);
      std::cout << "samples=" << traj.size() << " energy_drift=" << format_double(traj.energy_drift)
                << "\n";
      if (!svg->empty()) {
        std::vector<cf::io::Series> series(3);
        const char* names[3] = {"q1", "q2", "q3"};
        for (int c = 0; c < 3; ++c) {
          series[c].name = names[c];
          for (std::size_t i = 0; i < traj.size(); ++i) {
            series[c].x.push_back(traj.t[i]);
            series[c].y.push_back(traj.z[i].q.x[c]);
          }
        }
        emit_svg(*svg, cf::io::svg_plot("geodesic " + m->name, "t", "q", series));
      }
      return 0;
    };
  }

  // ---------------------------------------------------------------- reeb-orbit
  {
    auto* sub = app.add_subcommand("reeb-orbit", "integrate a Reeb orbit with a transported frame");
    auto m = std::make_shared<ModelArgs>();
    auto chart = std::make_shared<int>(0);
    auto q0s = std::make_shared<std::string>("0,0,0");
    auto e1s = std::make_shared<std::string>("1,0");
    auto tau = std::make_shared<double>(10.0);
    auto tol = std::make_shared<double>(1e-12);
    auto out = std::make_shared<std::string>();
    auto svg = std::make_shared<std::string>();
    add_model(sub, *m);
    with_cfg(sub->add_option("--chart", *chart, "chart of q0"), "chart");
    with_cfg(sub->add_option("--q0", *q0s, "orbit start x,y,z"), "q0");
    with_cfg(sub->add_option("--e1", *e1s, "initial frame components a,b"), "e1");
    with_cfg(sub->add_option("--tau", *tau, "Reeb time span"), "tau");
    with_cfg(sub->add_option("--tol", *tol, "integrator tolerance"), "tol");
    with_cfg(sub->add_option("--out", *out, "CSV output path (default stdout)"), "out");
    with_cfg(sub->add_option("--svg", *svg, "SVG plot path"), "svg");
    runners["reeb-orbit"] = [=]() {
      check_model(*m);
      if (!(*tau > 0)) throw UsageError("--tau must be positive");
      const cf::ContactModel model = cf::builtin_model(m->name, m->T0);
      const cf::ManifoldPoint q0{*chart, parse_vec3(*q0s, "--q0")};
      const cf::Vec2 e1 = parse_vec2(*e1s, "--e1");
      cf::IntegratorConfig icfg;
      icfg.rel_tol = icfg.abs_tol = *tol;
      const cf::ReebOrbit orbit(model, q0, e1, *tau, icfg);

      const std::string comment = "command=reeb-orbit " + model_config(*m) +
                                  " chart=" + std::to_string(*chart) +
                                  " q0=" + join_doubles({q0.x[0], q0.x[1], q0.x[2]}) +
                                  " e1=" + join_doubles({e1[0], e1[1]}) +
                                  " tau=" + format_double(*tau) + " tol=" + format_double(*tol);
      std::vector<cf::io::Row> rows;
      for (const auto& s : orbit.samples()) {
        rows.push_back({format_double(s.tau), std::to_string(s.chart), format_double(s.x[0]),
                        format_double(s.x[1]), format_double(s.x[2]), format_double(s.phi),
                        format_double(s.phidot)});
      }
      emit_csv(*out, comment, {"tau", "chart", "x1", "x2", "x3", "phi", "phidot"}, rows);
      if (const auto ret = cf::find_return_time(orbit, orbit.point_at(0))) {
        std::cout << "period=" << format_double(*ret)
                  << " alpha=" << format_double(orbit.phi_at(*ret)) << "\n";
      }
      if (!svg->empty()) {
        std::vector<cf::io::Series> series(3);
        const char* names[3] = {"x1", "x2", "x3"};
        for (int c = 0; c < 3; ++c) {
          series[c].name = names[c];
          for (const auto& s : orbit.samples()) {
            series[c].x.push_back(s.tau);
            series[c].y.push_back(s.x[c]);
          }
        }
        emit_svg(*svg, cf::io::svg_plot("Reeb orbit " + m->name, "tau", "x", series));
      }
      return 0;
    };
  }

  // ---------------------------------------------------------------- monodromy
  {
    auto* sub = app.add_subcommand("monodromy", "measure orbit period and frame rotation");
    auto m = std::make_shared<ModelArgs>();
    auto chart = std::make_shared<int>(0);
    auto q0s = std::make_shared<std::string>("0,0,0");
    auto tmax = std::make_shared<double>(50.0);
    auto out = std::make_shared<std::string>();
    add_model(sub, *m);
    with_cfg(sub->add_option("--chart", *chart, "chart of q0"), "chart");
    with_cfg(sub->add_option("--q0", *q0s, "orbit start x,y,z"), "q0");
    with_cfg(sub->add_option("--tmax", *tmax, "search horizon for the period"), "tmax");
    with_cfg(sub->add_option("--out", *out, "also write the report to this file"), "out");
    runners["monodromy"] = [=]() {
      check_model(*m);
      const cf::ContactModel model = cf::builtin_model(m->name, m->T0);
      const cf::ManifoldPoint q0{*chart, parse_vec3(*q0s, "--q0")};
      const auto res = cf::monodromy(model, q0, *tmax);
      if (!res) {
        std::cerr << "error: Reeb orbit does not close within tmax=" << format_double(*tmax)
                  << "\n";
        return 2;
      }
      const std::string text =
          "# command=monodromy " + model_config(*m) + " chart=" + std::to_string(*chart) +
          " q0=" + join_doubles({q0.x[0], q0.x[1], q0.x[2]}) + " tmax=" + format_double(*tmax) +
          "\nperiod=" + format_double(res->period) + "\nalpha=" + format_double(res->alpha) +
          "\nalpha_wrapped=" + format_double(res->alpha_wrapped) +
          "\nreturn_distance=" + format_double(res->return_distance) + "\n";
      std::cout << text;
      if (!out->empty()) cf::io::write_text_file(*out, text);
      return 0;
    };
  }

  // ---------------------------------------------------------------- spiral-scan
  {
    auto* sub = app.add_subcommand("spiral-scan",
                                   "high-momentum spiral prediction error vs h0 with fits");
    auto m = std::make_shared<ModelArgs>();
    auto chart = std::make_shared<int>(0);
    auto q0s = std::make_shared<std::string>("0,0,0");
    auto dirs = std::make_shared<std::string>("1,0");
    auto h0s = std::make_shared<std::string>("10,20,40,80");
    auto c = std::make_shared<double>(0.5);
    auto tol = std::make_shared<double>(1e-10);
    auto out = std::make_shared<std::string>();
    auto svg = std::make_shared<std::string>();
    add_model(sub, *m);
    with_cfg(sub->add_option("--chart", *chart, "chart of q0"), "chart");
    with_cfg(sub->add_option("--q0", *q0s, "initial point x,y,z"), "q0");
    with_cfg(sub->add_option("--dir", *dirs, "initial horizontal direction a,b"), "dir");
    with_cfg(sub->add_option("--h0", *h0s, "comma list of initial h_Z values"), "h0");
    with_cfg(sub->add_option("--c", *c, "horizon factor: compare over [0, c*h0]"), "c");
    with_cfg(sub->add_option("--tol", *tol, "integrator tolerance"), "tol");
    with_cfg(sub->add_option("--out", *out, "CSV output path (default stdout)"), "out");
    with_cfg(sub->add_option("--svg", *svg, "SVG plot path"), "svg");
    runners["spiral-scan"] = [=]() {
      check_model(*m);
      const std::vector<double> h0_list = parse_doubles(*h0s, "--h0");
      if (h0_list.size() < 3) throw UsageError("--h0 needs at least 3 values for the fits");
      const cf::ContactModel model = cf::builtin_model(m->name, m->T0);
      const cf::ManifoldPoint q0 = cf::normalize_chart(model, {*chart, parse_vec3(*q0s, "--q0")});
      const cf::Vec2 dir = parse_vec2(*dirs, "--dir");
      if (!(dir.norm() > 0)) throw UsageError("--dir must be nonzero");
      const cf::Mat32 f = model.frame(q0.chart, q0.x);
      const cf::TangentVec x0{q0, f * dir.normalized()};
      cf::IntegratorConfig icfg;
      icfg.rel_tol = icfg.abs_tol = *tol;

      const cf::ConvergenceScan scan = cf::convergence_scan(model, q0, x0, h0_list, *c, icfg);

      const std::string comment = "command=spiral-scan " + model_config(*m) +
                                  " chart=" + std::to_string(*chart) +
                                  " q0=" + join_doubles({q0.x[0], q0.x[1], q0.x[2]}) +
                                  " dir=" + join_doubles({dir[0], dir[1]}) +
                                  " h0=" + join_doubles(h0_list) + " c=" + format_double(*c) +
                                  " tol=" + format_double(*tol);
      std::vector<cf::io::Row> rows;
      for (const auto& r : scan.rows) {
        rows.push_back({format_double(r.h0), format_double(r.J0), format_double(r.pos_err),
                        format_double(r.vel_err), format_double(r.J_drift)});
      }
      emit_csv(*out, comment, {"h0", "J0", "pos_err", "vel_err", "J_drift"}, rows);
      std::cout << "pos: " << describe(scan.pos, scan.noise_floor) << "\n"
                << "vel: " << describe(scan.vel, scan.noise_floor) << "\n"
                << "drift: " << describe(scan.drift, scan.noise_floor) << "\n"
                << "signs: eps=" << scan.eps_sign << " rot=" << scan.rot_sign
                << " stable=" << (scan.signs_stable ? "yes" : "no") << "\n";
      if (!svg->empty()) {
        cf::io::Series pos{"pos_err", {}, {}}, vel{"vel_err", {}, {}}, drift{"J_drift", {}, {}};
        for (const auto& r : scan.rows) {
          pos.x.push_back(r.h0);
          pos.y.push_back(r.pos_err);
          vel.x.push_back(r.h0);
          vel.y.push_back(r.vel_err);
          drift.x.push_back(r.h0);
          drift.y.push_back(r.J_drift);
        }
        emit_svg(*svg, cf::io::svg_plot("spiral errors " + m->name, "h0", "error",
                                        {pos, vel, drift}, true, true));
      }
      return 0;
    };
  }

  // ---------------------------------------------------------------- adiabatic-scan
  {
    auto* sub = app.add_subcommand("adiabatic-scan", "cone-radius drift along geodesics vs h0");
    auto m = std::make_shared<ModelArgs>();
    auto chart = std::make_shared<int>(0);
    auto q0s = std::make_shared<std::string>("0,0,0");
    auto dirs = std::make_shared<std::string>("1,0");
    auto h0s = std::make_shared<std::string>("10,20,40,80");
    auto c = std::make_shared<double>(0.5);
    auto tol = std::make_shared<double>(1e-10);
    auto out = std::make_shared<std::string>();
    auto svg = std::make_shared<std::string>();
    add_model(sub, *m);
    with_cfg(sub->add_option("--chart", *chart, "chart of q0"), "chart");
    with_cfg(sub->add_option("--q0", *q0s, "initial point x,y,z"), "q0");
    with_cfg(sub->add_option("--dir", *dirs, "initial horizontal direction a,b"), "dir");
    with_cfg(sub->add_option("--h0", *h0s, "comma list of initial h_Z values"), "h0");
    with_cfg(sub->add_option("--c", *c, "horizon factor: run for T = c*h0"), "c");
    with_cfg(sub->add_option("--tol", *tol, "integrator tolerance"), "tol");
    with_cfg(sub->add_option("--out", *out, "CSV output path (default stdout)"), "out");
    with_cfg(sub->add_option("--svg", *svg, "SVG plot path"), "svg");
    runners["adiabatic-scan"] = [=]() {
      check_model(*m);
      const std::vector<double> h0_list = parse_doubles(*h0s, "--h0");
      if (h0_list.empty()) throw UsageError("--h0 needs at least one value");
      const cf::ContactModel model = cf::builtin_model(m->name, m->T0);
      const cf::ManifoldPoint q0 = cf::normalize_chart(model, {*chart, parse_vec3(*q0s, "--q0")});
      const cf::Vec2 dir = parse_vec2(*dirs, "--dir");
      if (!(dir.norm() > 0)) throw UsageError("--dir must be nonzero");
      const cf::Mat32 f = model.frame(q0.chart, q0.x);
      const cf::TangentVec x0{q0, f * dir.normalized()};
      cf::IntegratorConfig icfg;
      icfg.rel_tol = icfg.abs_tol = *tol;

      const cf::AdiabaticScan scan = cf::adiabatic_scan(model, q0, x0, h0_list, *c, icfg);

      const std::string comment = "command=adiabatic-scan " + model_config(*m) +
                                  " chart=" + std::to_string(*chart) +
                                  " q0=" + join_doubles({q0.x[0], q0.x[1], q0.x[2]}) +
                                  " dir=" + join_doubles({dir[0], dir[1]}) +
                                  " h0=" + join_doubles(h0_list) + " c=" + format_double(*c) +
                                  " tol=" + format_double(*tol);
      std::vector<cf::io::Row> rows;
      for (const auto& r : scan.runs) {
        rows.push_back({format_double(r.h0), format_double(r.J_hat0), format_double(r.T),
                        format_double(r.max_drift), format_double(r.max_ratio),
                        r.bounded ? "1" : "0"});
      }
      emit_csv(*out, comment, {"h0", "J_hat0", "T", "max_drift", "max_ratio", "bounded"}, rows);
      std::cout << "drift vs J_hat0: " << describe(scan.drift, scan.noise_floor) << "\n"
                << "all_bounded=" << (scan.all_bounded ? "yes" : "no") << "\n";
      if (!svg->empty()) {
        cf::io::Series s{"max_drift", {}, {}};
        for (const auto& r : scan.runs) {
          s.x.push_back(r.J_hat0);
          s.y.push_back(r.max_drift);
        }
        emit_svg(*svg,
                 cf::io::svg_plot("adiabatic drift " + m->name, "J_hat0", "drift", {s}, true, true));
      }
      return 0;
    };
  }

  // ---------------------------------------------------------------- spectrum
  {
    auto* sub = app.add_subcommand("spectrum",
                                   "predicted vs shot closed-geodesic lengths around a Reeb orbit");
    auto m = std::make_shared<ModelArgs>();
    auto chart = std::make_shared<int>(0);
    auto q0s = std::make_shared<std::string>("0,0,0");
    auto e1s = std::make_shared<std::string>("1,0");
    auto jmax = std::make_shared<int>(1);
    auto kmin = std::make_shared<int>(3);
    auto kmax = std::make_shared<int>(10);
    auto tol = std::make_shared<double>(1e-9);
    auto span = std::make_shared<double>(0.0);
    auto out = std::make_shared<std::string>();
    auto svg = std::make_shared<std::string>();
    add_model(sub, *m);
    with_cfg(sub->add_option("--chart", *chart, "chart of q0"), "chart");
    with_cfg(sub->add_option("--q0", *q0s, "point on the closed Reeb orbit x,y,z"), "q0");
    with_cfg(sub->add_option("--e1", *e1s, "initial frame components a,b"), "e1");
    with_cfg(sub->add_option("--jmax", *jmax, "covering numbers 1..jmax"), "jmax");
    with_cfg(sub->add_option("--kmin", *kmin, "smallest winding number"), "kmin");
    with_cfg(sub->add_option("--kmax", *kmax, "largest winding number"), "kmax");
    with_cfg(sub->add_option("--tol", *tol, "shooting convergence tolerance"), "tol");
    with_cfg(sub->add_option("--orbit-span", *span,
                             "Reeb-time span of the reference orbit (0 = 1.2*T0)"),
             "orbit-span");
    with_cfg(sub->add_option("--out", *out, "CSV output path (default stdout)"), "out");
    with_cfg(sub->add_option("--svg", *svg, "SVG plot path"), "svg");
    runners["spectrum"] = [=]() {
      check_model(*m);
      if (*jmax < 1 || *kmin < 1 || *kmax < *kmin) {
        throw UsageError("need jmax >= 1 and 1 <= kmin <= kmax");
      }
      const cf::ContactModel model = cf::builtin_model(m->name, m->T0);
      const cf::ManifoldPoint q0{*chart, parse_vec3(*q0s, "--q0")};
      const cf::Vec2 e1 = parse_vec2(*e1s, "--e1");
      const double tau_span = *span > 0 ? *span : 1.2 * m->T0;
      cf::IntegratorConfig tight;
      tight.rel_tol = tight.abs_tol = 1e-12;
      const cf::ReebOrbit orbit(model, q0, e1, tau_span, tight);

      const cf::LengthSpectrum spec = cf::length_spectrum(model, orbit, *jmax, *kmin, *kmax, *tol);

      const std::string comment =
          "command=spectrum " + model_config(*m) + " chart=" + std::to_string(*chart) +
          " q0=" + join_doubles({q0.x[0], q0.x[1], q0.x[2]}) +
          " e1=" + join_doubles({e1[0], e1[1]}) + " jmax=" + std::to_string(*jmax) +
          " kmin=" + std::to_string(*kmin) + " kmax=" + std::to_string(*kmax) +
          " tol=" + format_double(*tol) + " orbit-span=" + format_double(tau_span);
      std::vector<cf::io::Row> rows;
      int converged = 0;
      for (const auto& cell : spec.cells) {
        converged += cell.status == "converged";
        rows.push_back({std::to_string(cell.j), std::to_string(cell.k),
                        format_double(cell.T_pred), format_double(cell.T_found),
                        format_double(cell.rel_dev), format_double(cell.residual),
                        std::to_string(cell.iters), cell.status});
      }
      emit_csv(*out, comment,
               {"j", "k", "T_pred", "T_found", "rel_dev", "residual", "iters", "status"}, rows);
      std::cout << "T0=" << format_double(spec.T0) << " alpha0=" << format_double(spec.alpha0)
                << " converged=" << converged << "/" << spec.cells.size()
                << " trend_non_increasing=" << (spec.trend_non_increasing ? "yes" : "no") << "\n";
      if (!svg->empty()) {
        std::vector<cf::io::Series> series;
        for (int j = 1; j <= *jmax; ++j) {
          cf::io::Series s{"j=" + std::to_string(j), {}, {}};
          for (const auto& cell : spec.cells) {
            if (cell.j == j && cell.status == "converged") {
              s.x.push_back(cell.k);
              s.y.push_back(cell.rel_dev);
            }
          }
          series.push_back(std::move(s));
        }
        emit_svg(*svg, cf::io::svg_plot("length spectrum " + m->name, "k", "rel_dev", series,
                                        false, true));
      }
      return 0;
    };
  }

  // ---------------------------------------------------------------- polyalg
  {
    auto* sub = app.add_subcommand(
        "polyalg", "exact homogeneous-polynomial calculus in two symplectic variables");
    sub->require_subcommand(1);
    sub->add_option("--config", cfg_path_sink, "key=value config file (flags override)");
    auto a1 = std::make_shared<std::string>();
    auto a2 = std::make_shared<std::string>();

    auto* br = sub->add_subcommand("bracket", "Poisson bracket {P, Q}");
    br->add_option("P", *a1, "coefficient list c0,c1,...,ck")->required();
    br->add_option("Q", *a2, "coefficient list c0,c1,...,ck")->required();
    auto* ao = sub->add_subcommand("aop", "rotation generator applied to Q");
    ao->add_option("Q", *a1, "coefficient list")->required();
    auto* de = sub->add_subcommand("decompose", "split Q into zero-average + invariant parts");
    de->add_option("Q", *a1, "coefficient list")->required();
    auto* so = sub->add_subcommand("solve", "solve A(Q) = R for zero-average Q");
    so->add_option("R", *a1, "coefficient list with zero circle average")->required();

    const auto parse = [](const std::string& text) {
      try {
        return cf::parse_poly(text);
      } catch (const cf::PolyError& e) {
        throw UsageError(e.what());
      }
    };
    runners["polyalg"] = [=]() {
      if (br->parsed()) {
        std::cout << cf::format_poly(cf::poisson_uv(parse(*a1), parse(*a2))) << "\n";
      } else if (ao->parsed()) {
        std::cout << cf::format_poly(cf::a_operator(parse(*a1))) << "\n";
      } else if (de->parsed()) {
        const auto d = cf::decompose(parse(*a1));
        std::cout << "Q0=" << cf::format_poly(d.zero_average) << "\n"
                  << "c=" << cf::format_rational(d.invariant_coeff) << "\n";
      } else if (so->parsed()) {
        std::cout << cf::format_poly(cf::solve_cohomological(parse(*a1))) << "\n";
      }
      return 0;
    };
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    for (auto* sub : app.get_subcommands()) {
      return runners.at(sub->get_name())();
    }
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const cf::PolyError& e) {
    // Bad polynomial input (unsolvable right-hand side, malformed list).
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
