#include "contactflow/spiral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace contactflow {

namespace {

// Classification floor for "exact": on models whose prediction is exact the
// residual errors are dominated by the J0 calibration (a least-squares rate
// fit at double precision, relative error ~1e-12) whose phase error
// accumulates over the t ~ h0 horizon as ~h0^2 * 1e-12, i.e. ~6e-9 at
// h0 = 80. Points at or below the floor are calibration noise, not
// structure, so they are excluded from fits; a column entirely at the floor
// is reported exact.
constexpr double kNoiseFloor = 1e-8;

double wrap_pi(double a) {
  const double w = std::remainder(a, 2 * std::numbers::pi);
  return w <= -std::numbers::pi ? w + 2 * std::numbers::pi : w;
}

Vec2 rot(double a, const Vec2& v) {
  const double c = std::cos(a);
  const double s = std::sin(a);
  return {c * v[0] - s * v[1], s * v[0] + c * v[1]};
}

IntegratorConfig tighten(const IntegratorConfig& cfg) {
  IntegratorConfig out = cfg;
  out.rel_tol = std::min(cfg.rel_tol, 1e-12);
  out.abs_tol = std::min(cfg.abs_tol, 1e-12);
  out.dense_output = false;
  return out;
}

// Unit D-frame components of X0 at q (pushes across charts, projects to D).
Vec2 unit_d_components(const ContactModel& model, const ManifoldPoint& q, const TangentVec& x0) {
  Vec3 v = x0.v;
  if (x0.base.chart != q.chart) v = push_vector(model, x0.base, q.chart, v);
  Vec2 c = d_components(model, q, v);
  const double n = c.norm();
  if (!(n > 0)) throw ModelError("initial direction must have a nonzero horizontal part");
  return c / n;
}

// Fixed point of Q = q0 + eps*J0*F(Q)*(i c0): the center whose displaced
// circle passes through q0 exactly.
ManifoldPoint center_fixed_point(const ContactModel& model, const ManifoldPoint& q0,
                                 const Vec2& ic0, int eps, double j0) {
  Vec3 x = q0.x;
  for (int it = 0; it < 100; ++it) {
    const Mat32 f = model.frame(q0.chart, x);
    const Vec3 xn = q0.x + (eps * j0) * (f * ic0);
    const double dx = (xn - x).norm();
    x = xn;
    if (dx < 1e-15 * std::max(1.0, x.norm())) break;
  }
  return {q0.chart, x};
}

// Predicted position for a sign/rate candidate (forward times only).
ManifoldPoint candidate_position(const ContactModel& model, const ReebOrbit& orbit, double j0,
                                 int eps, int sig, const Vec2& c0, double t) {
  const double tau = j0 * t / 2;
  const ManifoldPoint pt = orbit.point_at(tau);
  const double ang = sig * t / j0 + orbit.phi_at(tau);
  const Vec2 c = rot(ang, c0);
  const Vec2 ic(-c[1], c[0]);
  const Mat32 f = model.frame(pt.chart, pt.x);
  const Vec3 px = pt.x + (-eps * j0) * (f * ic);
  return normalize_chart(model, {pt.chart, px});
}

FitOrExact fit_or_exact(const std::vector<double>& x, const std::vector<double>& y,
                        double floor_y) {
  FitOrExact fe;
  fe.exact = std::all_of(y.begin(), y.end(), [&](double v) { return !(v > floor_y); });
  if (!fe.exact) {
    const FitResult fr = fit_loglog(x, y, floor_y);
    if (fr.points_used >= 2) fe.fit = fr;
  }
  return fe;
}

}  // namespace

ConeCoordinates cone_coordinates(const ContactModel& model, const PhasePoint& z,
                                 double frame_angle) {
  const double hz = hamiltonian_lift(model, FieldId::Z, z);
  if (!(hz > 0)) {
    throw ModelError("cone coordinates need h_Z > 0 (flip the frame orientation for "
                     "the negative cone)");
  }
  const double hx = hamiltonian_lift(model, FieldId::X, z);
  const double hy = hamiltonian_lift(model, FieldId::Y, z);
  ConeCoordinates cc;
  cc.gstar = hx * hx + hy * hy;
  cc.rho_hat = hz;
  cc.frame_angle = frame_angle;
  const double r = std::sqrt(cc.gstar);
  cc.J_hat = r / hz;
  cc.on_axis = !(r > 1e-15 * hz);
  cc.theta_hat = cc.on_axis ? 0.0 : wrap_pi(std::atan2(hy, hx) - frame_angle);
  return cc;
}

ModelFlowState model_flow(const ContactModel& model, const ModelFlowState& s, double t,
                          const IntegratorConfig& cfg) {
  if (!(s.J > 0)) throw ModelError("model flow needs J > 0");
  return {reeb_flow(model, s.m, s.J * t / 2, cfg), s.J, s.theta + t / s.J};
}

SpiralPrediction spiral_prediction(const ContactModel& model, const ManifoldPoint& q0,
                                   const TangentVec& x0, double h0, double horizon_factor,
                                   const IntegratorConfig& cfg) {
  if (!(h0 >= 5)) throw ModelError("spiral prediction needs h0 >= 5 (asymptotic regime)");
  if (!(horizon_factor >= 0)) throw ModelError("horizon factor must be >= 0");

  const ManifoldPoint q0n = normalize_chart(model, q0);
  const Vec2 c0 = unit_d_components(model, q0n, x0);
  const Vec2 ic0(-c0[1], c0[0]);
  const Vec3 p0 = covector_from_components(model, q0n, c0[0], c0[1], h0);

  const IntegratorConfig tight = tighten(cfg);
  IntegratorConfig cal_cfg = tight;
  cal_cfg.max_step = std::min(tight.max_step, 1.5 / h0);  // resolves the fast phase

  // One short true geodesic (a few fast loops) drives both the rotation-rate
  // measurement and the sign calibration.
  const double t_cal = 6 * std::numbers::pi / h0;
  const Trajectory traj = geodesic(model, q0n, p0, t_cal, cal_cfg);

  // Unwrapped static-frame angle of the covector along the run.
  std::vector<double> ts(traj.size());
  std::vector<double> theta(traj.size());
  double prev_raw = 0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const PhasePoint& z = traj.z[i];
    const Mat32 f = model.frame(z.q.chart, z.q.x);
    const double raw = std::atan2(z.p.dot(f.col(1)), z.p.dot(f.col(0)));
    ts[i] = traj.t[i];
    theta[i] = i == 0 ? raw : theta[i - 1] + wrap_pi(raw - prev_raw);
    prev_raw = raw;
  }

  struct Candidate {
    double j0 = 0;
    double rate = 0;
    int sig_meas = 0;
    ManifoldPoint center;
    double err[2] = {0, 0};  // sup position error for sigma = -1, +1
  };
  Candidate cand[2];  // eps = -1, +1

  for (int ei = 0; ei < 2; ++ei) {
    const int eps = ei == 0 ? -1 : +1;
    Candidate& c = cand[ei];

    // Provisional center orbit (J0 = 1/h0) supplies the transported-frame
    // angle; the rate of (theta - phi) then fixes J0 and the rotation sense.
    const ManifoldPoint center_prov = center_fixed_point(model, q0n, ic0, eps, 1.0 / h0);
    const double arc_prov = (1.0 / h0) * t_cal / 2 * 1.05 + 1e-9;
    const ReebOrbit orbit_prov(model, center_prov, c0, arc_prov, tight);
    std::vector<double> theta_tr(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
      theta_tr[i] = theta[i] - orbit_prov.phi_at((1.0 / h0) * ts[i] / 2);
    }
    c.rate = fit_line(ts, theta_tr).slope;
    if (!(std::abs(c.rate) > 1e-6)) {
      throw NumericalError("spiral calibration: vanishing rotation rate");
    }
    c.sig_meas = c.rate < 0 ? -1 : +1;
    c.j0 = 1.0 / std::abs(c.rate);

    c.center = center_fixed_point(model, q0n, ic0, eps, c.j0);
    const double arc_cal = c.j0 * t_cal / 2 * 1.05 + 1e-9;
    const ReebOrbit orbit_cal(model, c.center, c0, arc_cal, tight);
    for (int si = 0; si < 2; ++si) {
      const int sig = si == 0 ? -1 : +1;
      double sup = 0;
      for (std::size_t i = 0; i < traj.size(); ++i) {
        const ManifoldPoint pp =
            candidate_position(model, orbit_cal, c.j0, eps, sig, c0, ts[i]);
        sup = std::max(sup, chart_distance(model, traj.z[i].q, pp));
      }
      c.err[si] = sup;
    }
  }

  int best_ei = 0, best_si = 0;
  double best = cand[0].err[0];
  for (int ei = 0; ei < 2; ++ei) {
    for (int si = 0; si < 2; ++si) {
      if (cand[ei].err[si] < best) {
        best = cand[ei].err[si];
        best_ei = ei;
        best_si = si;
      }
    }
  }
  const Candidate& win = cand[best_ei];
  const int eps_sign = best_ei == 0 ? -1 : +1;
  const int rot_sign = best_si == 0 ? -1 : +1;

  const double horizon = horizon_factor * h0;
  const double arc = std::max(win.j0 * horizon / 2 * 1.02 + 1e-9, 1e-6);
  ReebOrbit orbit(model, win.center, c0, arc, tight);
  const ManifoldPoint back_start = reeb_flow(model, win.center, -arc, tight);
  std::optional<ReebOrbit> orbit_back(std::in_place, model, back_start, c0, arc, tight);

  const Mat32 fq = model.frame(win.center.chart, win.center.x);
  return SpiralPrediction{
      .model = &model,
      .center_orbit = std::move(orbit),
      .center_orbit_back = std::move(orbit_back),
      .J0 = win.j0,
      .h0 = h0,
      .horizon = horizon,
      .q0 = q0n,
      .p0 = p0,
      .X0 = {q0n, model.frame(q0n.chart, q0n.x) * c0},
      .c0 = c0,
      .Q0 = win.center,
      .Y0 = {win.center, fq * c0},
      .phase0 = std::atan2(c0[1], c0[0]),
      .eps_sign = eps_sign,
      .rot_sign = rot_sign,
      .measured_rate = win.rate,
      .sign_check_ok = rot_sign == win.sig_meas,
  };
}

PredictedState predict_state(const SpiralPrediction& pred, double t) {
  const double slack = 1e-9 * std::max(1.0, pred.horizon);
  if (std::abs(t) > pred.horizon + slack) throw ModelError("prediction horizon exceeded");
  const ContactModel& model = *pred.model;
  const double tau = pred.J0 * t / 2;

  ManifoldPoint pt;
  double phi = 0;
  if (tau >= 0) {
    pt = pred.center_orbit.point_at(tau);
    phi = pred.center_orbit.phi_at(tau);
  } else {
    const ReebOrbit& ob = *pred.center_orbit_back;
    const double off = ob.tau_max();
    pt = ob.point_at(tau + off);
    phi = ob.phi_at(tau + off) - ob.phi_at(off);
  }

  const double ang = pred.rot_sign * t / pred.J0 + phi;
  const Vec2 c = rot(ang, pred.c0);
  const Vec2 ic(-c[1], c[0]);
  const Mat32 fc = model.frame(pt.chart, pt.x);
  const Vec3 px = pt.x + (-pred.eps_sign * pred.J0) * (fc * ic);
  const ManifoldPoint pos = normalize_chart(model, {pt.chart, px});

  PredictedState st;
  st.position = pos;
  st.velocity = {pos, model.frame(pos.chart, pos.x) * c};
  st.center = pt;
  st.components = c;
  st.phi = phi;
  return st;
}

SpiralError spiral_error(const ContactModel& model, const ManifoldPoint& q0, const TangentVec& x0,
                         double h0, double horizon_factor, const IntegratorConfig& cfg) {
  const SpiralPrediction pred = spiral_prediction(model, q0, x0, h0, horizon_factor, cfg);
  const Trajectory traj = geodesic(model, pred.q0, pred.p0, pred.horizon, tighten(cfg));

  SpiralError out;
  out.J0 = pred.J0;
  out.eps_sign = pred.eps_sign;
  out.rot_sign = pred.rot_sign;
  out.J_hat0 = std::sqrt(traj.gstar.front()) / traj.h_reeb.front();
  out.samples = traj.size();

  Vec3 delta0 = Vec3::Zero();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const PhasePoint& z = traj.z[i];
    const PredictedState ps = predict_state(pred, traj.t[i]);

    out.pos_err = std::max(out.pos_err, chart_distance(model, z.q, ps.position));

    // Compare chart components in the center's chart: embeddings would base
    // the two vectors at different points, where a curled-up periodic
    // direction (e.g. a cylinder chart) makes even a constant difference
    // rotate and defeat the delta(0) renormalization below.
    const Vec3 vtrue = geodesic_velocity(model, z);
    const Vec3 v_true_cc = push_vector(model, z.q, ps.center.chart, vtrue);
    const Mat32 fcen = model.frame(ps.center.chart, ps.center.x);
    const Vec3 d = v_true_cc - fcen * ps.components;
    if (i == 0) delta0 = d;
    out.vel_err = std::max(out.vel_err, (d - delta0).norm());

    const Vec3 v_true_pc = push_vector(model, z.q, ps.position.chart, vtrue);
    out.state_vel_err = std::max(out.state_vel_err, (v_true_pc - ps.velocity.v).norm());

    if (!(traj.h_reeb[i] > 0)) throw NumericalError("geodesic left the positive cone");
    const double jh = std::sqrt(traj.gstar[i]) / traj.h_reeb[i];
    out.J_drift = std::max(out.J_drift, std::abs(jh - out.J_hat0));
  }
  return out;
}

ConvergenceScan convergence_scan(const ContactModel& model, const ManifoldPoint& q0,
                                 const TangentVec& x0, const std::vector<double>& h0_list,
                                 double horizon_factor, const IntegratorConfig& cfg) {
  if (h0_list.size() < 3) throw ModelError("convergence scan needs at least 3 momenta");

  ConvergenceScan scan;
  scan.noise_floor = kNoiseFloor;
  std::vector<double> h0s, pos, vel, drift;
  scan.signs_stable = true;
  for (std::size_t i = 0; i < h0_list.size(); ++i) {
    const SpiralError e = spiral_error(model, q0, x0, h0_list[i], horizon_factor, cfg);
    scan.rows.push_back({h0_list[i], e.J0, e.pos_err, e.vel_err, e.J_drift});
    h0s.push_back(h0_list[i]);
    pos.push_back(e.pos_err);
    vel.push_back(e.vel_err);
    drift.push_back(e.J_drift);
    if (i == 0) {
      scan.eps_sign = e.eps_sign;
      scan.rot_sign = e.rot_sign;
    } else if (e.eps_sign != scan.eps_sign || e.rot_sign != scan.rot_sign) {
      scan.signs_stable = false;
    }
  }
  scan.pos = fit_or_exact(h0s, pos, kNoiseFloor);
  scan.vel = fit_or_exact(h0s, vel, kNoiseFloor);
  scan.drift = fit_or_exact(h0s, drift, kNoiseFloor);
  return scan;
}

AdiabaticRun adiabatic_drift(const ContactModel& model, const ManifoldPoint& q0, const Vec3& p0,
                             double T, const IntegratorConfig& cfg) {
  const ManifoldPoint q0n = normalize_chart(model, q0);
  const double hz0 = hamiltonian_lift(model, FieldId::Z, {q0n, p0});
  if (!(hz0 > 0)) throw ModelError("adiabatic drift needs h_Z > 0 at t = 0");

  // geodesic() rescales p0 to g* = 1; J_hat is invariant under that dilation.
  const Trajectory traj = geodesic(model, q0n, p0, T, tighten(cfg));
  AdiabaticRun run;
  run.h0 = traj.h_reeb.front();
  run.T = T;
  run.J_hat0 = std::sqrt(traj.gstar.front()) / traj.h_reeb.front();
  run.max_ratio = 1.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (!(traj.h_reeb[i] > 0)) throw NumericalError("geodesic left the positive cone");
    const double jh = std::sqrt(traj.gstar[i]) / traj.h_reeb[i];
    run.max_drift = std::max(run.max_drift, std::abs(jh - run.J_hat0));
    run.max_ratio = std::max(run.max_ratio, jh / run.J_hat0);
  }
  run.bounded = run.max_ratio <= 2.0 + 1e-12;
  return run;
}

AdiabaticScan adiabatic_scan(const ContactModel& model, const ManifoldPoint& q0,
                             const TangentVec& x0, const std::vector<double>& h0_list,
                             double horizon_factor, const IntegratorConfig& cfg) {
  if (h0_list.empty()) throw ModelError("adiabatic scan needs at least one momentum");
  const ManifoldPoint q0n = normalize_chart(model, q0);
  const Vec2 c0 = unit_d_components(model, q0n, x0);

  AdiabaticScan scan;
  scan.noise_floor = kNoiseFloor;
  scan.all_bounded = true;
  std::vector<double> j0s, drifts;
  for (const double h0 : h0_list) {
    const Vec3 p0 = covector_from_components(model, q0n, c0[0], c0[1], h0);
    const AdiabaticRun run = adiabatic_drift(model, q0n, p0, horizon_factor * h0, cfg);
    scan.runs.push_back(run);
    scan.all_bounded = scan.all_bounded && run.bounded;
    j0s.push_back(run.J_hat0);
    drifts.push_back(run.max_drift);
  }
  scan.drift = fit_or_exact(j0s, drifts, kNoiseFloor);
  return scan;
}

}  // namespace contactflow
