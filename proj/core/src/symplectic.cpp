#include "contactflow/symplectic.hpp"

#include <algorithm>
#include <cmath>

namespace contactflow {

namespace {

constexpr double kFdRel = 1e-6;

// 6D phase-space system for the shared RK drivers. The right-hand side is a
// callable (chart, y, dydt); chart switches map positions through the
// transition and covectors through its inverse transpose, so h_V and g* are
// unchanged across a switch.
struct PhaseSystem {
  static constexpr int kDim = 6;
  using Vec = Vec6;

  const ContactModel& model;
  int chart;
  std::function<void(int, const Vec6&, Vec6&)> f;

  void rhs(double /*t*/, const Vec6& y, Vec6& dydt) const { f(chart, y, dydt); }

  bool maybe_switch(Vec6& y) {
    if (!model.preferred_chart) return false;
    const Vec3 x = y.head<3>();
    const int target = model.preferred_chart(chart, x);
    if (target == chart) return false;
    const ManifoldPoint q{chart, x};
    y.head<3>() = model.to_chart(chart, x, target);
    y.tail<3>() = push_covector(model, q, target, Vec3(y.tail<3>()));
    chart = target;
    return true;
  }
};

Vec6 pack(const PhasePoint& z) {
  Vec6 y;
  y.head<3>() = z.q.x;
  y.tail<3>() = z.p;
  return y;
}

Vec6 phase_gradient(const PhaseFn& f, const PhasePoint& z) {
  Vec6 grad;
  for (int i = 0; i < 6; ++i) {
    PhasePoint zp = z;
    PhasePoint zm = z;
    double& cp = (i < 3) ? zp.q.x[i] : zp.p[i - 3];
    double& cm = (i < 3) ? zm.q.x[i] : zm.p[i - 3];
    const double step = kFdRel * std::max(1.0, std::abs(cp));
    cp += step;
    cm -= step;
    grad[i] = (f(zp) - f(zm)) / (2.0 * step);
  }
  return grad;
}

void geodesic_rhs(const ContactModel& model, int chart, const Vec6& y, Vec6& dydt) {
  const ManifoldPoint q{chart, y.head<3>()};
  const Vec3 p = y.tail<3>();
  const Mat32 frame = model.frame(chart, q.x);
  const double hx = p.dot(frame.col(0));
  const double hy = p.dot(frame.col(1));
  const Mat3 dx = field_jacobian(model, FieldId::X, q);
  const Mat3 dy = field_jacobian(model, FieldId::Y, q);
  dydt.head<3>() = hx * frame.col(0) + hy * frame.col(1);
  dydt.tail<3>() = -(hx * (dx.transpose() * p) + hy * (dy.transpose() * p));
}

// Shared trajectory assembly: records every accepted step with diagnostics
// and tracks the sup-deviation of the integrated Hamiltonian.
Trajectory run_phase(const ContactModel& model, PhaseSystem& sys, const PhasePoint& z0, double T,
                     const IntegratorConfig& cfg, const PhaseFn& energy, bool midpoint,
                     double step) {
  Trajectory traj;
  Vec6 y = pack(z0);
  double h0 = 0;
  bool have_h0 = false;
  auto observe = [&](double t, const Vec6& yy, const Vec6& dydt) {
    PhasePoint z{{sys.chart, Vec3(yy.head<3>())}, Vec3(yy.tail<3>())};
    traj.t.push_back(t);
    traj.z.push_back(z);
    if (cfg.dense_output) traj.deriv.push_back(dydt);
    traj.gstar.push_back(cometric(model, z));
    traj.h_reeb.push_back(hamiltonian_lift(model, FieldId::Z, z));
    const double e = energy(z);
    if (!have_h0) {
      h0 = e;
      have_h0 = true;
    }
    traj.energy_drift = std::max(traj.energy_drift, std::abs(e - h0));
  };
  if (midpoint) {
    traj.stats = integrate_midpoint(sys, y, 0.0, T, step, observe);
  } else {
    traj.stats = integrate_adaptive(sys, y, 0.0, T, cfg, observe);
  }
  return traj;
}

}  // namespace

double hamiltonian_lift(const ContactModel& model, FieldId id, const PhasePoint& z) {
  return z.p.dot(evaluate_field(model, id, z.q));
}

double cometric(const ContactModel& model, const PhasePoint& z) {
  const Mat32 frame = model.frame(z.q.chart, z.q.x);
  const double hx = z.p.dot(frame.col(0));
  const double hy = z.p.dot(frame.col(1));
  return hx * hx + hy * hy;
}

double poisson_fd(const PhaseFn& f, const PhaseFn& g, const PhasePoint& z) {
  const Vec6 df = phase_gradient(f, z);
  const Vec6 dg = phase_gradient(g, z);
  return df.head<3>().dot(dg.tail<3>()) - df.tail<3>().dot(dg.head<3>());
}

Vec6 hamiltonian_vector_field(const PhaseFn& h, const PhasePoint& z) {
  const Vec6 grad = phase_gradient(h, z);
  Vec6 field;
  field.head<3>() = grad.tail<3>();
  field.tail<3>() = -grad.head<3>();
  return field;
}

Vec6 geodesic_vector_field(const ContactModel& model, const PhasePoint& z) {
  Vec6 dydt;
  geodesic_rhs(model, z.q.chart, pack(z), dydt);
  return dydt;
}

Vec3 geodesic_velocity(const ContactModel& model, const PhasePoint& z) {
  const Mat32 frame = model.frame(z.q.chart, z.q.x);
  return z.p.dot(frame.col(0)) * frame.col(0) + z.p.dot(frame.col(1)) * frame.col(1);
}

Trajectory integrate(const ContactModel& model, const PhaseFn& h, const PhasePoint& z0, double T,
                     const IntegratorConfig& cfg) {
  auto fd_rhs = [&model, &h](int chart, const Vec6& y, Vec6& dydt) {
    const PhasePoint z{{chart, Vec3(y.head<3>())}, Vec3(y.tail<3>())};
    const Vec6 grad = phase_gradient(h, z);
    dydt.head<3>() = grad.tail<3>();
    dydt.tail<3>() = -grad.head<3>();
  };
  PhaseSystem sys{model, z0.q.chart, fd_rhs};
  return run_phase(model, sys, z0, T, cfg, h, false, 0.0);
}

Trajectory geodesic(const ContactModel& model, const ManifoldPoint& q0, const Vec3& p0, double T,
                    const IntegratorConfig& cfg) {
  PhasePoint z0{q0, p0};
  const double g0 = cometric(model, z0);
  if (!(g0 > 0) || std::sqrt(g0) < 1e-9 * p0.norm()) {
    throw ModelError("characteristic initial covector: cometric vanishes, no horizontal velocity");
  }
  z0.p /= std::sqrt(g0);
  auto rhs = [&model](int chart, const Vec6& y, Vec6& dydt) { geodesic_rhs(model, chart, y, dydt); };
  PhaseSystem sys{model, q0.chart, rhs};
  auto energy = [&model](const PhasePoint& z) { return 0.5 * cometric(model, z); };
  return run_phase(model, sys, z0, T, cfg, energy, false, 0.0);
}

Trajectory geodesic_midpoint(const ContactModel& model, const ManifoldPoint& q0, const Vec3& p0,
                             double T, double step) {
  PhasePoint z0{q0, p0};
  const double g0 = cometric(model, z0);
  if (!(g0 > 0) || std::sqrt(g0) < 1e-9 * p0.norm()) {
    throw ModelError("characteristic initial covector: cometric vanishes, no horizontal velocity");
  }
  z0.p /= std::sqrt(g0);
  auto rhs = [&model](int chart, const Vec6& y, Vec6& dydt) { geodesic_rhs(model, chart, y, dydt); };
  PhaseSystem sys{model, q0.chart, rhs};
  auto energy = [&model](const PhasePoint& z) { return 0.5 * cometric(model, z); };
  IntegratorConfig cfg;
  cfg.dense_output = false;
  return run_phase(model, sys, z0, T, cfg, energy, true, step);
}

Vec3 covector_from_components(const ContactModel& model, const ManifoldPoint& q, double a,
                              double b, double c) {
  const Mat32 frame = model.frame(q.chart, q.x);
  Mat3 m;
  m.col(0) = frame.col(0);
  m.col(1) = frame.col(1);
  m.col(2) = evaluate_field(model, FieldId::Z, q);
  Eigen::FullPivLU<Mat3> lu(m.transpose());
  if (!lu.isInvertible()) {
    throw ModelError("degenerate frame: cannot prescribe covector components");
  }
  return lu.solve(Vec3(a, b, c));
}

}  // namespace contactflow
