#include "contactflow/reeb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace contactflow {

namespace {

// 4D system: base point under the Reeb flow plus accumulated frame rotation.
struct OrbitSystem {
  static constexpr int kDim = 4;
  using Vec = Eigen::Matrix<double, 4, 1>;

  const ContactModel& model;
  int chart;

  void rhs(double /*tau*/, const Vec& y, Vec& dydt) const {
    const ManifoldPoint q{chart, Vec3(y.head<3>())};
    dydt.head<3>() = evaluate_field(model, FieldId::Z, q);
    dydt[3] = frame_rotation_rate(model, q);
  }

  bool maybe_switch(Vec& y) {
    if (!model.preferred_chart) return false;
    const Vec3 x = y.head<3>();
    const int target = model.preferred_chart(chart, x);
    if (target == chart) return false;
    y.head<3>() = model.to_chart(chart, x, target);
    chart = target;
    return true;
  }
};

int find_interval(const std::vector<ReebOrbit::Sample>& s, double tau) {
  auto it = std::upper_bound(s.begin(), s.end(), tau,
                             [](double v, const ReebOrbit::Sample& a) { return v < a.tau; });
  int idx = static_cast<int>(it - s.begin()) - 1;
  return std::clamp(idx, 0, static_cast<int>(s.size()) - 2);
}

struct HermiteWeights {
  double h00, h10, h01, h11;
};

HermiteWeights hermite_weights(double s) {
  const double s2 = s * s;
  const double s3 = s2 * s;
  return {2 * s3 - 3 * s2 + 1, s3 - 2 * s2 + s, 3 * s2 - 2 * s3, s3 - s2};
}

}  // namespace

TangentVec reeb_field(const ContactModel& model, const ManifoldPoint& q) {
  if (model.reeb) return {q, model.reeb(q.chart, q.x)};
  // Z = -[X,Y] + uX + vY; u, v are fixed by requiring [X,Z] and [Y,Z] to
  // have no [X,Y]-component (horizontality of the Reeb brackets).
  const Mat32 frame = model.frame(q.chart, q.x);
  const Vec3 b = lie_bracket(model, FieldId::X, FieldId::Y, q).v;
  Mat3 m;
  m.col(0) = frame.col(0);
  m.col(1) = frame.col(1);
  m.col(2) = b;
  Eigen::FullPivLU<Mat3> lu(m);
  if (!lu.isInvertible()) {
    throw ModelError("frame and its bracket do not span the tangent space (not contact)");
  }
  const Vec3 xb = lie_bracket(model, FieldId::X, FieldId::B, q).v;
  const Vec3 yb = lie_bracket(model, FieldId::Y, FieldId::B, q).v;
  const double v = lu.solve(xb)[2];
  const double u = -lu.solve(yb)[2];
  return {q, -b + u * frame.col(0) + v * frame.col(1)};
}

double frame_rotation_rate(const ContactModel& model, const ManifoldPoint& q) {
  const Vec3 zx = lie_bracket(model, FieldId::Z, FieldId::X, q).v;
  const Vec3 zy = lie_bracket(model, FieldId::Z, FieldId::Y, q).v;
  const double l12 = d_components(model, q, zy)[0];
  const double l21 = d_components(model, q, zx)[1];
  return 0.5 * (l12 - l21);
}

ManifoldPoint reeb_flow(const ContactModel& model, const ManifoldPoint& q0, double tau,
                        const IntegratorConfig& cfg) {
  if (tau == 0.0) return q0;
  OrbitSystem sys{model, q0.chart};
  OrbitSystem::Vec y;
  y.head<3>() = q0.x;
  y[3] = 0.0;
  OrbitSystem::Vec yend = y;
  integrate_adaptive(sys, y, 0.0, tau, cfg,
                     [&](double, const OrbitSystem::Vec& yy, const OrbitSystem::Vec&) { yend = yy; });
  return {sys.chart, Vec3(yend.head<3>())};
}

ReebOrbit::ReebOrbit(const ContactModel& model, const ManifoldPoint& q0, const Vec2& e1_components,
                     double tau_max, const IntegratorConfig& cfg)
    : model_(&model) {
  if (!(tau_max > 0)) throw ModelError("ReebOrbit requires tau_max > 0");
  const double c0n = e1_components.norm();
  if (!(c0n > 0)) throw ModelError("ReebOrbit frame seed must be nonzero");
  e1_0_ = e1_components / c0n;

  const ManifoldPoint start = normalize_chart(model, q0);
  OrbitSystem sys{model, start.chart};
  OrbitSystem::Vec y;
  y.head<3>() = start.x;
  y[3] = 0.0;
  samples_.clear();
  auto observe = [&](double tau, const OrbitSystem::Vec& yy, const OrbitSystem::Vec& dydt) {
    samples_.push_back({tau, sys.chart, Vec3(yy.head<3>()), Vec3(dydt.head<3>()), yy[3], dydt[3]});
  };
  stats_ = integrate_adaptive(sys, y, 0.0, tau_max, cfg, observe);
}

void ReebOrbit::interpolate(double tau, int& chart, Vec3& x) const {
  const double span = samples_.back().tau;
  const double slack = 1e-9 * std::max(1.0, span);
  if (tau < -slack || tau > span + slack) {
    throw ModelError("ReebOrbit evaluation outside the sampled range");
  }
  tau = std::clamp(tau, 0.0, span);
  const int i = find_interval(samples_, tau);
  const Sample& a = samples_[i];
  const Sample& b = samples_[i + 1];
  const double dt = b.tau - a.tau;
  Vec3 xb = b.x;
  Vec3 vb = b.xdot;
  if (b.chart != a.chart) {
    const ManifoldPoint qb{b.chart, b.x};
    xb = model_->to_chart(b.chart, b.x, a.chart);
    vb = push_vector(*model_, qb, a.chart, b.xdot);
  }
  const double s = (tau - a.tau) / dt;
  const HermiteWeights w = hermite_weights(s);
  x = w.h00 * a.x + (w.h10 * dt) * a.xdot + w.h01 * xb + (w.h11 * dt) * vb;
  chart = a.chart;
}

ManifoldPoint ReebOrbit::point_at(double tau) const {
  int chart = 0;
  Vec3 x;
  interpolate(tau, chart, x);
  return normalize_chart(*model_, {chart, x});
}

Vec3 ReebOrbit::velocity_at(double tau) const {
  return evaluate_field(*model_, FieldId::Z, point_at(tau));
}

double ReebOrbit::phi_at(double tau) const {
  const double span = samples_.back().tau;
  const double slack = 1e-9 * std::max(1.0, span);
  if (tau < -slack || tau > span + slack) {
    throw ModelError("ReebOrbit evaluation outside the sampled range");
  }
  tau = std::clamp(tau, 0.0, span);
  const int i = find_interval(samples_, tau);
  const Sample& a = samples_[i];
  const Sample& b = samples_[i + 1];
  const double dt = b.tau - a.tau;
  const double s = (tau - a.tau) / dt;
  const HermiteWeights w = hermite_weights(s);
  return w.h00 * a.phi + w.h10 * dt * a.phidot + w.h01 * b.phi + w.h11 * dt * b.phidot;
}

Vec2 ReebOrbit::e1_at(double tau) const {
  const double phi = phi_at(tau);
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  return Vec2(c * e1_0_[0] - s * e1_0_[1], s * e1_0_[0] + c * e1_0_[1]);
}

Mat32 ReebOrbit::frame_at(double tau) const {
  const ManifoldPoint q = point_at(tau);
  const Mat32 frame = model_->frame(q.chart, q.x);
  const Vec2 c1 = e1_at(tau);
  Mat32 out;
  out.col(0) = c1[0] * frame.col(0) + c1[1] * frame.col(1);
  out.col(1) = -c1[1] * frame.col(0) + c1[0] * frame.col(1);
  return out;
}

std::optional<double> find_return_time(const ReebOrbit& orbit, const ManifoldPoint& q0,
                                       double tol) {
  const auto& s = orbit.samples();
  if (s.size() < 3) return std::nullopt;
  const ContactModel& model = orbit.model();

  std::vector<double> d(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    d[i] = chart_distance(model, {s[i].chart, s[i].x}, q0);
  }
  auto dist = [&](double tau) { return chart_distance(model, orbit.point_at(tau), q0); };

  auto refine = [&](double a, double b) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = dist(x1);
    double f2 = dist(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-13 * std::max(1.0, std::abs(b)); ++it) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = dist(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = dist(x2);
      }
    }
    return 0.5 * (a + b);
  };

  const double coarse = 0.5;
  const std::size_t n = s.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d[i] < coarse && d[i] <= d[i - 1] && d[i] <= d[i + 1]) {
      const double tau_star = refine(s[i - 1].tau, s[i + 1].tau);
      if (tau_star > 1e-12 && dist(tau_star) < tol) return tau_star;
    }
  }
  // A return sitting exactly at the end of the sampled range.
  if (d[n - 1] < coarse && d[n - 1] <= d[n - 2]) {
    const double tau_star = refine(s[n - 2].tau, s[n - 1].tau);
    if (tau_star > 1e-12 && dist(tau_star) < tol) return tau_star;
  }
  return std::nullopt;
}

std::optional<double> find_reeb_period(const ContactModel& model, const ManifoldPoint& q0,
                                       double t_max, double tol) {
  if (!(t_max > 0)) return std::nullopt;
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-12;
  const ReebOrbit orbit(model, q0, Vec2(1, 0), t_max, cfg);
  return find_return_time(orbit, q0, tol);
}

std::optional<MonodromyResult> monodromy(const ContactModel& model, const ManifoldPoint& q0,
                                         double t_max) {
  if (!(t_max > 0)) return std::nullopt;
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-12;
  const ReebOrbit orbit(model, q0, Vec2(1, 0), t_max, cfg);
  const auto period = find_return_time(orbit, q0, 1e-9);
  if (!period) return std::nullopt;
  MonodromyResult r;
  r.period = *period;
  r.alpha = orbit.phi_at(*period);
  r.alpha_wrapped = std::remainder(r.alpha, 2.0 * std::numbers::pi);
  r.return_distance = chart_distance(model, orbit.point_at(*period), q0);
  return r;
}

}  // namespace contactflow
