#include "contactflow/models.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "contactflow/reeb.hpp"

namespace contactflow {

namespace {

constexpr double kFdStep = 1e-5;        // central differences at unit scale
constexpr double kFdStepNested = 1e-4;  // outer step when the inner field is itself FD

Mat3 skew(const Vec3& a) {
  Mat3 m;
  m << 0, -a[2], a[1], a[2], 0, -a[0], -a[1], a[0], 0;
  return m;
}

// ---------------------------------------------------------------------------
// Heisenberg chart: X = dx - (y/2) dz, Y = dy + (x/2) dz, so [X, Y] = dz and
// the Reeb field is Z = -dz.
// ---------------------------------------------------------------------------

Mat32 heis_frame(const Vec3& x) {
  Mat32 f;
  f.col(0) << 1, 0, -x[1] / 2;
  f.col(1) << 0, 1, x[0] / 2;
  return f;
}

Mat3 heis_frame_jac(int which) {
  Mat3 j = Mat3::Zero();
  if (which == 0)
    j(2, 1) = -0.5;
  else
    j(2, 0) = 0.5;
  return j;
}

Vec3 heis_bracket(FieldId v, FieldId w) {
  // Only [X, Y] = (0,0,1) is nonzero; Z and B are constant fields commuting
  // with everything here.
  if (v == FieldId::X && w == FieldId::Y) return Vec3(0, 0, 1);
  if (v == FieldId::Y && w == FieldId::X) return Vec3(0, 0, -1);
  return Vec3::Zero();
}

ContactModel make_heisenberg(bool quotient, double T0) {
  ContactModel m;
  m.name = quotient ? "heisenberg-quotient" : "heisenberg";
  m.num_charts = 1;
  if (quotient) m.periods = Vec3(0, 0, T0);
  m.frame = [](int, const Vec3& x) { return heis_frame(x); };
  m.frame_jacobian = [](int, const Vec3&, int which) { return heis_frame_jac(which); };
  m.analytic_bracket = [](int, const Vec3&, FieldId v, FieldId w) { return heis_bracket(v, w); };
  m.reeb = [](int, const Vec3&) { return Vec3(0, 0, -1); };
  m.reeb_jacobian = [](int, const Vec3&) { return Mat3::Zero(); };
  if (quotient) {
    // Cylinder embedding: wraps the periodic coordinate so distances are
    // computed modulo the period.
    const double r = T0 / (2 * M_PI);
    m.embed = [r, T0](int, const Vec3& x) {
      Eigen::VectorXd e(4);
      e << x[0], x[1], r * std::cos(2 * M_PI * x[2] / T0), r * std::sin(2 * M_PI * x[2] / T0);
      return e;
    };
    m.embed_jacobian = [r, T0](int, const Vec3& x) {
      Eigen::MatrixXd j = Eigen::MatrixXd::Zero(4, 3);
      j(0, 0) = 1;
      j(1, 1) = 1;
      const double ang = 2 * M_PI * x[2] / T0;
      j(2, 2) = -std::sin(ang);
      j(3, 2) = std::cos(ang);
      return j;
    };
  }
  return m;
}

// ---------------------------------------------------------------------------
// S^3 with a left-invariant frame. Points are unit quaternions; chart 0 and
// chart 1 are stereographic projections from the two poles, glued by the
// inversion y = x / |x|^2. The frame fields X, Y and the Reeb field Z are
// the left-invariant fields generated by the imaginary units with constant
// coefficient vectors e1, e2 and -2 e3; brackets close on the same family.
// ---------------------------------------------------------------------------

Vec3 s3_field(int chart, const Vec3& x, const Vec3& a) {
  const double s = x.squaredNorm();
  if (chart == 0) return 0.5 * (1 - s) * a + x.cross(a) + x.dot(a) * x;
  return 0.5 * (s - 1) * a + x.cross(a) - x.dot(a) * x;
}

Mat3 s3_field_jac(int chart, const Vec3& x, const Vec3& a) {
  if (chart == 0)
    return -a * x.transpose() - skew(a) + x * a.transpose() + x.dot(a) * Mat3::Identity();
  return a * x.transpose() - skew(a) - x * a.transpose() - x.dot(a) * Mat3::Identity();
}

Vec3 s3_coefficient(FieldId id) {
  switch (id) {
    case FieldId::X: return Vec3(1, 0, 0);
    case FieldId::Y: return Vec3(0, 1, 0);
    case FieldId::Z: return Vec3(0, 0, -2);
    case FieldId::B: return Vec3(0, 0, 2);
  }
  return Vec3::Zero();
}

ContactModel make_s3() {
  ContactModel m;
  m.name = "s3";
  m.num_charts = 2;
  m.sample_lo = Vec3(-1.2, -1.2, -1.2);
  m.sample_hi = Vec3(1.2, 1.2, 1.2);
  m.frame = [](int chart, const Vec3& x) {
    Mat32 f;
    f.col(0) = s3_field(chart, x, Vec3(1, 0, 0));
    f.col(1) = s3_field(chart, x, Vec3(0, 1, 0));
    return f;
  };
  m.frame_jacobian = [](int chart, const Vec3& x, int which) {
    return s3_field_jac(chart, x, which == 0 ? Vec3(1, 0, 0) : Vec3(0, 1, 0));
  };
  m.analytic_bracket = [](int chart, const Vec3& x, FieldId v, FieldId w) {
    // Left-invariant fields: [field(a), field(b)] = field(2 a x b).
    return s3_field(chart, x, 2 * s3_coefficient(v).cross(s3_coefficient(w)));
  };
  m.reeb = [](int chart, const Vec3& x) { return s3_field(chart, x, Vec3(0, 0, -2)); };
  m.reeb_jacobian = [](int chart, const Vec3& x) {
    return s3_field_jac(chart, x, Vec3(0, 0, -2));
  };
  m.preferred_chart = [](int chart, const Vec3& x) {
    return x.squaredNorm() > 4.0 ? 1 - chart : chart;
  };
  m.to_chart = [](int chart, const Vec3& x, int target) {
    if (target == chart) return x;
    const double s = x.squaredNorm();
    if (s == 0) throw ModelError("s3 chart transition undefined at the pole");
    return Vec3(x / s);
  };
  m.chart_jacobian = [](int chart, const Vec3& x, int target) {
    if (target == chart) return Mat3(Mat3::Identity());
    const double s = x.squaredNorm();
    if (s == 0) throw ModelError("s3 chart transition undefined at the pole");
    return Mat3((Mat3::Identity() - 2.0 * (x * x.transpose()) / s) / s);
  };
  m.embed = [](int chart, const Vec3& x) {
    const double s = x.squaredNorm();
    const double f = 1.0 / (1.0 + s);
    Eigen::VectorXd e(4);
    e[0] = (chart == 0 ? 1 - s : s - 1) * f;
    e.tail<3>() = 2 * f * x;
    return e;
  };
  m.embed_jacobian = [](int chart, const Vec3& x) {
    const double s = x.squaredNorm();
    const double f = 1.0 / (1.0 + s);
    Eigen::MatrixXd j(4, 3);
    j.row(0) = (chart == 0 ? -4.0 : 4.0) * f * f * x.transpose();
    j.bottomRows<3>() = 2 * f * Mat3::Identity() - 4 * f * f * (x * x.transpose());
    return j;
  };
  return m;
}

// Finite-difference Lie bracket [V, W] = DW.V - DV.W with chart-coordinate
// central differences.
TangentVec fd_lie_bracket(const ContactModel& model, FieldId v, FieldId w,
                          const ManifoldPoint& q, double h) {
  auto jac = [&](FieldId id) {
    Mat3 j;
    for (int i = 0; i < 3; ++i) {
      ManifoldPoint qp = q, qm = q;
      qp.x[i] += h;
      qm.x[i] -= h;
      j.col(i) = (evaluate_field(model, id, qp) - evaluate_field(model, id, qm)) / (2 * h);
    }
    return j;
  };
  const Vec3 vv = evaluate_field(model, v, q);
  const Vec3 wv = evaluate_field(model, w, q);
  return TangentVec{q, jac(w) * vv - jac(v) * wv};
}

// True when evaluating `id` requires finite differences itself (so an outer
// finite difference over it should use a larger step).
bool field_is_fd(const ContactModel& model, FieldId id) {
  if (id == FieldId::B) return !model.analytic_bracket;
  if (id == FieldId::Z) return !model.reeb;
  return false;
}

double direction_derivative(const std::function<double(const ManifoldPoint&)>& f,
                            const ManifoldPoint& q, const Vec3& dir) {
  ManifoldPoint qp = q, qm = q;
  qp.x += kFdStep * dir;
  qm.x -= kFdStep * dir;
  return (f(qp) - f(qm)) / (2 * kFdStep);
}

// d alpha(V, W) = V(alpha(W)) - W(alpha(V)) - alpha([V, W]).
double dalpha(const ContactModel& model, const ManifoldPoint& q, FieldId v, FieldId w) {
  auto alpha_on = [&](FieldId id) {
    return [&model, id](const ManifoldPoint& p) {
      return contact_form(model, p).p.dot(evaluate_field(model, id, p));
    };
  };
  const Vec3 vv = evaluate_field(model, v, q);
  const Vec3 wv = evaluate_field(model, w, q);
  const double term1 = direction_derivative(alpha_on(w), q, vv);
  const double term2 = direction_derivative(alpha_on(v), q, wv);
  const Vec3 br = lie_bracket(model, v, w, q).v;
  return term1 - term2 - contact_form(model, q).p.dot(br);
}

}  // namespace

ContactModel builtin_model(const std::string& name, double T0) {
  if (name == "heisenberg") return make_heisenberg(false, 0);
  if (name == "heisenberg-quotient") {
    if (!(T0 > 0)) throw ModelError("heisenberg-quotient requires period T0 > 0");
    return make_heisenberg(true, T0);
  }
  if (name == "s3") return make_s3();
  throw ModelError("unknown model '" + name + "' (known: heisenberg, heisenberg-quotient, s3)");
}

ManifoldPoint map_to_chart(const ContactModel& model, const ManifoldPoint& q, int target) {
  if (target == q.chart) return q;
  if (!model.to_chart) throw ModelError("model '" + model.name + "' has no chart transitions");
  return ManifoldPoint{target, model.to_chart(q.chart, q.x, target)};
}

ManifoldPoint normalize_chart(const ContactModel& model, const ManifoldPoint& q) {
  if (!model.preferred_chart) return q;
  const int target = model.preferred_chart(q.chart, q.x);
  return map_to_chart(model, q, target);
}

Vec3 push_vector(const ContactModel& model, const ManifoldPoint& q, int target, const Vec3& v) {
  if (target == q.chart) return v;
  if (!model.chart_jacobian) throw ModelError("model '" + model.name + "' has no chart Jacobian");
  return model.chart_jacobian(q.chart, q.x, target) * v;
}

Vec3 push_covector(const ContactModel& model, const ManifoldPoint& q, int target, const Vec3& p) {
  if (target == q.chart) return p;
  if (!model.chart_jacobian) throw ModelError("model '" + model.name + "' has no chart Jacobian");
  const Mat3 j = model.chart_jacobian(q.chart, q.x, target);
  // Covectors pull back by the inverse transpose so that pairings are chart
  // invariant.
  return j.transpose().fullPivLu().solve(p);
}

Eigen::VectorXd embed_point(const ContactModel& model, const ManifoldPoint& q) {
  if (model.embed) return model.embed(q.chart, q.x);
  return Eigen::VectorXd(q.x);
}

Eigen::MatrixXd embed_jacobian(const ContactModel& model, const ManifoldPoint& q) {
  if (model.embed_jacobian) return model.embed_jacobian(q.chart, q.x);
  return Eigen::MatrixXd(Mat3::Identity());
}

double chart_distance(const ContactModel& model, const ManifoldPoint& a, const ManifoldPoint& b) {
  return (embed_point(model, a) - embed_point(model, b)).norm();
}

Vec3 delta_mod_periods(const ContactModel& model, const ManifoldPoint& a, const ManifoldPoint& b) {
  const ManifoldPoint a_in_b = map_to_chart(model, a, b.chart);
  Vec3 d = a_in_b.x - b.x;
  for (int i = 0; i < 3; ++i) {
    const double period = model.periods[i];
    if (period > 0) d[i] -= period * std::round(d[i] / period);
  }
  return d;
}

Vec3 evaluate_field(const ContactModel& model, FieldId id, const ManifoldPoint& q) {
  switch (id) {
    case FieldId::X: return model.frame(q.chart, q.x).col(0);
    case FieldId::Y: return model.frame(q.chart, q.x).col(1);
    case FieldId::Z:
      if (model.reeb) return model.reeb(q.chart, q.x);
      return reeb_field(model, q).v;
    case FieldId::B:
      if (model.analytic_bracket) return model.analytic_bracket(q.chart, q.x, FieldId::X, FieldId::Y);
      return fd_lie_bracket(model, FieldId::X, FieldId::Y, q, kFdStep).v;
  }
  throw ModelError("invalid field id");
}

Mat3 field_jacobian(const ContactModel& model, FieldId id, const ManifoldPoint& q) {
  if (id == FieldId::X && model.frame_jacobian) return model.frame_jacobian(q.chart, q.x, 0);
  if (id == FieldId::Y && model.frame_jacobian) return model.frame_jacobian(q.chart, q.x, 1);
  if (id == FieldId::Z && model.reeb_jacobian) return model.reeb_jacobian(q.chart, q.x);
  const double h = field_is_fd(model, id) ? kFdStepNested : kFdStep;
  Mat3 j;
  for (int i = 0; i < 3; ++i) {
    ManifoldPoint qp = q, qm = q;
    qp.x[i] += h;
    qm.x[i] -= h;
    j.col(i) = (evaluate_field(model, id, qp) - evaluate_field(model, id, qm)) / (2 * h);
  }
  return j;
}

TangentVec lie_bracket(const ContactModel& model, FieldId v, FieldId w, const ManifoldPoint& q) {
  if (v == w) return TangentVec{q, Vec3::Zero()};
  if (model.analytic_bracket) return TangentVec{q, model.analytic_bracket(q.chart, q.x, v, w)};
  const double h =
      (field_is_fd(model, v) || field_is_fd(model, w)) ? kFdStepNested : kFdStep;
  return fd_lie_bracket(model, v, w, q, h);
}

Vec3 frame_components(const ContactModel& model, const ManifoldPoint& q, const Vec3& v) {
  Mat3 m;
  m.col(0) = evaluate_field(model, FieldId::X, q);
  m.col(1) = evaluate_field(model, FieldId::Y, q);
  m.col(2) = evaluate_field(model, FieldId::Z, q);
  Eigen::FullPivLU<Mat3> lu(m);
  if (!lu.isInvertible()) throw ModelError("degenerate (X, Y, Z) frame at sample point");
  return lu.solve(v);
}

Vec2 d_components(const ContactModel& model, const ManifoldPoint& q, const Vec3& v) {
  // Least squares against the frame columns; exact when v lies in D.
  const Mat32 f = model.frame(q.chart, q.x);
  return (f.transpose() * f).ldlt().solve(f.transpose() * v);
}

Covec contact_form(const ContactModel& model, const ManifoldPoint& q) {
  Mat3 m;
  m.col(0) = evaluate_field(model, FieldId::X, q);
  m.col(1) = evaluate_field(model, FieldId::Y, q);
  m.col(2) = evaluate_field(model, FieldId::Z, q);
  Eigen::FullPivLU<Mat3> lu(m.transpose());
  if (!lu.isInvertible())
    throw ModelError("frame degenerate at sample point; contact form undefined");
  return Covec{q, lu.solve(Vec3(0, 0, 1))};
}

double ValidationReport::max_residual() const {
  double r = 0;
  for (double v : {alpha_of_reeb, dalpha_reeb, dalpha_frame, bracket_xz_vertical,
                   bracket_yz_vertical, bracket_xy_vertical, analytic_vs_fd, transition_frame})
    r = std::max(r, v);
  return r;
}

ValidationReport validate_model(const ContactModel& model, int points, std::uint64_t seed) {
  ValidationReport rep;
  rep.points = points;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto sample = [&](int chart) {
    Vec3 x;
    for (int i = 0; i < 3; ++i)
      x[i] = model.sample_lo[i] + (model.sample_hi[i] - model.sample_lo[i]) * unit(rng);
    return ManifoldPoint{chart, x};
  };

  for (int n = 0; n < points; ++n) {
    const int chart = model.num_charts > 1 ? n % model.num_charts : 0;
    const ManifoldPoint q = sample(chart);

    Mat3 m;
    m.col(0) = evaluate_field(model, FieldId::X, q);
    m.col(1) = evaluate_field(model, FieldId::Y, q);
    m.col(2) = evaluate_field(model, FieldId::Z, q);
    Eigen::FullPivLU<Mat3> lu(m);
    if (!lu.isInvertible() || m.col(0).cross(m.col(1)).norm() < 1e-12) {
      rep.frame_degenerate = true;
      continue;
    }

    const Covec alpha = contact_form(model, q);
    rep.alpha_of_reeb = std::max(rep.alpha_of_reeb, std::abs(alpha.p.dot(m.col(2)) - 1));
    rep.dalpha_reeb = std::max({rep.dalpha_reeb, std::abs(dalpha(model, q, FieldId::Z, FieldId::X)),
                                std::abs(dalpha(model, q, FieldId::Z, FieldId::Y))});
    rep.dalpha_frame =
        std::max(rep.dalpha_frame, std::abs(dalpha(model, q, FieldId::X, FieldId::Y) - 1));

    const Vec3 cxz = lu.solve(lie_bracket(model, FieldId::X, FieldId::Z, q).v);
    const Vec3 cyz = lu.solve(lie_bracket(model, FieldId::Y, FieldId::Z, q).v);
    const Vec3 cxy = lu.solve(lie_bracket(model, FieldId::X, FieldId::Y, q).v);
    rep.bracket_xz_vertical = std::max(rep.bracket_xz_vertical, std::abs(cxz[2]));
    rep.bracket_yz_vertical = std::max(rep.bracket_yz_vertical, std::abs(cyz[2]));
    rep.bracket_xy_vertical = std::max(rep.bracket_xy_vertical, std::abs(cxy[2] + 1));

    if (model.analytic_bracket) {
      for (auto [v, w] : {std::pair{FieldId::X, FieldId::Y}, {FieldId::X, FieldId::Z},
                          {FieldId::Y, FieldId::Z}}) {
        const Vec3 an = model.analytic_bracket(q.chart, q.x, v, w);
        const Vec3 fd = fd_lie_bracket(model, v, w, q,
                                       field_is_fd(model, v) || field_is_fd(model, w)
                                           ? kFdStepNested
                                           : kFdStep)
                            .v;
        rep.analytic_vs_fd = std::max(rep.analytic_vs_fd, (an - fd).norm());
      }
    }

    if (model.num_charts > 1 && model.to_chart && model.chart_jacobian) {
      // Transition consistency: push frame vectors through the chart change
      // and compare with direct evaluation. Sample the overlap annulus.
      Vec3 dir = Vec3(unit(rng) - 0.5, unit(rng) - 0.5, unit(rng) - 0.5);
      if (dir.norm() < 1e-3) dir = Vec3(1, 0, 0);
      dir.normalize();
      const ManifoldPoint qo{chart, Vec3(dir * (0.6 + unit(rng)))};
      const int other = 1 - chart;
      const ManifoldPoint qo2 = map_to_chart(model, qo, other);
      for (FieldId id : {FieldId::X, FieldId::Y}) {
        const Vec3 pushed = push_vector(model, qo, other, evaluate_field(model, id, qo));
        const Vec3 direct = evaluate_field(model, id, qo2);
        rep.transition_frame = std::max(rep.transition_frame, (pushed - direct).norm());
      }
    }
  }
  return rep;
}

std::string format_report(const ValidationReport& rep) {
  std::ostringstream os;
  os << "points sampled:                 " << rep.points << "\n";
  os << "frame degenerate:               " << (rep.frame_degenerate ? "YES" : "no") << "\n";
  os << "|alpha(Z) - 1|:                 " << rep.alpha_of_reeb << "\n";
  os << "|d alpha(Z, .)|:                " << rep.dalpha_reeb << "\n";
  os << "|d alpha(X, Y) - 1|:            " << rep.dalpha_frame << "\n";
  os << "|[X,Z] vertical part|:          " << rep.bracket_xz_vertical << "\n";
  os << "|[Y,Z] vertical part|:          " << rep.bracket_yz_vertical << "\n";
  os << "|[X,Y] vertical part + 1|:      " << rep.bracket_xy_vertical << "\n";
  os << "analytic vs FD brackets:        " << rep.analytic_vs_fd << "\n";
  os << "chart transition (frame push):  " << rep.transition_frame << "\n";
  os << "max residual:                   " << rep.max_residual() << "\n";
  return os.str();
}

}  // namespace contactflow
