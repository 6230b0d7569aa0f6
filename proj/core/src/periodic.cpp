#include "contactflow/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace contactflow {

namespace {

constexpr double kPi = std::numbers::pi;

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

double positive_mod(double x, double period) {
  double m = std::fmod(x, period);
  if (m < 0) m += period;
  return m;
}

// Golden-section minimum of f over [a, b] (f need not be smooth).
template <class F>
double golden_min(F&& f, double a, double b, int iters = 48) {
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  return (a + b) / 2;
}

// Seed phase point at a given starting angle: spiral offset from g0 plus the
// matching momentum (kept in g0's chart so finite differences over `phase`
// compare like with like).
PhasePoint spiral_seed_point(const ContactModel& model, const ManifoldPoint& g0, const Vec2& e1_0,
                             double phase, double j0) {
  const Vec2 c = rot(phase, e1_0);
  const Vec2 ic(-c[1], c[0]);
  const Mat32 f = model.frame(g0.chart, g0.x);
  const ManifoldPoint q{g0.chart, g0.x + j0 * (f * ic)};
  const Vec3 p = covector_from_components(model, q, c[0], c[1], 1.0 / j0);
  return {q, p};
}

// Tracks the geodesic's guiding center along the reference orbit and
// reports its total advance in Reeb time; fills the genuineness fields.
void measure_covering(const ContactModel& model, const ReebOrbit& orbit, double T0, double alpha0,
                      const RefinedGeodesic& ref, SpectrumCell& cell,
                      const IntegratorConfig& cfg) {
  const Trajectory traj = geodesic(model, ref.z0.q, ref.z0.p, ref.T, cfg);

  const auto dist = [&](double tau, const Eigen::VectorXd& e) {
    const ManifoldPoint pt = orbit.point_at(positive_mod(tau, T0));
    return (embed_point(model, pt) - e).norm();
  };

  double tau_first = 0;
  double tau_prev = 0;
  bool first = true;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (!(traj.h_reeb[i] > 0)) return;  // left the cone; cannot be genuine
    const PhasePoint& z = traj.z[i];
    const double jh = std::sqrt(traj.gstar[i]) / traj.h_reeb[i];

    // Guiding center: invert q = center - J * F(center) * (i c) by sweeps.
    const Mat32 fq = model.frame(z.q.chart, z.q.x);
    const double hx = z.p.dot(fq.col(0));
    const double hy = z.p.dot(fq.col(1));
    const double r = std::max(std::hypot(hx, hy), 1e-300);
    const Vec2 ic(-hy / r, hx / r);
    Vec3 x = z.q.x;
    for (int sweep = 0; sweep < 3; ++sweep) {
      x = z.q.x - jh * (model.frame(z.q.chart, x) * ic);
    }
    const Eigen::VectorXd e_c = embed_point(model, {z.q.chart, x});

    double tau;
    if (first) {
      const int m = 256;
      double best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int s = 0; s < m; ++s) {
        const double cand = (s + 0.5) * T0 / m;
        const double d = dist(cand, e_c);
        if (d < best_d) {
          best_d = d;
          best = cand;
        }
      }
      tau = golden_min([&](double t) { return dist(t, e_c); }, best - T0 / m, best + T0 / m);
      tau_first = tau;
      first = false;
    } else {
      tau = golden_min([&](double t) { return dist(t, e_c); }, tau_prev - 0.25 * T0,
                       tau_prev + 0.25 * T0);
    }
    tau_prev = tau;
  }

  cell.reeb_advance = tau_prev - tau_first;
  const double j_meas = std::round(cell.reeb_advance / T0);
  if (j_meas >= 1) {
    cell.winding_lift = ref.T * ref.T / (2 * j_meas * T0) + j_meas * alpha0;
  }
  cell.genuine = std::abs(cell.reeb_advance - cell.j * T0) <= 0.01 &&
                 std::abs(cell.winding_lift - 2 * kPi * cell.k) <= 0.1;
}

}  // namespace

LengthPrediction predicted_length(double T0, double alpha0, int j, int k) {
  if (!(T0 > 0)) throw ModelError("predicted_length: T0 must be positive");
  if (j < 1 || k < 1) throw ModelError("predicted_length: j and k must be >= 1");
  const double disc = 1.0 - j * alpha0 / (2 * k * kPi);
  if (!(disc > 0)) {
    throw ModelError("predicted_length: closure factor non-positive (outside the regime)");
  }
  const double T = 2 * std::sqrt(j * k * kPi * T0 * disc);
  return {T, 2 * j * T0 / T};
}

ShootingSeed predicted_seed(const ContactModel& model, const ReebOrbit& orbit, double T0,
                            double alpha0, int j, int k, double phase) {
  const LengthPrediction lp = predicted_length(T0, alpha0, j, k);
  const ManifoldPoint g0 = orbit.point_at(0);
  const Vec2 e1_0 = orbit.e1_at(0);

  ShootingSeed seed;
  seed.z0 = spiral_seed_point(model, g0, e1_0, phase, lp.J);
  seed.T = lp.T;
  seed.J = lp.J;
  seed.T0 = T0;
  seed.alpha0 = alpha0;

  const double h = 1e-5;
  const PhasePoint zp = spiral_seed_point(model, g0, e1_0, phase + h, lp.J);
  const PhasePoint zm = spiral_seed_point(model, g0, e1_0, phase - h, lp.J);
  seed.phase_dir.head<3>() = (zp.q.x - zm.q.x) / (2 * h);
  seed.phase_dir.segment<3>(3) = (zp.p - zm.p) / (2 * h);
  return seed;
}

ClosureResidual closure_residual(const ContactModel& model, const PhasePoint& z0, double T,
                                 const IntegratorConfig& cfg) {
  ClosureResidual out;
  const double g0 = cometric(model, z0);
  out.r[6] = g0 - 1.0;
  if (T == 0) {
    out.z_end = z0;
    out.norm = out.r.norm();
    return out;
  }

  const Trajectory traj = geodesic(model, z0.q, z0.p, T, cfg);
  const PhasePoint& zT = traj.back();
  Vec3 pT = zT.p;
  if (zT.q.chart != z0.q.chart) pT = push_covector(model, zT.q, z0.q.chart, pT);

  out.r.head<3>() = delta_mod_periods(model, zT.q, z0.q);
  // geodesic() integrates the momentum rescaled to g* = 1.
  out.r.segment<3>(3) = pT - z0.p / std::sqrt(g0);
  out.z_end = zT;
  out.norm = out.r.norm();
  return out;
}

RefinedGeodesic shoot_closed_geodesic(const ContactModel& model, const ShootingSeed& seed,
                                      double tol, int max_iter, const IntegratorConfig& cfg) {
  if (!(seed.T > 0)) throw ModelError("shoot_closed_geodesic: seed period must be positive");
  const IntegratorConfig icfg = tighten(cfg);

  PhasePoint z = seed.z0;
  double T = seed.T;
  ClosureResidual cur = closure_residual(model, z, T, icfg);

  // The literal seed carries the leading-order momentum; its h_Z is off by
  // an O(J^2) relative amount with a model-dependent constant. When the seed
  // misses badly, scan a few shrink factors of that size before iterating.
  if (cur.norm > 0.05 && seed.J > 0) {
    const Mat32 f = model.frame(z.q.chart, z.q.x);
    const double a = z.p.dot(f.col(0));
    const double b = z.p.dot(f.col(1));
    const double hz = hamiltonian_lift(model, FieldId::Z, z);
    for (const double s : {0.5, 1.0, 1.5, 2.0}) {
      const double shrink = 1.0 - s * seed.J * seed.J;
      if (!(shrink > 0)) continue;
      PhasePoint zs = z;
      zs.p = covector_from_components(model, z.q, a, b, hz * shrink);
      const ClosureResidual rs = closure_residual(model, zs, T, icfg);
      if (rs.norm < cur.norm) {
        z = zs;
        cur = rs;
      }
    }
  }

  int it = 0;
  for (; it < max_iter && cur.norm >= tol; ++it) {
    // Finite-difference Jacobian over (q, p, T).
    Eigen::Matrix<double, 7, 7> jac;
    const double hq = 1e-7 * std::max(1.0, z.q.x.norm());
    const double hp = 1e-7 * std::max(1.0, z.p.norm());
    const double hT = 1e-7 * std::max(1.0, T);
    for (int c = 0; c < 7; ++c) {
      PhasePoint zp = z;
      double Tp = T;
      double h;
      if (c < 3) {
        h = hq;
        zp.q.x[c] += h;
      } else if (c < 6) {
        h = hp;
        zp.p[c - 3] += h;
      } else {
        h = hT;
        Tp += h;
      }
      jac.col(c) = (closure_residual(model, zp, Tp, icfg).r - cur.r) / h;
    }

    // Project the update off the two continuous near-symmetries: time
    // translation along the flow and the frozen spiral-phase direction.
    const double gz = cometric(model, z);
    const PhasePoint zu{z.q, z.p / std::sqrt(gz)};
    Vec7 d1 = Vec7::Zero();
    d1.head<6>() = geodesic_vector_field(model, zu);
    d1.normalize();
    Eigen::MatrixXd sym(7, 1);
    sym.col(0) = d1;
    Vec7 d2 = seed.phase_dir;
    d2 -= d1 * d1.dot(d2);
    if (d2.norm() > 1e-8) {
      sym.conservativeResize(7, 2);
      sym.col(1) = d2.normalized();
    }
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(sym);
    const Eigen::MatrixXd qfull = qr.householderQ() * Eigen::MatrixXd::Identity(7, 7);
    const Eigen::MatrixXd basis = qfull.rightCols(7 - sym.cols());

    const Eigen::MatrixXd jb = jac * basis;
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(jb, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec7 step = basis * svd.solve(-cur.r);

    bool accepted = false;
    double alpha = 1.0;
    for (int ls = 0; ls < 10; ++ls, alpha /= 2) {
      PhasePoint zt = z;
      zt.q.x += alpha * step.head<3>();
      zt.p += alpha * step.segment<3>(3);
      const double Tt = T + alpha * step[6];
      if (!(Tt > 0.2 * seed.T && Tt < 5 * seed.T)) continue;
      ClosureResidual rt;
      try {
        rt = closure_residual(model, zt, Tt, icfg);
      } catch (const std::exception&) {
        continue;
      }
      if (rt.norm < cur.norm * (1 - 1e-4 * alpha) || rt.norm < tol) {
        z = zt;
        T = Tt;
        cur = rt;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      ++it;
      break;
    }
  }

  RefinedGeodesic out;
  out.z0 = z;
  out.T = T;
  out.residual = cur.norm;
  out.iterations = it;
  out.converged = cur.norm < tol;
  return out;
}

LengthSpectrum length_spectrum(const ContactModel& model, const ReebOrbit& orbit, int j_max,
                               int k_min, int k_max, double tol, const IntegratorConfig& cfg) {
  if (j_max < 1 || k_min < 1 || k_max < k_min) {
    throw ModelError("length_spectrum: need j_max >= 1 and 1 <= k_min <= k_max");
  }
  const ManifoldPoint q0 = orbit.point_at(0);
  const auto period = find_return_time(orbit, q0, 1e-9);
  if (!period) throw ModelError("length_spectrum: reference orbit does not close in its span");

  LengthSpectrum spec;
  spec.T0 = *period;
  spec.alpha0 = orbit.phi_at(spec.T0);

  const IntegratorConfig icfg = tighten(cfg);
  for (int j = 1; j <= j_max; ++j) {
    for (int k = k_min; k <= k_max; ++k) {
      SpectrumCell cell;
      cell.j = j;
      cell.k = k;
      try {
        const LengthPrediction lp = predicted_length(spec.T0, spec.alpha0, j, k);
        cell.T_pred = lp.T;
        cell.J_pred = lp.J;
        const ShootingSeed seed = predicted_seed(model, orbit, spec.T0, spec.alpha0, j, k);
        const RefinedGeodesic ref = shoot_closed_geodesic(model, seed, tol, 50, cfg);
        cell.T_found = ref.T;
        cell.residual = ref.residual;
        cell.iters = ref.iterations;
        cell.rel_dev = std::abs(ref.T - lp.T) / lp.T;
        if (ref.converged) {
          cell.status = "converged";
          measure_covering(model, orbit, spec.T0, spec.alpha0, ref, cell, icfg);
        } else {
          cell.status = "maxiter";
        }
      } catch (const std::exception&) {
        cell.status = "failed";
      }
      spec.cells.push_back(cell);
    }
  }

  // Asymptotic trend: within each covering number, the mean relative
  // deviation over the upper half of the k range must not exceed the mean
  // over the lower half (small absolute slack for noise-floor runs).
  spec.trend_non_increasing = true;
  for (int j = 1; j <= j_max; ++j) {
    std::vector<double> devs;
    for (const SpectrumCell& cell : spec.cells) {
      if (cell.j == j && cell.status == "converged") devs.push_back(cell.rel_dev);
    }
    if (devs.size() < 4) continue;
    const std::size_t half = devs.size() / 2;
    double lo = 0, hi = 0;
    for (std::size_t i = 0; i < half; ++i) lo += devs[i];
    for (std::size_t i = devs.size() - half; i < devs.size(); ++i) hi += devs[i];
    if (hi / half > lo / half + 1e-6) spec.trend_non_increasing = false;
  }
  return spec;
}

}  // namespace contactflow
