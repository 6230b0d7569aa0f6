#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "contactflow/integrate.hpp"
#include "contactflow/models.hpp"

namespace contactflow {

using Vec6 = Eigen::Matrix<double, 6, 1>;

struct PhasePoint {
  ManifoldPoint q;
  Vec3 p = Vec3::Zero();
};

// A time-stamped integrated path in T*M with per-sample diagnostics.
// Samples are the integrator's accepted steps (plus the initial point).
struct Trajectory {
  std::vector<double> t;
  std::vector<PhasePoint> z;
  std::vector<Vec6> deriv;  // (dx/dt, dp/dt) per sample; filled when dense_output
  std::vector<double> gstar;
  std::vector<double> h_reeb;
  IntegratorStats stats;
  double energy_drift = 0;  // max |H(z(t)) - H(z0)| over the run

  std::size_t size() const { return t.size(); }
  const PhasePoint& front() const { return z.front(); }
  const PhasePoint& back() const { return z.back(); }
};

// Scalar function on phase space (the model is captured by the caller).
using PhaseFn = std::function<double(const PhasePoint&)>;

// Hamiltonian lift h_V(q, p) = <p, V(q)>.
double hamiltonian_lift(const ContactModel& model, FieldId id, const PhasePoint& z);

// Cometric g*(q, p) = h_X^2 + h_Y^2 (orthonormal-frame identity).
double cometric(const ContactModel& model, const PhasePoint& z);

// Central-finite-difference Poisson bracket {f, g} = df/dq dg/dp - df/dp dg/dq
// in the chart of z (relative step 1e-6).
double poisson_fd(const PhaseFn& f, const PhaseFn& g, const PhasePoint& z);

// Hamiltonian vector field (dH/dp, -dH/dq) by central finite differences.
Vec6 hamiltonian_vector_field(const PhaseFn& h, const PhasePoint& z);

// Analytic phase velocity of H = g*/2 (uses the model's frame Jacobians).
Vec6 geodesic_vector_field(const ContactModel& model, const PhasePoint& z);

// Velocity of the geodesic through z: h_X X + h_Y Y at z.q.
Vec3 geodesic_velocity(const ContactModel& model, const PhasePoint& z);

// Integrate a user Hamiltonian (finite-difference vector field, adaptive
// RK5(4), chart switching). Records g* and h_Z diagnostics per sample.
Trajectory integrate(const ContactModel& model, const PhaseFn& h, const PhasePoint& z0, double T,
                     const IntegratorConfig& cfg = {});

// Unit-speed sub-Riemannian geodesic: rescales p0 so g* = 1 exactly, then
// integrates H = g*/2 with the analytic vector field. On {g* = 1} this flow
// coincides with the flow of sqrt(g*), so t is arclength. Throws ModelError
// for characteristic initial data (g*(q0, p0) = 0).
Trajectory geodesic(const ContactModel& model, const ManifoldPoint& q0, const Vec3& p0, double T,
                    const IntegratorConfig& cfg = {});

// Fixed-step implicit-midpoint variant of `geodesic` (cross-check).
Trajectory geodesic_midpoint(const ContactModel& model, const ManifoldPoint& q0, const Vec3& p0,
                             double T, double step);

// Build the covector at q with prescribed frame components
// (h_X, h_Y, h_Z) = (a, b, c): solves the 3x3 system <p, V> = component.
Vec3 covector_from_components(const ContactModel& model, const ManifoldPoint& q, double a,
                              double b, double c);

}  // namespace contactflow
