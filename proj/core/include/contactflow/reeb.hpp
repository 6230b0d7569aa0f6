#pragma once

#include <optional>
#include <vector>

#include "contactflow/integrate.hpp"
#include "contactflow/models.hpp"

namespace contactflow {

// Reeb vector field at q: alpha(Z) = 1 and d(alpha)(Z, .) = 0. Uses the
// model's analytic field when present; otherwise derives Z = -[X,Y] + uX + vY
// with u, v fixed by requiring [X,Z] and [Y,Z] to be horizontal.
TangentVec reeb_field(const ContactModel& model, const ManifoldPoint& q);

// Instantaneous rotation rate of the strain-free transport of horizontal
// frames along the Reeb flow: with [Z, X_j] = sum_i L_ij X_i on D, the rate
// is (L_12 - L_21) / 2.
double frame_rotation_rate(const ContactModel& model, const ManifoldPoint& q);

// A Reeb-flow segment tau in [0, tau_max] from q0, sampled at the
// integrator's accepted steps, carrying an orthonormal frame (E1, E2) of D
// transported without strain: the (X, Y)-components of E1 are
// R(phi(tau)) * c0 with phi' = frame_rotation_rate and E2 = i E1.
// Evaluation between samples is cubic Hermite (in the chart of the left
// sample; cross-chart intervals push the right sample through the
// transition first).
class ReebOrbit {
 public:
  ReebOrbit(const ContactModel& model, const ManifoldPoint& q0, const Vec2& e1_components,
            double tau_max, const IntegratorConfig& cfg = {});

  const ContactModel& model() const { return *model_; }
  double tau_max() const { return samples_.back().tau; }
  std::size_t size() const { return samples_.size(); }

  ManifoldPoint point_at(double tau) const;
  Vec3 velocity_at(double tau) const;  // Reeb field at point_at(tau)
  double phi_at(double tau) const;     // accumulated frame rotation
  Vec2 e1_at(double tau) const;        // (X, Y)-components of E1
  Mat32 frame_at(double tau) const;    // E1, E2 as chart vectors at point_at(tau)

  struct Sample {
    double tau;
    int chart;
    Vec3 x;
    Vec3 xdot;
    double phi;
    double phidot;
  };
  const std::vector<Sample>& samples() const { return samples_; }
  IntegratorStats stats() const { return stats_; }

 private:
  // Interpolated chart point plus position derivative (left sample's chart).
  void interpolate(double tau, int& chart, Vec3& x) const;

  const ContactModel* model_;
  Vec2 e1_0_;
  std::vector<Sample> samples_;
  IntegratorStats stats_;
};

// Flow q0 along the Reeb field for time tau (either sign).
ManifoldPoint reeb_flow(const ContactModel& model, const ManifoldPoint& q0, double tau,
                        const IntegratorConfig& cfg = {});

// Smallest tau* in (0, orbit.tau_max()] with the orbit returning to q0
// (embedded distance below tol after local refinement), or nullopt.
std::optional<double> find_return_time(const ReebOrbit& orbit, const ManifoldPoint& q0,
                                       double tol = 1e-9);

// Convenience: integrate the Reeb flow from q0 for at most t_max and search
// for its period. Scans at tight tolerance (1e-12) regardless of cfg.
std::optional<double> find_reeb_period(const ContactModel& model, const ManifoldPoint& q0,
                                       double t_max, double tol = 1e-9);

// Reeb-orbit closure data: measured period, accumulated frame-transport
// rotation alpha over one period, its wrap to (-pi, pi], and the residual
// distance of the computed return point from q0.
struct MonodromyResult {
  double period = 0;
  double alpha = 0;
  double alpha_wrapped = 0;
  double return_distance = 0;
};

// Measures the Reeb period through q0 (searching up to t_max) and the
// transport rotation accumulated over it. Returns nullopt when the orbit
// does not close within t_max.
std::optional<MonodromyResult> monodromy(const ContactModel& model, const ManifoldPoint& q0,
                                         double t_max);

}  // namespace contactflow
