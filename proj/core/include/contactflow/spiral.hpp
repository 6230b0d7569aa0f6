#pragma once

#include <optional>
#include <vector>

#include "contactflow/fitting.hpp"
#include "contactflow/reeb.hpp"
#include "contactflow/symplectic.hpp"

namespace contactflow {

// --- Cone coordinates -------------------------------------------------------

// Coordinates of a covector near the positive Reeb cone:
//   rho_hat   = h_Z            (cone parameter, must be > 0)
//   J_hat     = sqrt(g*) / h_Z (angular distance to the cone)
//   theta_hat = atan2(h_Y, h_X) - frame_angle, wrapped to (-pi, pi]
// frame_angle rotates the D-frame the angle is measured in (pass the
// transported-frame angle phi to measure against that frame; 0 = the
// model's static frame). J_hat is invariant under p -> lambda*p; under the
// cone dilation (h_X, h_Y, h_Z) -> (sqrt(l) h_X, sqrt(l) h_Y, l h_Z) the
// triple scales as (l*rho_hat, J_hat/sqrt(l), theta_hat).
struct ConeCoordinates {
  double rho_hat = 0;
  double J_hat = 0;
  double theta_hat = 0;
  double gstar = 0;
  double frame_angle = 0;  // frame the angle was measured in
  bool on_axis = false;    // g* = 0: theta_hat undefined (reported as 0)
};

// Throws ModelError when h_Z(z) <= 0 (wrong side of the cone; flip the frame
// orientation for the negative cone instead).
ConeCoordinates cone_coordinates(const ContactModel& model, const PhasePoint& z,
                                 double frame_angle = 0.0);

// --- Normal-form model flow --------------------------------------------------

// State of the explicit flow H_t(m, J, theta) = (R_{Jt/2}(m), J, theta + t/J)
// with R the Reeb flow: slow center drift at speed J/2 plus fast phase
// rotation at speed 1/J. theta is kept unwrapped.
struct ModelFlowState {
  ManifoldPoint m;
  double J = 0;
  double theta = 0;
};

ModelFlowState model_flow(const ContactModel& model, const ModelFlowState& s, double t,
                          const IntegratorConfig& cfg = {});

// --- Spiral prediction -------------------------------------------------------

// A calibrated spiral prediction: a unit-speed geodesic with initial
// horizontal direction X0 and Reeb momentum h0 >= 5 traces circles of radius
// ~ J0 at angular speed 1/J0 around the Reeb orbit Gamma through the center
// Q0 (q0 chart-displaced by eps*J0*(i X0)), while the center advances at Reeb
// speed J0/2. The predicted state at time t is
//
//   position(t) = Gamma(J0 t/2)  (+)  (-eps)*J0*[i c(t)]     (chart addition)
//   velocity(t) = the D-frame components c(t) realized at position(t)
//
// with c(t) = R(sigma*t/J0 + phi(J0 t/2)) c0: the initial components rotated
// by the fast phase and by the transported-frame angle phi along Gamma.
//
// J0 is the inverse of the measured rotation rate of theta_hat against the
// transported frame (equal to 1/h0 when the transport rate vanishes;
// relative correction O(J0^2) otherwise -- using 1/h0 verbatim would leak an
// O(1) phase over the t ~ h0 horizon). The signs eps (offset side) and sigma
// (rotation sense) are calibrated per model against a short integrated
// geodesic; sigma is cross-checked against the sign of the measured rate.
struct SpiralPrediction {
  const ContactModel* model;
  ReebOrbit center_orbit;                      // forward arc from Q0 (tau >= 0)
  std::optional<ReebOrbit> center_orbit_back;  // arc ending at Q0 (for t < 0)
  double J0 = 0;
  double h0 = 0;
  double horizon = 0;  // |t| cap for predict_state
  ManifoldPoint q0;
  Vec3 p0 = Vec3::Zero();  // initial covector (g* = 1, h_Z = h0)
  TangentVec X0;           // unit initial direction at q0
  Vec2 c0 = Vec2::Zero();  // D-frame components of X0
  ManifoldPoint Q0;        // center base point
  TangentVec Y0;           // transported frame leg E1(0) at Q0
  double phase0 = 0;       // atan2(c0.y, c0.x)
  int eps_sign = 0;        // calibrated offset sign
  int rot_sign = 0;        // calibrated rotation sense
  double measured_rate = 0;  // signed transported-angle rate (~ -sigma/J0)
  bool sign_check_ok = false;  // calibrated sigma agrees with the rate sign
};

// X0 is projected onto D(q0) and normalized; throws ModelError when h0 < 5
// (outside the asymptotic regime) or X0 has no horizontal part.
// horizon_factor c caps predictions at |t| <= c*h0.
SpiralPrediction spiral_prediction(const ContactModel& model, const ManifoldPoint& q0,
                                   const TangentVec& X0, double h0, double horizon_factor = 0.5,
                                   const IntegratorConfig& cfg = {});

struct PredictedState {
  ManifoldPoint position;
  TangentVec velocity;    // unit g-norm, based at position
  ManifoldPoint center;   // Gamma(J0 t/2)
  Vec2 components = Vec2::Zero();  // c(t)
  double phi = 0;         // transported-frame angle at J0 t/2
};

// Throws ModelError when |t| exceeds the prediction's horizon.
PredictedState predict_state(const SpiralPrediction& pred, double t);

// --- Error measurement and convergence ---------------------------------------

// Sup-norm errors of the prediction against the integrated geodesic over
// t in [0, c*h0], sampled at the integrator's accepted steps:
//   pos_err       sup chart distance between gamma(t) and the predicted
//                 position.
//   vel_err       sup || delta(t) - delta(0) ||; delta(t) is the difference,
//                 in the center's chart components, of the true velocity at
//                 gamma(t) and the rotated transported-frame vector at
//                 Gamma(J0 t/2). The
//                 t = 0 value is pure base-point convention (the predicted
//                 state at t = 0 is exact by construction), so it is removed:
//                 what remains is exactly zero on the flat models, where the
//                 spiral is the geodesic, and exposes the O(J0) center-drift
//                 term otherwise.
//   state_vel_err sup embedded difference between the returned predicted
//                 velocity (at the predicted position) and the true velocity;
//                 superconvergent (O(J0^2)).
//   J_drift       sup |J_hat(t) - J_hat(0)| along the geodesic.
struct SpiralError {
  double pos_err = 0;
  double vel_err = 0;
  double state_vel_err = 0;
  double J_drift = 0;
  double J_hat0 = 0;
  double J0 = 0;
  int eps_sign = 0;
  int rot_sign = 0;
  std::size_t samples = 0;
};

SpiralError spiral_error(const ContactModel& model, const ManifoldPoint& q0, const TangentVec& X0,
                         double h0, double horizon_factor = 0.5,
                         const IntegratorConfig& cfg = {});

// A log-log fit that ignores points at or below the noise floor; `exact`
// marks a column whose entries are all at the floor (nothing to fit).
struct FitOrExact {
  bool exact = false;
  std::optional<FitResult> fit;
};

struct ScanRow {
  double h0 = 0;
  double J0 = 0;
  double pos_err = 0;
  double vel_err = 0;
  double J_drift = 0;
};

struct ConvergenceScan {
  std::vector<ScanRow> rows;
  FitOrExact pos;    // slope of log(pos_err) vs log(h0); expected ~ -2
  FitOrExact vel;    // slope of log(vel_err) vs log(h0); expected ~ -1
  FitOrExact drift;  // slope of log(J_drift) vs log(h0)
  int eps_sign = 0;
  int rot_sign = 0;
  bool signs_stable = false;  // same calibration outcome for every h0
  double noise_floor = 1e-8;
};

// Requires >= 3 momenta. Cells are evaluated in the given order;
// the assembly is deterministic.
ConvergenceScan convergence_scan(const ContactModel& model, const ManifoldPoint& q0,
                                 const TangentVec& X0, const std::vector<double>& h0_list,
                                 double horizon_factor = 0.5, const IntegratorConfig& cfg = {});

// --- Adiabatic invariance -----------------------------------------------------

// Drift of J_hat along the geodesic through (q0, p0) over t in [0, T].
// J_hat is invariant under covector rescaling, so p0 need not be normalized.
struct AdiabaticRun {
  double h0 = 0;      // h_Z at t = 0
  double J_hat0 = 0;  // J_hat at t = 0
  double T = 0;
  double max_drift = 0;  // sup |J_hat(t) - J_hat(0)|
  double max_ratio = 0;  // sup J_hat(t) / J_hat(0)
  bool bounded = false;  // max_ratio <= 2
};

AdiabaticRun adiabatic_drift(const ContactModel& model, const ManifoldPoint& q0, const Vec3& p0,
                             double T, const IntegratorConfig& cfg = {});

// Scan over momenta h0 (window T = c*h0 = c/J_hat(0) per run) fitting
// log(max_drift) against log(J_hat(0)). Exactly conserved models report
// `exact` (all drifts at the noise floor); otherwise the super-polynomial
// bound predicts a steep positive slope (the acceptance gate asserts >= 3).
struct AdiabaticScan {
  std::vector<AdiabaticRun> runs;
  FitOrExact drift;
  bool all_bounded = false;
  double noise_floor = 1e-8;
};

AdiabaticScan adiabatic_scan(const ContactModel& model, const ManifoldPoint& q0,
                             const TangentVec& X0, const std::vector<double>& h0_list,
                             double horizon_factor = 0.5, const IntegratorConfig& cfg = {});

}  // namespace contactflow
