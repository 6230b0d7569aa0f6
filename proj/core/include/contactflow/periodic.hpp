#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "contactflow/integrate.hpp"
#include "contactflow/models.hpp"
#include "contactflow/reeb.hpp"
#include "contactflow/symplectic.hpp"

namespace contactflow {

using Vec7 = Eigen::Matrix<double, 7, 1>;

// Predicted length of a nearly closed spiraling geodesic that covers a
// closed Reeb orbit of period T0 j times while winding k times around it,
// together with the implied cone radius J. Both come from the closure
// conditions
//   J * T = 2 j T0          (the guiding center completes j periods)
//   T / J + j alpha0 = 2 k pi  (the fast angle completes k turns, counted
//                               with the frame monodromy alpha0)
// which combine to T = 2 sqrt(j k pi T0 (1 - j alpha0 / (2 k pi))).
struct LengthPrediction {
  double T = 0;
  double J = 0;
};

// Throws ModelError when T0 <= 0, j or k < 1, or the parenthesized factor is
// non-positive (no prediction in that regime).
LengthPrediction predicted_length(double T0, double alpha0, int j, int k);

// Shooting seed: the initial phase point of the model spiral with the
// predicted period. The extra fields carry calibration metadata consumed by
// shoot_closed_geodesic (all optional for hand-built seeds): the predicted
// cone radius and orbit data let the solver precondition h_Z, and phase_dir
// is the frozen direction of the phase symmetry used to remove the shooting
// Jacobian's rank deficiency.
struct ShootingSeed {
  PhasePoint z0;
  double T = 0;
  double J = 0;
  double T0 = 0;
  double alpha0 = 0;
  Vec7 phase_dir = Vec7::Zero();
};

// Builds the seed on the spiral around orbit's starting point: base offset
// J * (E2 direction) from Gamma(0), momentum with unit horizontal part along
// the phase-rotated E1 and h_Z = 1/J (leading order; the O(J^2) relative
// correction is left to the solver). `phase` rotates the starting angle on
// the spiral; phase and phase + 2 pi give identical seeds.
ShootingSeed predicted_seed(const ContactModel& model, const ReebOrbit& orbit, double T0,
                            double alpha0, int j, int k, double phase = 0);

// Closure defect of the time-T unit-speed geodesic from z0:
//   r = (q(T) - q(0) mod chart periods,  p(T) - p(0),  g*(z0) - 1)
// with p(T) pushed into q(0)'s chart. The last component pins the momentum
// scale that the first six are invariant under.
struct ClosureResidual {
  Vec7 r = Vec7::Zero();
  double norm = 0;
  PhasePoint z_end;
};

ClosureResidual closure_residual(const ContactModel& model, const PhasePoint& z0, double T,
                                 const IntegratorConfig& cfg = {});

// Result of refining a seed by damped Gauss-Newton on closure_residual over
// (q0, p0, T), with the two continuous near-symmetries (time translation
// along the flow and the spiral phase) projected out of every update.
struct RefinedGeodesic {
  PhasePoint z0;
  double T = 0;
  double residual = 0;
  int iterations = 0;
  bool converged = false;
};

// Finite-difference Jacobian (step 1e-7), SVD least-squares step, step-
// halving line search, at most max_iter iterations; converged when the
// residual norm drops below tol. A non-converged search reports its best
// point rather than throwing.
RefinedGeodesic shoot_closed_geodesic(const ContactModel& model, const ShootingSeed& seed,
                                      double tol = 1e-9, int max_iter = 50,
                                      const IntegratorConfig& cfg = {});

// One (j, k) cell of the length-spectrum comparison.
struct SpectrumCell {
  int j = 0;
  int k = 0;
  double T_pred = 0;
  double J_pred = 0;
  double T_found = 0;
  double rel_dev = 0;   // |T_found - T_pred| / T_pred
  double residual = 0;  // final closure residual norm
  int iters = 0;
  std::string status;  // "converged", "maxiter", or "failed"

  // Genuineness measurement of a converged solution: the guiding center's
  // advance in Reeb time (should be j * T0) and the closure-condition angle
  // lift T^2/(2 jhat T0) + jhat * alpha0 (should be 2 k pi).
  double reeb_advance = 0;
  double winding_lift = 0;
  bool genuine = false;
};

struct LengthSpectrum {
  double T0 = 0;
  double alpha0 = 0;
  std::vector<SpectrumCell> cells;  // row-major in (j, k)
  // Per covering number, the mean relative deviation of converged cells does
  // not increase from the lower to the upper half of the k range.
  bool trend_non_increasing = false;
};

// Measures the orbit's period and accumulated transport rotation, then runs
// predicted_seed + shoot_closed_geodesic for every j in [1, j_max] and k in
// [k_min, k_max]. Per-cell failures are recorded in `status`, not thrown.
// The passed orbit must cover at least one full period.
LengthSpectrum length_spectrum(const ContactModel& model, const ReebOrbit& orbit, int j_max,
                               int k_min, int k_max, double tol = 1e-9,
                               const IntegratorConfig& cfg = {});

}  // namespace contactflow
