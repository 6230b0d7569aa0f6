#include <cmath>
#include <random>

#include "doctest.h"

#include "contactflow/models.hpp"
#include "contactflow/spiral.hpp"
#include "contactflow/symplectic.hpp"

using namespace contactflow;

namespace {
const ManifoldPoint kOrigin{0, Vec3::Zero()};
}

TEST_CASE("cone coordinates at a reference covector") {
  const ContactModel m = builtin_model("heisenberg");
  const PhasePoint z{kOrigin, Vec3(1, 0, -10)};  // h_X = 1, h_Y = 0, h_Z = 10
  const ConeCoordinates c = cone_coordinates(m, z);
  CHECK(c.rho_hat == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(c.J_hat == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(c.theta_hat == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(c.gstar == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(!c.on_axis);
}

TEST_CASE("J_hat is scale invariant; the cone dilation acts as expected") {
  const ContactModel m = builtin_model("s3");
  const ManifoldPoint q{0, Vec3(0.2, -0.1, 0.3)};
  const Vec3 p = covector_from_components(m, q, 0.7, -0.4, 8.0);
  const ConeCoordinates base = cone_coordinates(m, {q, p});

  for (double lam : {0.5, 2.0, 7.3}) {
    CAPTURE(lam);
    // Covector rescaling p -> lam p leaves J_hat and theta_hat alone.
    const ConeCoordinates s = cone_coordinates(m, {q, Vec3(lam * p)});
    CHECK(s.J_hat == doctest::Approx(base.J_hat).epsilon(1e-10));
    CHECK(s.theta_hat == doctest::Approx(base.theta_hat).epsilon(1e-10));
    CHECK(s.rho_hat == doctest::Approx(lam * base.rho_hat).epsilon(1e-10));

    // The cone dilation (h_X, h_Y, h_Z) -> (sqrt(l) h_X, sqrt(l) h_Y, l h_Z).
    const double r = std::sqrt(lam);
    const Vec3 pd = covector_from_components(m, q, r * 0.7, r * -0.4, lam * 8.0);
    const ConeCoordinates d = cone_coordinates(m, {q, pd});
    CHECK(d.rho_hat == doctest::Approx(lam * base.rho_hat).epsilon(1e-10));
    CHECK(d.J_hat == doctest::Approx(base.J_hat / r).epsilon(1e-10));
    CHECK(d.theta_hat == doctest::Approx(base.theta_hat).epsilon(1e-10));
  }
}

TEST_CASE("cone coordinates edge cases") {
  const ContactModel m = builtin_model("heisenberg");
  // On the cone axis: g* = 0, angle undefined but reported as 0.
  const ConeCoordinates ax = cone_coordinates(m, {kOrigin, Vec3(0, 0, -3)});
  CHECK(ax.on_axis);
  CHECK(ax.J_hat == doctest::Approx(0.0));
  CHECK(ax.theta_hat == doctest::Approx(0.0));
  // Wrong side of the cone throws.
  CHECK_THROWS_AS(cone_coordinates(m, {kOrigin, Vec3(1, 0, 10)}), ModelError);
  // frame_angle shifts the measured angle.
  const ConeCoordinates rot = cone_coordinates(m, {kOrigin, Vec3(1, 0, -10)}, 0.25);
  CHECK(rot.theta_hat == doctest::Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("model flow: slow drift and fast phase") {
  const ContactModel m = builtin_model("heisenberg");
  const ModelFlowState s0{kOrigin, 0.5, 0.0};
  const ModelFlowState s1 = model_flow(m, s0, M_PI);
  // Reeb time J*t/2 = pi/4; heisenberg Reeb flow moves -z.
  CHECK(s1.m.x.isApprox(Vec3(0, 0, -M_PI / 4), 1e-9));
  CHECK(s1.J == doctest::Approx(0.5));
  CHECK(s1.theta == doctest::Approx(2 * M_PI).epsilon(1e-12));

  // t = 0 is the identity.
  const ModelFlowState id = model_flow(m, s0, 0.0);
  CHECK(id.m.x.isApprox(s0.m.x));
  CHECK(id.theta == doctest::Approx(0.0));
}

TEST_CASE("model flow group law") {
  const ContactModel s3 = builtin_model("s3");
  const ModelFlowState s0{{0, Vec3(0.1, 0.2, -0.1)}, 0.37, 0.4};
  const ModelFlowState ab = model_flow(s3, model_flow(s3, s0, 0.8), 1.3);
  const ModelFlowState whole = model_flow(s3, s0, 2.1);
  CHECK(chart_distance(s3, ab.m, whole.m) < 1e-8);
  CHECK(ab.theta == doctest::Approx(whole.theta).epsilon(1e-8));
  CHECK(ab.J == doctest::Approx(whole.J));
  CHECK_THROWS_AS(model_flow(s3, {kOrigin, 0.0, 0.0}, 1.0), ModelError);
}

TEST_CASE("spiral prediction geometry at h0 = 10") {
  const ContactModel m = builtin_model("heisenberg");
  const TangentVec X0{kOrigin, Vec3(1, 0, 0)};
  const SpiralPrediction pred = spiral_prediction(m, kOrigin, X0, 10.0);

  CHECK(pred.J0 == doctest::Approx(0.1).epsilon(1e-8));
  CHECK(pred.eps_sign == -1);
  CHECK(pred.rot_sign == -1);
  CHECK(pred.sign_check_ok);
  // Center offset by eps*J0 along i X0 = +Y: Q0 = (0, -0.1, 0).
  CHECK(pred.Q0.x.isApprox(Vec3(0, -0.1, 0), 1e-7));
  CHECK(pred.horizon == doctest::Approx(5.0));

  // t = 0 reproduces the seed state exactly.
  const PredictedState ps = predict_state(pred, 0.0);
  CHECK(chart_distance(m, ps.position, kOrigin) < 1e-12);
  CHECK((ps.velocity.v - Vec3(1, 0, 0)).norm() < 1e-12);
  CHECK(ps.components.norm() == doctest::Approx(1.0).epsilon(1e-12));

  // Past the horizon the prediction refuses to extrapolate.
  CHECK_THROWS_AS(predict_state(pred, 6.0), ModelError);
}

TEST_CASE("spiral prediction input validation") {
  const ContactModel m = builtin_model("heisenberg");
  CHECK_THROWS_AS(spiral_prediction(m, kOrigin, {kOrigin, Vec3(1, 0, 0)}, 4.9), ModelError);
  // A vertical seed has no horizontal part to normalize.
  CHECK_THROWS_AS(spiral_prediction(m, kOrigin, {kOrigin, Vec3(0, 0, 1)}, 10.0), ModelError);
}

TEST_CASE("flat models are predicted to machine accuracy") {
  const TangentVec X0{kOrigin, Vec3(1, 0, 0)};
  for (const char* name : {"heisenberg", "heisenberg-quotient"}) {
    CAPTURE(name);
    const ContactModel m = builtin_model(name);
    const SpiralError err = spiral_error(m, kOrigin, X0, 10.0);
    CHECK(err.pos_err < 1e-9);
    CHECK(err.vel_err < 1e-9);
    CHECK(err.state_vel_err < 1e-9);
    CHECK(err.J_drift < 1e-10);
    CHECK(err.samples > 10);
  }
}

TEST_CASE("curvature error halves twice per momentum doubling") {
  const ContactModel s3 = builtin_model("s3");
  const ManifoldPoint q0{0, Vec3(0.3, 0.1, 0.2)};
  const TangentVec X0{q0, s3.frame(q0.chart, q0.x) * Vec2(0.6, 0.8)};
  const SpiralError e10 = spiral_error(s3, q0, X0, 10.0);
  const SpiralError e20 = spiral_error(s3, q0, X0, 20.0);
  CHECK(e10.pos_err > 1e-6);  // a genuine signal, not noise
  const double ratio = e10.pos_err / e20.pos_err;
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.3);
}

TEST_CASE("zero horizon yields zero error") {
  const ContactModel m = builtin_model("heisenberg");
  const SpiralError err = spiral_error(m, kOrigin, {kOrigin, Vec3(1, 0, 0)}, 10.0, 0.0);
  CHECK(err.pos_err == doctest::Approx(0.0));
  CHECK(err.vel_err == doctest::Approx(0.0));
}

TEST_CASE("convergence scan classifies flat models as exact") {
  const ContactModel m = builtin_model("heisenberg");
  const ConvergenceScan scan =
      convergence_scan(m, kOrigin, {kOrigin, Vec3(1, 0, 0)}, {10.0, 20.0, 40.0});
  REQUIRE(scan.rows.size() == 3);
  CHECK(scan.pos.exact);
  CHECK(scan.vel.exact);
  CHECK(scan.drift.exact);
  CHECK(scan.signs_stable);
  CHECK(scan.eps_sign == -1);
  CHECK(scan.rot_sign == -1);
  CHECK_THROWS_AS(convergence_scan(m, kOrigin, {kOrigin, Vec3(1, 0, 0)}, {10.0, 20.0}), ModelError);
}

TEST_CASE("convergence scan fits curvature slopes on s3") {
  const ContactModel s3 = builtin_model("s3");
  const ManifoldPoint q0{0, Vec3(0.3, 0.1, 0.2)};
  const TangentVec X0{q0, s3.frame(q0.chart, q0.x) * Vec2(0.6, 0.8)};
  const ConvergenceScan scan = convergence_scan(s3, q0, X0, {10.0, 20.0, 40.0, 80.0});
  REQUIRE(!scan.pos.exact);
  REQUIRE(scan.pos.fit.has_value());
  CHECK(scan.pos.fit->slope > -2.3);
  CHECK(scan.pos.fit->slope < -1.7);
  REQUIRE(scan.vel.fit.has_value());
  CHECK(scan.vel.fit->slope > -1.3);
  CHECK(scan.vel.fit->slope < -0.7);
  CHECK(scan.signs_stable);
}

TEST_CASE("adiabatic drift stays bounded") {
  const ContactModel m = builtin_model("heisenberg");
  const Vec3 p0 = covector_from_components(m, kOrigin, 1.0, 0.0, 10.0);
  const AdiabaticRun run = adiabatic_drift(m, kOrigin, p0, 5.0);
  CHECK(run.h0 == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(run.J_hat0 == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(run.bounded);
  CHECK(run.max_ratio <= 2.0);
  CHECK(run.max_drift < 1e-10);
  CHECK_THROWS_AS(adiabatic_drift(m, kOrigin, Vec3(1, 0, 10), 5.0), ModelError);
}

TEST_CASE("adiabatic scan reports exact conservation on the quotient") {
  const ContactModel mq = builtin_model("heisenberg-quotient", 2 * M_PI);
  const AdiabaticScan scan =
      adiabatic_scan(mq, kOrigin, {kOrigin, Vec3(1, 0, 0)}, {10.0, 20.0, 40.0});
  REQUIRE(scan.runs.size() == 3);
  CHECK(scan.all_bounded);
  CHECK(scan.drift.exact);
  for (const AdiabaticRun& r : scan.runs) {
    CHECK(r.max_drift <= scan.noise_floor);
    CHECK(r.T == doctest::Approx(0.5 * r.h0));
  }
}
