#include <cmath>

#include "doctest.h"

#include "contactflow/models.hpp"
#include "contactflow/periodic.hpp"
#include "contactflow/reeb.hpp"
#include "contactflow/symplectic.hpp"

using namespace contactflow;

namespace {
constexpr double kT0 = 2 * M_PI;

ReebOrbit quotient_orbit() {
  static const ContactModel mq = builtin_model("heisenberg-quotient", kT0);
  return ReebOrbit(mq, {0, Vec3::Zero()}, Vec2(1, 0), 1.2 * kT0);
}
}  // namespace

TEST_CASE("predicted lengths from the closure conditions") {
  // T = 2 sqrt(j k pi T0 (1 - j alpha0 / (2 k pi))) at alpha0 = 0.
  const LengthPrediction p = predicted_length(kT0, 0.0, 1, 4);
  CHECK(p.T == doctest::Approx(4 * M_PI * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(p.T == doctest::Approx(17.7715318).epsilon(1e-7));
  CHECK(p.J == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  // The pair satisfies both closure identities exactly.
  CHECK(p.J * p.T == doctest::Approx(2 * kT0).epsilon(1e-12));
  CHECK(p.T / p.J == doctest::Approx(8 * M_PI).epsilon(1e-12));

  const LengthPrediction q = predicted_length(kT0, 0.0, 2, 8);
  CHECK(q.T == doctest::Approx(2 * std::sqrt(32.0) * M_PI).epsilon(1e-12));

  // With monodromy: identities still hold.
  const double a0 = 0.7;
  const LengthPrediction r = predicted_length(3.1, a0, 2, 5);
  CHECK(r.J * r.T == doctest::Approx(2 * 2 * 3.1).epsilon(1e-12));
  CHECK(r.T / r.J + 2 * a0 == doctest::Approx(2 * 5 * M_PI).epsilon(1e-12));

  // Doubling (j, k) doubles T when alpha0 = 0.
  const LengthPrediction d = predicted_length(kT0, 0.0, 2, 8);
  CHECK(d.T == doctest::Approx(2 * p.T).epsilon(1e-12));
}

TEST_CASE("predicted_length rejects degenerate input") {
  CHECK_THROWS_AS(predicted_length(0.0, 0.0, 1, 4), ModelError);
  CHECK_THROWS_AS(predicted_length(kT0, 0.0, 0, 4), ModelError);
  CHECK_THROWS_AS(predicted_length(kT0, 0.0, 1, 0), ModelError);
  // j * alpha0 >= 2 k pi leaves nothing under the square root.
  CHECK_THROWS_AS(predicted_length(kT0, 2 * M_PI, 1, 1), ModelError);
}

TEST_CASE("predicted seeds start on the spiral") {
  const ContactModel mq = builtin_model("heisenberg-quotient", kT0);
  const ReebOrbit orbit = quotient_orbit();
  const ShootingSeed seed = predicted_seed(mq, orbit, kT0, 0.0, 1, 4);
  // h_Z = 1/J = sqrt(2) at leading order.
  const Vec3 Z = reeb_field(mq, seed.z0.q).v;
  CHECK(seed.z0.p.dot(Z) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  CHECK(seed.J == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(seed.T == doctest::Approx(4 * M_PI * std::sqrt(2.0)).epsilon(1e-12));

  // The phase parameter is 2-pi periodic.
  const ShootingSeed s0 = predicted_seed(mq, orbit, kT0, 0.0, 1, 4, 0.9);
  const ShootingSeed s1 = predicted_seed(mq, orbit, kT0, 0.0, 1, 4, 0.9 + 2 * M_PI);
  CHECK(s0.z0.q.x.isApprox(s1.z0.q.x, 1e-9));
  CHECK(s0.z0.p.isApprox(s1.z0.p, 1e-9));

  // On the flat quotient the closure conditions are exact: the seed already
  // closes up to integrator tolerance (the default tolerance accumulates to
  // about 1e-8 over T ~ 17.8, so integrate tightly for this check).
  IntegratorConfig tight;
  tight.rel_tol = tight.abs_tol = 1e-12;
  CHECK(closure_residual(mq, seed.z0, seed.T, tight).norm < 1e-8);
}

TEST_CASE("closure residual detects closure and its absence") {
  const ContactModel m = builtin_model("heisenberg");
  // A horizontal circle: h_Z = h0 with no spiral offset does not close, but
  // the planar projection does; use the exact geodesic loop. With p_z = -h0
  // the (x, y) motion closes after t = 2 pi / h0 while z advances, so the
  // residual is dominated by the z mismatch.
  const double h0 = 2.0;
  const PhasePoint z0{{0, Vec3::Zero()}, Vec3(1, 0, -h0)};

  // T = 0 closes trivially.
  CHECK(closure_residual(m, z0, 0.0).norm < 1e-12);

  const ClosureResidual r = closure_residual(m, z0, 2 * M_PI / h0);
  CHECK(r.norm == doctest::Approx(M_PI / (h0 * h0)).epsilon(1e-6));

  // Unit-speed normalization shows up in the last slot.
  const ClosureResidual s = closure_residual(m, {{0, Vec3::Zero()}, Vec3(2, 0, -h0)}, 0.0);
  CHECK(s.r[6] == doctest::Approx(3.0).epsilon(1e-9));  // g* - 1 = 4 - 1
}

TEST_CASE("closure residual is sensitive to momentum perturbations") {
  const ContactModel mq = builtin_model("heisenberg-quotient", kT0);
  const ShootingSeed seed = predicted_seed(mq, quotient_orbit(), kT0, 0.0, 1, 4);
  PhasePoint z = seed.z0;
  z.p[2] += 1e-3;
  CHECK(closure_residual(mq, z, seed.T).norm > 1e-4);
}

TEST_CASE("shooting refines the (1,4) quotient geodesic") {
  const ContactModel mq = builtin_model("heisenberg-quotient", kT0);
  const ShootingSeed seed = predicted_seed(mq, quotient_orbit(), kT0, 0.0, 1, 4);
  const RefinedGeodesic g = shoot_closed_geodesic(mq, seed);
  CHECK(g.converged);
  CHECK(g.T == doctest::Approx(4 * M_PI * std::sqrt(2.0)).epsilon(1e-6));
  // An exact seed needs at most one polish step.
  CHECK(g.iterations <= 1);
  CHECK(g.residual < 1e-9);
}

TEST_CASE("shooting converges back from a perturbed seed") {
  const ContactModel mq = builtin_model("heisenberg-quotient", kT0);
  ShootingSeed seed = predicted_seed(mq, quotient_orbit(), kT0, 0.0, 2, 8);
  seed.z0.p[0] += 1e-3;
  seed.T += 5e-3;
  const RefinedGeodesic g = shoot_closed_geodesic(mq, seed);
  CHECK(g.converged);
  CHECK(g.T == doctest::Approx(2 * std::sqrt(32.0) * M_PI).epsilon(1e-6));
  CHECK(g.iterations >= 1);
}

TEST_CASE("quotient length spectrum matches the predictions") {
  const ContactModel mq = builtin_model("heisenberg-quotient", kT0);
  const LengthSpectrum spec = length_spectrum(mq, quotient_orbit(), 2, 3, 10);
  CHECK(spec.T0 == doctest::Approx(kT0).epsilon(1e-9));
  CHECK(std::abs(spec.alpha0) < 1e-7);
  REQUIRE(spec.cells.size() == 16);
  for (const SpectrumCell& c : spec.cells) {
    CAPTURE(c.j);
    CAPTURE(c.k);
    CHECK(c.status == "converged");
    CHECK(c.rel_dev < 1e-6);
    CHECK(c.genuine);
    CHECK(std::abs(c.reeb_advance - c.j * kT0) < 0.01);
    CHECK(std::abs(c.winding_lift - 2 * c.k * M_PI) < 0.1);
  }
  CHECK(spec.trend_non_increasing);
}

TEST_CASE("s3 spectrum converges at the percent level") {
  const ContactModel s3 = builtin_model("s3");
  // The seed orbit needs tight integration: its transport data seeds the
  // shooting, and a loose orbit leaves the solver stalled just above tol.
  IntegratorConfig tight;
  tight.rel_tol = tight.abs_tol = 1e-12;
  const ReebOrbit orbit(s3, {0, Vec3::Zero()}, Vec2(1, 0), 1.2 * kT0, tight);
  const LengthSpectrum spec = length_spectrum(s3, orbit, 1, 8, 12);
  CHECK(spec.T0 == doctest::Approx(M_PI).epsilon(1e-9));
  CHECK(spec.alpha0 == doctest::Approx(4 * M_PI).epsilon(1e-7));
  REQUIRE(spec.cells.size() == 5);
  int converged = 0;
  for (const SpectrumCell& c : spec.cells) {
    if (c.status == "converged") {
      ++converged;
      CHECK(c.rel_dev < 1e-2);
    }
  }
  CHECK(converged == 5);
}
