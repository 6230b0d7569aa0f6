// Micro-benchmarks for the hot paths: geodesic integration, spiral
// prediction + error measurement, Reeb transport, and the exact polynomial
// solve.

#include <benchmark/benchmark.h>

#include "contactflow/models.hpp"
#include "contactflow/periodic.hpp"
#include "contactflow/polyalg.hpp"
#include "contactflow/reeb.hpp"
#include "contactflow/spiral.hpp"
#include "contactflow/symplectic.hpp"

namespace cf = contactflow;

namespace {

const cf::ManifoldPoint kOrigin{0, cf::Vec3::Zero()};

void BM_GeodesicHeisenberg(benchmark::State& state) {
  const cf::ContactModel m = cf::builtin_model("heisenberg");
  const double h0 = static_cast<double>(state.range(0));
  const cf::Vec3 p0(1, 0, -h0);
  for (auto _ : state) {
    const cf::Trajectory traj = cf::geodesic(m, kOrigin, p0, 10.0);
    benchmark::DoNotOptimize(traj.z.back());
  }
}
BENCHMARK(BM_GeodesicHeisenberg)->Arg(10)->Arg(40);

void BM_GeodesicS3(benchmark::State& state) {
  const cf::ContactModel m = cf::builtin_model("s3");
  const cf::ManifoldPoint q0{0, cf::Vec3(0.3, 0.1, 0.2)};
  const cf::Vec3 p0 = cf::covector_from_components(m, q0, 1.0, 0.0, 20.0);
  for (auto _ : state) {
    const cf::Trajectory traj = cf::geodesic(m, q0, p0, 10.0);
    benchmark::DoNotOptimize(traj.z.back());
  }
}
BENCHMARK(BM_GeodesicS3);

void BM_SpiralError(benchmark::State& state) {
  const cf::ContactModel m = cf::builtin_model("s3");
  const cf::ManifoldPoint q0{0, cf::Vec3(0.3, 0.1, 0.2)};
  const cf::TangentVec X0{q0, m.frame(q0.chart, q0.x) * cf::Vec2(0.6, 0.8)};
  const double h0 = static_cast<double>(state.range(0));
  for (auto _ : state) {
    const cf::SpiralError err = cf::spiral_error(m, q0, X0, h0);
    benchmark::DoNotOptimize(err.pos_err);
  }
}
BENCHMARK(BM_SpiralError)->Arg(10)->Arg(20);

void BM_ReebTransport(benchmark::State& state) {
  const cf::ContactModel m = cf::builtin_model("s3");
  for (auto _ : state) {
    const cf::ReebOrbit orbit(m, kOrigin, cf::Vec2(1, 0), 10.0);
    benchmark::DoNotOptimize(orbit.phi_at(10.0));
  }
}
BENCHMARK(BM_ReebTransport);

void BM_ShootClosedGeodesic(benchmark::State& state) {
  const cf::ContactModel mq = cf::builtin_model("heisenberg-quotient");
  const cf::ReebOrbit orbit(mq, kOrigin, cf::Vec2(1, 0), 1.2 * 6.283185307179586);
  const cf::ShootingSeed seed =
      cf::predicted_seed(mq, orbit, 6.283185307179586, 0.0, 1, 4);
  for (auto _ : state) {
    const cf::RefinedGeodesic g = cf::shoot_closed_geodesic(mq, seed);
    benchmark::DoNotOptimize(g.residual);
  }
}
BENCHMARK(BM_ShootClosedGeodesic);

void BM_SolveCohomological(benchmark::State& state) {
  using P = cf::HomPoly<cf::Rat>;
  const int k = static_cast<int>(state.range(0));
  P r(k);
  for (int m = 0; m <= k; ++m) r.coeffs[static_cast<size_t>(m)] = cf::Rat(2 * m - k, m + 1);
  const P rhs = cf::decompose(r).zero_average;
  for (auto _ : state) {
    const P q = cf::solve_cohomological(rhs);
    benchmark::DoNotOptimize(q.coeffs.back());
  }
}
BENCHMARK(BM_SolveCohomological)->Arg(6)->Arg(12);

}  // namespace

BENCHMARK_MAIN();
