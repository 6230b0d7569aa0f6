#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace contactflow {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat32 = Eigen::Matrix<double, 3, 2>;

// Raised for invalid model data or queries outside a model's domain.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a numerical procedure fails (step underflow, no convergence, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Distinguished vector fields of a contact model: the oriented orthonormal
// frame (X, Y) of the distribution D, the Reeb field Z, and B = [X, Y].
enum class FieldId { X, Y, Z, B };

struct ManifoldPoint {
  int chart = 0;
  Vec3 x = Vec3::Zero();
};

struct TangentVec {
  ManifoldPoint base;
  Vec3 v = Vec3::Zero();
};

struct Covec {
  ManifoldPoint base;
  Vec3 p = Vec3::Zero();
};

// A contact sub-Riemannian 3-manifold given by chart(s) and an oriented
// g-orthonormal frame (X, Y) of the distribution; the metric is defined by
// declaring the frame orthonormal. Everything else (Reeb field, contact
// form, brackets) is derived, with optional analytic shortcuts.
//
// Optional std::function members may be empty; consumers fall back to
// finite differences (frame_jacobian, analytic_bracket) or identity
// transforms (single-chart models).
struct ContactModel {
  std::string name;
  int num_charts = 1;

  // Coordinate periods of each chart coordinate (0 = aperiodic direction).
  Vec3 periods = Vec3::Zero();

  // Box from which validation and property tests draw random chart points.
  Vec3 sample_lo = Vec3(-2, -2, -2);
  Vec3 sample_hi = Vec3(2, 2, 2);

  // Columns are the chart components of X and Y. Required.
  std::function<Mat32(int chart, const Vec3& x)> frame;

  // d(column which)/dx, which = 0 for X, 1 for Y. Optional.
  std::function<Mat3(int chart, const Vec3& x, int which)> frame_jacobian;

  // Analytic Lie bracket [V, W] at (chart, x). Optional.
  std::function<Vec3(int chart, const Vec3& x, FieldId v, FieldId w)> analytic_bracket;

  // Analytic Reeb field and its Jacobian. Optional.
  std::function<Vec3(int chart, const Vec3& x)> reeb;
  std::function<Mat3(int chart, const Vec3& x)> reeb_jacobian;

  // Multi-chart support; all optional (single-chart models leave them empty).
  // preferred_chart returns the chart the point should be represented in;
  // to_chart maps coordinates into a target chart; chart_jacobian is
  // d(target coords)/d(source coords) of that map.
  std::function<int(int chart, const Vec3& x)> preferred_chart;
  std::function<Vec3(int chart, const Vec3& x, int target)> to_chart;
  std::function<Mat3(int chart, const Vec3& x, int target)> chart_jacobian;

  // Chart-independent embedding used for distances (e.g. the unit-sphere
  // embedding, or a cylinder embedding for quotient models). Optional; the
  // default embedding is the chart coordinates themselves.
  std::function<Eigen::VectorXd(int chart, const Vec3& x)> embed;
  std::function<Eigen::MatrixXd(int chart, const Vec3& x)> embed_jacobian;
};

// Model catalog. Known names: "heisenberg", "heisenberg-quotient" (uses T0),
// "s3". T0 is the coordinate period of the quotient model and must be > 0
// when that model is requested. Throws ModelError for unknown names.
ContactModel builtin_model(const std::string& name, double T0 = 6.283185307179586);

// --- Chart utilities -------------------------------------------------------

// Represent a point in a given chart (identity when already there).
ManifoldPoint map_to_chart(const ContactModel& model, const ManifoldPoint& q, int target);

// Re-chart a point to its preferred chart (no-op for single-chart models).
ManifoldPoint normalize_chart(const ContactModel& model, const ManifoldPoint& q);

// Push a tangent vector / covector at q into the target chart.
Vec3 push_vector(const ContactModel& model, const ManifoldPoint& q, int target, const Vec3& v);
Vec3 push_covector(const ContactModel& model, const ManifoldPoint& q, int target, const Vec3& p);

// Chart-independent distance via the model embedding (periodic directions
// are wrapped by the embedding).
double chart_distance(const ContactModel& model, const ManifoldPoint& a, const ManifoldPoint& b);

// Signed coordinate difference a - b in the chart of b, each periodic
// component reduced to (-period/2, period/2].
Vec3 delta_mod_periods(const ContactModel& model, const ManifoldPoint& a, const ManifoldPoint& b);

// Embedding helpers (default: chart coordinates, identity Jacobian).
Eigen::VectorXd embed_point(const ContactModel& model, const ManifoldPoint& q);
Eigen::MatrixXd embed_jacobian(const ContactModel& model, const ManifoldPoint& q);

// --- Frame / bracket machinery ---------------------------------------------

// Evaluate one of the distinguished fields at q (in q's chart).
// X, Y come from the frame; Z from the analytic Reeb field if present, else
// from the derived construction (see reeb_field in reeb.hpp); B = [X, Y].
Vec3 evaluate_field(const ContactModel& model, FieldId id, const ManifoldPoint& q);

// Lie bracket [V, W](q). Uses the model's analytic table when available,
// otherwise central finite differences (step 1e-5; a larger outer step is
// used when a finite-difference B field must itself be differentiated).
TangentVec lie_bracket(const ContactModel& model, FieldId v, FieldId w, const ManifoldPoint& q);

// Jacobian d(field)/dx at q: analytic when the model provides one, else
// central finite differences of evaluate_field.
Mat3 field_jacobian(const ContactModel& model, FieldId id, const ManifoldPoint& q);

// Decompose a chart vector in the basis (X, Y, Z) at q. Returns (cX, cY, cZ).
Vec3 frame_components(const ContactModel& model, const ManifoldPoint& q, const Vec3& v);

// Components of a vector known to lie in D, in the orthonormal frame (X, Y).
Vec2 d_components(const ContactModel& model, const ManifoldPoint& q, const Vec3& v);

// The contact form at q: the unique covector with alpha(X)=alpha(Y)=0 and
// alpha(Z)=1. Throws ModelError if the (X, Y, Z) frame is degenerate at q.
Covec contact_form(const ContactModel& model, const ManifoldPoint& q);

// --- Validation -------------------------------------------------------------

struct ValidationReport {
  int points = 0;
  bool frame_degenerate = false;
  // Max absolute residuals over the sample set.
  double alpha_of_reeb = 0;         // |alpha(Z) - 1|
  double dalpha_reeb = 0;           // |d alpha(Z, X)|, |d alpha(Z, Y)|
  double dalpha_frame = 0;          // |d alpha(X, Y) - 1|
  double bracket_xz_vertical = 0;   // |Z-component of [X, Z]|
  double bracket_yz_vertical = 0;   // |Z-component of [Y, Z]|
  double bracket_xy_vertical = 0;   // |Z-component of [X, Y] + 1|
  double analytic_vs_fd = 0;        // analytic bracket table vs finite differences
  double transition_frame = 0;      // multi-chart frame push consistency
  double max_residual() const;
  bool pass(double tol) const { return !frame_degenerate && max_residual() <= tol; }
};

// Checks the contact/Reeb identities at `points` random chart points drawn
// from the model's sample box with a fixed-seed RNG (deterministic).
ValidationReport validate_model(const ContactModel& model, int points = 100,
                                std::uint64_t seed = 0x5eed0301u);

std::string format_report(const ValidationReport& report);

}  // namespace contactflow
