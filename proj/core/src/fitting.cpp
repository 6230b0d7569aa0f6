#include "contactflow/fitting.hpp"

#include <cmath>
#include <sstream>

namespace contactflow {

FitResult fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  FitResult fit;
  const std::size_t n = std::min(x.size(), y.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
    ++m;
  }
  fit.points_used = m;
  if (m < 2) return fit;
  const double det = m * sxx - sx * sx;
  if (det == 0) return fit;
  fit.slope = (m * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.slope * sx) / m;
  const double ss_tot = syy - sy * sy / m;
  double ss_res = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss_res += r * r;
  }
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y, double floor_y) {
  std::vector<double> lx;
  std::vector<double> ly;
  const std::size_t n = std::min(x.size(), y.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0) || !(y[i] > floor_y)) continue;
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_line(lx, ly);
}

std::string format_fit(const FitResult& fit) {
  std::ostringstream os;
  os.precision(12);
  os << "slope=" << fit.slope << " intercept=" << fit.intercept << " r2=" << fit.r2
     << " points_used=" << fit.points_used;
  return os.str();
}

}  // namespace contactflow
