#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace contactflow {

struct FitResult {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
  std::size_t points_used = 0;
};

// Ordinary least-squares line y ~ slope * x + intercept. Pairs with
// non-finite entries are skipped. points_used < 2 leaves slope/intercept 0.
FitResult fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Power-law fit: least squares on (log x, log y). Pairs with x <= 0 or
// y <= floor_y are excluded (floor_y screens out noise-dominated errors).
// slope is the estimated exponent.
FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y,
                     double floor_y = 0.0);

// "slope=... intercept=... r2=... points_used=..." on one line.
std::string format_fit(const FitResult& fit);

}  // namespace contactflow
