#pragma once

#include <vector>

namespace ctxsearch {

struct KruskalWallisResult {
  double h = 0.0;
  int df = 0;
  double p = 1.0;
};

/// Kruskal-Wallis H over average ranks, divided by the tie correction
/// 1 - sum(t^3 - t) / (N^3 - N). p is the chi-square upper tail with
/// groups - 1 degrees of freedom. If every value is tied, H = 0 and p = 1.
/// Throws ValidationError for fewer than two groups or an empty group.
KruskalWallisResult kruskal_wallis(const std::vector<std::vector<double>>& groups);

/// Regularized upper incomplete gamma Q(a, x), a > 0, x >= 0.
double regularized_gamma_q(double a, double x);

/// P(X >= x) for X ~ chi-square(df).
double chi_square_upper_tail(double x, int df);

}  // namespace ctxsearch
