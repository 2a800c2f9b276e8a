#include "ctxsearch/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ctxsearch/error.hpp"

namespace ctxsearch {
namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 1000;

// Series for P(a, x); converges fast for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIter; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) (modified Lentz); for x >= a + 1.
double gamma_q_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw ValidationError("regularized_gamma_q needs a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_fraction(a, x);
}

double chi_square_upper_tail(double x, int df) {
  if (df < 1) throw ValidationError("chi-square needs df >= 1");
  if (x <= 0.0) return 1.0;
  return std::clamp(regularized_gamma_q(0.5 * df, 0.5 * x), 0.0, 1.0);
}

KruskalWallisResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw ValidationError("Kruskal-Wallis needs at least two groups");
  struct Obs {
    double value;
    std::size_t group;
  };
  std::vector<Obs> all;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) throw ValidationError("Kruskal-Wallis group " + std::to_string(g) + " is empty");
    for (double v : groups[g]) {
      if (!std::isfinite(v)) throw ValidationError("Kruskal-Wallis values must be finite");
      all.push_back({v, g});
    }
  }
  std::sort(all.begin(), all.end(), [](const Obs& a, const Obs& b) { return a.value < b.value; });

  const auto n = static_cast<double>(all.size());
  std::vector<double> rank_sum(groups.size(), 0.0);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].value == all[i].value) ++j;
    const double t = static_cast<double>(j - i);
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) rank_sum[all[k].group] += avg_rank;
    tie_term += t * t * t - t;
    i = j;
  }

  KruskalWallisResult r;
  r.df = static_cast<int>(groups.size()) - 1;
  const double correction = 1.0 - tie_term / (n * n * n - n);
  if (correction <= 0.0) return r;  // every observation tied

  const double grand_mean = (n + 1.0) / 2.0;
  double between = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto ng = static_cast<double>(groups[g].size());
    const double dev = rank_sum[g] / ng - grand_mean;
    between += ng * dev * dev;
  }
  r.h = 12.0 / (n * (n + 1.0)) * between / correction;
  r.p = chi_square_upper_tail(r.h, r.df);
  return r;
}

}  // namespace ctxsearch
