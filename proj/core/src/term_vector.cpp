#include "ctxsearch/term_vector.hpp"

#include <algorithm>
#include <cmath>

namespace ctxsearch {

TermVector TermVector::unit(const std::vector<std::string>& terms) {
  TermVector v;
  for (const auto& t : terms) v.weights_.insert_or_assign(t, 1.0);
  return v;
}

TermVector TermVector::counts(const std::vector<std::string>& terms) {
  TermVector v;
  for (const auto& t : terms) v.add(t, 1.0);
  return v;
}

void TermVector::add(std::string_view term, double weight) {
  if (!(weight > 0.0) || term.empty()) return;
  auto it = weights_.find(term);
  if (it == weights_.end()) {
    weights_.emplace(std::string(term), weight);
  } else {
    it->second += weight;
  }
}

void TermVector::add(const TermVector& other) {
  for (const auto& [t, w] : other.weights_) add(t, w);
}

double TermVector::weight(std::string_view term) const {
  auto it = weights_.find(term);
  return it == weights_.end() ? 0.0 : it->second;
}

double TermVector::norm() const {
  double sum = 0.0;
  for (const auto& [t, w] : weights_) sum += w * w;
  return std::sqrt(sum);
}

TermVector TermVector::scaled(double factor) const {
  TermVector v;
  for (const auto& [t, w] : weights_) v.add(t, w * factor);
  return v;
}

double dot(const TermVector& a, const TermVector& b) {
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  double sum = 0.0;
  for (const auto& [t, w] : small) sum += w * large.weight(t);
  return sum;
}

double cosine(const TermVector& a, const TermVector& b) {
  if (a.empty() || b.empty()) return 0.0;
  const double denom = a.norm() * b.norm();
  if (denom <= 0.0) return 0.0;
  return std::clamp(dot(a, b) / denom, 0.0, 1.0);
}

}  // namespace ctxsearch
