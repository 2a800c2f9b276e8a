#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ctxsearch {

/// Sparse term -> weight map. Only strictly positive weights are stored.
class TermVector {
 public:
  TermVector() = default;

  /// Unit weight for each distinct term in `terms`.
  static TermVector unit(const std::vector<std::string>& terms);
  /// Weight = occurrence count of each term in `terms`.
  static TermVector counts(const std::vector<std::string>& terms);

  /// Adds `weight` to the term's current weight. Non-positive increments are
  /// ignored.
  void add(std::string_view term, double weight = 1.0);
  /// Componentwise sum.
  void add(const TermVector& other);

  double weight(std::string_view term) const;
  bool empty() const { return weights_.empty(); }
  std::size_t size() const { return weights_.size(); }
  double norm() const;
  TermVector scaled(double factor) const;

  const std::map<std::string, double, std::less<>>& weights() const { return weights_; }
  auto begin() const { return weights_.begin(); }
  auto end() const { return weights_.end(); }

  bool operator==(const TermVector&) const = default;

 private:
  std::map<std::string, double, std::less<>> weights_;
};

double dot(const TermVector& a, const TermVector& b);

/// Cosine similarity in [0, 1]; 0 when either vector is empty.
double cosine(const TermVector& a, const TermVector& b);

}  // namespace ctxsearch
