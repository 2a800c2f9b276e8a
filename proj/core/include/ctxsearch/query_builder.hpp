#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ctxsearch/lexicon.hpp"
#include "ctxsearch/meta_keyword.hpp"
#include "ctxsearch/recommender.hpp"

namespace ctxsearch {

/// Default cap on the number of term leaves in an expanded query.
inline constexpr std::size_t kDefaultQueryCap = 20;

/// AND/OR tree over terms. No NOT.
class QueryNode {
 public:
  enum class Kind { kTerm, kAnd, kOr };

  static QueryNode term(std::string t);
  /// Throws ValidationError on an empty child list. Or children that are
  /// themselves Or nodes are flattened into the parent.
  static QueryNode all_of(std::vector<QueryNode> children);
  static QueryNode any_of(std::vector<QueryNode> children);

  Kind kind() const { return kind_; }
  const std::string& text() const { return text_; }
  const std::vector<QueryNode>& children() const { return children_; }

  std::size_t leaf_count() const;
  /// Term leaves left to right.
  std::vector<std::string> leaves() const;

  bool operator==(const QueryNode&) const = default;

 private:
  QueryNode(Kind kind, std::string text, std::vector<QueryNode> children)
      : kind_(kind), text_(std::move(text)), children_(std::move(children)) {}

  Kind kind_;
  std::string text_;
  std::vector<QueryNode> children_;
};

using BooleanQuery = QueryNode;

/// And(keywords..., Or(sense words), Or(meta keyword words), Or(concept
/// terms)) with empty groups omitted and terms already present skipped. When
/// the leaf count exceeds `cap`, expansion terms are dropped from the end
/// (lowest rank, last category first); keywords are never dropped. Throws
/// ValidationError when there are no keywords or more keywords than `cap`.
BooleanQuery build_query(const std::vector<std::string>& query_keywords,
                         const std::vector<DisambiguatedTerm>& selected_terms,
                         const std::vector<MetaKeyword>& selected_metas,
                         const std::vector<Concept>& selected_concepts,
                         std::size_t cap = kDefaultQueryCap);

/// Infix form: `a AND (b OR c)`. Or groups and nested And groups are
/// parenthesized.
std::string serialize_query(const BooleanQuery& q);

/// Parses the serialize_query syntax. AND binds tighter than OR; a
/// parenthesized single term parses as a one-term Or group. Throws
/// ParseError (location = 1-based character offset).
BooleanQuery parse_query(std::string_view text);

}  // namespace ctxsearch
