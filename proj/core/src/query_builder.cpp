#include "ctxsearch/query_builder.hpp"

#include <cctype>
#include <unordered_set>

#include "ctxsearch/error.hpp"

namespace ctxsearch {

QueryNode QueryNode::term(std::string t) { return QueryNode(Kind::kTerm, std::move(t), {}); }

QueryNode QueryNode::all_of(std::vector<QueryNode> children) {
  if (children.empty()) throw ValidationError("AND group without children");
  return QueryNode(Kind::kAnd, {}, std::move(children));
}

QueryNode QueryNode::any_of(std::vector<QueryNode> children) {
  if (children.empty()) throw ValidationError("OR group without children");
  std::vector<QueryNode> flat;
  for (auto& c : children) {
    if (c.kind_ == Kind::kOr) {
      for (auto& g : c.children_) flat.push_back(std::move(g));
    } else {
      flat.push_back(std::move(c));
    }
  }
  return QueryNode(Kind::kOr, {}, std::move(flat));
}

std::size_t QueryNode::leaf_count() const {
  if (kind_ == Kind::kTerm) return 1;
  std::size_t n = 0;
  for (const auto& c : children_) n += c.leaf_count();
  return n;
}

std::vector<std::string> QueryNode::leaves() const {
  std::vector<std::string> out;
  auto walk = [&](const QueryNode& n, auto&& self) -> void {
    if (n.kind_ == Kind::kTerm) {
      out.push_back(n.text_);
      return;
    }
    for (const auto& c : n.children_) self(c, self);
  };
  walk(*this, walk);
  return out;
}

BooleanQuery build_query(const std::vector<std::string>& query_keywords,
                         const std::vector<DisambiguatedTerm>& selected_terms,
                         const std::vector<MetaKeyword>& selected_metas,
                         const std::vector<Concept>& selected_concepts, std::size_t cap) {
  std::unordered_set<std::string> seen;
  std::vector<std::string> keywords;
  for (const auto& k : query_keywords) {
    if (!k.empty() && seen.insert(k).second) keywords.push_back(k);
  }
  if (keywords.empty()) throw ValidationError("query has no keywords");
  if (keywords.size() > cap) {
    throw ValidationError("query has " + std::to_string(keywords.size()) + " keywords, cap is " +
                          std::to_string(cap));
  }

  std::vector<std::vector<std::string>> groups(3);
  auto take = [&](std::vector<std::string>& group, const std::vector<std::string>& words) {
    for (const auto& w : words) {
      if (!w.empty() && seen.insert(w).second) group.push_back(w);
    }
  };
  for (const auto& t : selected_terms) take(groups[0], t.words);
  for (const auto& m : selected_metas) take(groups[1], m.words);
  for (const auto& c : selected_concepts) take(groups[2], c.related_terms);

  std::size_t leaves = keywords.size();
  for (const auto& g : groups) leaves += g.size();
  for (auto g = groups.rbegin(); g != groups.rend() && leaves > cap; ++g) {
    while (!g->empty() && leaves > cap) {
      g->pop_back();
      --leaves;
    }
  }

  std::vector<QueryNode> children;
  for (auto& k : keywords) children.push_back(QueryNode::term(std::move(k)));
  for (auto& g : groups) {
    if (g.empty()) continue;
    std::vector<QueryNode> terms;
    for (auto& w : g) terms.push_back(QueryNode::term(std::move(w)));
    children.push_back(QueryNode::any_of(std::move(terms)));
  }
  if (children.size() == 1) return std::move(children.front());
  return QueryNode::all_of(std::move(children));
}

namespace {

void write(const QueryNode& n, bool nested, std::string& out) {
  using Kind = QueryNode::Kind;
  if (n.kind() == Kind::kTerm) {
    out += n.text();
    return;
  }
  const bool parens = n.kind() == Kind::kOr || nested;
  const char* op = n.kind() == Kind::kAnd ? " AND " : " OR ";
  if (parens) out += '(';
  bool first = true;
  for (const auto& c : n.children()) {
    if (!first) out += op;
    first = false;
    write(c, true, out);
  }
  if (parens) out += ')';
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  QueryNode parse() {
    next();
    if (tok_.kind == Tok::kEnd) throw ParseError("empty query", 1);
    auto root = parse_or();
    if (tok_.kind != Tok::kEnd) fail("unexpected '" + std::string(tok_.text) + "'");
    return root;
  }

 private:
  enum class Tok { kTerm, kAnd, kOr, kOpen, kClose, kEnd };
  struct Token {
    Tok kind = Tok::kEnd;
    std::string_view text;
    std::size_t offset = 0;
  };

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, tok_.offset + 1); }

  void next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    tok_.offset = pos_;
    if (pos_ == text_.size()) {
      tok_ = {Tok::kEnd, {}, pos_};
      return;
    }
    const char c = text_[pos_];
    if (c == '(' || c == ')') {
      tok_ = {c == '(' ? Tok::kOpen : Tok::kClose, text_.substr(pos_, 1), pos_};
      ++pos_;
      return;
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')') {
      ++pos_;
    }
    const auto word = text_.substr(start, pos_ - start);
    tok_ = {word == "AND" ? Tok::kAnd : word == "OR" ? Tok::kOr : Tok::kTerm, word, start};
  }

  QueryNode parse_or() {
    std::vector<QueryNode> parts{parse_and()};
    while (tok_.kind == Tok::kOr) {
      next();
      parts.push_back(parse_and());
    }
    return parts.size() == 1 ? std::move(parts.front()) : QueryNode::any_of(std::move(parts));
  }

  QueryNode parse_and() {
    std::vector<QueryNode> parts{parse_primary()};
    while (tok_.kind == Tok::kAnd) {
      next();
      parts.push_back(parse_primary());
    }
    return parts.size() == 1 ? std::move(parts.front()) : QueryNode::all_of(std::move(parts));
  }

  QueryNode parse_primary() {
    if (tok_.kind == Tok::kTerm) {
      auto t = QueryNode::term(std::string(tok_.text));
      next();
      if (tok_.kind == Tok::kTerm || tok_.kind == Tok::kOpen) fail("missing operator");
      return t;
    }
    if (tok_.kind == Tok::kOpen) {
      next();
      auto inner = parse_or();
      if (tok_.kind != Tok::kClose) fail("expected ')'");
      next();
      if (tok_.kind == Tok::kTerm || tok_.kind == Tok::kOpen) fail("missing operator");
      // A parenthesized lone term is a one-term OR group.
      if (inner.kind() == QueryNode::Kind::kTerm) return QueryNode::any_of({std::move(inner)});
      return inner;
    }
    fail(tok_.kind == Tok::kEnd ? "unexpected end of query" : "unexpected '" + std::string(tok_.text) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Token tok_;
};

}  // namespace

std::string serialize_query(const BooleanQuery& q) {
  std::string out;
  write(q, false, out);
  return out;
}

BooleanQuery parse_query(std::string_view text) { return Parser(text).parse(); }

}  // namespace ctxsearch
