#pragma once

// Hand-written de Bruijn lambda calculus, used as the independent oracle
// for the generic machinery. Nothing here depends on the term engine: the
// representation is the classic single-namespace one (binders shift free
// indices), and substitution is the textbook capture-avoiding version with
// explicit lifting.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bindsig/rng.hpp"

namespace bindsig::reflam {

class Term {
 public:
  enum class Kind { var, app, lam };

  Term() = default;

  static Term var(int index);
  static Term app(Term fn, Term arg);
  static Term lam(Term body);

  bool valid() const { return node_ != nullptr; }
  Kind kind() const;
  int index() const;
  const Term& fn() const;
  const Term& arg() const;
  const Term& body() const;

  friend bool operator==(const Term& x, const Term& y);
  friend bool operator!=(const Term& x, const Term& y) { return !(x == y); }

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct Term::Node {
  Kind kind;
  int index;
  Term a, b;
};

inline Term Term::var(int index) {
  return Term(std::make_shared<const Node>(Node{Kind::var, index, {}, {}}));
}
inline Term Term::app(Term fn, Term arg) {
  return Term(std::make_shared<const Node>(Node{Kind::app, 0, std::move(fn), std::move(arg)}));
}
inline Term Term::lam(Term body) {
  return Term(std::make_shared<const Node>(Node{Kind::lam, 0, std::move(body), {}}));
}
inline Term::Kind Term::kind() const {
  if (!node_) throw std::logic_error("empty lambda term");
  return node_->kind;
}
inline int Term::index() const { return node_->index; }
inline const Term& Term::fn() const { return node_->a; }
inline const Term& Term::arg() const { return node_->b; }
inline const Term& Term::body() const { return node_->a; }

inline bool operator==(const Term& x, const Term& y) {
  if (x.node_ == y.node_) return true;
  if (!x.node_ || !y.node_) return false;
  if (x.node_->kind != y.node_->kind) return false;
  switch (x.node_->kind) {
    case Term::Kind::var:
      return x.node_->index == y.node_->index;
    case Term::Kind::app:
      return x.node_->a == y.node_->a && x.node_->b == y.node_->b;
    case Term::Kind::lam:
      return x.node_->a == y.node_->a;
  }
  return false;
}

inline bool well_scoped(const Term& t, int n) {
  switch (t.kind()) {
    case Term::Kind::var:
      return t.index() >= 0 && t.index() < n;
    case Term::Kind::app:
      return well_scoped(t.fn(), n) && well_scoped(t.arg(), n);
    case Term::Kind::lam:
      return well_scoped(t.body(), n + 1);
  }
  return false;
}

inline int depth(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::var:
      return 0;
    case Term::Kind::app:
      return 1 + std::max(depth(t.fn()), depth(t.arg()));
    case Term::Kind::lam:
      return 1 + depth(t.body());
  }
  return 0;
}

// Total relabeling of variables; under a binder, index 0 is preserved and
// the map shifts.
inline Term rename(const Term& t, const std::function<int(int)>& f) {
  switch (t.kind()) {
    case Term::Kind::var:
      return Term::var(f(t.index()));
    case Term::Kind::app:
      return Term::app(rename(t.fn(), f), rename(t.arg(), f));
    case Term::Kind::lam: {
      std::function<int(int)> shifted = [&f](int i) { return i == 0 ? 0 : f(i - 1) + 1; };
      return Term::lam(rename(t.body(), shifted));
    }
  }
  throw std::logic_error("unreachable");
}

inline Term shift_free(const Term& t, int by) {
  return rename(t, [by](int i) { return i + by; });
}

// Simultaneous capture-avoiding substitution. Under a binder the
// substitution is lifted: 0 maps to itself and every assigned term is
// shifted past the new binder.
inline Term subst(const Term& t, const std::function<Term(int)>& s) {
  switch (t.kind()) {
    case Term::Kind::var:
      return s(t.index());
    case Term::Kind::app:
      return Term::app(subst(t.fn(), s), subst(t.arg(), s));
    case Term::Kind::lam: {
      std::function<Term(int)> lifted = [&s](int i) {
        if (i == 0) return Term::var(0);
        return shift_free(s(i - 1), 1);
      };
      return Term::lam(subst(t.body(), lifted));
    }
  }
  throw std::logic_error("unreachable");
}

// Substitution as finite data: t at context src, assignments at dst.
inline Term subst_vec(const Term& t, const std::vector<Term>& assignments) {
  return subst(t, [&assignments](int i) {
    if (i < 0 || i >= static_cast<int>(assignments.size()))
      throw std::out_of_range("lambda substitution index out of range");
    return assignments[static_cast<std::size_t>(i)];
  });
}

inline std::string print(const Term& t) {
  std::ostringstream os;
  std::function<void(const Term&)> go = [&](const Term& u) {
    switch (u.kind()) {
      case Term::Kind::var:
        os << "(var " << u.index() << ')';
        return;
      case Term::Kind::app:
        os << "(app ";
        go(u.fn());
        os << ' ';
        go(u.arg());
        os << ')';
        return;
      case Term::Kind::lam:
        os << "(lam ";
        go(u.body());
        os << ')';
        return;
    }
  };
  go(t);
  return os.str();
}

// Brute-force enumeration of all terms with depth <= d at context n:
// variables in index order, then applications (left operand outermost),
// then abstractions.
inline void enumerate_into(int n, int d, std::vector<Term>& out) {
  for (int i = 0; i < n; ++i) out.push_back(Term::var(i));
  if (d >= 1) {
    std::vector<Term> smaller;
    enumerate_into(n, d - 1, smaller);
    for (const Term& f : smaller)
      for (const Term& x : smaller) out.push_back(Term::app(f, x));
    std::vector<Term> under;
    enumerate_into(n + 1, d - 1, under);
    for (const Term& b : under) out.push_back(Term::lam(b));
  }
}

inline std::vector<Term> enumerate(int n, int d) {
  std::vector<Term> out;
  enumerate_into(n, d, out);
  return out;
}

inline std::uint64_t count(int n, int d) {
  // small enough ranges that direct recursion with memo-free evaluation is
  // fine; still guard against overflow for large d
  if (d == 0) return static_cast<std::uint64_t>(n);
  std::uint64_t smaller = count(n, d - 1);
  std::uint64_t apps = smaller * smaller;
  if (smaller != 0 && apps / smaller != smaller)
    throw std::overflow_error("lambda term count exceeds uint64");
  std::uint64_t total = static_cast<std::uint64_t>(n) + apps + count(n + 1, d - 1);
  if (total < apps) throw std::overflow_error("lambda term count exceeds uint64");
  return total;
}

inline Term random_term(int n, int depth, Rng& rng) {
  bool can_var = n > 0;
  bool can_op = depth >= 1;
  if (!can_var && !can_op) throw std::runtime_error("no closed lambda term at depth 0");
  bool pick_var = can_var && (!can_op || rng.below(2) == 0);
  if (pick_var) return Term::var(rng.pick(n));
  if (rng.below(2) == 0)
    return Term::app(random_term(n, depth - 1, rng), random_term(n, depth - 1, rng));
  return Term::lam(random_term(n + 1, depth - 1, rng));
}

}  // namespace bindsig::reflam
