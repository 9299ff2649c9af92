#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bindsig/arity.hpp"

namespace bindsig {

struct OpDecl {
  std::string name;
  Arity arity;
};

// A named family of operation declarations. Declaration order is kept for
// deterministic output, but equality is on the op set only.
class Signature {
 public:
  Signature() = default;
  Signature(std::string name, std::vector<OpDecl> ops)
      : name_(std::move(name)), ops_(std::move(ops)) {}

  const std::string& name() const { return name_; }
  const std::vector<OpDecl>& ops() const { return ops_; }
  std::size_t size() const { return ops_.size(); }

  const Arity* find(const std::string& op_name) const {
    for (const OpDecl& op : ops_)
      if (op.name == op_name) return &op.arity;
    return nullptr;
  }

  bool has(const std::string& op_name) const { return find(op_name) != nullptr; }

  Signature with_op(const std::string& op_name, Arity a) const {
    std::vector<OpDecl> ops = ops_;
    ops.push_back({op_name, std::move(a)});
    return Signature(name_, std::move(ops));
  }

  friend bool operator==(const Signature& a, const Signature& b) {
    if (a.ops_.size() != b.ops_.size()) return false;
    for (const OpDecl& op : a.ops_) {
      const Arity* other = b.find(op.name);
      if (!other || !(*other == op.arity)) return false;
    }
    return true;
  }
  friend bool operator!=(const Signature& a, const Signature& b) { return !(a == b); }

 private:
  std::string name_;
  std::vector<OpDecl> ops_;
};

struct ValidationReport {
  std::vector<std::string> errors;
  bool ok() const { return errors.empty(); }
};

inline ValidationReport validate_signature(const Signature& sig) {
  ValidationReport report;
  std::set<std::string> seen;
  for (const OpDecl& op : sig.ops()) {
    if (op.name.empty()) report.errors.push_back("empty operation name");
    if (!seen.insert(op.name).second)
      report.errors.push_back("duplicate operation name: " + op.name);
  }
  return report;
}

// An injective, arity-preserving mapping of the source ops into the target.
struct SignatureInclusion {
  Signature source;
  Signature target;
  std::map<std::string, std::string> mapping;

  static SignatureInclusion identity(const Signature& sig) {
    SignatureInclusion inc{sig, sig, {}};
    for (const OpDecl& op : sig.ops()) inc.mapping[op.name] = op.name;
    return inc;
  }

  const std::string& apply(const std::string& op_name) const {
    auto it = mapping.find(op_name);
    if (it == mapping.end())
      throw std::invalid_argument("op outside inclusion domain: " + op_name);
    return it->second;
  }
};

inline ValidationReport validate_inclusion(const SignatureInclusion& inc) {
  ValidationReport report;
  std::set<std::string> image;
  for (const OpDecl& op : inc.source.ops()) {
    auto it = inc.mapping.find(op.name);
    if (it == inc.mapping.end()) {
      report.errors.push_back("inclusion undefined on op: " + op.name);
      continue;
    }
    if (!image.insert(it->second).second)
      report.errors.push_back("inclusion not injective at: " + it->second);
    const Arity* target_arity = inc.target.find(it->second);
    if (!target_arity) {
      report.errors.push_back("inclusion image missing from target: " + it->second);
    } else if (!(*target_arity == op.arity)) {
      report.errors.push_back("inclusion does not preserve arity of: " + op.name);
    }
  }
  return report;
}

inline SignatureInclusion compose_inclusions(const SignatureInclusion& first,
                                             const SignatureInclusion& second) {
  SignatureInclusion out{first.source, second.target, {}};
  for (const auto& [from, mid] : first.mapping) out.mapping[from] = second.apply(mid);
  return out;
}

class MergeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MergeResult {
  Signature merged;
  SignatureInclusion from_first;
  SignatureInclusion from_second;
};

// Amalgamated union of s1 and s2 along a shared subsignature presented by
// two inclusions with the same source. Ops of s1 keep their names; ops of
// s2 outside the shared part keep theirs unless they collide with a merged
// name, in which case they are qualified as "<s2 name>.<op>".
inline MergeResult merge_signatures(const Signature& s1, const Signature& s2,
                                    const SignatureInclusion& shared1,
                                    const SignatureInclusion& shared2) {
  if (shared1.source != shared2.source)
    throw MergeError("shared inclusions disagree on the common subsignature");
  for (const SignatureInclusion* inc : {&shared1, &shared2}) {
    ValidationReport r = validate_inclusion(*inc);
    if (!r.ok()) throw MergeError("invalid shared inclusion: " + r.errors.front());
  }
  if (shared1.target != s1 || shared2.target != s2)
    throw MergeError("shared inclusion target mismatch");

  // where each shared op landed on the two sides
  std::map<std::string, std::string> shared_in_s2;  // s2 op name -> s1 op name
  for (const OpDecl& op : shared1.source.ops()) {
    const std::string& in1 = shared1.apply(op.name);
    const std::string& in2 = shared2.apply(op.name);
    const Arity& a1 = *s1.find(in1);
    const Arity& a2 = *s2.find(in2);
    if (!(a1 == a2)) throw MergeError("arity mismatch on shared op: " + op.name);
    shared_in_s2[in2] = in1;
  }

  std::vector<OpDecl> merged_ops = s1.ops();
  auto taken = [&](const std::string& n) {
    return std::any_of(merged_ops.begin(), merged_ops.end(),
                       [&](const OpDecl& op) { return op.name == n; });
  };

  SignatureInclusion from_first{s1, {}, {}};
  for (const OpDecl& op : s1.ops()) from_first.mapping[op.name] = op.name;

  SignatureInclusion from_second{s2, {}, {}};
  for (const OpDecl& op : s2.ops()) {
    auto it = shared_in_s2.find(op.name);
    if (it != shared_in_s2.end()) {
      from_second.mapping[op.name] = it->second;
      continue;
    }
    std::string merged_name = op.name;
    if (taken(merged_name)) merged_name = s2.name() + "." + op.name;
    if (taken(merged_name))
      throw MergeError("cannot disambiguate op name: " + op.name);
    merged_ops.push_back({merged_name, op.arity});
    from_second.mapping[op.name] = merged_name;
  }

  std::string merged_name = s1.name();
  if (!(s2 == shared2.source)) merged_name += "+" + s2.name();
  Signature merged(merged_name, std::move(merged_ops));
  from_first.target = merged;
  from_second.target = merged;
  return MergeResult{std::move(merged), std::move(from_first), std::move(from_second)};
}

// --- signature files -------------------------------------------------------
//
// UTF-8 text; first significant line is `signature <name>`, then one
// `opname : arity-expr` per line. `#` starts a comment; blank lines are
// ignored.

inline Signature parse_signature_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool have_header = false;
  std::string name;
  std::vector<OpDecl> ops;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::size_t begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    std::size_t end = line.find_last_not_of(" \t\r");
    line = line.substr(begin, end - begin + 1);

    if (!have_header) {
      std::istringstream header(line);
      std::string keyword;
      header >> keyword >> name;
      if (keyword != "signature" || name.empty())
        throw ParseError("line " + std::to_string(lineno) +
                             ": expected `signature <name>` header",
                         0);
      have_header = true;
      continue;
    }

    std::size_t colon = line.find(':');
    if (colon == std::string::npos)
      throw ParseError("line " + std::to_string(lineno) + ": expected `opname : arity-expr`", 0);
    std::string op_name = line.substr(0, colon);
    std::size_t name_end = op_name.find_last_not_of(" \t");
    op_name = name_end == std::string::npos ? "" : op_name.substr(0, name_end + 1);
    if (op_name.empty())
      throw ParseError("line " + std::to_string(lineno) + ": empty op name", 0);
    try {
      ops.push_back({op_name, parse_arity(line.substr(colon + 1))});
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what(), e.position());
    }
  }
  if (!have_header) throw ParseError("missing `signature <name>` header", 0);
  return Signature(name, std::move(ops));
}

inline std::string print_signature(const Signature& sig) {
  std::ostringstream os;
  os << "signature " << sig.name() << "\n";
  for (const OpDecl& op : sig.ops()) os << op.name << " : " << print_arity(op.arity) << "\n";
  return os.str();
}

}  // namespace bindsig
