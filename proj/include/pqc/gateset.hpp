#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pqc/error.hpp"
#include "pqc/modality.hpp"
#include "pqc/simple_type.hpp"

namespace pqc {

/// How the adjoint of a gate is written down.
struct SelfAdjoint {
  friend bool operator==(const SelfAdjoint&, const SelfAdjoint&) = default;
};
struct DaggerFlag {
  friend bool operator==(const DaggerFlag&, const DaggerFlag&) = default;
};
struct AdjointPartner {
  std::string name;
  friend bool operator==(const AdjointPartner&, const AdjointPartner&) = default;
};
struct NoAdjoint {
  friend bool operator==(const NoAdjoint&, const NoAdjoint&) = default;
};
using Adjoint = std::variant<NoAdjoint, SelfAdjoint, DaggerFlag, AdjointPartner>;

struct GateDef {
  std::string name;
  std::vector<WireType> in_types;
  std::vector<WireType> out_types;
  Modality modality;
  Adjoint adjoint;

  bool is_square() const { return in_types == out_types; }
  SimpleType input_type() const { return SimpleType::of_wires(in_types); }
  SimpleType output_type() const { return SimpleType::of_wires(out_types); }
  friend bool operator==(const GateDef&, const GateDef&) = default;
};

class SignatureError : public Error {
 public:
  enum class Kind { Parse, Validation };
  SignatureError(Kind k, const std::string& msg) : Error(msg), kind(k) {}
  Kind kind;
};

/// The wire types and gates every other module is parameterized by.
class GateSet {
 public:
  GateSet() = default;

  void add_wire_type(const WireType& w) { wire_types_.insert(w); }
  /// Inserts or replaces.
  void add_gate(GateDef def);
  void add_alias(const std::string& alias, const std::string& target) {
    aliases_[alias] = target;
  }

  bool has_wire_type(const WireType& w) const { return wire_types_.contains(w); }
  const std::set<WireType>& wire_types() const { return wire_types_; }

  /// Resolves aliases; nullptr when unknown.
  std::shared_ptr<const GateDef> find(std::string_view name) const;
  /// Throws std::out_of_range when unknown.
  const GateDef& lookup(std::string_view name) const;
  std::vector<std::string> gate_names() const;
  const std::map<std::string, std::string, std::less<>>& aliases() const { return aliases_; }

  /// The gate implementing the adjoint of `def` and whether its dagger flag is
  /// set. Throws SignatureError when `def` has no adjoint.
  std::pair<std::shared_ptr<const GateDef>, bool> adjoint_of(const GateDef& def,
                                                             bool daggered) const;

  /// Throws SignatureError(Validation) on the first violated invariant.
  void validate() const;

  friend bool operator==(const GateSet& a, const GateSet& b);

 private:
  std::set<WireType> wire_types_;
  std::map<std::string, std::shared_ptr<const GateDef>, std::less<>> gates_;
  std::map<std::string, std::string, std::less<>> aliases_;
};

/// Qubit, Bit; X Y Z H S T CNOT CZ SWAP (modality 2); Init0/1, Term0/1
/// (modality 1); Meas, Discard, BitDiscard (modality 0).
GateSet default_gateset();

/// Parses a signature file (JSON) and applies it on top of the default set.
GateSet load_signature(std::string_view text);
/// Serializes every wire type and gate; load_signature(save_signature(g)) == g.
std::string save_signature(const GateSet& gs);

}  // namespace pqc
