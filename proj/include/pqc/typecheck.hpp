#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pqc/ast.hpp"
#include "pqc/circuit.hpp"
#include "pqc/gateset.hpp"

namespace pqc {

// --- modality constraints ---------------------------------------------------

/// A modality variable or a constant.
struct ModAtom {
  int var = -1;
  Modality value;

  static ModAtom constant(Modality m) { return {-1, m}; }
  static ModAtom variable(int v) { return {v, Modality::controllable()}; }
  bool is_var() const { return var >= 0; }
};

/// Where a constraint came from; used for the diagnostic when it fails.
struct Origin {
  std::string code = "E-MOD";
  Span span;
  std::string message;
};

/// Greatest-solution solver over the lattice 2 > 1 > 0.
///
/// Upper bounds `x <= min(rhs)` are Horn clauses and are propagated from the
/// top. Equalities `x = min(rhs)` additionally need some rhs atom to drop to
/// x; a unique candidate is lowered directly, several candidates are
/// explored by bounded search, and the pointwise-greatest leaf is returned
/// when it dominates all others.
class ModalitySolver {
 public:
  int fresh();
  std::size_t size() const { return static_cast<std::size_t>(count_); }

  /// lhs <= min(rhs). A constant lhs is a lower bound on every rhs atom.
  void le(ModAtom lhs, std::vector<ModAtom> rhs, Origin o);
  /// var = min(rhs); an empty rhs means 2.
  void eq_meet(int var, std::vector<ModAtom> rhs, Origin o);
  void equal(ModAtom a, ModAtom b, Origin o);

  /// Throws SourceError with the failing constraint's origin.
  std::vector<Modality> solve(std::size_t node_limit = 20000) const;

  /// True when `assignment` satisfies every constraint.
  bool satisfied_by(const std::vector<Modality>& assignment) const;

 private:
  struct Le {
    ModAtom lhs;
    std::vector<ModAtom> rhs;
    Origin origin;
  };
  struct EqMeet {
    int var;
    std::vector<ModAtom> rhs;
    Origin origin;
  };

  enum class Outcome { Solved, Failed };
  void search(std::vector<int>& cur, std::vector<std::vector<int>>& leaves,
              std::vector<const Origin*>& failures, std::size_t& nodes,
              std::size_t limit) const;
  bool propagate(std::vector<int>& cur) const;

  int count_ = 0;
  std::vector<Le> les_;
  std::vector<EqMeet> eqs_;
};

// --- checking ---------------------------------------------------------------

/// Duplicable types: Unit, Bool, !A, Circ and tensors of them.
bool is_parameter_type(const Type& t);

/// Types of earlier top-level definitions, all fully resolved.
using TopEnv = std::map<std::string, TypePtr>;

struct TermTyping {
  TypePtr type;        // every modality resolved
  Modality modality;   // judgment modality
};

/// Checks a closed term (free names resolve through `top`, labels through
/// `labels`, each of which must be consumed exactly once). When `expected`
/// is given the term is checked against it. Throws SourceError.
TermTyping check_term(const TermPtr& t, const GateSet& gates, const TopEnv& top = {},
                      const std::vector<Wire>& labels = {}, const TypePtr& expected = nullptr);

struct Diagnostic {
  std::string code;
  Span span;
  std::string message;
};

struct TypedDefinition {
  std::string name;
  TypePtr type;
  Modality modality;
};

struct ProgramTyping {
  std::vector<TypedDefinition> defs;
  std::vector<Diagnostic> errors;
  bool ok() const { return errors.empty(); }
};

/// Checks an elaborated program definition by definition. A definition that
/// refers to a failed one is skipped without a second diagnostic.
ProgramTyping check_program(const Program& p, const GateSet& gates);

/// The largest alpha with S |-alpha (C, Sigma, M) : A; Sigma' where S and
/// Sigma are the circuit's input and output interfaces. Sigma'' is Sigma
/// minus `rest`. Throws SourceError(E-CONFIG) when no alpha exists.
Modality check_configuration(const Circuit& c, const TermPtr& m, const TypePtr& a,
                             const std::vector<Wire>& rest, const GateSet& gates,
                             const TopEnv& top = {});

}  // namespace pqc
