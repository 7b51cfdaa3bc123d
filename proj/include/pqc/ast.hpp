#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pqc/circuit.hpp"
#include "pqc/error.hpp"
#include "pqc/label.hpp"
#include "pqc/modality.hpp"
#include "pqc/simple_type.hpp"

namespace pqc {

/// A diagnostic tied to a source position. `code` is one of E-LEX, E-PARSE,
/// E-LIN, E-TYPE, E-REV, E-CTRL, E-WC, E-MOD.
class SourceError : public Error {
 public:
  SourceError(std::string code, Span span, const std::string& msg)
      : Error(msg), code_(std::move(code)), span_(span) {}
  const std::string& code() const { return code_; }
  Span span() const { return span_; }

 private:
  std::string code_;
  Span span_;
};

/// An omitted modality annotation is a hole for inference.
using ModHole = std::optional<Modality>;

struct Type;
using TypePtr = std::shared_ptr<const Type>;

struct Type {
  enum class Kind { Unit, Wire, Bool, Bang, Lolli, Circ, Tensor };

  Kind kind = Kind::Unit;
  WireType wire;   // Wire
  ModHole mod;     // Bang, Lolli, Circ
  TypePtr a, b;    // Bang(a), Lolli(a, b), Tensor(a, b)
  SimpleType s, u; // Circ(s, u)

  static TypePtr unit();
  static TypePtr boolean();
  static TypePtr wire_of(WireType w);
  static TypePtr bang(ModHole m, TypePtr a);
  static TypePtr lolli(TypePtr a, ModHole m, TypePtr b);
  static TypePtr circ(ModHole m, SimpleType s, SimpleType u);
  static TypePtr tensor(TypePtr a, TypePtr b);
  static TypePtr from_simple(const SimpleType& s);
};

bool type_equal(const Type& a, const Type& b);
/// Unit, wire types and tensors of them.
std::optional<SimpleType> as_simple(const Type& t);
std::string print_type(const Type& t);

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind {
    Const,
    Var,
    LabelRef,
    UnitVal,
    Lambda,
    App,
    Pair,
    LetPair,
    Lift,
    Force,
    CircLit,
    Apply,
    Box,
    Reverse,
    Controlled,
    WithComputed,
  };

  Kind kind = Kind::UnitVal;
  Span span;
  std::string name;   // Const, Var; Lambda binder; LetPair first binder
  std::string name2;  // LetPair second binder
  TypePtr ann;        // optional Lambda binder annotation
  Label label;        // LabelRef
  TermPtr a, b;       // children; LetPair: a = bound term N, b = body M
  SimpleType s, u;    // CircLit(s, circuit, u); Box s
  std::shared_ptr<const Circuit> circuit;
  ControlSpec ctrl;   // Controlled

  static TermPtr constant(std::string n, Span sp = {});
  static TermPtr var(std::string n, Span sp = {});
  static TermPtr label_ref(Label l, Span sp = {});
  static TermPtr unit(Span sp = {});
  static TermPtr lambda(std::string x, TermPtr body, TypePtr ann = nullptr, Span sp = {});
  static TermPtr app(TermPtr f, TermPtr x, Span sp = {});
  static TermPtr pair(TermPtr x, TermPtr y, Span sp = {});
  static TermPtr let_pair(std::string x, std::string y, TermPtr bound, TermPtr body,
                          Span sp = {});
  static TermPtr lift(TermPtr m, Span sp = {});
  static TermPtr force(TermPtr m, Span sp = {});
  static TermPtr circ_lit(SimpleType s, std::shared_ptr<const Circuit> c, SimpleType u,
                          Span sp = {});
  static TermPtr apply(TermPtr m, TermPtr n, Span sp = {});
  static TermPtr box(SimpleType s, TermPtr m, Span sp = {});
  static TermPtr reverse(TermPtr m, Span sp = {});
  static TermPtr controlled(ControlSpec k, TermPtr m, Span sp = {});
  static TermPtr with_computed(TermPtr m, TermPtr n, Span sp = {});
};

/// Structural equality ignoring spans; circuit literals compare structurally.
bool term_equal(const Term& a, const Term& b);
/// Source text that parses back to an equal term. Circuit literals and
/// labels print in a diagnostic form that does not parse.
std::string print_term(const Term& t);

/// Values per the grammar: constants, variables, labels, unit, lambdas,
/// pairs of values, lifts and circuit literals.
bool is_value(const Term& t);
/// Tuples of labels and unit.
bool is_simple_term(const Term& t);
/// Labels of a simple term, left to right.
std::vector<Label> labels_of(const Term& t);

struct Definition {
  std::string name;
  TypePtr declared;  // null when absent
  TermPtr body;
  Span span;
};

struct Program {
  std::vector<Definition> defs;

  const Definition* find(const std::string& name) const;
};

std::string print_program(const Program& p);

}  // namespace pqc
