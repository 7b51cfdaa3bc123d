#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pqc/ast.hpp"
#include "pqc/circuit.hpp"
#include "pqc/gateset.hpp"

namespace pqc {

class RuntimeError : public Error {
 public:
  enum class Kind {
    NotAFunction,
    NotAPair,
    NotACircuit,
    NotSimpleTerm,
    LabelSplitFailure,
    ReverseIrreversible,
    ControlUncontrollable,
    WcError,
    UnboundVariable,
    StepLimit,
  };
  RuntimeError(Kind k, const std::string& msg) : Error(msg), kind(k) {}
  Kind kind;
};

std::string to_string(RuntimeError::Kind k);

/// Circuit state plus the term being evaluated. The label context is the
/// circuit's output list, in positional order.
struct Configuration {
  Circuit circuit;
  TermPtr term;

  const std::vector<Wire>& labels() const { return circuit.outputs(); }
};

/// A fresh simple term shaped like `s`, and its label context.
std::pair<TermPtr, std::vector<Wire>> gen(const SimpleType& s, LabelSupply& supply);

/// The simple type of `a` under `sigma`. Throws RuntimeError(NotSimpleTerm)
/// or RuntimeError(LabelSplitFailure) for labels missing from `sigma`.
SimpleType ungen(const Term& a, const std::vector<Wire>& sigma);

/// The permutation [[a]] : [[sigma]] -> [[S]]. Every label of `sigma` must
/// occur in `a`.
Circuit interp_simple(const Term& a, const std::vector<Wire>& sigma);

struct Appended {
  Circuit circuit;
  TermPtr outputs;  // simple term over d's renamed outputs, shaped like `u`
};

/// Runs `d` on the wires named by `a` at the end of `c3`; the remaining
/// wires of `c3` pass through. Throws RuntimeError(LabelSplitFailure) when
/// `a` does not name distinct live wires of the right types.
Appended append(const Circuit& c3, const Term& a, const Circuit& d, const SimpleType& u,
                LabelSupply& supply);

struct EvalOptions {
  std::uint64_t step_limit = 1'000'000;
  /// Called after every evaluation judgment (C, M) => (C', V).
  std::function<void(const Circuit& before, const TermPtr& m, const Circuit& after,
                     const TermPtr& v)>
      on_step;
};

class Evaluator {
 public:
  Evaluator(const GateSet& gates, LabelSupply& supply, EvalOptions opts = {})
      : gates_(gates), supply_(supply), opts_(std::move(opts)) {}

  /// Big-step evaluation of a closed term to a value.
  Configuration eval(const Configuration& cfg);
  std::uint64_t steps() const { return steps_; }

 private:
  Configuration step(const Circuit& c, const TermPtr& m);
  Configuration eval(const Circuit& c, const TermPtr& m);

  const GateSet& gates_;
  LabelSupply& supply_;
  EvalOptions opts_;
  std::uint64_t steps_ = 0;
};

/// [v/x]t. Values are closed, so no capture can occur.
TermPtr substitute(const TermPtr& t, const std::string& x, const TermPtr& v);

struct RunResult {
  Circuit state;   // final circuit state
  TermPtr value;
  /// The circuit when the value is a circuit literal.
  std::optional<Circuit> circuit;
  std::uint64_t steps = 0;
};

/// Evaluates definition `entry` of an elaborated program from the empty
/// state, after the definitions it depends on.
RunResult run_main(const Program& p, const GateSet& gates, const std::string& entry = "main",
                   EvalOptions opts = {});

}  // namespace pqc
