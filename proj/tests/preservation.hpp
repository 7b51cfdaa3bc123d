#pragma once

// Per-step type preservation: every judgment (C1, M) => (C2, V) made by the
// evaluator is checked as S |-a (C1, Sigma1, M) : A; Sigma' followed by
// S |-a' (C2, Sigma2, V) : A; Sigma' with a' >= a.

#include <set>
#include <string>
#include <vector>

#include "pqc/eval.hpp"
#include "pqc/typecheck.hpp"

namespace pqc::testing {

inline void collect_labels(const Term& t, std::set<Label>& out) {
  if (t.kind == Term::Kind::LabelRef) out.insert(t.label);
  if (t.a) collect_labels(*t.a, out);
  if (t.b) collect_labels(*t.b, out);
}

class PreservationChecker {
 public:
  explicit PreservationChecker(const GateSet& gates) : gates_(gates) {}

  void operator()(const Circuit& before, const TermPtr& m, const Circuit& after,
                  const TermPtr& v) {
    ++steps_;
    std::set<Label> used;
    collect_labels(*m, used);
    std::vector<Wire> rest, consumed;
    for (const auto& w : before.outputs()) (used.contains(w.label) ? consumed : rest).push_back(w);
    TermTyping in;
    try {
      in = check_term(m, gates_, {}, consumed);
    } catch (const SourceError& e) {
      failures_.push_back("input ill-typed: " + std::string(e.what()) + " in " + print_term(*m));
      return;
    }
    Modality a_in = meet(modality_of(before), in.modality);
    if (before.input_types() != after.input_types()) {
      failures_.push_back("circuit inputs changed");
      return;
    }
    try {
      Modality a_out = check_configuration(after, v, in.type, rest, gates_);
      if (a_out < a_in)
        failures_.push_back("modality dropped from " + to_string(a_in) + " to " + to_string(a_out));
    } catch (const SourceError& e) {
      failures_.push_back(std::string(e.what()) + " for " + print_term(*v) + " : " +
                          print_type(*in.type));
    }
  }

  EvalOptions options() {
    EvalOptions o;
    o.on_step = [this](const Circuit& b, const TermPtr& m, const Circuit& a, const TermPtr& v) {
      (*this)(b, m, a, v);
    };
    return o;
  }

  std::uint64_t steps() const { return steps_; }
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  const GateSet& gates_;
  std::uint64_t steps_ = 0;
  std::vector<std::string> failures_;
};

}  // namespace pqc::testing
