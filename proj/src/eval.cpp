#include "pqc/eval.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

namespace pqc {

std::string to_string(RuntimeError::Kind k) {
  using K = RuntimeError::Kind;
  switch (k) {
    case K::NotAFunction: return "NotAFunction";
    case K::NotAPair: return "NotAPair";
    case K::NotACircuit: return "NotACircuit";
    case K::NotSimpleTerm: return "NotSimpleTerm";
    case K::LabelSplitFailure: return "LabelSplitFailure";
    case K::ReverseIrreversible: return "ReverseIrreversible";
    case K::ControlUncontrollable: return "ControlUncontrollable";
    case K::WcError: return "WcError";
    case K::UnboundVariable: return "UnboundVariable";
    case K::StepLimit: return "StepLimit";
  }
  return "?";
}

namespace {

using K = Term::Kind;

[[noreturn]] void fail(RuntimeError::Kind k, const std::string& msg) { throw RuntimeError(k, msg); }

void gen_into(const SimpleType& s, LabelSupply& supply, std::vector<Wire>& sigma, TermPtr& out) {
  switch (s.kind()) {
    case SimpleType::Kind::Unit:
      out = Term::unit();
      return;
    case SimpleType::Kind::Wire: {
      Label l = supply.fresh();
      sigma.push_back({l, s.wire_type()});
      out = Term::label_ref(l);
      return;
    }
    case SimpleType::Kind::Tensor: {
      TermPtr a, b;
      gen_into(s.left(), supply, sigma, a);
      gen_into(s.right(), supply, sigma, b);
      out = Term::pair(a, b);
      return;
    }
  }
}

// A simple term shaped like `u` over `labels`, consumed left to right.
TermPtr shape(const SimpleType& u, const std::vector<Label>& labels, std::size_t& next) {
  switch (u.kind()) {
    case SimpleType::Kind::Unit:
      return Term::unit();
    case SimpleType::Kind::Wire:
      return Term::label_ref(labels.at(next++));
    case SimpleType::Kind::Tensor: {
      auto a = shape(u.left(), labels, next);
      auto b = shape(u.right(), labels, next);
      return Term::pair(a, b);
    }
  }
  return Term::unit();
}

std::string show(const Term& t) {
  auto s = print_term(t);
  return s.size() > 60 ? s.substr(0, 57) + "..." : s;
}

}  // namespace

std::pair<TermPtr, std::vector<Wire>> gen(const SimpleType& s, LabelSupply& supply) {
  std::vector<Wire> sigma;
  TermPtr a;
  gen_into(s, supply, sigma, a);
  return {a, sigma};
}

SimpleType ungen(const Term& a, const std::vector<Wire>& sigma) {
  switch (a.kind) {
    case K::UnitVal:
      return SimpleType::unit();
    case K::LabelRef:
      for (const auto& w : sigma)
        if (w.label == a.label) return SimpleType::wire(w.type);
      fail(RuntimeError::Kind::LabelSplitFailure, "label " + a.label.str() + " is not live");
    case K::Pair:
      return SimpleType::tensor(ungen(*a.a, sigma), ungen(*a.b, sigma));
    default:
      fail(RuntimeError::Kind::NotSimpleTerm, "not a simple term: " + show(a));
  }
}

Circuit interp_simple(const Term& a, const std::vector<Wire>& sigma) {
  auto ls = labels_of(a);
  if (ls.size() != sigma.size())
    fail(RuntimeError::Kind::LabelSplitFailure, "simple term does not cover its context");
  LabelSupply unused;
  CircuitBuilder b(Circuit(sigma, sigma, {}), unused);
  try {
    return b.finish(ls);
  } catch (const CircuitError& e) {
    fail(RuntimeError::Kind::LabelSplitFailure, e.what());
  }
}

Appended append(const Circuit& c3, const Term& a, const Circuit& d, const SimpleType& u,
                LabelSupply& supply) {
  if (!is_simple_term(a)) fail(RuntimeError::Kind::NotSimpleTerm, "not a simple term: " + show(a));
  auto ls = labels_of(a);
  std::unordered_set<Label> seen;
  std::vector<WireType> types;
  for (Label l : ls) {
    if (!seen.insert(l).second)
      fail(RuntimeError::Kind::LabelSplitFailure, "label " + l.str() + " used twice");
    auto it = std::find_if(c3.outputs().begin(), c3.outputs().end(),
                           [&](const Wire& w) { return w.label == l; });
    if (it == c3.outputs().end())
      fail(RuntimeError::Kind::LabelSplitFailure, "label " + l.str() + " is not live");
    types.push_back(it->type);
  }
  if (types != d.input_types())
    fail(RuntimeError::Kind::LabelSplitFailure, "wires do not match the circuit's inputs");
  if (u.flatten() != d.output_types())
    fail(RuntimeError::Kind::NotACircuit, "circuit value disagrees with its output type");
  CircuitBuilder b(c3, supply);
  b.bring_into_order(ls);
  auto outs = b.append(d, ls);
  std::size_t next = 0;
  return {b.finish(), shape(u, outs, next)};
}

TermPtr substitute(const TermPtr& t, const std::string& x, const TermPtr& v) {
  switch (t->kind) {
    case K::Var:
      return t->name == x ? v : t;
    case K::Const:
    case K::LabelRef:
    case K::UnitVal:
    case K::CircLit:
      return t;
    case K::Lambda:
      if (t->name == x) return t;
      break;
    case K::LetPair: {
      auto a = substitute(t->a, x, v);
      auto b = (t->name == x || t->name2 == x) ? t->b : substitute(t->b, x, v);
      if (a == t->a && b == t->b) return t;
      Term copy = *t;
      copy.a = a;
      copy.b = b;
      return std::make_shared<const Term>(std::move(copy));
    }
    default:
      break;
  }
  auto a = t->a ? substitute(t->a, x, v) : nullptr;
  auto b = t->b ? substitute(t->b, x, v) : nullptr;
  if (a == t->a && b == t->b) return t;
  Term copy = *t;
  copy.a = a;
  copy.b = b;
  return std::make_shared<const Term>(std::move(copy));
}

Configuration Evaluator::eval(const Configuration& cfg) { return eval(cfg.circuit, cfg.term); }

Configuration Evaluator::eval(const Circuit& c, const TermPtr& m) {
  if (++steps_ > opts_.step_limit)
    fail(RuntimeError::Kind::StepLimit,
         "evaluation exceeded " + std::to_string(opts_.step_limit) + " steps");
  auto r = step(c, m);
  if (opts_.on_step) opts_.on_step(c, m, r.circuit, r.term);
  return r;
}

Configuration Evaluator::step(const Circuit& c, const TermPtr& m) {
  using RK = RuntimeError::Kind;
  auto circuit_value = [&](const TermPtr& v, const char* what) -> const Term& {
    if (v->kind != K::CircLit)
      fail(RK::NotACircuit, std::string(what) + " expects a circuit, got " + show(*v));
    return *v;
  };
  switch (m->kind) {
    case K::Const:
    case K::LabelRef:
    case K::UnitVal:
    case K::Lambda:
    case K::Lift:
    case K::CircLit:
      return {c, m};
    case K::Var:
      fail(RK::UnboundVariable, "unbound variable '" + m->name + "'");
    case K::Pair: {
      auto x = eval(c, m->a);
      auto y = eval(x.circuit, m->b);
      return {y.circuit, Term::pair(x.term, y.term, m->span)};
    }
    case K::App: {
      auto f = eval(c, m->a);
      if (f.term->kind == K::Lift) f = eval(f.circuit, f.term->a);
      if (f.term->kind != K::Lambda) fail(RK::NotAFunction, "cannot apply " + show(*f.term));
      auto x = eval(f.circuit, m->b);
      return eval(x.circuit, substitute(f.term->a, f.term->name, x.term));
    }
    case K::Force: {
      auto f = eval(c, m->a);
      if (f.term->kind != K::Lift) fail(RK::NotAFunction, "cannot force " + show(*f.term));
      return eval(f.circuit, f.term->a);
    }
    case K::LetPair: {
      auto p = eval(c, m->a);
      if (p.term->kind != K::Pair) fail(RK::NotAPair, "cannot split " + show(*p.term));
      auto body = substitute(m->b, m->name, p.term->a);
      if (m->name2 != m->name) body = substitute(body, m->name2, p.term->b);
      return eval(p.circuit, body);
    }
    case K::Apply: {
      auto k = eval(c, m->a);
      const Term& lit = circuit_value(k.term, "apply");
      auto x = eval(k.circuit, m->b);
      auto r = append(x.circuit, *x.term, *lit.circuit, lit.u, supply_);
      return {r.circuit, r.outputs};
    }
    case K::Box: {
      auto f = eval(c, m->a);
      if (f.term->kind != K::Lift) fail(RK::NotAFunction, "box expects a lifted function");
      auto [a, sigma] = gen(m->s, supply_);
      auto inner = eval(Circuit(sigma, sigma, {}), Term::app(f.term->a, a, m->span));
      const TermPtr& b = inner.term;
      if (!is_simple_term(*b)) fail(RK::NotSimpleTerm, "boxed function returned " + show(*b));
      SimpleType u = ungen(*b, inner.circuit.outputs());
      auto ls = labels_of(*b);
      if (ls.size() != inner.circuit.outputs().size())
        fail(RK::LabelSplitFailure, "boxed function leaves wires unconsumed");
      CircuitBuilder bd(inner.circuit, supply_);
      auto d = std::make_shared<const Circuit>(bd.finish(ls));
      return {f.circuit, Term::circ_lit(m->s, d, u, m->span)};
    }
    case K::Reverse: {
      auto k = eval(c, m->a);
      const Term& lit = circuit_value(k.term, "reverse");
      if (!modality_of(*lit.circuit).is_reversible())
        fail(RK::ReverseIrreversible, "cannot reverse a circuit of modality 0");
      try {
        auto d = std::make_shared<const Circuit>(dagger(*lit.circuit, gates_));
        return {k.circuit, Term::circ_lit(lit.u, d, lit.s, m->span)};
      } catch (const Error& e) {
        fail(RK::ReverseIrreversible, e.what());
      }
    }
    case K::Controlled: {
      auto k = eval(c, m->a);
      const Term& lit = circuit_value(k.term, "controlled");
      if (!(lit.s == lit.u) || !lit.circuit->is_square())
        fail(RK::ControlUncontrollable, "cannot control a non-square circuit");
      if (!modality_of(*lit.circuit).is_controllable())
        fail(RK::ControlUncontrollable, "cannot control a circuit of modality below 2");
      if (m->ctrl.empty()) return k;
      try {
        auto d = std::make_shared<const Circuit>(control(m->ctrl, *lit.circuit, gates_, supply_));
        auto s = SimpleType::tensor(m->ctrl.wire_type(), lit.s);
        return {k.circuit, Term::circ_lit(s, d, s, m->span)};
      } catch (const Error& e) {
        fail(RK::ControlUncontrollable, e.what());
      }
    }
    case K::WithComputed: {
      // The body is evaluated first, then the computation.
      auto h = eval(c, m->b);
      const Term& hl = circuit_value(h.term, "withComputed");
      auto g = eval(h.circuit, m->a);
      const Term& gl = circuit_value(g.term, "withComputed");
      if (!(gl.u == hl.s) || !(hl.s == hl.u))
        fail(RK::WcError, "withComputed interfaces do not line up");
      if (!modality_of(*gl.circuit).is_reversible())
        fail(RK::WcError, "withComputed needs a reversible computation");
      if (!modality_of(*hl.circuit).is_controllable())
        fail(RK::WcError, "withComputed needs a controllable body");
      try {
        Circuit gc = gl.circuit->has_conj() ? forget_colors(*gl.circuit, gates_, supply_)
                                            : *gl.circuit;
        auto d = std::make_shared<const Circuit>(with_computed(gc, *hl.circuit, supply_));
        return {g.circuit, Term::circ_lit(gl.s, d, gl.s, m->span)};
      } catch (const CircuitError& e) {
        fail(RK::WcError, e.what());
      }
    }
  }
  fail(RK::NotAFunction, "cannot evaluate " + show(*m));
}

namespace {

void free_names(const Term& t, std::set<std::string> bound, std::set<std::string>& out) {
  switch (t.kind) {
    case K::Var:
      if (!bound.contains(t.name)) out.insert(t.name);
      return;
    case K::Lambda:
      bound.insert(t.name);
      free_names(*t.a, bound, out);
      return;
    case K::LetPair:
      free_names(*t.a, bound, out);
      bound.insert(t.name);
      bound.insert(t.name2);
      free_names(*t.b, bound, out);
      return;
    default:
      if (t.a) free_names(*t.a, bound, out);
      if (t.b) free_names(*t.b, bound, out);
  }
}

}  // namespace

RunResult run_main(const Program& p, const GateSet& gates, const std::string& entry,
                   EvalOptions opts) {
  auto idx = std::find_if(p.defs.begin(), p.defs.end(),
                          [&](const Definition& d) { return d.name == entry; });
  if (idx == p.defs.end())
    throw RuntimeError(RuntimeError::Kind::UnboundVariable, "no definition named '" + entry + "'");
  const auto last = static_cast<std::size_t>(idx - p.defs.begin());

  // Definitions the entry depends on, transitively.
  std::vector<bool> needed(last + 1, false);
  needed[last] = true;
  for (std::size_t i = last + 1; i-- > 0;) {
    if (!needed[i]) continue;
    std::set<std::string> names;
    free_names(*p.defs[i].body, {}, names);
    for (std::size_t j = 0; j < i; ++j)
      if (names.contains(p.defs[j].name)) needed[j] = true;
  }

  LabelSupply supply;
  Evaluator ev(gates, supply, std::move(opts));
  Circuit state;
  std::map<std::string, TermPtr> values;
  TermPtr value;
  for (std::size_t i = 0; i <= last; ++i) {
    if (!needed[i]) continue;
    TermPtr body = p.defs[i].body;
    for (const auto& [name, v] : values) body = substitute(body, name, v);
    auto r = ev.eval(Configuration{state, body});
    state = r.circuit;
    value = r.term;
    values[p.defs[i].name] = value;
  }
  RunResult out{state, value, std::nullopt, ev.steps()};
  if (value->kind == K::CircLit) out.circuit = *value->circuit;
  return out;
}

}  // namespace pqc
