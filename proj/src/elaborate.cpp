#include "pqc/syntax.hpp"

namespace pqc {

TermPtr gate_term(const GateDef& def, Span span) {
  thread_local LabelSupply supply;
  auto shared = std::make_shared<const GateDef>(def);
  CircuitBuilder b(def.in_types, supply);
  std::vector<Label> in;
  for (const auto& w : b.live()) in.push_back(w.label);
  auto out = b.gate(shared, in);
  auto c = std::make_shared<const Circuit>(b.finish(out));
  const std::string x = "gate_in";
  TermPtr lit = Term::circ_lit(SimpleType::of_wires(def.in_types), c,
                               SimpleType::of_wires(def.out_types), span);
  return Term::lift(Term::lambda(x, Term::apply(lit, Term::var(x, span), span), nullptr, span),
                    span);
}

namespace {

bool is_builtin_constant(const std::string& n) { return n == "True" || n == "False"; }

class Elaborator {
 public:
  explicit Elaborator(const GateSet& gs) : gs_(gs) {}

  TermPtr go(const TermPtr& t) {
    using K = Term::Kind;
    switch (t->kind) {
      case K::Const: return constant(*t);
      case K::App: return spine(t);
      case K::Var:
      case K::LabelRef:
      case K::UnitVal:
      case K::CircLit: return t;
      default: break;
    }
    Term copy = *t;
    if (copy.a) copy.a = go(copy.a);
    if (copy.b) copy.b = go(copy.b);
    return std::make_shared<const Term>(std::move(copy));
  }

 private:
  TermPtr constant(const Term& t) {
    if (is_builtin_constant(t.name)) return std::make_shared<const Term>(t);
    auto def = gs_.find(t.name);
    if (!def) throw SourceError("E-TYPE", t.span, "unknown constant '" + t.name + "'");
    return gate_term(*def, t.span);
  }

  TermPtr spine(const TermPtr& t) {
    std::vector<TermPtr> args;
    TermPtr head = t;
    while (head->kind == Term::Kind::App) {
      args.push_back(head->b);
      head = head->a;
    }
    std::reverse(args.begin(), args.end());
    for (auto& a : args) a = go(a);
    std::shared_ptr<const GateDef> def;
    if (head->kind == Term::Kind::Const && !is_builtin_constant(head->name)) def = gs_.find(head->name);
    std::size_t used = 0;
    TermPtr f;
    if (def) {
      const std::size_t n = def->in_types.size();
      TermPtr g = Term::force(gate_term(*def, head->span), head->span);
      if (n >= 2 && args.size() >= n) {
        TermPtr tuple = args[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) tuple = Term::pair(args[i], tuple, args[i]->span);
        f = Term::app(g, tuple, head->span);
        used = n;
      } else if (n >= 2 && args.size() >= 2) {
        throw SourceError("E-TYPE", head->span,
                          "gate '" + head->name + "' takes " + std::to_string(n) +
                              " arguments or one tuple, given " + std::to_string(args.size()));
      } else {
        f = Term::app(g, args[0], head->span);
        used = 1;
      }
    } else {
      f = go(head);
    }
    for (std::size_t i = used; i < args.size(); ++i) f = Term::app(f, args[i], t->span);
    return f;
  }

  const GateSet& gs_;
};

}  // namespace

TermPtr elaborate_gates(const TermPtr& t, const GateSet& gates) { return Elaborator(gates).go(t); }

Program elaborate_gates(const Program& p, const GateSet& gates) {
  Program out = p;
  for (auto& d : out.defs) d.body = elaborate_gates(d.body, gates);
  return out;
}

}  // namespace pqc
