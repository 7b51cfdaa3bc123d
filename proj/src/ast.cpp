#include "pqc/ast.hpp"

namespace pqc {

// --- types ------------------------------------------------------------------

namespace {

TypePtr make_type(Type t) { return std::make_shared<const Type>(std::move(t)); }

}  // namespace

TypePtr Type::unit() { return make_type({}); }

TypePtr Type::boolean() {
  Type t;
  t.kind = Kind::Bool;
  return make_type(std::move(t));
}

TypePtr Type::wire_of(WireType w) {
  Type t;
  t.kind = Kind::Wire;
  t.wire = std::move(w);
  return make_type(std::move(t));
}

TypePtr Type::bang(ModHole m, TypePtr a) {
  Type t;
  t.kind = Kind::Bang;
  t.mod = m;
  t.a = std::move(a);
  return make_type(std::move(t));
}

TypePtr Type::lolli(TypePtr a, ModHole m, TypePtr b) {
  Type t;
  t.kind = Kind::Lolli;
  t.mod = m;
  t.a = std::move(a);
  t.b = std::move(b);
  return make_type(std::move(t));
}

TypePtr Type::circ(ModHole m, SimpleType s, SimpleType u) {
  Type t;
  t.kind = Kind::Circ;
  t.mod = m;
  t.s = std::move(s);
  t.u = std::move(u);
  return make_type(std::move(t));
}

TypePtr Type::tensor(TypePtr a, TypePtr b) {
  Type t;
  t.kind = Kind::Tensor;
  t.a = std::move(a);
  t.b = std::move(b);
  return make_type(std::move(t));
}

TypePtr Type::from_simple(const SimpleType& s) {
  switch (s.kind()) {
    case SimpleType::Kind::Unit: return unit();
    case SimpleType::Kind::Wire: return wire_of(s.wire_type());
    case SimpleType::Kind::Tensor: return tensor(from_simple(s.left()), from_simple(s.right()));
  }
  return unit();
}

bool type_equal(const Type& a, const Type& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Type::Kind::Unit:
    case Type::Kind::Bool: return true;
    case Type::Kind::Wire: return a.wire == b.wire;
    case Type::Kind::Bang: return a.mod == b.mod && type_equal(*a.a, *b.a);
    case Type::Kind::Lolli:
      return a.mod == b.mod && type_equal(*a.a, *b.a) && type_equal(*a.b, *b.b);
    case Type::Kind::Circ: return a.mod == b.mod && a.s == b.s && a.u == b.u;
    case Type::Kind::Tensor: return type_equal(*a.a, *b.a) && type_equal(*a.b, *b.b);
  }
  return false;
}

std::optional<SimpleType> as_simple(const Type& t) {
  switch (t.kind) {
    case Type::Kind::Unit: return SimpleType::unit();
    case Type::Kind::Wire: return SimpleType::wire(t.wire);
    case Type::Kind::Tensor: {
      auto l = as_simple(*t.a);
      auto r = as_simple(*t.b);
      if (!l || !r) return std::nullopt;
      return SimpleType::tensor(*l, *r);
    }
    default: return std::nullopt;
  }
}

namespace {

std::string mod_suffix(const ModHole& m) { return m ? std::to_string(m->value()) : ""; }

std::string simple_atom(const SimpleType& s) {
  std::string str = s.str();
  return s.kind() == SimpleType::Kind::Tensor ? "(" + str + ")" : str;
}

// 0: arrow level, 1: tensor level, 2: atom level.
std::string print_type_at(const Type& t, int level) {
  std::string out;
  int own = 2;
  switch (t.kind) {
    case Type::Kind::Unit: return "Unit";
    case Type::Kind::Bool: return "Bool";
    case Type::Kind::Wire: return t.wire.name;
    case Type::Kind::Circ:
      return "Circ" + mod_suffix(t.mod) + "(" + t.s.str() + ", " + t.u.str() + ")";
    case Type::Kind::Bang:
      out = "!" + mod_suffix(t.mod) + (t.mod ? " " : "") + print_type_at(*t.a, 2);
      own = 2;
      break;
    case Type::Kind::Tensor:
      out = print_type_at(*t.a, 2) + " * " + print_type_at(*t.b, 1);
      own = 1;
      break;
    case Type::Kind::Lolli:
      out = print_type_at(*t.a, 1) + " -o" + mod_suffix(t.mod) + " " + print_type_at(*t.b, 0);
      own = 0;
      break;
  }
  return own < level ? "(" + out + ")" : out;
}

}  // namespace

std::string print_type(const Type& t) { return print_type_at(t, 0); }

// --- terms ------------------------------------------------------------------

namespace {

TermPtr make(Term t) { return std::make_shared<const Term>(std::move(t)); }

Term base(Term::Kind k, Span sp) {
  Term t;
  t.kind = k;
  t.span = sp;
  return t;
}

}  // namespace

TermPtr Term::constant(std::string n, Span sp) {
  Term t = base(Kind::Const, sp);
  t.name = std::move(n);
  return make(std::move(t));
}

TermPtr Term::var(std::string n, Span sp) {
  Term t = base(Kind::Var, sp);
  t.name = std::move(n);
  return make(std::move(t));
}

TermPtr Term::label_ref(Label l, Span sp) {
  Term t = base(Kind::LabelRef, sp);
  t.label = l;
  return make(std::move(t));
}

TermPtr Term::unit(Span sp) { return make(base(Kind::UnitVal, sp)); }

TermPtr Term::lambda(std::string x, TermPtr body, TypePtr ann, Span sp) {
  Term t = base(Kind::Lambda, sp);
  t.name = std::move(x);
  t.a = std::move(body);
  t.ann = std::move(ann);
  return make(std::move(t));
}

TermPtr Term::app(TermPtr f, TermPtr x, Span sp) {
  Term t = base(Kind::App, sp);
  t.a = std::move(f);
  t.b = std::move(x);
  return make(std::move(t));
}

TermPtr Term::pair(TermPtr x, TermPtr y, Span sp) {
  Term t = base(Kind::Pair, sp);
  t.a = std::move(x);
  t.b = std::move(y);
  return make(std::move(t));
}

TermPtr Term::let_pair(std::string x, std::string y, TermPtr bound, TermPtr body, Span sp) {
  Term t = base(Kind::LetPair, sp);
  t.name = std::move(x);
  t.name2 = std::move(y);
  t.a = std::move(bound);
  t.b = std::move(body);
  return make(std::move(t));
}

TermPtr Term::lift(TermPtr m, Span sp) {
  Term t = base(Kind::Lift, sp);
  t.a = std::move(m);
  return make(std::move(t));
}

TermPtr Term::force(TermPtr m, Span sp) {
  Term t = base(Kind::Force, sp);
  t.a = std::move(m);
  return make(std::move(t));
}

TermPtr Term::circ_lit(SimpleType s, std::shared_ptr<const Circuit> c, SimpleType u, Span sp) {
  Term t = base(Kind::CircLit, sp);
  t.s = std::move(s);
  t.circuit = std::move(c);
  t.u = std::move(u);
  return make(std::move(t));
}

TermPtr Term::apply(TermPtr m, TermPtr n, Span sp) {
  Term t = base(Kind::Apply, sp);
  t.a = std::move(m);
  t.b = std::move(n);
  return make(std::move(t));
}

TermPtr Term::box(SimpleType s, TermPtr m, Span sp) {
  Term t = base(Kind::Box, sp);
  t.s = std::move(s);
  t.a = std::move(m);
  return make(std::move(t));
}

TermPtr Term::reverse(TermPtr m, Span sp) {
  Term t = base(Kind::Reverse, sp);
  t.a = std::move(m);
  return make(std::move(t));
}

TermPtr Term::controlled(ControlSpec k, TermPtr m, Span sp) {
  Term t = base(Kind::Controlled, sp);
  t.ctrl = std::move(k);
  t.a = std::move(m);
  return make(std::move(t));
}

TermPtr Term::with_computed(TermPtr m, TermPtr n, Span sp) {
  Term t = base(Kind::WithComputed, sp);
  t.a = std::move(m);
  t.b = std::move(n);
  return make(std::move(t));
}

namespace {

bool ptr_equal(const TermPtr& a, const TermPtr& b) {
  if (!a || !b) return !a && !b;
  return term_equal(*a, *b);
}

}  // namespace

bool term_equal(const Term& a, const Term& b) {
  if (a.kind != b.kind) return false;
  using K = Term::Kind;
  switch (a.kind) {
    case K::Const:
    case K::Var: return a.name == b.name;
    case K::LabelRef: return a.label == b.label;
    case K::UnitVal: return true;
    case K::Lambda:
      if ((a.ann == nullptr) != (b.ann == nullptr)) return false;
      if (a.ann && !type_equal(*a.ann, *b.ann)) return false;
      return a.name == b.name && ptr_equal(a.a, b.a);
    case K::LetPair:
      return a.name == b.name && a.name2 == b.name2 && ptr_equal(a.a, b.a) && ptr_equal(a.b, b.b);
    case K::App:
    case K::Pair:
    case K::Apply:
    case K::WithComputed: return ptr_equal(a.a, b.a) && ptr_equal(a.b, b.b);
    case K::Lift:
    case K::Force:
    case K::Reverse: return ptr_equal(a.a, b.a);
    case K::Box: return a.s == b.s && ptr_equal(a.a, b.a);
    case K::Controlled: return a.ctrl == b.ctrl && ptr_equal(a.a, b.a);
    case K::CircLit:
      return a.s == b.s && a.u == b.u && structurally_equal(*a.circuit, *b.circuit);
  }
  return false;
}

namespace {

enum class Ctx { Top, Fun, Atom };

std::string print_at(const Term& t, Ctx ctx) {
  using K = Term::Kind;
  auto wrap = [&](std::string s, Ctx needs) {
    return static_cast<int>(ctx) > static_cast<int>(needs) ? "(" + s + ")" : s;
  };
  switch (t.kind) {
    case K::Const:
    case K::Var: return t.name;
    case K::LabelRef: return "<" + t.label.str() + ">";
    case K::UnitVal: return "()";
    case K::CircLit:
      return "<circ(" + t.s.str() + ", " + std::to_string(t.circuit->items().size()) +
             " items, " + t.u.str() + ")>";
    case K::Pair: return "(" + print_at(*t.a, Ctx::Top) + ", " + print_at(*t.b, Ctx::Top) + ")";
    case K::Apply:
      return "apply(" + print_at(*t.a, Ctx::Top) + ", " + print_at(*t.b, Ctx::Top) + ")";
    case K::Lambda: {
      std::string binder = t.ann ? "(" + t.name + " : " + print_type(*t.ann) + ")" : t.name;
      return wrap("\\" + binder + " . " + print_at(*t.a, Ctx::Top), Ctx::Top);
    }
    case K::LetPair:
      return wrap("let (" + t.name + ", " + t.name2 + ") = " + print_at(*t.a, Ctx::Top) +
                      " in " + print_at(*t.b, Ctx::Top),
                  Ctx::Top);
    case K::App: return wrap(print_at(*t.a, Ctx::Fun) + " " + print_at(*t.b, Ctx::Atom), Ctx::Fun);
    case K::Lift: return wrap("lift " + print_at(*t.a, Ctx::Atom), Ctx::Fun);
    case K::Force: return wrap("force " + print_at(*t.a, Ctx::Atom), Ctx::Fun);
    case K::Reverse: return wrap("reverse " + print_at(*t.a, Ctx::Atom), Ctx::Fun);
    case K::Controlled: {
      std::string kw = t.ctrl == ControlSpec::black() ? "controlled " : "controlled[" + t.ctrl.str() + "] ";
      return wrap(kw + print_at(*t.a, Ctx::Atom), Ctx::Fun);
    }
    case K::Box:
      return wrap("box " + simple_atom(t.s) + " " + print_at(*t.a, Ctx::Atom), Ctx::Fun);
    case K::WithComputed:
      return wrap("withComputed " + print_at(*t.a, Ctx::Atom) + " " + print_at(*t.b, Ctx::Atom),
                  Ctx::Fun);
  }
  return {};
}

}  // namespace

std::string print_term(const Term& t) { return print_at(t, Ctx::Top); }

bool is_value(const Term& t) {
  using K = Term::Kind;
  switch (t.kind) {
    case K::Const:
    case K::Var:
    case K::LabelRef:
    case K::UnitVal:
    case K::Lambda:
    case K::Lift:
    case K::CircLit: return true;
    case K::Pair: return is_value(*t.a) && is_value(*t.b);
    default: return false;
  }
}

bool is_simple_term(const Term& t) {
  switch (t.kind) {
    case Term::Kind::LabelRef:
    case Term::Kind::UnitVal: return true;
    case Term::Kind::Pair: return is_simple_term(*t.a) && is_simple_term(*t.b);
    default: return false;
  }
}

namespace {

void collect(const Term& t, std::vector<Label>& out) {
  if (t.kind == Term::Kind::LabelRef) out.push_back(t.label);
  if (t.kind == Term::Kind::Pair) {
    collect(*t.a, out);
    collect(*t.b, out);
  }
}

}  // namespace

std::vector<Label> labels_of(const Term& t) {
  std::vector<Label> out;
  collect(t, out);
  return out;
}

const Definition* Program::find(const std::string& name) const {
  for (const auto& d : defs)
    if (d.name == name) return &d;
  return nullptr;
}

std::string print_program(const Program& p) {
  std::string out;
  for (const auto& d : p.defs) {
    if (d.declared) out += d.name + " : " + print_type(*d.declared) + "\n";
    out += d.name + " = " + print_term(*d.body) + "\n\n";
  }
  return out;
}

}  // namespace pqc
