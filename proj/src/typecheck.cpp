#include "pqc/typecheck.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace pqc {

// --- solver -----------------------------------------------------------------

int ModalitySolver::fresh() { return count_++; }

void ModalitySolver::le(ModAtom lhs, std::vector<ModAtom> rhs, Origin o) {
  les_.push_back({lhs, std::move(rhs), std::move(o)});
}

void ModalitySolver::eq_meet(int var, std::vector<ModAtom> rhs, Origin o) {
  eqs_.push_back({var, std::move(rhs), std::move(o)});
}

void ModalitySolver::equal(ModAtom a, ModAtom b, Origin o) {
  if (!a.is_var() && !b.is_var() && a.value == b.value) return;
  if (a.is_var() && b.is_var() && a.var == b.var) return;
  le(a, {b}, o);
  le(b, {a}, std::move(o));
}

namespace {

int value_of(const ModAtom& a, const std::vector<int>& cur) {
  return a.is_var() ? cur[static_cast<std::size_t>(a.var)] : a.value.value();
}

int meet_of(const std::vector<ModAtom>& rhs, const std::vector<int>& cur) {
  int m = 2;
  for (const auto& a : rhs) m = std::min(m, value_of(a, cur));
  return m;
}

bool specific(const Origin& o) { return o.code != "E-MOD"; }

}  // namespace

bool ModalitySolver::propagate(std::vector<int>& cur) const {
  bool any = false;
  for (bool changed = true; changed;) {
    changed = false;
    auto lower = [&](int var, int bound) {
      auto& slot = cur[static_cast<std::size_t>(var)];
      if (slot > bound) {
        slot = bound;
        changed = any = true;
      }
    };
    for (const auto& c : les_)
      if (c.lhs.is_var()) lower(c.lhs.var, meet_of(c.rhs, cur));
    for (const auto& c : eqs_) lower(c.var, meet_of(c.rhs, cur));
  }
  return any;
}

void ModalitySolver::search(std::vector<int>& cur, std::vector<std::vector<int>>& leaves,
                            std::vector<const Origin*>& failures, std::size_t& nodes,
                            std::size_t limit) const {
  if (++nodes > limit)
    throw SourceError("E-MOD", {}, "modality inference exceeded its search budget");
  propagate(cur);
  // Values only decrease from here, so a broken lower bound is final.
  for (const auto& c : les_) {
    if (c.lhs.is_var()) continue;
    if (meet_of(c.rhs, cur) < c.lhs.value.value()) {
      failures.push_back(&c.origin);
      return;
    }
  }
  for (const auto& c : eqs_) {
    int target = cur[static_cast<std::size_t>(c.var)];
    if (meet_of(c.rhs, cur) <= target) continue;
    std::vector<int> candidates;
    for (const auto& a : c.rhs)
      if (a.is_var() && value_of(a, cur) > target) candidates.push_back(a.var);
    if (candidates.empty()) {
      failures.push_back(&c.origin);
      return;
    }
    for (int v : candidates) {
      auto next = cur;
      next[static_cast<std::size_t>(v)] = target;
      search(next, leaves, failures, nodes, limit);
    }
    return;
  }
  leaves.push_back(cur);
}

std::vector<Modality> ModalitySolver::solve(std::size_t node_limit) const {
  std::vector<int> cur(size(), 2);
  std::vector<std::vector<int>> leaves;
  std::vector<const Origin*> failures;
  std::size_t nodes = 0;
  search(cur, leaves, failures, nodes, node_limit);

  if (leaves.empty()) {
    const Origin* why = failures.front();
    for (const Origin* o : failures)
      if (specific(*o)) {
        why = o;
        break;
      }
    throw SourceError(why->code, why->span, why->message);
  }
  std::vector<int> top(size(), 0);
  for (const auto& l : leaves)
    for (std::size_t i = 0; i < top.size(); ++i) top[i] = std::max(top[i], l[i]);
  if (std::find(leaves.begin(), leaves.end(), top) == leaves.end()) {
    Span where = eqs_.empty() ? Span{} : eqs_.front().origin.span;
    throw SourceError("E-MOD", where,
                      "modalities have no greatest solution; add an annotation");
  }
  std::vector<Modality> out;
  out.reserve(top.size());
  for (int v : top) out.emplace_back(v);
  return out;
}

bool ModalitySolver::satisfied_by(const std::vector<Modality>& assignment) const {
  std::vector<int> cur;
  for (auto m : assignment) cur.push_back(m.value());
  for (const auto& c : les_)
    if (value_of(c.lhs, cur) > meet_of(c.rhs, cur)) return false;
  for (const auto& c : eqs_)
    if (cur[static_cast<std::size_t>(c.var)] != meet_of(c.rhs, cur)) return false;
  return true;
}

// --- types ------------------------------------------------------------------

bool is_parameter_type(const Type& t) {
  switch (t.kind) {
    case Type::Kind::Unit:
    case Type::Kind::Bool:
    case Type::Kind::Bang:
    case Type::Kind::Circ:
      return true;
    case Type::Kind::Tensor:
      return is_parameter_type(*t.a) && is_parameter_type(*t.b);
    case Type::Kind::Wire:
    case Type::Kind::Lolli:
      return false;
  }
  return false;
}

namespace {

// Inference types: Type plus metavariables and modality variables.
struct TT;
using TTP = std::shared_ptr<TT>;
struct TT {
  enum class K { Unit, Wire, Bool, Bang, Lolli, Circ, Tensor, Meta };
  K k = K::Unit;
  WireType w;
  ModAtom m;
  TTP a, b;
  int meta = -1;
};

TTP mk(TT::K k, TTP a = nullptr, TTP b = nullptr, ModAtom m = {}) {
  auto t = std::make_shared<TT>();
  t->k = k;
  t->a = std::move(a);
  t->b = std::move(b);
  t->m = m;
  return t;
}

using Mods = std::vector<ModAtom>;

struct Inferred {
  TTP type;
  Mods mods;
};

class Checker {
 public:
  Checker(const GateSet& gs, const TopEnv& top) : gs_(gs), top_(top) {}

  void bind_label(const Wire& w) {
    binders_.push_back({w.label.str(), wire(w.type, {}), 0, {}, true});
    scope_.emplace_back(w.label.str(), binders_.size() - 1);
  }

  Inferred infer(const Term& t);
  void unify(const TTP& x, const TTP& y, const Origin& o);
  TTP from_type(const Type& t, Span sp);

  // Solves, then runs the checks that need resolved types.
  void finish();
  TypePtr resolve(const TTP& t, Span sp) const;
  Modality judgment(const Mods& m) const {
    Modality out = Modality::controllable();
    for (const auto& a : m)
      out = meet(out, a.is_var() ? solution_[static_cast<std::size_t>(a.var)] : a.value);
    return out;
  }

 private:
  struct Binder {
    std::string name;
    TTP type;
    int uses;
    Span span;
    bool label;
  };
  struct LiftUse {
    std::vector<std::size_t> binders;
    Span span;
  };

  TTP meta() {
    auto t = mk(TT::K::Meta);
    t->meta = static_cast<int>(metas_.size());
    metas_.push_back(nullptr);
    return t;
  }
  ModAtom mvar() { return ModAtom::variable(solver_.fresh()); }
  TTP wire(const WireType& w, Span sp) {
    if (!gs_.has_wire_type(w))
      throw SourceError("E-TYPE", sp, "unknown wire type '" + w.name + "'");
    auto t = mk(TT::K::Wire);
    t->w = w;
    return t;
  }
  TTP from_simple(const SimpleType& s, Span sp) {
    switch (s.kind()) {
      case SimpleType::Kind::Unit:
        return mk(TT::K::Unit);
      case SimpleType::Kind::Wire:
        return wire(s.wire_type(), sp);
      case SimpleType::Kind::Tensor:
        return mk(TT::K::Tensor, from_simple(s.left(), sp), from_simple(s.right(), sp));
    }
    return mk(TT::K::Unit);
  }
  TTP prune(TTP t) const {
    while (t->k == TT::K::Meta && metas_[static_cast<std::size_t>(t->meta)])
      t = metas_[static_cast<std::size_t>(t->meta)];
    return t;
  }
  bool occurs(int m, const TTP& t) const {
    auto p = prune(t);
    if (p->k == TT::K::Meta) return p->meta == m;
    return (p->a && occurs(m, p->a)) || (p->b && occurs(m, p->b));
  }
  std::string show(const TTP& t) const;
  TypePtr show_type(const TTP& t) const;

  void push(const std::string& name, TTP type, Span sp) {
    binders_.push_back({name, std::move(type), 0, sp, false});
    scope_.emplace_back(name, binders_.size() - 1);
  }
  void pop() { scope_.pop_back(); }
  const std::size_t* lookup(const std::string& name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == name) return &it->second;
    return nullptr;
  }
  // Expects `t` to have the shape `want`, whose fresh parts become bound.
  TTP expect(const TTP& t, const TTP& want, const Origin& o) {
    unify(want, t, o);
    return want;
  }

  const GateSet& gs_;
  const TopEnv& top_;
  ModalitySolver solver_;
  std::vector<TTP> metas_;
  std::vector<Binder> binders_;
  std::vector<std::pair<std::string, std::size_t>> scope_;
  std::vector<LiftUse> lifts_;
  std::vector<std::pair<TTP, Span>> simple_;
  std::vector<Modality> solution_;
};

TTP Checker::from_type(const Type& t, Span sp) {
  auto mod = [&](const ModHole& h) { return h ? ModAtom::constant(*h) : mvar(); };
  switch (t.kind) {
    case Type::Kind::Unit:
      return mk(TT::K::Unit);
    case Type::Kind::Bool:
      return mk(TT::K::Bool);
    case Type::Kind::Wire:
      return wire(t.wire, sp);
    case Type::Kind::Bang:
      return mk(TT::K::Bang, from_type(*t.a, sp), nullptr, mod(t.mod));
    case Type::Kind::Lolli: {
      auto a = from_type(*t.a, sp);
      auto m = mod(t.mod);
      return mk(TT::K::Lolli, a, from_type(*t.b, sp), m);
    }
    case Type::Kind::Circ:
      return mk(TT::K::Circ, from_simple(t.s, sp), from_simple(t.u, sp), mod(t.mod));
    case Type::Kind::Tensor:
      return mk(TT::K::Tensor, from_type(*t.a, sp), from_type(*t.b, sp));
  }
  return mk(TT::K::Unit);
}

TypePtr Checker::show_type(const TTP& t) const {
  auto p = prune(t);
  auto mod = [&](const ModAtom& a) -> ModHole {
    if (!a.is_var()) return a.value;
    return std::nullopt;
  };
  switch (p->k) {
    case TT::K::Unit:
      return Type::unit();
    case TT::K::Bool:
      return Type::boolean();
    case TT::K::Wire:
      return Type::wire_of(p->w);
    case TT::K::Meta:
      return Type::wire_of(WireType{"?"});
    case TT::K::Bang:
      return Type::bang(mod(p->m), show_type(p->a));
    case TT::K::Lolli:
      return Type::lolli(show_type(p->a), mod(p->m), show_type(p->b));
    case TT::K::Tensor:
      return Type::tensor(show_type(p->a), show_type(p->b));
    case TT::K::Circ: {
      auto s = as_simple(*show_type(p->a));
      auto u = as_simple(*show_type(p->b));
      if (s && u) return Type::circ(mod(p->m), *s, *u);
      return Type::wire_of(WireType{"Circ(?)"});
    }
  }
  return Type::unit();
}

std::string Checker::show(const TTP& t) const { return print_type(*show_type(t)); }

void Checker::unify(const TTP& x0, const TTP& y0, const Origin& o) {
  auto x = prune(x0), y = prune(y0);
  if (x == y) return;
  if (x->k == TT::K::Meta || y->k == TT::K::Meta) {
    if (x->k != TT::K::Meta) std::swap(x, y);
    if (occurs(x->meta, y))
      throw SourceError("E-TYPE", o.span, "infinite type in " + show(y));
    metas_[static_cast<std::size_t>(x->meta)] = y;
    return;
  }
  auto mismatch = [&] {
    std::string msg = o.message.empty() ? "type mismatch" : o.message;
    throw SourceError(o.code, o.span,
                      msg + ": expected " + show(x0) + ", found " + show(y0));
  };
  if (x->k != y->k) mismatch();
  switch (x->k) {
    case TT::K::Wire:
      if (x->w != y->w) mismatch();
      return;
    case TT::K::Bang:
    case TT::K::Lolli:
    case TT::K::Circ: {
      Origin mo{"E-MOD", o.span,
                "modality mismatch between " + show(x0) + " and " + show(y0)};
      if (o.code == "E-CTRL" || o.code == "E-WC") mo.code = o.code;
      solver_.equal(x->m, y->m, mo);
      break;
    }
    default:
      break;
  }
  try {
    if (x->a) unify(x->a, y->a, o);
    if (x->b) unify(x->b, y->b, o);
  } catch (const SourceError&) {
    // Report the whole types, not the innermost pieces.
    if (o.code == "E-TYPE") mismatch();
    throw;
  }
}

Inferred Checker::infer(const Term& t) {
  using K = Term::Kind;
  auto sp = t.span;
  auto circ_shape = [&] {
    return mk(TT::K::Circ, meta(), meta(), mvar());
  };
  switch (t.kind) {
    case K::UnitVal:
      return {mk(TT::K::Unit), {}};
    case K::Const:
      if (t.name == "True" || t.name == "False") return {mk(TT::K::Bool), {}};
      throw SourceError("E-TYPE", sp, "unknown constant '" + t.name + "'");
    case K::Var: {
      if (auto* i = lookup(t.name)) {
        ++binders_[*i].uses;
        return {binders_[*i].type, {}};
      }
      auto it = top_.find(t.name);
      if (it == top_.end())
        throw SourceError("E-TYPE", sp, "unbound variable '" + t.name + "'");
      if (!is_parameter_type(*it->second))
        throw SourceError("E-LIN", sp,
                          "definition '" + t.name + "' has linear type " +
                              print_type(*it->second) + " and cannot be referenced");
      return {from_type(*it->second, sp), {}};
    }
    case K::LabelRef: {
      auto* i = lookup(t.label.str());
      if (!i || !binders_[*i].label)
        throw SourceError("E-TYPE", sp, "label " + t.label.str() + " is not in the context");
      ++binders_[*i].uses;
      return {binders_[*i].type, {}};
    }
    case K::Lambda: {
      TTP a = t.ann ? from_type(*t.ann, sp) : meta();
      push(t.name, a, sp);
      auto body = infer(*t.a);
      pop();
      auto m = mvar();
      solver_.eq_meet(m.var, body.mods,
                      {"E-MOD", sp, "function modality must equal the modality of its body"});
      return {mk(TT::K::Lolli, a, body.type, m), {}};
    }
    case K::Lift: {
      std::vector<int> before;
      for (const auto& b : binders_) before.push_back(b.uses);
      auto body = infer(*t.a);
      LiftUse use{{}, sp};
      for (std::size_t i = 0; i < before.size(); ++i) {
        if (binders_[i].uses == before[i]) continue;
        if (binders_[i].label)
          throw SourceError("E-LIN", sp,
                            "lift body consumes label " + binders_[i].name);
        use.binders.push_back(i);
      }
      lifts_.push_back(std::move(use));
      auto m = mvar();
      solver_.eq_meet(m.var, body.mods,
                      {"E-MOD", sp, "lifted modality must equal the modality of its body"});
      return {mk(TT::K::Bang, body.type, nullptr, m), {}};
    }
    case K::Force: {
      auto in = infer(*t.a);
      auto want = expect(in.type, mk(TT::K::Bang, meta(), nullptr, mvar()),
                         {"E-TYPE", t.a->span, "force needs a lifted term"});
      in.mods.push_back(want->m);
      return {want->a, in.mods};
    }
    case K::App: {
      auto fn = infer(*t.a);
      auto f = prune(fn.type);
      if (f->k == TT::K::Bang) {
        fn.mods.push_back(f->m);
        f = prune(f->a);
      }
      f = expect(f, mk(TT::K::Lolli, meta(), meta(), mvar()),
                 {"E-TYPE", t.a->span, "applying a non-function"});
      auto arg = infer(*t.b);
      unify(f->a, arg.type, {"E-TYPE", t.b->span, "argument type mismatch"});
      Mods mods = fn.mods;
      mods.insert(mods.end(), arg.mods.begin(), arg.mods.end());
      mods.push_back(f->m);
      return {f->b, mods};
    }
    case K::Pair: {
      auto x = infer(*t.a);
      auto y = infer(*t.b);
      x.mods.insert(x.mods.end(), y.mods.begin(), y.mods.end());
      return {mk(TT::K::Tensor, x.type, y.type), x.mods};
    }
    case K::LetPair: {
      auto n = infer(*t.a);
      auto pr = expect(n.type, mk(TT::K::Tensor, meta(), meta()),
                       {"E-TYPE", t.a->span, "let-pair needs a tensor"});
      push(t.name, pr->a, sp);
      push(t.name2, pr->b, sp);
      auto body = infer(*t.b);
      pop();
      pop();
      n.mods.insert(n.mods.end(), body.mods.begin(), body.mods.end());
      return {body.type, n.mods};
    }
    case K::CircLit: {
      auto v = mvar();
      solver_.le(v, {ModAtom::constant(modality_of(*t.circuit))},
                 {"E-MOD", sp, "circuit literal"});
      return {mk(TT::K::Circ, from_simple(t.s, sp), from_simple(t.u, sp), v), {}};
    }
    case K::Apply: {
      auto m = infer(*t.a);
      auto c = expect(m.type, circ_shape(), {"E-TYPE", t.a->span, "apply needs a circuit"});
      auto n = infer(*t.b);
      unify(c->a, n.type, {"E-TYPE", t.b->span, "circuit input mismatch"});
      m.mods.insert(m.mods.end(), n.mods.begin(), n.mods.end());
      m.mods.push_back(c->m);
      return {c->b, m.mods};
    }
    case K::Box: {
      auto m = infer(*t.a);
      auto u = meta();
      auto fn = mk(TT::K::Lolli, from_simple(t.s, sp), u, mvar());
      auto bang = expect(m.type, mk(TT::K::Bang, fn, nullptr, mvar()),
                         {"E-TYPE", t.a->span, "box needs a lifted function"});
      auto c = mvar();
      solver_.eq_meet(c.var, {bang->m, fn->m}, {"E-MOD", sp, "boxed circuit modality"});
      simple_.emplace_back(u, sp);
      return {mk(TT::K::Circ, from_simple(t.s, sp), u, c), m.mods};
    }
    case K::Reverse: {
      auto m = infer(*t.a);
      auto c = expect(m.type, circ_shape(), {"E-TYPE", t.a->span, "reverse needs a circuit"});
      solver_.le(ModAtom::constant(Modality::reversible()), {c->m},
                 {"E-REV", sp, "reverse needs a reversible circuit (modality at least 1)"});
      return {mk(TT::K::Circ, c->b, c->a, c->m), m.mods};
    }
    case K::Controlled: {
      auto m = infer(*t.a);
      auto c = expect(m.type, circ_shape(),
                      {"E-TYPE", t.a->span, "controlled needs a circuit"});
      unify(c->a, c->b, {"E-CTRL", sp, "controlled needs a circuit with equal input and output"});
      solver_.le(ModAtom::constant(Modality::controllable()), {c->m},
                 {"E-CTRL", sp, "controlled needs a controllable circuit (modality 2)"});
      TTP s = c->a;
      if (!t.ctrl.empty()) s = mk(TT::K::Tensor, from_simple(t.ctrl.wire_type(), sp), s);
      return {mk(TT::K::Circ, s, s, ModAtom::constant(Modality::controllable())), m.mods};
    }
    case K::WithComputed: {
      auto g = infer(*t.a);
      auto gc = expect(g.type, circ_shape(),
                       {"E-TYPE", t.a->span, "withComputed needs a circuit"});
      auto h = infer(*t.b);
      auto hc = expect(h.type, circ_shape(),
                       {"E-TYPE", t.b->span, "withComputed needs a circuit"});
      Origin wc{"E-WC", t.b->span,
                "withComputed body must map the computed interface to itself"};
      unify(gc->b, hc->a, wc);
      unify(hc->a, hc->b, wc);
      solver_.le(ModAtom::constant(Modality::reversible()), {gc->m},
                 {"E-WC", t.a->span, "withComputed needs a reversible computation"});
      solver_.le(ModAtom::constant(Modality::controllable()), {hc->m},
                 {"E-WC", t.b->span, "withComputed needs a controllable body"});
      g.mods.insert(g.mods.end(), h.mods.begin(), h.mods.end());
      return {mk(TT::K::Circ, gc->a, gc->a, ModAtom::constant(Modality::controllable())),
              g.mods};
    }
  }
  throw SourceError("E-TYPE", sp, "unsupported term");
}

TypePtr Checker::resolve(const TTP& t, Span sp) const {
  auto p = prune(t);
  auto mod = [&](const ModAtom& a) -> ModHole {
    return a.is_var() ? solution_[static_cast<std::size_t>(a.var)] : a.value;
  };
  switch (p->k) {
    case TT::K::Unit:
    case TT::K::Meta:  // unconstrained: any type works, pick the simplest
      return Type::unit();
    case TT::K::Bool:
      return Type::boolean();
    case TT::K::Wire:
      return Type::wire_of(p->w);
    case TT::K::Bang:
      return Type::bang(mod(p->m), resolve(p->a, sp));
    case TT::K::Lolli:
      return Type::lolli(resolve(p->a, sp), mod(p->m), resolve(p->b, sp));
    case TT::K::Tensor:
      return Type::tensor(resolve(p->a, sp), resolve(p->b, sp));
    case TT::K::Circ: {
      auto s = as_simple(*resolve(p->a, sp));
      auto u = as_simple(*resolve(p->b, sp));
      if (!s || !u) throw SourceError("E-TYPE", sp, "circuit interface must be a simple type");
      return Type::circ(mod(p->m), *s, *u);
    }
  }
  return Type::unit();
}

void Checker::finish() {
  solution_ = solver_.solve();
  for (const auto& [u, sp] : simple_)
    if (!as_simple(*resolve(u, sp)))
      throw SourceError("E-TYPE", sp,
                        "boxed function must return a simple type, not " +
                            print_type(*resolve(u, sp)));
  for (const auto& b : binders_) {
    auto ty = resolve(b.type, b.span);
    if (b.label) {
      if (b.uses != 1)
        throw SourceError("E-LIN", b.span,
                          "label " + b.name + " is used " + std::to_string(b.uses) +
                              " times, expected once");
      continue;
    }
    if (!is_parameter_type(*ty) && b.uses != 1)
      throw SourceError("E-LIN", b.span,
                        "linear variable '" + b.name + "' of type " + print_type(*ty) +
                            " is used " + std::to_string(b.uses) + " times");
  }
  for (const auto& l : lifts_)
    for (auto i : l.binders)
      if (!is_parameter_type(*resolve(binders_[i].type, l.span)))
        throw SourceError("E-LIN", l.span,
                          "lift body captures linear variable '" + binders_[i].name + "'");
}

// Thrown to skip a definition that depends on one that already failed.
struct Dependent {};

void scan_dependencies(const Term& t, const std::set<std::string>& failed,
                       std::set<std::string> bound) {
  if (t.kind == Term::Kind::Var && !bound.contains(t.name) && failed.contains(t.name))
    throw Dependent{};
  if (t.kind == Term::Kind::Lambda) bound.insert(t.name);
  if (t.kind == Term::Kind::LetPair) {
    scan_dependencies(*t.a, failed, bound);
    bound.insert(t.name);
    bound.insert(t.name2);
    scan_dependencies(*t.b, failed, bound);
    return;
  }
  if (t.a) scan_dependencies(*t.a, failed, bound);
  if (t.b) scan_dependencies(*t.b, failed, bound);
}

}  // namespace

TermTyping check_term(const TermPtr& t, const GateSet& gates, const TopEnv& top,
                      const std::vector<Wire>& labels, const TypePtr& expected) {
  Checker ck(gates, top);
  for (const auto& w : labels) ck.bind_label(w);
  auto r = ck.infer(*t);
  if (expected)
    ck.unify(ck.from_type(*expected, t->span), r.type, {"E-TYPE", t->span, "type mismatch"});
  ck.finish();
  return {ck.resolve(r.type, t->span), ck.judgment(r.mods)};
}

ProgramTyping check_program(const Program& p, const GateSet& gates) {
  ProgramTyping out;
  TopEnv top;
  std::set<std::string> failed;
  for (const auto& d : p.defs) {
    try {
      scan_dependencies(*d.body, failed, {});
      Checker ck(gates, top);
      auto r = ck.infer(*d.body);
      if (d.declared)
        ck.unify(ck.from_type(*d.declared, d.span), r.type,
                 {"E-TYPE", d.span, "definition '" + d.name + "' does not match its type"});
      ck.finish();
      TypedDefinition td{d.name, ck.resolve(r.type, d.span), ck.judgment(r.mods)};
      top[d.name] = td.type;
      out.defs.push_back(std::move(td));
    } catch (const Dependent&) {
      failed.insert(d.name);
    } catch (const SourceError& e) {
      failed.insert(d.name);
      Span sp = e.span().known() ? e.span() : d.span;
      out.errors.push_back({e.code(), sp, e.what()});
    }
  }
  return out;
}

Modality check_configuration(const Circuit& c, const TermPtr& m, const TypePtr& a,
                             const std::vector<Wire>& rest, const GateSet& gates,
                             const TopEnv& top) {
  const auto& sigma = c.outputs();
  std::vector<Wire> used;
  for (const auto& w : sigma)
    if (std::find(rest.begin(), rest.end(), w) == rest.end()) used.push_back(w);
  for (const auto& w : rest)
    if (std::find(sigma.begin(), sigma.end(), w) == sigma.end())
      throw SourceError("E-CONFIG", m->span,
                        "ill-typed configuration: " + w.label.str() + " is not a circuit output");
  try {
    auto r = check_term(m, gates, top, used, a);
    return meet(modality_of(c), r.modality);
  } catch (const SourceError& e) {
    throw SourceError("E-CONFIG", e.span(),
                      std::string("ill-typed configuration: [") + e.code() + "] " + e.what());
  }
}

}  // namespace pqc
