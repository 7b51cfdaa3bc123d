#include <gtest/gtest.h>

#include <random>

#include "pqc/typecheck.hpp"
#include "programs.hpp"
#include "termgen.hpp"

using namespace pqc;
using namespace pqc::testing;

namespace {

TermPtr term(std::string_view src) { return TermGen::elaborate(parse_term(src)); }

TermTyping typed(std::string_view src) { return check_term(term(src), gates()); }

std::string code_of(std::string_view src, Span* span = nullptr) {
  try {
    typed(src);
  } catch (const SourceError& e) {
    if (span) *span = e.span();
    return e.code();
  }
  return "ok";
}

const TypedDefinition* find(const ProgramTyping& r, const std::string& name) {
  for (const auto& d : r.defs)
    if (d.name == name) return &d;
  return nullptr;
}

TypePtr qubit() { return Type::wire_of(WireType::qubit()); }
SimpleType q1() { return SimpleType::wire(WireType::qubit()); }
SimpleType q2() { return SimpleType::tensor(q1(), q1()); }

}  // namespace

// --- solver -----------------------------------------------------------------

TEST(Solver, NoConstraintsIsTop) {
  ModalitySolver s;
  s.fresh();
  s.fresh();
  auto r = s.solve();
  EXPECT_EQ(r, (std::vector<Modality>{Modality(2), Modality(2)}));
}

TEST(Solver, MeetDefinition) {
  ModalitySolver s;
  int m = s.fresh();
  s.eq_meet(m, {ModAtom::constant(Modality(2)), ModAtom::constant(Modality(1))}, {});
  EXPECT_EQ(s.solve()[0], Modality(1));
}

TEST(Solver, GeneralApplyCannotBeControllable) {
  ModalitySolver s;
  int m = s.fresh();
  s.eq_meet(m, {ModAtom::constant(Modality(0))}, {});
  s.le(ModAtom::constant(Modality(2)), {ModAtom::variable(m)}, {"E-CTRL", {3, 4}, "needs 2"});
  try {
    s.solve();
    FAIL();
  } catch (const SourceError& e) {
    EXPECT_EQ(e.code(), "E-CTRL");
    EXPECT_EQ(e.span(), (Span{3, 4}));
  }
}

TEST(Solver, UnitPropagationThroughEquality) {
  // x = min(y, 2), x <= 1 forces y = 1 while z stays free.
  ModalitySolver s;
  int x = s.fresh(), y = s.fresh(), z = s.fresh();
  s.eq_meet(x, {ModAtom::variable(y)}, {});
  s.le(ModAtom::variable(x), {ModAtom::constant(Modality(1))}, {});
  auto r = s.solve();
  EXPECT_EQ(r[static_cast<std::size_t>(x)], Modality(1));
  EXPECT_EQ(r[static_cast<std::size_t>(y)], Modality(1));
  EXPECT_EQ(r[static_cast<std::size_t>(z)], Modality(2));
}

TEST(Solver, AmbiguousChoiceHasNoGreatest) {
  ModalitySolver s;
  int x = s.fresh(), a = s.fresh(), b = s.fresh();
  s.eq_meet(x, {ModAtom::variable(a), ModAtom::variable(b)}, {});
  s.le(ModAtom::variable(x), {ModAtom::constant(Modality(0))}, {});
  EXPECT_THROW(s.solve(), SourceError);
}

class Principality : public ::testing::TestWithParam<int> {};

// Pointwise-greatest solution by enumeration, or nullopt when the
// solutions have no greatest element.
std::optional<std::vector<Modality>> brute_force(const ModalitySolver& s) {
  const std::size_t n = s.size();
  std::vector<std::vector<Modality>> sols;
  std::vector<int> digits(n, 0);
  for (int code = 0, total = static_cast<int>(std::pow(3, n)); code < total; ++code) {
    int c = code;
    std::vector<Modality> a;
    for (std::size_t i = 0; i < n; ++i, c /= 3) a.emplace_back(c % 3);
    if (s.satisfied_by(a)) sols.push_back(a);
  }
  for (const auto& cand : sols) {
    bool top = true;
    for (const auto& other : sols)
      for (std::size_t i = 0; i < n && top; ++i)
        if (other[i] > cand[i]) top = false;
    if (top) return cand;
  }
  return std::nullopt;
}

TEST_P(Principality, MatchesEnumeration) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()));
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  ModalitySolver s;
  const int n = 1 + pick(6);
  for (int i = 0; i < n; ++i) s.fresh();
  auto atom = [&] {
    return pick(4) == 0 ? ModAtom::constant(Modality(pick(3))) : ModAtom::variable(pick(n));
  };
  auto atoms = [&] {
    std::vector<ModAtom> r;
    for (int i = 0, k = pick(3); i < k; ++i) r.push_back(atom());
    return r;
  };
  for (int i = 0, k = pick(6); i < k; ++i) {
    switch (pick(4)) {
      case 0: s.eq_meet(pick(n), atoms(), {}); break;
      case 1: s.le(ModAtom::variable(pick(n)), atoms(), {}); break;
      case 2: s.le(ModAtom::constant(Modality(1 + pick(2))), {atom()}, {}); break;
      default: s.equal(atom(), atom(), {}); break;
    }
  }
  auto expected = brute_force(s);
  if (expected) {
    EXPECT_EQ(s.solve(), *expected);
  } else {
    EXPECT_THROW(s.solve(), SourceError);
  }
}

INSTANTIATE_TEST_SUITE_P(Random, Principality, ::testing::Range(0, 300));

// --- terms ------------------------------------------------------------------

TEST(CheckTerm, IdentityFunction) {
  auto r = typed("\\(x : Qubit) . x");
  EXPECT_TRUE(type_equal(*r.type, *Type::lolli(qubit(), Modality(2), qubit())));
  EXPECT_EQ(r.modality, Modality(2));
}

TEST(CheckTerm, UnconstrainedBinderDefaultsToUnit) {
  auto r = typed("\\x . x");
  EXPECT_TRUE(type_equal(*r.type, *Type::lolli(Type::unit(), Modality(2), Type::unit())));
}

TEST(CheckTerm, GateApplicationModalities) {
  EXPECT_EQ(typed("H (Init0 ())").modality, Modality(1));
  EXPECT_EQ(typed("Meas (H (Init0 ()))").modality, Modality(0));
  auto f = typed("\\(q : Qubit) . H q");
  EXPECT_TRUE(type_equal(*f.type, *Type::lolli(qubit(), Modality(2), qubit())));
  auto g = typed("\\(q : Qubit) . Meas q");
  EXPECT_TRUE(type_equal(*g.type,
                         *Type::lolli(qubit(), Modality(0), Type::wire_of(WireType::bit()))));
  EXPECT_EQ(g.modality, Modality(2));
}

TEST(CheckTerm, BoxedCircuits) {
  auto r = typed("box (Qubit * Qubit) CNOT");
  EXPECT_TRUE(type_equal(*r.type, *Type::circ(Modality(2), q2(), q2())));
  auto m = typed("box Qubit Meas");
  EXPECT_TRUE(type_equal(*m.type, *Type::circ(Modality(0), q1(), SimpleType::wire(WireType::bit()))));
  auto rev = typed("reverse (box Qubit (lift (\\q . let u = Term0 q in Init0 u)))");
  EXPECT_TRUE(type_equal(*rev.type, *Type::circ(Modality(1), q1(), q1())));
}

TEST(CheckTerm, ControlPrependsControlWires) {
  auto r = typed("controlled[+-] (box Qubit H)");
  auto s = SimpleType::tensor(q2(), q1());
  EXPECT_TRUE(type_equal(*r.type, *Type::circ(Modality(2), s, s))) << print_type(*r.type);
  auto e = typed("controlled[] (box Qubit H)");
  EXPECT_TRUE(type_equal(*e.type, *Type::circ(Modality(2), q1(), q1())));
}

TEST(CheckTerm, WithComputedIsControllable) {
  auto r = typed(
      "withComputed (box Qubit (lift (\\q . let a = Init0 () in CNOT q a))) "
      "(box (Qubit * Qubit) CZ)");
  EXPECT_TRUE(type_equal(*r.type, *Type::circ(Modality(2), q1(), q1())));
}

TEST(CheckTerm, SubsumptionOnCircuitLiterals) {
  // A modality-2 box passed where Circ1 is declared.
  auto r = typed("(\\(c : Circ1(Qubit, Qubit)) . c) (box Qubit H)");
  EXPECT_TRUE(type_equal(*r.type, *Type::circ(Modality(1), q1(), q1())));
}

TEST(Rejection, ReverseNeedsReversible) {
  Span sp;
  EXPECT_EQ(code_of("reverse (box Qubit Meas)", &sp), "E-REV");
  EXPECT_EQ(sp, (Span{1, 1}));
}

TEST(Rejection, ControlNeedsControllable) {
  EXPECT_EQ(code_of("controlled (box Qubit (lift (\\q . let u = Term0 q in Init0 u)))"), "E-CTRL");
  EXPECT_EQ(code_of("controlled (box Qubit (lift (\\q . (q, ()))))"), "E-CTRL");
  EXPECT_EQ(code_of("controlled (box Qubit Meas)"), "E-CTRL");
}

TEST(Rejection, WithComputedRules) {
  EXPECT_EQ(code_of("withComputed (box Qubit Meas) (box Bit (lift (\\b . b)))"), "E-WC");
  EXPECT_EQ(code_of("withComputed (box Qubit H) "
                    "(box Qubit (lift (\\q . let u = Term0 q in Init0 u)))"),
            "E-WC");
  EXPECT_EQ(code_of("withComputed (box Qubit H) (box (Qubit * Qubit) CNOT)"), "E-WC");
}

TEST(Rejection, Linearity) {
  EXPECT_EQ(code_of("\\(x : Qubit) . (x, x)"), "E-LIN");
  EXPECT_EQ(code_of("\\(x : Qubit) . ()"), "E-LIN");
  EXPECT_EQ(code_of("\\(x : Qubit) . lift x"), "E-LIN");
  EXPECT_EQ(code_of("\\(f : Qubit -o Qubit) . (\\(q : Qubit) . f (f q))"), "E-LIN");
  EXPECT_EQ(code_of("\\(x : Unit) . (x, x)"), "ok");
  EXPECT_EQ(code_of("\\(c : Circ(Qubit, Qubit)) . (c, c)"), "ok");
}

TEST(Rejection, TypeErrors) {
  EXPECT_EQ(code_of("H ()"), "E-TYPE");
  EXPECT_EQ(code_of("() ()"), "E-TYPE");
  EXPECT_EQ(code_of("apply((), ())"), "E-TYPE");
  EXPECT_EQ(code_of("let (a, b) = () in a"), "E-TYPE");
  EXPECT_EQ(code_of("box Qubit (lift (\\q . \\(r : Qubit) . (q, r)))"), "E-TYPE");
  EXPECT_EQ(code_of("\\(x : Qutrit) . x"), "E-TYPE");
  EXPECT_EQ(code_of("True"), "ok");
}

TEST(Rejection, ModalityAnnotationMustBeExact) {
  // Gates may drop modality through their circuit literal; plain lambdas cannot.
  EXPECT_EQ(code_of("(\\(f : Qubit -o1 Qubit) . f) (\\(q : Qubit) . q)"), "E-MOD");
  EXPECT_EQ(code_of("(\\(f : Qubit -o1 Qubit) . f) (\\(q : Qubit) . H q)"), "ok");
  EXPECT_EQ(code_of("(\\(f : Qubit -o0 Bit) . f) (\\(q : Qubit) . Meas q)"), "ok");
}

// --- programs ---------------------------------------------------------------

TEST(CheckProgram, SwapPrograms) {
  auto p = load_program(
      "f : !(Qubit * Qubit -> Qubit * Qubit)\n"
      "f input = let (x, y) = input in (y, x)\n"
      "g : !(Qubit * Qubit -> Qubit * Qubit)\n"
      "g input = let (x, y) = input in Swap x y\n"
      "cf : Circ(Qubit * (Qubit * Qubit), Qubit * (Qubit * Qubit))\n"
      "cf = controlled (box (Qubit * Qubit) f)\n");
  auto r = check_program(p, gates());
  ASSERT_TRUE(r.ok()) << r.errors[0].message;
  auto* f = find(r, "f");
  ASSERT_NE(f, nullptr);
  auto ff = Type::bang(Modality(2), Type::lolli(Type::from_simple(q2()), Modality(2),
                                               Type::from_simple(q2())));
  EXPECT_TRUE(type_equal(*f->type, *ff)) << print_type(*f->type);
  auto* cf = find(r, "cf");
  auto s3 = SimpleType::tensor(q1(), q2());
  EXPECT_TRUE(type_equal(*cf->type, *Type::circ(Modality(2), s3, s3)));
}

TEST(CheckProgram, CczAcceptedAtModalityTwo) {
  auto r = check_program(load_corpus("ccz.pqc"), gates());
  ASSERT_TRUE(r.ok()) << r.errors[0].message;
  auto* ccz = find(r, "my_ccz");
  ASSERT_NE(ccz, nullptr);
  EXPECT_EQ(ccz->type->kind, Type::Kind::Circ);
  EXPECT_EQ(ccz->type->mod, Modality(2));
  EXPECT_EQ(find(r, "box_cnot_circuit")->type->mod, Modality(1));
  EXPECT_EQ(find(r, "ctrl_ccz")->type->mod, Modality(2));
}

TEST(CheckProgram, ManualCczCannotBeControlled) {
  auto r = check_program(load_corpus("reject/ccz_manual.pqc"), gates());
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0].code, "E-CTRL");
  EXPECT_EQ(r.errors[0].span.line, 45);
  ASSERT_NE(find(r, "my_ccz'"), nullptr);
  EXPECT_EQ(find(r, "my_ccz'")->type->mod, Modality(1));
  EXPECT_EQ(find(r, "ctrl_my_ccz'"), nullptr);
}

TEST(CheckProgram, DeclaredModalityMismatch) {
  auto r = check_program(load_program("c : Circ2(Qubit, Bit)\nc = box Qubit Meas\n"), gates());
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0].code, "E-MOD");
}

TEST(CheckProgram, DependentsOfFailuresAreSkipped) {
  auto r = check_program(load_program("a : Circ(Bit, Qubit)\na = reverse (box Qubit Meas)\n"
                                      "b : Circ(Qubit, Qubit)\nb = a\n"),
                         gates());
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0].code, "E-REV");
  EXPECT_EQ(r.errors[0].span.line, 2);
}

TEST(CheckProgram, LinearDefinitionsCannotBeShared) {
  auto r = check_program(load_program("q : Qubit\nq = Init0 ()\nm = Meas q\n"), gates());
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0].code, "E-LIN");
}

// --- configurations ---------------------------------------------------------

TEST(Configuration, EmptyCircuitGivesTermModality) {
  auto m = term("box Qubit H");
  auto ty = typed("box Qubit H").type;
  EXPECT_EQ(check_configuration(Circuit{}, m, ty, {}, gates()), Modality(2));
}

TEST(Configuration, MeasuringCircuitCapsModality) {
  LabelSupply s;
  Circuit c = single_gate("Meas", s);
  Label out = c.outputs()[0].label;
  auto m = Term::label_ref(out);
  auto bit = Type::wire_of(WireType::bit());
  EXPECT_EQ(check_configuration(c, m, bit, {}, gates()), Modality(0));
  // Leaving the bit in Sigma' with a unit term is also fine.
  EXPECT_EQ(check_configuration(c, Term::unit(), Type::unit(), {c.outputs()[0]}, gates()),
            Modality(0));
}

TEST(Configuration, LabelsMustBeConsumedOnce) {
  LabelSupply s;
  Circuit c = single_gate("H", s);
  auto l = c.outputs()[0].label;
  auto q = Type::wire_of(WireType::qubit());
  EXPECT_THROW(check_configuration(c, Term::unit(), Type::unit(), {}, gates()), SourceError);
  EXPECT_THROW(check_configuration(c, Term::pair(Term::label_ref(l), Term::label_ref(l)),
                                   Type::tensor(q, q), {}, gates()),
               SourceError);
  try {
    check_configuration(c, Term::label_ref(Label{999}), q, {}, gates());
    FAIL();
  } catch (const SourceError& e) {
    EXPECT_EQ(e.code(), "E-CONFIG");
  }
}

// --- properties -------------------------------------------------------------

class Generated : public ::testing::TestWithParam<int> {};

TEST_P(Generated, ValuesHaveModalityTwo) {
  TermGen gen(static_cast<std::uint64_t>(GetParam()));
  auto c = TermGen::elaborate(gen.circuit(2).term);
  // Lambdas, lifts and pairs of values around a possibly ill-typed body.
  auto lam = Term::lambda("u", Term::app(Term::lambda("w", Term::unit(), Type::unit()), Term::var("u")),
                          Type::unit());
  for (const auto& v : {lam, Term::lift(lam), Term::pair(lam, Term::unit()),
                        Term::lambda("k", Term::apply(c, Term::var("k")))}) {
    try {
      EXPECT_EQ(check_term(v, gates()).modality, Modality(2)) << print_term(*v);
    } catch (const SourceError&) {
    }
  }
}

TEST_P(Generated, AppModalityIsMeetOfParts) {
  TermGen gen(static_cast<std::uint64_t>(GetParam()) + 1000);
  auto body = TermGen::elaborate(gen.simple_main(2));
  TermTyping whole;
  try {
    whole = check_term(body, gates());
  } catch (const SourceError&) {
    return;
  }
  // Every application node: function, argument and arrow modalities.
  std::function<void(const TermPtr&)> visit = [&](const TermPtr& t) {
    if (t->kind == Term::Kind::App) {
      // Closed applications only: check the pieces in isolation.
      try {
        auto f = check_term(t->a, gates());
        auto x = check_term(t->b, gates());
        auto app = check_term(t, gates());
        auto ft = f.type;
        Modality m = meet(f.modality, x.modality);
        if (ft->kind == Type::Kind::Bang) {
          m = meet(m, *ft->mod);
          ft = ft->a;
        }
        m = meet(m, *ft->mod);
        EXPECT_EQ(app.modality, m) << print_term(*t);
      } catch (const SourceError&) {
        // Open subterm.
      }
    }
    if (t->a) visit(t->a);
    if (t->b) visit(t->b);
  };
  visit(body);
}

TEST_P(Generated, WeakeningByParameters) {
  TermGen gen(static_cast<std::uint64_t>(GetParam()) + 2000);
  auto t = TermGen::elaborate(gen.circuit(2).term);
  TermTyping base;
  try {
    base = check_term(t, gates());
  } catch (const SourceError&) {
    return;
  }
  TopEnv extra{{"unused", Type::circ(Modality(0), q1(), q1())}};
  auto more = check_term(t, gates(), extra);
  EXPECT_TRUE(type_equal(*base.type, *more.type));
  EXPECT_EQ(base.modality, more.modality);
  // An unused parameter binder: the body keeps its type and modality.
  auto wrapped = Term::lambda("w", t, Type::bang(Modality(2), Type::unit()));
  auto w = check_term(wrapped, gates());
  ASSERT_EQ(w.type->kind, Type::Kind::Lolli);
  EXPECT_TRUE(type_equal(*w.type->b, *base.type));
  EXPECT_EQ(*w.type->mod, base.modality);
}

INSTANTIATE_TEST_SUITE_P(Random, Generated, ::testing::Range(0, 200));

TEST(Generated, MostGeneratedTermsTypecheck) {
  int ok = 0;
  for (int i = 0; i < 300; ++i) {
    TermGen gen(static_cast<std::uint64_t>(i));
    try {
      check_term(TermGen::elaborate(gen.circuit(2).term), gates());
      ++ok;
    } catch (const SourceError&) {
    }
  }
  EXPECT_GT(ok, 150);
}
