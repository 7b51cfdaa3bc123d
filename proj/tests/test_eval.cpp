#include <gtest/gtest.h>

#include <filesystem>

#include "pqc/eval.hpp"
#include "pqc/typecheck.hpp"
#include "preservation.hpp"
#include "programs.hpp"
#include "termgen.hpp"

using namespace pqc;
using namespace pqc::testing;
using RK = RuntimeError::Kind;

namespace {

SimpleType q1() { return SimpleType::wire(WireType::qubit()); }
SimpleType q2() { return SimpleType::tensor(q1(), q1()); }

TermPtr term(std::string_view src) { return TermGen::elaborate(parse_term(src)); }

Configuration run(std::string_view src, LabelSupply& s, EvalOptions o = {}) {
  Evaluator ev(gates(), s, std::move(o));
  return ev.eval(Configuration{Circuit{}, term(src)});
}

RK error_kind(std::string_view src) {
  LabelSupply s;
  try {
    run(src, s);
  } catch (const RuntimeError& e) {
    return e.kind;
  }
  ADD_FAILURE() << "no runtime error for " << src;
  return RK::StepLimit;
}

std::vector<std::string> corpus_programs() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(PQC_CORPUS_DIR))
    if (e.path().extension() == ".pqc") out.push_back(e.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

// |x, y> -> |y, x xor y> written out entry by entry.
LinearMap cnot_after_swap() {
  LinearMap m = LinearMap::Zero(4, 4);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) m((y << 1) | (x ^ y), (x << 1) | y) = 1;
  return m;
}

}  // namespace

// --- helpers ----------------------------------------------------------------

TEST(Gen, Shapes) {
  LabelSupply s;
  auto [u, su] = gen(SimpleType::unit(), s);
  EXPECT_EQ(u->kind, Term::Kind::UnitVal);
  EXPECT_TRUE(su.empty());
  auto [p, sp] = gen(q2(), s);
  ASSERT_EQ(p->kind, Term::Kind::Pair);
  EXPECT_EQ(labels_of(*p), (std::vector<Label>{Label{0}, Label{1}}));
  EXPECT_EQ(sp, (std::vector<Wire>{{Label{0}, WireType::qubit()}, {Label{1}, WireType::qubit()}}));
  auto [n, sn] = gen(SimpleType::tensor(q1(), q2()), s);
  EXPECT_EQ(sn.size(), 3u);
  EXPECT_EQ(n->b->kind, Term::Kind::Pair);
}

TEST(Ungen, Examples) {
  EXPECT_EQ(ungen(*Term::unit(), {}), SimpleType::unit());
  std::vector<Wire> sigma{{Label{3}, WireType::qubit()}, {Label{4}, WireType::qubit()}};
  EXPECT_EQ(ungen(*Term::pair(Term::label_ref(Label{3}), Term::label_ref(Label{4})), sigma), q2());
  EXPECT_EQ(ungen(*Term::label_ref(Label{0}), {{Label{0}, WireType::bit()}}),
            SimpleType::wire(WireType::bit()));
  EXPECT_THROW(ungen(*Term::label_ref(Label{9}), sigma), RuntimeError);
}

TEST(InterpSimple, IdentityAndSymmetry) {
  std::vector<Wire> sigma{{Label{0}, WireType::qubit()}, {Label{1}, WireType::qubit()}};
  auto id = interp_simple(*Term::pair(Term::label_ref(Label{0}), Term::label_ref(Label{1})), sigma);
  EXPECT_TRUE(id.items().empty());
  auto sw = interp_simple(*Term::pair(Term::label_ref(Label{1}), Term::label_ref(Label{0})), sigma);
  EXPECT_EQ(count_items(sw, false).perms, 1u);
  EXPECT_TRUE(maps_equal(circuit_to_map(sw), wire_permutation({1, 0}), 1e-12));
  LabelSupply s(10);
  auto round = compose(sw, dagger(sw, gates()), s);
  EXPECT_TRUE(maps_equal(circuit_to_map(round), LinearMap::Identity(4, 4), 1e-12));
}

TEST(Append, OntoEmptyStateIsTheCircuit) {
  LabelSupply s;
  auto [a, sigma] = gen(q2(), s);
  Circuit d = single_gate("CNOT", s);
  auto r = append(Circuit(sigma, sigma, {}), *a, d, q2(), s);
  EXPECT_TRUE(structurally_equal(r.circuit, d));
  EXPECT_EQ(labels_of(*r.outputs), r.circuit.output_labels());
}

TEST(Append, ModalityIsMeet) {
  LabelSupply s;
  Circuit m = single_gate("Meas", s);
  Circuit h = single_gate("H", s);
  auto [a, sigma] = gen(q1(), s);
  auto withh = append(compose(single_gate("H", s), m, s), *Term::unit(),
                      Circuit{}, SimpleType::unit(), s);
  EXPECT_EQ(modality_of(withh.circuit), Modality(0));
  auto r = append(Circuit(sigma, sigma, {}), *a, h, q1(), s);
  EXPECT_EQ(modality_of(r.circuit), Modality(2));
}

TEST(Append, LabelSplitFailures) {
  LabelSupply s;
  auto [a, sigma] = gen(q2(), s);
  Circuit state(sigma, sigma, {});
  Circuit h = single_gate("H", s);
  try {
    append(state, *Term::label_ref(Label{77}), h, q1(), s);
    FAIL();
  } catch (const RuntimeError& e) {
    EXPECT_EQ(e.kind, RK::LabelSplitFailure);
  }
  EXPECT_THROW(append(state, *Term::unit(), h, q1(), s), RuntimeError);
  auto twice = Term::pair(Term::label_ref(Label{0}), Term::label_ref(Label{0}));
  EXPECT_THROW(append(state, *twice, single_gate("CNOT", s), q2(), s), RuntimeError);
}

// --- evaluation examples ----------------------------------------------------

TEST(Eval, SingleGateApplication) {
  LabelSupply s;
  auto r = run("apply(box Qubit H, Init0 ())", s);
  EXPECT_EQ(r.term->kind, Term::Kind::LabelRef);
  auto counts = count_items(r.circuit, false);
  EXPECT_EQ(counts.gates, 2u);
  EXPECT_EQ(r.circuit.outputs().size(), 1u);
}

TEST(Eval, SwappedCnotIsOneGateAndOneCrossing) {
  auto r = run_main(load_corpus("cnot_swapped.pqc"), gates());
  ASSERT_TRUE(r.circuit);
  auto counts = count_items(*r.circuit, true);
  EXPECT_EQ(counts.gates, 1u);
  EXPECT_EQ(counts.perms, 1u);
  EXPECT_TRUE(r.state.items().empty());
  EXPECT_LT(max_abs_diff(circuit_to_map(*r.circuit), cnot_after_swap()), 1e-12);
}

TEST(Eval, LogicalSwapIsPurePermutation) {
  auto f = run_main(load_corpus("swap_logical.pqc"), gates());
  auto g = run_main(load_corpus("swap_gate.pqc"), gates());
  ASSERT_TRUE(f.circuit && g.circuit);
  EXPECT_EQ(count_items(*f.circuit, true).gates, 0u);
  EXPECT_EQ(count_items(*f.circuit, true).perms, 1u);
  EXPECT_EQ(count_items(*g.circuit, true).gates, 1u);
  EXPECT_TRUE(maps_equal(circuit_to_map(*f.circuit), circuit_to_map(*g.circuit), 1e-10));
}

TEST(Eval, ControlledSwapsAreFredkin) {
  auto fredkin = controlled_map(ControlSpec::black(), gate_matrix(*gate("SWAP")));
  for (const char* name : {"ctrl_swap_logical.pqc", "ctrl_swap_gate.pqc"}) {
    auto r = run_main(load_corpus(name), gates());
    ASSERT_TRUE(r.circuit);
    EXPECT_LT(max_abs_diff(circuit_to_map(*r.circuit), fredkin), 1e-10) << name;
  }
}

TEST(Eval, CczFromCorpus) {
  auto p = load_corpus("ccz.pqc");
  auto ccz = run_main(p, gates(), "my_ccz");
  ASSERT_TRUE(ccz.circuit);
  LinearMap expected = LinearMap::Identity(8, 8);
  expected(7, 7) = -1;
  EXPECT_LT(max_abs_diff(circuit_to_map(*ccz.circuit), expected), 1e-9);

  auto ctrl = run_main(p, gates(), "ctrl_ccz");
  ASSERT_TRUE(ctrl.circuit);
  LabelSupply s(100000);
  auto flat = forget_colors(*ctrl.circuit, gates(), s);
  std::size_t controlled_t = 0, other_controls = 0;
  for (const auto& item : flat.items()) {
    auto* g = std::get_if<GateInstance>(&item);
    if (!g || g->controls.empty()) continue;
    if (g->name() == "T") ++controlled_t;
    else ++other_controls;
  }
  EXPECT_EQ(controlled_t, 7u);
  EXPECT_EQ(other_controls, 0u);
  EXPECT_LT(max_abs_diff(circuit_to_map(*ctrl.circuit),
                         controlled_map(ControlSpec::black(), expected)),
            1e-9);
}

TEST(Eval, Determinism) {
  for (const auto& name : corpus_programs()) {
    auto p = load_corpus(name);
    auto a = run_main(p, gates());
    auto b = run_main(p, gates());
    EXPECT_TRUE(structurally_equal(a.state, b.state)) << name;
    EXPECT_TRUE(term_equal(*a.value, *b.value)) << name;
  }
}

TEST(Eval, StepCeiling) {
  EvalOptions o;
  o.step_limit = 5;
  LabelSupply s;
  try {
    run("box (Qubit * Qubit) CNOT", s, o);
    FAIL();
  } catch (const RuntimeError& e) {
    EXPECT_EQ(e.kind, RK::StepLimit);
  }
}

TEST(Eval, RuntimeErrorExamples) {
  EXPECT_EQ(error_kind("reverse (box Qubit Meas)"), RK::ReverseIrreversible);
  EXPECT_EQ(error_kind("controlled (box Qubit (lift (\\q . let u = Term0 q in Init0 u)))"),
            RK::ControlUncontrollable);
  EXPECT_EQ(error_kind("controlled (box Qubit Meas)"), RK::ControlUncontrollable);
  EXPECT_EQ(error_kind("withComputed (box Qubit Meas) (box Bit (lift (\\b . b)))"), RK::WcError);
  EXPECT_EQ(error_kind("apply((), ())"), RK::NotACircuit);
  EXPECT_EQ(error_kind("() ()"), RK::NotAFunction);
  EXPECT_EQ(error_kind("let (a, b) = () in a"), RK::NotAPair);
  EXPECT_EQ(error_kind("apply(box Qubit H, ())"), RK::LabelSplitFailure);
  EXPECT_EQ(error_kind("box Qubit (lift (\\q . lift q))"), RK::NotSimpleTerm);
}

TEST(Substitute, RespectsShadowing) {
  auto v = Term::unit();
  auto t = parse_term("(x, \\x . x, let (x, y) = x in x)", {"x"});
  auto r = substitute(t, "x", v);
  EXPECT_EQ(print_term(*r), "((), (\\x . x, let (x, y) = () in x))");
}

// --- corpus and preservation ------------------------------------------------

TEST(Corpus, EveryProgramChecksAndRuns) {
  auto names = corpus_programs();
  EXPECT_GE(names.size(), 20u);
  std::uint64_t steps = 0;
  for (const auto& name : names) {
    auto p = load_corpus(name);
    auto typing = check_program(p, gates());
    ASSERT_TRUE(typing.ok()) << name << ": " << typing.errors[0].message;
    PreservationChecker check(gates());
    auto r = run_main(p, gates(), "main", check.options());
    steps += check.steps();
    EXPECT_TRUE(check.failures().empty()) << name << ": " << check.failures()[0];
    // The value has the declared type of main.
    TypePtr main_type = typing.defs.back().type;
    std::set<Label> used;
    collect_labels(*r.value, used);
    std::vector<Wire> rest;
    for (const auto& w : r.state.outputs())
      if (!used.contains(w.label)) rest.push_back(w);
    EXPECT_NO_THROW(check_configuration(r.state, r.value, main_type, rest, gates())) << name;
  }
  EXPECT_GE(steps, 1000u);
}

TEST(Corpus, RejectionsCarryTheirCode) {
  for (const auto& e : std::filesystem::directory_iterator(corpus_path("reject"))) {
    auto src = read_file(e.path().string());
    auto at = src.find("-- expect: ");
    ASSERT_NE(at, std::string::npos) << e.path();
    auto code = src.substr(at + 11, src.find('\n', at) - at - 11);
    std::string got = "none";
    try {
      auto r = check_program(load_program(src), gates());
      if (!r.ok()) {
        got = r.errors[0].code;
        EXPECT_TRUE(r.errors[0].span.known()) << e.path();
      }
    } catch (const SourceError& err) {
      got = err.code();
    }
    EXPECT_EQ(got, code) << e.path();
  }
}

// --- fuzzing ----------------------------------------------------------------

TEST(Fuzz, WellTypedTermsNeverFail) {
  int checked = 0, attempts = 0;
  std::uint64_t steps = 0;
  for (std::uint64_t seed = 0; checked < 600 && attempts < 4000; ++seed, ++attempts) {
    TermGen gen(seed);
    TermPtr t = TermGen::elaborate(seed % 3 == 0 ? gen.simple_main(2) : gen.circuit(2).term);
    TermTyping typing;
    try {
      typing = check_term(t, gates());
    } catch (const SourceError&) {
      continue;
    }
    ++checked;
    LabelSupply s;
    PreservationChecker check(gates());
    Evaluator ev(gates(), s, seed % 10 == 0 ? check.options() : EvalOptions{});
    try {
      auto r = ev.eval(Configuration{Circuit{}, t});
      steps += ev.steps();
      if (typing.type->kind == Type::Kind::Circ) {
        ASSERT_EQ(r.term->kind, Term::Kind::CircLit);
        EXPECT_EQ(r.term->circuit->input_types(), typing.type->s.flatten());
        EXPECT_EQ(r.term->circuit->output_types(), typing.type->u.flatten());
        EXPECT_GE(modality_of(*r.term->circuit), *typing.type->mod);
        validate(*r.term->circuit);
      }
      EXPECT_GE(modality_of(r.circuit), typing.modality);
    } catch (const RuntimeError& e) {
      ADD_FAILURE() << to_string(e.kind) << ": " << e.what() << "\n" << print_term(*t);
    }
    EXPECT_TRUE(check.failures().empty()) << check.failures()[0] << "\n" << print_term(*t);
  }
  EXPECT_GE(checked, 500);
  EXPECT_GT(steps, 10000u);
}

TEST(Fuzz, IllTypedTermsFailAsExpected) {
  // Wrap generated circuits in eliminators whose side condition they break.
  int cases = 0;
  for (std::uint64_t seed = 0; cases < 80 && seed < 5000; ++seed) {
    TermGen gen(seed);
    TermPtr c = TermGen::elaborate(gen.circuit(1).term);
    TermTyping ty;
    try {
      ty = check_term(c, gates());
    } catch (const SourceError&) {
      continue;
    }
    const Type& t = *ty.type;
    TermPtr bad;
    RK expected;
    switch (seed % 5) {
      case 0:
        if (*t.mod != Modality(0)) continue;
        bad = Term::reverse(c);
        expected = RK::ReverseIrreversible;
        break;
      case 1:
        if (*t.mod == Modality(2) && t.s == t.u) continue;
        bad = Term::controlled(ControlSpec::black(), c);
        expected = RK::ControlUncontrollable;
        break;
      case 2:
        if (*t.mod == Modality(2)) continue;
        bad = Term::with_computed(Term::box(t.u, Term::lift(Term::lambda("w", Term::var("w")))), c);
        expected = RK::WcError;
        break;
      case 3:
        bad = Term::app(c, Term::unit());
        expected = RK::NotAFunction;
        break;
      default:
        bad = Term::let_pair("a", "b", c, Term::var("a"));
        expected = RK::NotAPair;
        break;
    }
    EXPECT_THROW(check_term(bad, gates()), SourceError) << print_term(*bad);
    LabelSupply s;
    Evaluator ev(gates(), s);
    try {
      ev.eval(Configuration{Circuit{}, bad});
      ADD_FAILURE() << "no runtime error: " << print_term(*bad);
    } catch (const RuntimeError& e) {
      EXPECT_EQ(e.kind, expected) << e.what() << "\n" << print_term(*bad);
    }
    ++cases;
  }
  EXPECT_GE(cases, 50);
}
