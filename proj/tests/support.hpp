#pragma once

#include <algorithm>
#include <numeric>
#include <random>

#include "pqc/circuit.hpp"
#include "pqc/oracle.hpp"

namespace pqc::testing {

inline const GateSet& gates() {
  static const GateSet g = default_gateset();
  return g;
}

inline std::shared_ptr<const GateDef> gate(const std::string& name) {
  auto d = gates().find(name);
  if (!d) throw std::out_of_range(name);
  return d;
}

inline std::vector<WireType> qubits(std::size_t n) {
  return std::vector<WireType>(n, WireType::qubit());
}

/// One gate on fresh wires, inputs and outputs in gate order.
inline Circuit single_gate(const std::string& name, LabelSupply& s, bool daggered = false) {
  auto d = gate(name);
  CircuitBuilder b(d->in_types, s);
  std::vector<Label> in;
  for (const auto& w : b.live()) in.push_back(w.label);
  auto out = b.gate(d, in, daggered);
  return b.finish(out);
}

// Explicit reference matrices, written out by hand.
inline LinearMap mat(std::initializer_list<std::initializer_list<std::complex<double>>> rows) {
  LinearMap m(static_cast<Eigen::Index>(rows.size()),
              static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (auto v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

/// Kronecker product computed entry by entry.
inline LinearMap kron(const LinearMap& a, const LinearMap& b) {
  LinearMap m(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      m.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return m;
}

struct RandomCircuitOptions {
  int wires = 3;
  int items = 6;
  bool perms = true;
  bool inner_controls = true;
  bool conj = false;
  bool daggers = true;
};

inline const std::vector<std::string>& unitary_gate_names() {
  static const std::vector<std::string> names{"X", "Y", "Z", "H", "S", "T", "CNOT", "CZ", "SWAP"};
  return names;
}

inline ControlSpec random_spec(std::mt19937_64& rng, int max_gadgets, int min_gadgets = 0) {
  ControlSpec k;
  int n = std::uniform_int_distribution<int>(min_gadgets, max_gadgets)(rng);
  for (int i = 0; i < n; ++i)
    k.gadgets.push_back({rng() % 2 ? Polarity::Black : Polarity::White});
  return k;
}

/// A random square modality-2 circuit on qubits.
inline Circuit random_circuit(std::mt19937_64& rng, LabelSupply& s,
                              const RandomCircuitOptions& o = {}, int depth = 0) {
  CircuitBuilder b(qubits(static_cast<std::size_t>(o.wires)), s);
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
  for (int step = 0; step < o.items; ++step) {
    std::vector<Label> live;
    for (const auto& w : b.live()) live.push_back(w.label);
    std::shuffle(live.begin(), live.end(), rng);
    int kind = pick(10);
    if (o.perms && kind == 0 && live.size() >= 2) {
      std::vector<Label> before;
      for (const auto& w : b.live()) before.push_back(w.label);
      auto after = before;
      std::shuffle(after.begin(), after.end(), rng);
      b.perm(before, after);
      continue;
    }
    if (o.conj && kind == 1 && depth < 2 && live.size() >= 1) {
      int n = 1 + pick(static_cast<int>(live.size()));
      std::vector<Label> in(live.begin(), live.begin() + n);
      RandomCircuitOptions inner = o;
      inner.wires = n;
      inner.items = 1 + pick(3);
      auto compute = std::make_shared<const Circuit>(random_circuit(rng, s, inner, depth + 1));
      auto body = std::make_shared<const Circuit>(random_circuit(rng, s, inner, depth + 1));
      b.conj(in, compute, body);
      continue;
    }
    std::vector<std::string> fits;
    for (const auto& n : unitary_gate_names())
      if (gate(n)->in_types.size() <= live.size()) fits.push_back(n);
    auto d = gate(fits[static_cast<std::size_t>(pick(static_cast<int>(fits.size())))]);
    std::size_t arity = d->in_types.size();
    std::vector<Label> in(live.begin(), live.begin() + static_cast<std::ptrdiff_t>(arity));
    std::vector<Control> controls;
    if (o.inner_controls && live.size() > arity && pick(3) == 0)
      controls.push_back({{pick(2) ? Polarity::Black : Polarity::White}, live[arity]});
    b.gate(d, in, o.daggers && pick(4) == 0 && std::holds_alternative<DaggerFlag>(d->adjoint),
           controls);
  }
  return b.finish();
}

/// A random modality-1 isometry from `data` qubits: Init0 ancillas and
/// CNOTs, with the data wires first in the output.
inline Circuit random_isometry(std::mt19937_64& rng, LabelSupply& s, int data, int max_inits,
                               int max_cnots) {
  CircuitBuilder b(qubits(static_cast<std::size_t>(data)), s);
  int inits = static_cast<int>(rng() % static_cast<unsigned>(max_inits + 1));
  for (int i = 0; i < inits; ++i) b.gate(gate("Init0"), {});
  int cnots = static_cast<int>(rng() % static_cast<unsigned>(max_cnots + 1));
  for (int i = 0; i < cnots && b.live().size() >= 2; ++i) {
    std::vector<Label> live;
    for (const auto& w : b.live()) live.push_back(w.label);
    std::shuffle(live.begin(), live.end(), rng);
    b.gate(gate("CNOT"), {live[0], live[1]});
  }
  return b.finish();
}

}  // namespace pqc::testing

namespace pqc::testing {

/// The 7-qubit CCZ construction: a CNOT network computing the parities
/// x^y, x^z, y^z, x^y^z into fresh ancillas, and a layer of T / T-dagger.
inline std::pair<Circuit, Circuit> ccz_parts(LabelSupply& s) {
  CircuitBuilder b(qubits(3), s);
  Label x = b.at(0), y = b.at(1), z = b.at(2);
  Label a = b.gate(gate("Init0"), {})[0];
  Label bb = b.gate(gate("Init0"), {})[0];
  Label c = b.gate(gate("Init0"), {})[0];
  Label d = b.gate(gate("Init0"), {})[0];
  auto cnot = [&](Label& ctl, Label& tgt) {
    auto out = b.gate(gate("CNOT"), {ctl, tgt});
    ctl = out[0];
    tgt = out[1];
  };
  cnot(x, a);
  cnot(y, a);
  cnot(x, bb);
  cnot(z, bb);
  cnot(y, c);
  cnot(z, c);
  cnot(x, d);
  cnot(y, d);
  cnot(z, d);
  Circuit network = b.finish({x, y, z, a, bb, c, d});

  CircuitBuilder t(qubits(7), s);
  for (std::size_t i = 0; i < 7; ++i) {
    bool dg = i >= 3 && i <= 5;
    t.gate(gate("T"), {t.at(i)}, dg);
  }
  return {network, t.finish()};
}

/// A random circuit over every default gate, so any modality can occur.
inline Circuit random_mixed(std::mt19937_64& rng, LabelSupply& s, std::vector<WireType> inputs,
                            int items) {
  CircuitBuilder b(inputs, s);
  static const std::vector<std::string> names{"H", "T", "CNOT", "SWAP", "Init0", "Init1",
                                              "Term0", "Term1", "Meas", "Discard",
                                              "BitDiscard", "X"};
  for (int i = 0; i < items; ++i) {
    auto d = gate(names[rng() % names.size()]);
    std::vector<Label> in;
    std::vector<bool> used(b.live().size(), false);
    bool ok = true;
    for (const auto& want : d->in_types) {
      std::vector<std::size_t> cands;
      for (std::size_t p = 0; p < b.live().size(); ++p)
        if (!used[p] && b.live()[p].type == want) cands.push_back(p);
      if (cands.empty()) {
        ok = false;
        break;
      }
      std::size_t p = cands[rng() % cands.size()];
      used[p] = true;
      in.push_back(b.at(p));
    }
    if (ok) b.gate(d, in);
  }
  return b.finish();
}

}  // namespace pqc::testing
