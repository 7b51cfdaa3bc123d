#include "pqc/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace pqc {

namespace {

using cd = std::complex<double>;

// Mutable state during the fold: rows follow `live`, columns the inputs.
struct State {
  std::vector<Label> live;
  LinearMap m;
};

[[noreturn]] void unsupported(const std::string& msg) {
  throw OracleError(OracleError::Kind::UnsupportedGate, msg);
}

void check_cap(std::size_t wires, int cap) {
  if (static_cast<int>(wires) > cap)
    throw OracleError(OracleError::Kind::DimensionCap,
                      std::to_string(wires) + " live wires exceed the cap of " +
                          std::to_string(cap));
}

// Replaces the wires `in` by `out` through the matrix u (rows: out basis,
// cols: in basis). The new wires go to the end of the live list.
void apply(State& s, const LinearMap& u, const std::vector<Label>& in,
           const std::vector<Label>& out, int cap) {
  const std::size_t n = s.live.size();
  std::vector<int> in_pos;
  for (Label l : in) {
    auto it = std::find(s.live.begin(), s.live.end(), l);
    if (it == s.live.end()) throw Error("oracle: label " + l.str() + " is not live");
    in_pos.push_back(static_cast<int>(it - s.live.begin()));
  }
  std::vector<int> rest_pos;
  std::vector<Label> next;
  for (std::size_t i = 0; i < n; ++i)
    if (std::find(in_pos.begin(), in_pos.end(), static_cast<int>(i)) == in_pos.end()) {
      rest_pos.push_back(static_cast<int>(i));
      next.push_back(s.live[i]);
    }
  next.insert(next.end(), out.begin(), out.end());
  check_cap(next.size(), cap);

  const std::size_t k_in = in.size(), k_out = out.size(), k_rest = rest_pos.size();
  LinearMap result = LinearMap::Zero(Eigen::Index(1) << next.size(), s.m.cols());
  for (std::size_t r = 0; r < (std::size_t{1} << k_rest); ++r) {
    std::size_t base = 0;
    for (std::size_t j = 0; j < k_rest; ++j)
      if ((r >> (k_rest - 1 - j)) & 1U) base |= std::size_t{1} << (n - 1 - rest_pos[j]);
    for (std::size_t i = 0; i < (std::size_t{1} << k_in); ++i) {
      std::size_t old_row = base;
      for (std::size_t j = 0; j < k_in; ++j)
        if ((i >> (k_in - 1 - j)) & 1U) old_row |= std::size_t{1} << (n - 1 - in_pos[j]);
      for (std::size_t o = 0; o < (std::size_t{1} << k_out); ++o) {
        cd coeff = u(Eigen::Index(o), Eigen::Index(i));
        if (coeff == cd{}) continue;
        std::size_t new_row = (r << k_out) | o;
        result.row(Eigen::Index(new_row)) += coeff * s.m.row(Eigen::Index(old_row));
      }
    }
  }
  s.live = std::move(next);
  s.m = std::move(result);
}

void require_qubits(const std::vector<WireType>& ws, const std::string& what) {
  for (const auto& w : ws)
    if (w != WireType::qubit()) unsupported(what + " carries a non-qubit wire");
}

void fold(State& s, const Circuit& c, int cap);

LinearMap map_of_gate(const GateInstance& g) {
  LinearMap u = gate_matrix(*g.gate);
  if (g.daggered) u = u.adjoint().eval();
  if (!g.controls.empty()) {
    ControlSpec k;
    for (const auto& ctl : g.controls) k.gadgets.push_back(ctl.gadget);
    u = controlled_map(k, u);
  }
  return u;
}

void fold(State& s, const Circuit& c, int cap) {
  for (const auto& item : c.items()) {
    if (const auto* g = std::get_if<GateInstance>(&item)) {
      std::vector<Label> in, out;
      for (const auto& ctl : g->controls) {
        in.push_back(ctl.label);
        out.push_back(ctl.label);
      }
      in.insert(in.end(), g->in.begin(), g->in.end());
      out.insert(out.end(), g->out.begin(), g->out.end());
      apply(s, map_of_gate(*g), in, out, cap);
    } else if (const auto* cj = std::get_if<ConjItem>(&item)) {
      LinearMap mg = circuit_to_map(*cj->compute, cap);
      LinearMap mb = circuit_to_map(*cj->body, cap);
      apply(s, mg.adjoint() * mb * mg, cj->in, cj->out, cap);
    }
    // Perm items only rename positions; the fold tracks wires by label.
  }
}

}  // namespace

std::string to_string(OracleError::Kind k) {
  switch (k) {
    case OracleError::Kind::UnsupportedGate: return "UnsupportedGate";
    case OracleError::Kind::DimensionCap: return "DimensionCap";
    case OracleError::Kind::ShapeMismatch: return "ShapeMismatch";
    case OracleError::Kind::NotSquare: return "NotSquare";
  }
  return "?";
}

LinearMap gate_matrix(const GateDef& def) {
  if (!def.modality.is_reversible())
    unsupported("gate " + def.name + " has modality 0 and no linear-map semantics");
  require_qubits(def.in_types, "gate " + def.name);
  require_qubits(def.out_types, "gate " + def.name);
  const double r = 1.0 / std::sqrt(2.0);
  const cd i{0, 1};
  const std::string& n = def.name;
  LinearMap m;
  if (n == "X") {
    m.resize(2, 2);
    m << 0, 1, 1, 0;
  } else if (n == "Y") {
    m.resize(2, 2);
    m << 0, -i, i, 0;
  } else if (n == "Z") {
    m.resize(2, 2);
    m << 1, 0, 0, -1;
  } else if (n == "H") {
    m.resize(2, 2);
    m << r, r, r, -r;
  } else if (n == "S") {
    m.resize(2, 2);
    m << 1, 0, 0, i;
  } else if (n == "T") {
    m.resize(2, 2);
    m << 1, 0, 0, std::polar(1.0, M_PI / 4);
  } else if (n == "CNOT") {
    m = LinearMap::Identity(4, 4);
    m.block(2, 2, 2, 2) << 0, 1, 1, 0;
  } else if (n == "CZ") {
    m = LinearMap::Identity(4, 4);
    m(3, 3) = -1;
  } else if (n == "SWAP") {
    m = LinearMap::Zero(4, 4);
    m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1;
  } else if (n == "Init0" || n == "Init1") {
    m = LinearMap::Zero(2, 1);
    m(n == "Init0" ? 0 : 1, 0) = 1;
  } else if (n == "Term0" || n == "Term1") {
    m = LinearMap::Zero(1, 2);
    m(0, n == "Term0" ? 0 : 1) = 1;
  } else {
    unsupported("gate " + n + " has no registered matrix");
  }
  const auto rows = Eigen::Index(1) << def.out_types.size();
  const auto cols = Eigen::Index(1) << def.in_types.size();
  if (m.rows() != rows || m.cols() != cols)
    unsupported("gate " + n + " does not have the built-in signature");
  return m;
}

LinearMap circuit_to_map(const Circuit& c, int cap) {
  require_qubits(c.input_types(), "circuit input");
  check_cap(c.inputs().size(), cap);
  State s;
  s.live = c.input_labels();
  const auto dim = Eigen::Index(1) << s.live.size();
  s.m = LinearMap::Identity(dim, dim);
  fold(s, c, cap);
  // Reorder rows to follow the declared outputs.
  const auto outs = c.output_labels();
  if (outs.size() != s.live.size()) throw Error("oracle: outputs do not cover the live wires");
  State t = s;
  apply(t, LinearMap::Identity(Eigen::Index(1) << outs.size(), Eigen::Index(1) << outs.size()),
        outs, outs, cap);
  return t.m;
}

LinearMap controlled_map(const ControlSpec& k, const LinearMap& u) {
  if (u.rows() != u.cols())
    throw OracleError(OracleError::Kind::NotSquare, "controlled_map needs a square map");
  if (k.empty()) return u;
  const Eigen::Index kd = Eigen::Index(1) << k.size();
  Eigen::Index fire = 0;
  for (const auto& g : k.gadgets) fire = (fire << 1) | (g.polarity == Polarity::Black ? 1 : 0);
  const Eigen::Index d = u.rows();
  LinearMap out = LinearMap::Identity(kd * d, kd * d);
  out.block(fire * d, fire * d, d, d) = u;
  return out;
}

double max_abs_diff(const LinearMap& a, const LinearMap& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw OracleError(OracleError::Kind::ShapeMismatch,
                      "maps of shape " + std::to_string(a.rows()) + "x" +
                          std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                          std::to_string(b.cols()));
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

bool maps_equal(const LinearMap& a, const LinearMap& b, double tol) {
  return max_abs_diff(a, b) <= tol;
}

LinearMap wire_permutation(const std::vector<std::size_t>& perm) {
  const std::size_t n = perm.size();
  const auto dim = Eigen::Index(1) << n;
  LinearMap m = LinearMap::Zero(dim, dim);
  for (std::size_t x = 0; x < (std::size_t{1} << n); ++x) {
    std::size_t y = 0;
    for (std::size_t i = 0; i < n; ++i)
      if ((x >> (n - 1 - i)) & 1U) y |= std::size_t{1} << (n - 1 - perm[i]);
    m(Eigen::Index(y), Eigen::Index(x)) = 1;
  }
  return m;
}

}  // namespace pqc
