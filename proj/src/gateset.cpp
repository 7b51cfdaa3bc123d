#include "pqc/gateset.hpp"

#include "json.hpp"

namespace pqc {

using nlohmann::json;

void GateSet::add_gate(GateDef def) {
  std::string name = def.name;
  gates_[name] = std::make_shared<const GateDef>(std::move(def));
}

std::shared_ptr<const GateDef> GateSet::find(std::string_view name) const {
  if (auto it = gates_.find(name); it != gates_.end()) return it->second;
  if (auto a = aliases_.find(name); a != aliases_.end()) {
    if (auto it = gates_.find(a->second); it != gates_.end()) return it->second;
  }
  return nullptr;
}

const GateDef& GateSet::lookup(std::string_view name) const {
  auto g = find(name);
  if (!g) throw std::out_of_range("unknown gate '" + std::string(name) + "'");
  return *g;
}

std::vector<std::string> GateSet::gate_names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : gates_) out.push_back(name);
  return out;
}

std::pair<std::shared_ptr<const GateDef>, bool> GateSet::adjoint_of(
    const GateDef& def, bool daggered) const {
  auto self = find(def.name);
  return std::visit(
      [&](const auto& adj) -> std::pair<std::shared_ptr<const GateDef>, bool> {
        using A = std::decay_t<decltype(adj)>;
        if constexpr (std::is_same_v<A, NoAdjoint>) {
          throw SignatureError(SignatureError::Kind::Validation,
                               "gate '" + def.name + "' has no adjoint");
        } else if constexpr (std::is_same_v<A, SelfAdjoint>) {
          return {self, daggered};
        } else if constexpr (std::is_same_v<A, DaggerFlag>) {
          return {self, !daggered};
        } else {
          auto partner = find(adj.name);
          if (!partner)
            throw SignatureError(SignatureError::Kind::Validation,
                                 "gate '" + def.name + "' names missing adjoint '" +
                                     adj.name + "'");
          return {partner, daggered};
        }
      },
      def.adjoint);
}

void GateSet::validate() const {
  auto fail = [](const std::string& msg) {
    throw SignatureError(SignatureError::Kind::Validation, msg);
  };
  if (!has_wire_type(WireType::qubit())) fail("wire type Qubit is required");
  for (const auto& [name, g] : gates_) {
    for (const auto& w : g->in_types)
      if (!has_wire_type(w)) fail("gate '" + name + "' uses undeclared wire type '" + w.name + "'");
    for (const auto& w : g->out_types)
      if (!has_wire_type(w)) fail("gate '" + name + "' uses undeclared wire type '" + w.name + "'");
    if (g->modality.is_reversible() && std::holds_alternative<NoAdjoint>(g->adjoint))
      fail("reversible gate '" + name + "' declares no adjoint");
    if (g->modality.is_controllable() && !g->is_square())
      fail("controllable gate '" + name + "' must have equal input and output types");
    if ((std::holds_alternative<SelfAdjoint>(g->adjoint) ||
         std::holds_alternative<DaggerFlag>(g->adjoint)) &&
        !g->is_square())
      fail("gate '" + name + "' is its own adjoint but not square");
    if (const auto* p = std::get_if<AdjointPartner>(&g->adjoint)) {
      auto partner = find(p->name);
      if (!partner) fail("gate '" + name + "' names missing adjoint partner '" + p->name + "'");
      if (partner->in_types != g->out_types || partner->out_types != g->in_types)
        fail("adjoint partner '" + p->name + "' of '" + name + "' must have swapped types");
    }
  }
  auto swap = find("SWAP");
  if (!swap || swap->modality != Modality::controllable() ||
      swap->in_types != std::vector<WireType>{WireType::qubit(), WireType::qubit()})
    fail("a modality-2 SWAP gate on Qubit * Qubit is required");
  for (const auto& [alias, target] : aliases_)
    if (!gates_.contains(target)) fail("alias '" + alias + "' names missing gate");
}

bool operator==(const GateSet& a, const GateSet& b) {
  if (a.wire_types_ != b.wire_types_ || a.aliases_ != b.aliases_ ||
      a.gates_.size() != b.gates_.size())
    return false;
  for (const auto& [name, g] : a.gates_) {
    auto it = b.gates_.find(name);
    if (it == b.gates_.end() || !(*g == *it->second)) return false;
  }
  return true;
}

GateSet default_gateset() {
  GateSet gs;
  const WireType q = WireType::qubit(), b = WireType::bit();
  gs.add_wire_type(q);
  gs.add_wire_type(b);
  const Modality two = Modality::controllable(), one = Modality::reversible(),
                 zero = Modality::general();
  for (const char* n : {"X", "Y", "Z", "H"}) gs.add_gate({n, {q}, {q}, two, SelfAdjoint{}});
  for (const char* n : {"S", "T"}) gs.add_gate({n, {q}, {q}, two, DaggerFlag{}});
  for (const char* n : {"CNOT", "CZ", "SWAP"})
    gs.add_gate({n, {q, q}, {q, q}, two, SelfAdjoint{}});
  gs.add_gate({"Init0", {}, {q}, one, AdjointPartner{"Term0"}});
  gs.add_gate({"Init1", {}, {q}, one, AdjointPartner{"Term1"}});
  gs.add_gate({"Term0", {q}, {}, one, AdjointPartner{"Init0"}});
  gs.add_gate({"Term1", {q}, {}, one, AdjointPartner{"Init1"}});
  gs.add_gate({"Meas", {q}, {b}, zero, NoAdjoint{}});
  gs.add_gate({"Discard", {q}, {}, zero, NoAdjoint{}});
  gs.add_gate({"BitDiscard", {b}, {}, zero, NoAdjoint{}});
  gs.add_alias("Swap", "SWAP");
  return gs;
}

namespace {

[[noreturn]] void parse_fail(const std::string& msg) {
  throw SignatureError(SignatureError::Kind::Parse, msg);
}

std::vector<WireType> wires_from(const json& j, const std::string& what) {
  if (!j.is_array()) parse_fail(what + " must be an array of wire type names");
  std::vector<WireType> out;
  for (const auto& w : j) {
    if (!w.is_string()) parse_fail(what + " must contain strings");
    out.push_back({w.get<std::string>()});
  }
  return out;
}

Adjoint adjoint_from(const json& j) {
  if (j.is_null()) return NoAdjoint{};
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "self") return SelfAdjoint{};
    if (s == "flag") return DaggerFlag{};
    parse_fail("unknown adjoint kind '" + s + "'");
  }
  if (j.is_object() && j.contains("partner") && j["partner"].is_string())
    return AdjointPartner{j["partner"].get<std::string>()};
  parse_fail("adjoint must be \"self\", \"flag\", {\"partner\": name} or null");
}

json adjoint_to(const Adjoint& a) {
  return std::visit(
      [](const auto& adj) -> json {
        using A = std::decay_t<decltype(adj)>;
        if constexpr (std::is_same_v<A, NoAdjoint>) return nullptr;
        else if constexpr (std::is_same_v<A, SelfAdjoint>) return "self";
        else if constexpr (std::is_same_v<A, DaggerFlag>) return "flag";
        else return json{{"partner", adj.name}};
      },
      a);
}

}  // namespace

GateSet load_signature(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    parse_fail(std::string("invalid signature JSON: ") + e.what());
  }
  if (!j.is_object()) parse_fail("signature must be a JSON object");
  GateSet gs = default_gateset();
  if (j.contains("wire_types"))
    for (const auto& w : wires_from(j["wire_types"], "wire_types")) gs.add_wire_type(w);
  if (j.contains("gates")) {
    if (!j["gates"].is_array()) parse_fail("gates must be an array");
    for (const auto& g : j["gates"]) {
      if (!g.is_object() || !g.contains("name") || !g["name"].is_string())
        parse_fail("each gate needs a string name");
      GateDef def;
      def.name = g["name"].get<std::string>();
      def.in_types = wires_from(g.value("in", json::array()), "in");
      def.out_types = wires_from(g.value("out", json::array()), "out");
      int m = 0;
      if (!g.contains("modality") || !g["modality"].is_number_integer() ||
          (m = g["modality"].get<int>()) < 0 || m > 2)
        parse_fail("gate '" + def.name + "' needs modality 0, 1 or 2");
      def.modality = Modality(m);
      def.adjoint = adjoint_from(g.value("adjoint", json(nullptr)));
      gs.add_gate(std::move(def));
    }
  }
  gs.validate();
  return gs;
}

std::string save_signature(const GateSet& gs) {
  json j;
  j["wire_types"] = json::array();
  for (const auto& w : gs.wire_types()) j["wire_types"].push_back(w.name);
  j["gates"] = json::array();
  for (const auto& name : gs.gate_names()) {
    const GateDef& g = gs.lookup(name);
    json e;
    e["name"] = g.name;
    e["in"] = json::array();
    for (const auto& w : g.in_types) e["in"].push_back(w.name);
    e["out"] = json::array();
    for (const auto& w : g.out_types) e["out"].push_back(w.name);
    e["modality"] = g.modality.value();
    e["adjoint"] = adjoint_to(g.adjoint);
    j["gates"].push_back(e);
  }
  return j.dump(2);
}

}  // namespace pqc
