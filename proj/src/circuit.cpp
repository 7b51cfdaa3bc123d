#include "pqc/circuit.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace pqc {

namespace {

[[noreturn]] void flow_error(const std::string& msg) {
  throw CircuitError(CircuitError::Kind::InvalidWireFlow, msg);
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<Label> labels_of(const std::vector<Wire>& ws) {
  std::vector<Label> out;
  out.reserve(ws.size());
  for (const auto& w : ws) out.push_back(w.label);
  return out;
}

std::vector<WireType> types_of(const std::vector<Wire>& ws) {
  std::vector<WireType> out;
  out.reserve(ws.size());
  for (const auto& w : ws) out.push_back(w.type);
  return out;
}

std::string types_str(const std::vector<WireType>& ws) {
  return SimpleType::of_wires(ws).str();
}

bool count_preserving(const Item& item) {
  return std::visit(overloaded{
                        [](const GateInstance& g) { return g.in.size() == g.out.size(); },
                        [](const PermItem&) { return true; },
                        [](const ConjItem&) { return true; },
                    },
                    item);
}

}  // namespace

std::string to_string(CircuitError::Kind k) {
  switch (k) {
    case CircuitError::Kind::InterfaceMismatch: return "InterfaceMismatch";
    case CircuitError::Kind::NotReversible: return "NotReversible";
    case CircuitError::Kind::NotControllable: return "NotControllable";
    case CircuitError::Kind::NotSquare: return "NotSquare";
    case CircuitError::Kind::WcNotReversible: return "WcNotReversible";
    case CircuitError::Kind::WcNotControllable: return "WcNotControllable";
    case CircuitError::Kind::InvalidWireFlow: return "InvalidWireFlow";
  }
  return "?";
}

std::string ControlSpec::str() const {
  std::string s;
  for (const auto& g : gadgets) s += g.polarity == Polarity::Black ? '+' : '-';
  return s;
}

SimpleType ControlSpec::wire_type() const {
  return SimpleType::of_wires(std::vector<WireType>(gadgets.size(), WireType::qubit()));
}

// --- Circuit ----------------------------------------------------------------

std::vector<WireType> Circuit::input_types() const { return types_of(inputs_); }
std::vector<WireType> Circuit::output_types() const { return types_of(outputs_); }
std::vector<Label> Circuit::input_labels() const { return labels_of(inputs_); }
std::vector<Label> Circuit::output_labels() const { return labels_of(outputs_); }

bool Circuit::has_conj() const {
  return std::any_of(items_.begin(), items_.end(),
                     [](const Item& i) { return std::holds_alternative<ConjItem>(i); });
}

bool Circuit::is_identity() const { return items_.empty() && inputs_ == outputs_; }

// --- WireBundle -------------------------------------------------------------

void WireBundle::replace(const std::vector<Label>& in, const std::vector<Label>& out) {
  std::vector<std::size_t> pos;
  pos.reserve(in.size());
  for (Label l : in) {
    auto it = std::find(order_.begin(), order_.end(), l);
    if (it == order_.end()) flow_error("label " + l.str() + " is not live");
    pos.push_back(static_cast<std::size_t>(it - order_.begin()));
  }
  if (in.size() == out.size()) {
    for (std::size_t i = 0; i < in.size(); ++i) order_[pos[i]] = out[i];
    return;
  }
  std::sort(pos.rbegin(), pos.rend());
  for (std::size_t p : pos) order_.erase(order_.begin() + static_cast<std::ptrdiff_t>(p));
  order_.insert(order_.end(), out.begin(), out.end());
}

void WireBundle::apply(const Item& item) {
  std::visit(overloaded{
                 [&](const GateInstance& g) {
                   for (const auto& c : g.controls)
                     if (std::find(order_.begin(), order_.end(), c.label) == order_.end())
                       flow_error("control label " + c.label.str() + " is not live");
                   replace(g.in, g.out);
                 },
                 [&](const PermItem& p) {
                   std::vector<std::size_t> pos;
                   for (Label l : p.before) {
                     auto it = std::find(order_.begin(), order_.end(), l);
                     if (it == order_.end()) flow_error("perm label " + l.str() + " is not live");
                     pos.push_back(static_cast<std::size_t>(it - order_.begin()));
                   }
                   std::sort(pos.begin(), pos.end());
                   for (std::size_t i = 0; i < pos.size(); ++i) order_[pos[i]] = p.after.at(i);
                 },
                 [&](const ConjItem& c) { replace(c.in, c.out); },
             },
             item);
}

bool WireBundle::ordered_as(const std::vector<Label>& labels) const {
  std::set<Label> wanted(labels.begin(), labels.end());
  std::vector<Label> restricted;
  for (Label l : order_)
    if (wanted.contains(l)) restricted.push_back(l);
  return restricted == labels;
}

// --- CircuitBuilder ---------------------------------------------------------

CircuitBuilder::CircuitBuilder(const std::vector<WireType>& inputs, LabelSupply& supply)
    : supply_(&supply) {
  for (const auto& w : inputs) inputs_.push_back({supply.fresh(), w});
  live_ = inputs_;
}

CircuitBuilder::CircuitBuilder(Circuit start, LabelSupply& supply)
    : inputs_(start.inputs()),
      live_(start.outputs()),
      items_(start.items()),
      supply_(&supply) {}

const WireType& CircuitBuilder::type_of(Label l) const {
  for (const auto& w : live_)
    if (w.label == l) return w.type;
  flow_error("label " + l.str() + " is not live");
}

void CircuitBuilder::consume(const std::vector<Label>& in, const std::vector<Wire>& out,
                             bool in_place) {
  std::vector<std::size_t> pos;
  for (Label l : in) {
    auto it = std::find_if(live_.begin(), live_.end(), [&](const Wire& w) { return w.label == l; });
    if (it == live_.end()) flow_error("label " + l.str() + " is not live");
    pos.push_back(static_cast<std::size_t>(it - live_.begin()));
  }
  if (std::set<std::size_t>(pos.begin(), pos.end()).size() != pos.size())
    flow_error("a label is consumed twice by one item");
  if (in_place) {
    for (std::size_t i = 0; i < pos.size(); ++i) live_[pos[i]] = out[i];
    return;
  }
  std::sort(pos.rbegin(), pos.rend());
  for (std::size_t p : pos) live_.erase(live_.begin() + static_cast<std::ptrdiff_t>(p));
  live_.insert(live_.end(), out.begin(), out.end());
}

std::vector<Label> CircuitBuilder::gate(std::shared_ptr<const GateDef> def,
                                        const std::vector<Label>& in, bool daggered,
                                        std::vector<Control> controls) {
  if (in.size() != def->in_types.size())
    throw CircuitError(CircuitError::Kind::InterfaceMismatch,
                       "gate " + def->name + " expects " + std::to_string(def->in_types.size()) +
                           " inputs");
  for (std::size_t i = 0; i < in.size(); ++i)
    if (type_of(in[i]) != def->in_types[i])
      throw CircuitError(CircuitError::Kind::InterfaceMismatch,
                         "gate " + def->name + " input " + std::to_string(i) + " has wrong type");
  for (const auto& c : controls) {
    if (type_of(c.label) != WireType::qubit()) flow_error("control wires must be qubits");
    if (std::find(in.begin(), in.end(), c.label) != in.end())
      flow_error("a control label is also a gate input");
  }
  std::vector<Wire> out;
  for (const auto& w : def->out_types) out.push_back({supply_->fresh(), w});
  consume(in, out, in.size() == out.size());
  GateInstance g{std::move(def), daggered, std::move(controls), in, labels_of(out)};
  std::vector<Label> result = g.out;
  items_.emplace_back(std::move(g));
  return result;
}

void CircuitBuilder::perm(const std::vector<Label>& before, const std::vector<Label>& after) {
  if (std::set<Label>(before.begin(), before.end()) != std::set<Label>(after.begin(), after.end()) ||
      before.size() != after.size())
    flow_error("perm must reorder one set of labels");
  if (before == after) return;
  std::vector<std::size_t> pos;
  std::vector<Wire> wires;
  for (Label l : before) {
    auto it = std::find_if(live_.begin(), live_.end(), [&](const Wire& w) { return w.label == l; });
    if (it == live_.end()) flow_error("perm label " + l.str() + " is not live");
    pos.push_back(static_cast<std::size_t>(it - live_.begin()));
  }
  std::sort(pos.begin(), pos.end());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    Label l = after[i];
    wires.push_back({l, type_of(l)});
  }
  for (std::size_t i = 0; i < pos.size(); ++i) live_[pos[i]] = wires[i];
  items_.emplace_back(PermItem{before, after});
}

void CircuitBuilder::bring_into_order(const std::vector<Label>& labels) {
  std::set<Label> wanted(labels.begin(), labels.end());
  if (wanted.size() != labels.size()) flow_error("a label is used twice");
  std::vector<Label> current;
  for (const auto& w : live_)
    if (wanted.contains(w.label)) current.push_back(w.label);
  if (current.size() != labels.size()) flow_error("some labels are not live");
  if (current != labels) perm(current, labels);
}

std::vector<Label> CircuitBuilder::conj(const std::vector<Label>& in,
                                        std::shared_ptr<const Circuit> compute,
                                        std::shared_ptr<const Circuit> body) {
  std::vector<WireType> in_types;
  for (Label l : in) in_types.push_back(type_of(l));
  if (in_types != compute->input_types())
    throw CircuitError(CircuitError::Kind::InterfaceMismatch, "conjugation input types differ");
  std::vector<Wire> out;
  for (const auto& w : compute->input_types()) out.push_back({supply_->fresh(), w});
  consume(in, out, true);
  ConjItem item{in, labels_of(out), std::move(compute), std::move(body)};
  std::vector<Label> result = item.out;
  items_.emplace_back(std::move(item));
  return result;
}

std::vector<Label> CircuitBuilder::append(const Circuit& c, const std::vector<Label>& in) {
  if (in.size() != c.inputs().size())
    throw CircuitError(CircuitError::Kind::InterfaceMismatch, "append arity mismatch");
  std::unordered_map<Label, Label> keep;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (type_of(in[i]) != c.inputs()[i].type)
      throw CircuitError(CircuitError::Kind::InterfaceMismatch, "append wire type mismatch");
    keep[c.inputs()[i].label] = in[i];
  }
  Circuit r = rename_labels(c, keep, *supply_);
  // Track positions through the appended items against the live bundle.
  WireBundle bundle(labels_of(live_));
  std::unordered_map<Label, WireType> types;
  for (const auto& w : live_) types[w.label] = w.type;
  for (const auto& item : r.items()) {
    bundle.apply(item);
    std::visit(overloaded{
                   [&](const GateInstance& g) {
                     for (std::size_t i = 0; i < g.out.size(); ++i)
                       types[g.out[i]] = g.gate->out_types[i];
                   },
                   [&](const PermItem&) {},
                   [&](const ConjItem& cj) {
                     for (std::size_t i = 0; i < cj.out.size(); ++i)
                       types[cj.out[i]] = types.at(cj.in[i]);
                   },
               },
               item);
    items_.push_back(item);
  }
  live_.clear();
  for (Label l : bundle.order()) live_.push_back({l, types.at(l)});
  return r.output_labels();
}

Circuit CircuitBuilder::finish(const std::vector<Label>& outputs, Modality cap) {
  bring_into_order(outputs);
  if (outputs.size() != live_.size()) flow_error("finish leaves wires dangling");
  return Circuit(inputs_, live_, items_, cap);
}

Circuit CircuitBuilder::finish(Modality cap) { return Circuit(inputs_, live_, items_, cap); }

// --- renaming ---------------------------------------------------------------

Circuit rename_labels(const Circuit& c, const std::unordered_map<Label, Label>& keep,
                      LabelSupply& supply) {
  std::unordered_map<Label, Label> map = keep;
  auto r = [&](Label l) {
    auto it = map.find(l);
    if (it != map.end()) return it->second;
    Label f = supply.fresh();
    map.emplace(l, f);
    return f;
  };
  auto rv = [&](const std::vector<Label>& ls) {
    std::vector<Label> out;
    out.reserve(ls.size());
    for (Label l : ls) out.push_back(r(l));
    return out;
  };
  std::vector<Wire> inputs, outputs;
  for (const auto& w : c.inputs()) inputs.push_back({r(w.label), w.type});
  std::vector<Item> items;
  items.reserve(c.items().size());
  for (const auto& item : c.items()) {
    items.push_back(std::visit(
        overloaded{
            [&](const GateInstance& g) -> Item {
              GateInstance n = g;
              for (auto& ctl : n.controls) ctl.label = r(ctl.label);
              n.in = rv(g.in);
              n.out = rv(g.out);
              return n;
            },
            [&](const PermItem& p) -> Item { return PermItem{rv(p.before), rv(p.after)}; },
            [&](const ConjItem& cj) -> Item {
              return ConjItem{rv(cj.in), rv(cj.out), cj.compute, cj.body};
            },
        },
        item));
  }
  for (const auto& w : c.outputs()) outputs.push_back({r(w.label), w.type});
  return Circuit(std::move(inputs), std::move(outputs), std::move(items), c.cap());
}

// --- category structure -----------------------------------------------------

Circuit identity(const std::vector<WireType>& wires, LabelSupply& supply) {
  std::vector<Wire> ws;
  for (const auto& w : wires) ws.push_back({supply.fresh(), w});
  return Circuit(ws, ws, {});
}

Circuit identity(const SimpleType& s, LabelSupply& supply) { return identity(s.flatten(), supply); }

Circuit compose(const Circuit& c1, const Circuit& c2, LabelSupply& supply) {
  if (c1.output_types() != c2.input_types())
    throw CircuitError(CircuitError::Kind::InterfaceMismatch,
                       "cannot compose " + types_str(c1.output_types()) + " with " +
                           types_str(c2.input_types()));
  std::unordered_map<Label, Label> keep;
  for (std::size_t i = 0; i < c2.inputs().size(); ++i)
    keep[c2.inputs()[i].label] = c1.outputs()[i].label;
  Circuit r = rename_labels(c2, keep, supply);
  std::vector<Item> items = c1.items();
  items.insert(items.end(), r.items().begin(), r.items().end());
  return Circuit(c1.inputs(), r.outputs(), std::move(items), meet(c1.cap(), c2.cap()));
}

namespace {

void collect_labels(const Circuit& c, std::unordered_set<Label>& out) {
  for (const auto& w : c.inputs()) out.insert(w.label);
  for (const auto& w : c.outputs()) out.insert(w.label);
  for (const auto& item : c.items()) {
    std::visit(overloaded{
                   [&](const GateInstance& g) {
                     for (const auto& ctl : g.controls) out.insert(ctl.label);
                     out.insert(g.in.begin(), g.in.end());
                     out.insert(g.out.begin(), g.out.end());
                   },
                   [&](const PermItem& p) { out.insert(p.before.begin(), p.before.end()); },
                   [&](const ConjItem& cj) {
                     out.insert(cj.in.begin(), cj.in.end());
                     out.insert(cj.out.begin(), cj.out.end());
                   },
               },
               item);
  }
}

}  // namespace

Circuit tensor(const Circuit& c1, const Circuit& c2, LabelSupply& supply) {
  std::unordered_set<Label> l1, l2;
  collect_labels(c1, l1);
  collect_labels(c2, l2);
  bool clash = std::any_of(l2.begin(), l2.end(), [&](Label l) { return l1.contains(l); });
  Circuit r = clash ? rename_labels(c2, {}, supply) : c2;
  std::vector<Wire> inputs = c1.inputs(), outputs = c1.outputs();
  inputs.insert(inputs.end(), r.inputs().begin(), r.inputs().end());
  outputs.insert(outputs.end(), r.outputs().begin(), r.outputs().end());
  std::vector<Item> items = c1.items();
  items.insert(items.end(), r.items().begin(), r.items().end());
  return Circuit(std::move(inputs), std::move(outputs), std::move(items),
                 meet(c1.cap(), c2.cap()));
}

Modality modality_of(const Circuit& c) {
  Modality m = c.cap();
  for (const auto& item : c.items()) {
    m = meet(m, std::visit(overloaded{
                               [](const GateInstance& g) { return g.gate->modality; },
                               [](const PermItem&) { return Modality::controllable(); },
                               [](const ConjItem& cj) {
                                 return modality_of(*cj.compute).is_reversible() &&
                                                modality_of(*cj.body).is_controllable()
                                            ? Modality::controllable()
                                            : Modality::general();
                               },
                           },
                           item));
    if (m == Modality::general()) break;
  }
  return m;
}

Circuit dagger(const Circuit& c, const GateSet& gates) {
  if (!modality_of(c).is_reversible())
    throw CircuitError(CircuitError::Kind::NotReversible, "circuit is not reversible");
  std::vector<Item> items;
  items.reserve(c.items().size());
  for (auto it = c.items().rbegin(); it != c.items().rend(); ++it) {
    items.push_back(std::visit(
        overloaded{
            [&](const GateInstance& g) -> Item {
              auto [def, flag] = gates.adjoint_of(*g.gate, g.daggered);
              return GateInstance{def, flag, g.controls, g.out, g.in};
            },
            [](const PermItem& p) -> Item { return PermItem{p.after, p.before}; },
            [&](const ConjItem& cj) -> Item {
              return ConjItem{cj.out, cj.in, cj.compute,
                              std::make_shared<const Circuit>(dagger(*cj.body, gates))};
            },
        },
        *it));
  }
  return Circuit(c.outputs(), c.inputs(), std::move(items), c.cap());
}

Circuit control(const ControlSpec& k, const Circuit& c, const GateSet& gates,
                LabelSupply& supply) {
  if (!modality_of(c).is_controllable())
    throw CircuitError(CircuitError::Kind::NotControllable, "circuit is not controllable");
  if (!c.is_square())
    throw CircuitError(CircuitError::Kind::NotSquare,
                       "cannot control a circuit " + types_str(c.input_types()) + " -> " +
                           types_str(c.output_types()));
  if (k.empty()) return c;
  auto swap = gates.find("SWAP");
  if (!swap) throw SignatureError(SignatureError::Kind::Validation, "gate set has no SWAP");

  const Circuit src = rename_labels(c, {}, supply);
  std::vector<Label> ks;
  for (std::size_t i = 0; i < k.size(); ++i) ks.push_back(supply.fresh());
  const std::vector<Label> first_ks = ks;
  auto controls_for = [&](const std::vector<Label>& labels) {
    std::vector<Control> out;
    for (std::size_t i = 0; i < k.size(); ++i) out.push_back({k.gadgets[i], labels[i]});
    return out;
  };

  std::unordered_map<Label, Label> ren;
  auto r = [&](Label l) {
    auto it = ren.find(l);
    return it == ren.end() ? l : it->second;
  };
  auto rv = [&](const std::vector<Label>& ls) {
    std::vector<Label> out;
    for (Label l : ls) out.push_back(r(l));
    return out;
  };

  std::vector<Item> items;
  for (const auto& item : src.items()) {
    if (const auto* g = std::get_if<GateInstance>(&item)) {
      GateInstance n = *g;
      n.controls = controls_for(ks);
      for (const auto& ctl : g->controls) n.controls.push_back({ctl.gadget, r(ctl.label)});
      n.in = rv(g->in);
      items.emplace_back(std::move(n));
    } else if (const auto* p = std::get_if<PermItem>(&item)) {
      // Bubble sort over the perm's positions; each adjacent exchange becomes
      // one controlled swap.
      std::vector<std::size_t> target;
      for (Label l : p->before)
        target.push_back(static_cast<std::size_t>(
            std::find(p->after.begin(), p->after.end(), l) - p->after.begin()));
      std::vector<Label> origin = p->before;
      std::vector<Label> cur = rv(p->before);
      for (std::size_t pass = 0; pass + 1 < target.size(); ++pass) {
        for (std::size_t i = 0; i + 1 < target.size() - pass; ++i) {
          if (target[i] <= target[i + 1]) continue;
          std::vector<Label> outs{supply.fresh(), supply.fresh()};
          items.emplace_back(GateInstance{swap, false, controls_for(ks), {cur[i], cur[i + 1]}, outs});
          cur[i] = outs[0];
          cur[i + 1] = outs[1];
          std::swap(target[i], target[i + 1]);
          std::swap(origin[i], origin[i + 1]);
        }
      }
      for (std::size_t j = 0; j < origin.size(); ++j) ren[origin[j]] = cur[j];
    } else {
      const auto& cj = std::get<ConjItem>(item);
      std::vector<WireType> kw(k.size(), WireType::qubit());
      auto compute = std::make_shared<const Circuit>(
          tensor(identity(kw, supply), *cj.compute, supply));
      auto body = std::make_shared<const Circuit>(control(k, *cj.body, gates, supply));
      std::vector<Label> in = ks;
      for (Label l : cj.in) in.push_back(r(l));
      std::vector<Label> next_ks;
      for (std::size_t i = 0; i < k.size(); ++i) next_ks.push_back(supply.fresh());
      std::vector<Label> out = next_ks;
      out.insert(out.end(), cj.out.begin(), cj.out.end());
      items.emplace_back(ConjItem{std::move(in), std::move(out), compute, body});
      ks = next_ks;
    }
  }

  std::vector<Wire> inputs, outputs;
  for (Label l : first_ks) inputs.push_back({l, WireType::qubit()});
  for (Label l : ks) outputs.push_back({l, WireType::qubit()});
  inputs.insert(inputs.end(), src.inputs().begin(), src.inputs().end());
  for (const auto& w : src.outputs()) outputs.push_back({r(w.label), w.type});
  return Circuit(std::move(inputs), std::move(outputs), std::move(items), src.cap());
}

Circuit with_computed(const Circuit& g, const Circuit& h, LabelSupply& supply) {
  if (g.output_types() != h.input_types() || !h.is_square())
    throw CircuitError(CircuitError::Kind::InterfaceMismatch,
                       "with-computed expects g : U -> S and h : S -> S");
  if (!modality_of(g).is_reversible())
    throw CircuitError(CircuitError::Kind::WcNotReversible,
                       "the computed circuit must be reversible");
  if (!modality_of(h).is_controllable())
    throw CircuitError(CircuitError::Kind::WcNotControllable,
                       "the conjugated circuit must be controllable");
  if (g.is_identity()) return h;

  std::shared_ptr<const Circuit> compute, body;
  if (h.items().size() == 1 && std::holds_alternative<ConjItem>(h.items()[0])) {
    const auto& inner = std::get<ConjItem>(h.items()[0]);
    if (inner.in == h.input_labels() && inner.out == h.output_labels()) {
      compute = std::make_shared<const Circuit>(compose(g, *inner.compute, supply));
      body = inner.body;
    }
  }
  if (!compute) {
    compute = std::make_shared<const Circuit>(g);
    body = std::make_shared<const Circuit>(h);
  }
  CircuitBuilder b(g.input_types(), supply);
  std::vector<Label> in;
  for (const auto& w : b.live()) in.push_back(w.label);
  b.conj(in, compute, body);
  return b.finish();
}

Circuit forget_colors(const Circuit& c, const GateSet& gates, LabelSupply& supply) {
  if (!modality_of(c).is_reversible())
    throw CircuitError(CircuitError::Kind::NotReversible, "circuit is not reversible");
  // A wire that passes straight through an inlined conjugation keeps its
  // input label, so later references to the conjugation's output are redirected.
  std::unordered_map<Label, Label> alias;
  auto sub = [&](Label l) {
    auto it = alias.find(l);
    return it == alias.end() ? l : it->second;
  };
  std::vector<Item> items;
  WireBundle bundle(c.input_labels());
  auto emit = [&](Item item) {
    bundle.apply(item);
    items.push_back(std::move(item));
  };
  auto restricted = [&](const std::vector<Label>& labels) {
    std::set<Label> wanted(labels.begin(), labels.end());
    std::vector<Label> out;
    for (Label l : bundle.order())
      if (wanted.contains(l)) out.push_back(l);
    return out;
  };
  for (const auto& item : c.items()) {
    if (const auto* g = std::get_if<GateInstance>(&item)) {
      GateInstance n = *g;
      for (auto& ctl : n.controls) ctl.label = sub(ctl.label);
      for (auto& l : n.in) l = sub(l);
      emit(std::move(n));
      continue;
    }
    if (const auto* p = std::get_if<PermItem>(&item)) {
      PermItem n = *p;
      for (auto& l : n.before) l = sub(l);
      for (auto& l : n.after) l = sub(l);
      emit(std::move(n));
      continue;
    }
    const auto& cj = std::get<ConjItem>(item);
    std::vector<Label> in;
    for (Label l : cj.in) in.push_back(sub(l));
    // The inlined block expects its inputs in interface order.
    const std::vector<Label> held = restricted(in);
    if (held != in) emit(PermItem{held, in});
    Circuit gc = forget_colors(*cj.compute, gates, supply);
    Circuit flat = compose(
        gc, compose(forget_colors(*cj.body, gates, supply), dagger(gc, gates), supply), supply);
    std::unordered_map<Label, Label> keep;
    for (std::size_t i = 0; i < in.size(); ++i) keep[flat.inputs()[i].label] = in[i];
    for (std::size_t i = 0; i < cj.out.size(); ++i) {
      Label from = flat.outputs()[i].label;
      if (!keep.contains(from)) keep[from] = cj.out[i];
    }
    Circuit r = rename_labels(flat, keep, supply);
    for (const auto& inner : r.items()) emit(inner);
    const std::vector<Label> outs = r.output_labels();
    for (std::size_t i = 0; i < cj.out.size(); ++i)
      if (outs[i] != cj.out[i]) alias[cj.out[i]] = outs[i];
    // Put each output where the matching input sat before the block.
    std::vector<Label> wanted;
    for (Label h : held)
      wanted.push_back(outs[static_cast<std::size_t>(std::find(in.begin(), in.end(), h) - in.begin())]);
    const std::vector<Label> now = restricted(outs);
    if (now != wanted) emit(PermItem{now, wanted});
  }
  std::vector<Wire> outputs = c.outputs();
  for (auto& w : outputs) w.label = sub(w.label);
  return Circuit(c.inputs(), std::move(outputs), std::move(items),
                 meet(c.cap(), Modality::reversible()));
}

// --- validation -------------------------------------------------------------

void validate(const Circuit& c) {
  std::unordered_map<Label, WireType> live;
  std::unordered_set<Label> seen;
  for (const auto& w : c.inputs()) {
    if (!seen.insert(w.label).second) flow_error("input label " + w.label.str() + " repeats");
    live[w.label] = w.type;
  }
  bool strict = std::all_of(c.items().begin(), c.items().end(), count_preserving);
  WireBundle bundle(c.input_labels());
  auto consume = [&](Label l) {
    auto it = live.find(l);
    if (it == live.end()) flow_error("label " + l.str() + " is not live");
    WireType t = it->second;
    live.erase(it);
    return t;
  };
  auto produce = [&](Label l, const WireType& t) {
    if (!seen.insert(l).second) flow_error("label " + l.str() + " is produced twice");
    live[l] = t;
  };
  for (const auto& item : c.items()) {
    std::visit(
        overloaded{
            [&](const GateInstance& g) {
              if (!g.gate) flow_error("gate instance without definition");
              const GateDef& d = *g.gate;
              if (g.in.size() != d.in_types.size() || g.out.size() != d.out_types.size())
                flow_error("gate " + d.name + " has wrong arity");
              if (!g.controls.empty() && !d.modality.is_controllable())
                flow_error("gate " + d.name + " is controlled but not controllable");
              if (g.daggered && !d.modality.is_reversible())
                flow_error("gate " + d.name + " is daggered but not reversible");
              for (const auto& ctl : g.controls) {
                auto it = live.find(ctl.label);
                if (it == live.end()) flow_error("control " + ctl.label.str() + " is not live");
                if (it->second != WireType::qubit()) flow_error("control wire must be a qubit");
                if (std::find(g.in.begin(), g.in.end(), ctl.label) != g.in.end())
                  flow_error("control label is also an input");
              }
              for (std::size_t i = 0; i < g.in.size(); ++i)
                if (consume(g.in[i]) != d.in_types[i])
                  flow_error("gate " + d.name + " input type mismatch");
              for (std::size_t i = 0; i < g.out.size(); ++i) produce(g.out[i], d.out_types[i]);
            },
            [&](const PermItem& p) {
              if (p.before.size() != p.after.size() ||
                  std::set<Label>(p.before.begin(), p.before.end()) !=
                      std::set<Label>(p.after.begin(), p.after.end()) ||
                  std::set<Label>(p.before.begin(), p.before.end()).size() != p.before.size())
                flow_error("perm must reorder one set of distinct labels");
              for (Label l : p.before)
                if (!live.contains(l)) flow_error("perm label " + l.str() + " is not live");
              if (strict && !bundle.ordered_as(p.before))
                flow_error("perm does not match the current wire order");
            },
            [&](const ConjItem& cj) {
              validate(*cj.compute);
              validate(*cj.body);
              if (cj.compute->output_types() != cj.body->input_types() || !cj.body->is_square())
                flow_error("conjugation interfaces do not match");
              auto ut = cj.compute->input_types();
              if (cj.in.size() != ut.size() || cj.out.size() != ut.size())
                flow_error("conjugation arity mismatch");
              for (std::size_t i = 0; i < cj.in.size(); ++i)
                if (consume(cj.in[i]) != ut[i]) flow_error("conjugation input type mismatch");
              for (std::size_t i = 0; i < cj.out.size(); ++i) produce(cj.out[i], ut[i]);
            },
        },
        item);
    bundle.apply(item);
  }
  if (live.size() != c.outputs().size()) flow_error("outputs do not cover the live wires");
  for (const auto& w : c.outputs()) {
    auto it = live.find(w.label);
    if (it == live.end()) flow_error("output " + w.label.str() + " is not live");
    if (it->second != w.type) flow_error("output " + w.label.str() + " has the wrong type");
  }
  if (strict && bundle.order() != c.output_labels())
    flow_error("outputs are not in the current wire order");
}

// --- structural equality ----------------------------------------------------

Circuit canonicalize(const Circuit& c) {
  std::unordered_map<Label, Label> map;
  std::uint32_t next = 0;
  auto r = [&](Label l) {
    auto [it, inserted] = map.emplace(l, Label{next});
    if (inserted) ++next;
    return it->second;
  };
  auto rv = [&](const std::vector<Label>& ls) {
    std::vector<Label> out;
    for (Label l : ls) out.push_back(r(l));
    return out;
  };
  std::vector<Wire> inputs;
  for (const auto& w : c.inputs()) inputs.push_back({r(w.label), w.type});
  std::vector<Item> items;
  for (const auto& item : c.items()) {
    items.push_back(std::visit(
        overloaded{
            [&](const GateInstance& g) -> Item {
              GateInstance n = g;
              for (auto& ctl : n.controls) ctl.label = r(ctl.label);
              n.in = rv(g.in);
              n.out = rv(g.out);
              return n;
            },
            [&](const PermItem& p) -> Item {
              auto before = rv(p.before);
              return PermItem{before, rv(p.after)};
            },
            [&](const ConjItem& cj) -> Item {
              return ConjItem{rv(cj.in), rv(cj.out),
                              std::make_shared<const Circuit>(canonicalize(*cj.compute)),
                              std::make_shared<const Circuit>(canonicalize(*cj.body))};
            },
        },
        item));
  }
  std::vector<Wire> outputs;
  for (const auto& w : c.outputs()) outputs.push_back({r(w.label), w.type});
  return Circuit(std::move(inputs), std::move(outputs), std::move(items), c.cap());
}

namespace {

bool items_equal(const Item& a, const Item& b);

bool canonical_equal(const Circuit& a, const Circuit& b) {
  if (a.inputs() != b.inputs() || a.outputs() != b.outputs() ||
      a.items().size() != b.items().size())
    return false;
  for (std::size_t i = 0; i < a.items().size(); ++i)
    if (!items_equal(a.items()[i], b.items()[i])) return false;
  return true;
}

bool items_equal(const Item& a, const Item& b) {
  if (a.index() != b.index()) return false;
  if (const auto* ga = std::get_if<GateInstance>(&a)) {
    const auto& gb = std::get<GateInstance>(b);
    return ga->name() == gb.name() && ga->daggered == gb.daggered &&
           ga->controls == gb.controls && ga->in == gb.in && ga->out == gb.out;
  }
  if (const auto* pa = std::get_if<PermItem>(&a)) return *pa == std::get<PermItem>(b);
  const auto& ca = std::get<ConjItem>(a);
  const auto& cb = std::get<ConjItem>(b);
  return ca.in == cb.in && ca.out == cb.out && canonical_equal(*ca.compute, *cb.compute) &&
         canonical_equal(*ca.body, *cb.body);
}

}  // namespace

bool structurally_equal(const Circuit& a, const Circuit& b) {
  return canonical_equal(canonicalize(a), canonicalize(b));
}

GateCounts count_items(const Circuit& c, bool deep) {
  GateCounts n;
  for (const auto& item : c.items()) {
    std::visit(overloaded{
                   [&](const GateInstance& g) {
                     ++n.gates;
                     if (!g.controls.empty()) ++n.controlled_gates;
                   },
                   [&](const PermItem&) { ++n.perms; },
                   [&](const ConjItem& cj) {
                     ++n.conjs;
                     if (!deep) return;
                     for (const Circuit* sub : {cj.compute.get(), cj.body.get()}) {
                       GateCounts s = count_items(*sub, true);
                       n.gates += s.gates;
                       n.controlled_gates += s.controlled_gates;
                       n.perms += s.perms;
                       n.conjs += s.conjs;
                     }
                   },
               },
               item);
  }
  return n;
}

}  // namespace pqc
