#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "pqc/error.hpp"
#include "pqc/gateset.hpp"
#include "pqc/label.hpp"
#include "pqc/modality.hpp"
#include "pqc/simple_type.hpp"

namespace pqc {

enum class Polarity : std::uint8_t { Black, White };

/// A single control gadget: black fires on |1>, white on |0>.
struct ControlGadget {
  Polarity polarity = Polarity::Black;
  friend bool operator==(const ControlGadget&, const ControlGadget&) = default;
};

/// An object of the control monoid: a sequence of gadgets, one qubit each.
/// The empty spec is the monoid unit.
struct ControlSpec {
  std::vector<ControlGadget> gadgets;

  static ControlSpec black(std::size_t n = 1) {
    return {std::vector<ControlGadget>(n, ControlGadget{Polarity::Black})};
  }
  std::size_t size() const { return gadgets.size(); }
  bool empty() const { return gadgets.empty(); }
  /// "+" for black, "-" for white.
  std::string str() const;
  /// The simple type Qubit ⊗ ... ⊗ Qubit.
  SimpleType wire_type() const;
  friend ControlSpec operator+(ControlSpec a, const ControlSpec& b) {
    a.gadgets.insert(a.gadgets.end(), b.gadgets.begin(), b.gadgets.end());
    return a;
  }
  friend bool operator==(const ControlSpec&, const ControlSpec&) = default;
};

struct Control {
  ControlGadget gadget;
  Label label;
  friend bool operator==(const Control&, const Control&) = default;
};

struct Wire {
  Label label;
  WireType type;
  friend bool operator==(const Wire&, const Wire&) = default;
};

struct GateInstance {
  std::shared_ptr<const GateDef> gate;
  bool daggered = false;
  std::vector<Control> controls;
  std::vector<Label> in;
  std::vector<Label> out;

  const std::string& name() const { return gate->name; }
};

/// Reorders the live wires named in `before` into the order `after`.
/// Labels are unchanged, so the item is a no-op on the wires themselves;
/// it records a wire crossing that control() must turn into swaps.
struct PermItem {
  std::vector<Label> before;
  std::vector<Label> after;
  friend bool operator==(const PermItem&, const PermItem&) = default;
};

class Circuit;

/// compute ; body ; compute† where compute is colored red (never controlled).
/// `in` feeds compute's inputs positionally, `out` is produced by compute†.
struct ConjItem {
  std::vector<Label> in;
  std::vector<Label> out;
  std::shared_ptr<const Circuit> compute;
  std::shared_ptr<const Circuit> body;
};

using Item = std::variant<GateInstance, PermItem, ConjItem>;

class CircuitError : public Error {
 public:
  enum class Kind {
    InterfaceMismatch,
    NotReversible,
    NotControllable,
    NotSquare,
    WcNotReversible,
    WcNotControllable,
    InvalidWireFlow,
  };
  CircuitError(Kind k, const std::string& msg) : Error(msg), kind(k) {}
  Kind kind;
};

std::string to_string(CircuitError::Kind k);

/// A morphism of the general, reversible or controllable circuit category:
/// a labeled interface plus an ordered list of items. Immutable by
/// convention once built; all operations return new circuits.
class Circuit {
 public:
  Circuit() = default;
  Circuit(std::vector<Wire> inputs, std::vector<Wire> outputs,
          std::vector<Item> items, Modality cap = Modality::controllable())
      : inputs_(std::move(inputs)),
        outputs_(std::move(outputs)),
        items_(std::move(items)),
        cap_(cap) {}

  const std::vector<Wire>& inputs() const { return inputs_; }
  const std::vector<Wire>& outputs() const { return outputs_; }
  const std::vector<Item>& items() const { return items_; }
  /// Upper bound on the modality independent of the items (set by
  /// forget_colors, whose result lands in the reversible category).
  Modality cap() const { return cap_; }

  std::vector<WireType> input_types() const;
  std::vector<WireType> output_types() const;
  std::vector<Label> input_labels() const;
  std::vector<Label> output_labels() const;
  bool is_square() const { return input_types() == output_types(); }
  bool has_conj() const;
  /// No items and the interface passes straight through.
  bool is_identity() const;

 private:
  std::vector<Wire> inputs_;
  std::vector<Wire> outputs_;
  std::vector<Item> items_;
  Modality cap_ = Modality::controllable();
};

/// Tracks the positional order of live wires while scanning items.
/// Square gates and conjugations replace their inputs in place; other gates
/// remove their inputs and append their outputs; perms reorder the positions
/// occupied by their labels.
class WireBundle {
 public:
  explicit WireBundle(std::vector<Label> order) : order_(std::move(order)) {}
  const std::vector<Label>& order() const { return order_; }
  /// Throws CircuitError(InvalidWireFlow) when an input is not live.
  void apply(const Item& item);
  /// True when the labels of `labels` appear in the bundle in that order.
  bool ordered_as(const std::vector<Label>& labels) const;

 private:
  void replace(const std::vector<Label>& in, const std::vector<Label>& out);
  std::vector<Label> order_;
};

// --- category structure ---------------------------------------------------

Circuit identity(const SimpleType& s, LabelSupply& supply);
Circuit identity(const std::vector<WireType>& wires, LabelSupply& supply);
/// c1 then c2. c2's input labels are renamed onto c1's outputs.
Circuit compose(const Circuit& c1, const Circuit& c2, LabelSupply& supply);
/// Side by side; c2 is renamed when labels collide.
Circuit tensor(const Circuit& c1, const Circuit& c2, LabelSupply& supply);
/// Adjoint. Throws NotReversible when modality_of(c) == 0.
Circuit dagger(const Circuit& c, const GateSet& gates);
/// Adds the controls of `k` to every green gate and replaces wire crossings
/// outside red regions by controlled swaps. Control wires come first.
Circuit control(const ControlSpec& k, const Circuit& c, const GateSet& gates,
                LabelSupply& supply);
/// g ▷ h, normalized by id ▷ h = h and g1 ▷ (g2 ▷ h) = (g1;g2) ▷ h.
Circuit with_computed(const Circuit& g, const Circuit& h, LabelSupply& supply);
/// Flattens every conjugation into compute ; body ; compute†.
Circuit forget_colors(const Circuit& c, const GateSet& gates, LabelSupply& supply);
Modality modality_of(const Circuit& c);

// --- construction helpers -------------------------------------------------

/// Builds a circuit item by item over a positional wire bundle.
class CircuitBuilder {
 public:
  CircuitBuilder(const std::vector<WireType>& inputs, LabelSupply& supply);
  /// Starts from an existing circuit (its outputs become the live bundle).
  CircuitBuilder(Circuit start, LabelSupply& supply);

  /// Live wires in positional order.
  const std::vector<Wire>& live() const { return live_; }
  Label at(std::size_t position) const { return live_.at(position).label; }

  /// Applies a gate to the wires at the given labels; returns the new labels.
  std::vector<Label> gate(std::shared_ptr<const GateDef> def,
                          const std::vector<Label>& in, bool daggered = false,
                          std::vector<Control> controls = {});
  /// Reorders the wires named in `before` into `after` (same label set).
  void perm(const std::vector<Label>& before, const std::vector<Label>& after);
  /// Conjugation node on the given labels; returns fresh output labels.
  std::vector<Label> conj(const std::vector<Label>& in,
                          std::shared_ptr<const Circuit> compute,
                          std::shared_ptr<const Circuit> body);
  /// Appends a whole circuit on the given labels (its inputs in order).
  std::vector<Label> append(const Circuit& c, const std::vector<Label>& in);
  /// Inserts a perm so that `labels` occupy their positions in this order.
  /// No-op when they already do.
  void bring_into_order(const std::vector<Label>& labels);

  /// Finishes with the given output order (a trailing perm is inserted when
  /// it differs from the bundle order).
  Circuit finish(const std::vector<Label>& outputs, Modality cap = Modality::controllable());
  /// Finishes with the current bundle order.
  Circuit finish(Modality cap = Modality::controllable());

 private:
  const WireType& type_of(Label l) const;
  void consume(const std::vector<Label>& in, const std::vector<Wire>& out,
               bool in_place);

  std::vector<Wire> inputs_;
  std::vector<Wire> live_;
  std::vector<Item> items_;
  LabelSupply* supply_;
};

/// Renames every top-level label through `fresh` except those in `keep`.
Circuit rename_labels(const Circuit& c, const std::unordered_map<Label, Label>& keep,
                      LabelSupply& supply);

/// Wire-flow validity; throws CircuitError(InvalidWireFlow).
void validate(const Circuit& c);

/// Relabels to first-appearance order starting at 0, recursively.
Circuit canonicalize(const Circuit& c);
/// Equality up to a label bijection respecting interface order.
bool structurally_equal(const Circuit& a, const Circuit& b);

/// Counters used by tests and reports.
struct GateCounts {
  std::size_t gates = 0;
  std::size_t controlled_gates = 0;
  std::size_t perms = 0;
  std::size_t conjs = 0;
};
/// Top-level counts only, or recursive when `deep`.
GateCounts count_items(const Circuit& c, bool deep);

}  // namespace pqc
