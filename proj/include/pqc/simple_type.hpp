#pragma once

#include <memory>
#include <string>
#include <vector>

namespace pqc {

struct WireType {
  std::string name;

  static WireType qubit() { return {"Qubit"}; }
  static WireType bit() { return {"Bit"}; }
  friend auto operator<=>(const WireType&, const WireType&) = default;
};

/// Unit | Wire | Tensor, the only types circuits take as inputs and outputs.
class SimpleType {
 public:
  enum class Kind { Unit, Wire, Tensor };

  SimpleType() = default;  // Unit
  static SimpleType unit() { return {}; }
  static SimpleType wire(WireType w);
  static SimpleType tensor(SimpleType a, SimpleType b);
  /// Right-nested tensor of the given wires; Unit when empty.
  static SimpleType of_wires(const std::vector<WireType>& ws);

  Kind kind() const { return kind_; }
  const WireType& wire_type() const { return wire_; }
  const SimpleType& left() const { return *left_; }
  const SimpleType& right() const { return *right_; }

  /// Ordered list of wire types (the object this type denotes).
  std::vector<WireType> flatten() const;
  std::size_t arity() const { return flatten().size(); }
  std::string str() const;

  friend bool operator==(const SimpleType& a, const SimpleType& b);

 private:
  void flatten_into(std::vector<WireType>& out) const;

  Kind kind_ = Kind::Unit;
  WireType wire_;
  std::shared_ptr<const SimpleType> left_, right_;
};

}  // namespace pqc
