#include "pqc/simple_type.hpp"

namespace pqc {

SimpleType SimpleType::wire(WireType w) {
  SimpleType t;
  t.kind_ = Kind::Wire;
  t.wire_ = std::move(w);
  return t;
}

SimpleType SimpleType::tensor(SimpleType a, SimpleType b) {
  SimpleType t;
  t.kind_ = Kind::Tensor;
  t.left_ = std::make_shared<const SimpleType>(std::move(a));
  t.right_ = std::make_shared<const SimpleType>(std::move(b));
  return t;
}

SimpleType SimpleType::of_wires(const std::vector<WireType>& ws) {
  if (ws.empty()) return unit();
  SimpleType t = wire(ws.back());
  for (auto it = ws.rbegin() + 1; it != ws.rend(); ++it) t = tensor(wire(*it), t);
  return t;
}

void SimpleType::flatten_into(std::vector<WireType>& out) const {
  switch (kind_) {
    case Kind::Unit:
      break;
    case Kind::Wire:
      out.push_back(wire_);
      break;
    case Kind::Tensor:
      left_->flatten_into(out);
      right_->flatten_into(out);
      break;
  }
}

std::vector<WireType> SimpleType::flatten() const {
  std::vector<WireType> out;
  flatten_into(out);
  return out;
}

std::string SimpleType::str() const {
  switch (kind_) {
    case Kind::Unit:
      return "Unit";
    case Kind::Wire:
      return wire_.name;
    case Kind::Tensor: {
      std::string l = left_->str();
      if (left_->kind_ == Kind::Tensor) l = "(" + l + ")";
      return l + " * " + right_->str();
    }
  }
  return {};
}

bool operator==(const SimpleType& a, const SimpleType& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case SimpleType::Kind::Unit:
      return true;
    case SimpleType::Kind::Wire:
      return a.wire_ == b.wire_;
    case SimpleType::Kind::Tensor:
      return *a.left_ == *b.left_ && *a.right_ == *b.right_;
  }
  return false;
}

}  // namespace pqc
