#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>

namespace pqc {

struct Label {
  std::uint32_t id = 0;

  std::string str() const { return "l" + std::to_string(id); }
  friend auto operator<=>(const Label&, const Label&) = default;
};

/// Fresh label source for one evaluation run. Never reuses an id.
class LabelSupply {
 public:
  explicit LabelSupply(std::uint32_t start = 0) : next_(start) {}
  Label fresh() { return Label{next_++}; }
  std::uint32_t peek() const { return next_; }
  /// Ensures subsequently issued labels are above `l`.
  void reserve_past(Label l) {
    if (l.id >= next_) next_ = l.id + 1;
  }

 private:
  std::uint32_t next_;
};

}  // namespace pqc

template <>
struct std::hash<pqc::Label> {
  std::size_t operator()(const pqc::Label& l) const noexcept {
    return std::hash<std::uint32_t>{}(l.id);
  }
};
