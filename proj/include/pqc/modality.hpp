#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

namespace pqc {

/// Element of the lattice 2 > 1 > 0.
///   2: reversible and controllable
///   1: reversible only
///   0: neither
class Modality {
 public:
  constexpr Modality() = default;
  constexpr explicit Modality(int v) : value_(static_cast<std::uint8_t>(v)) {
    if (v < 0 || v > 2) throw std::out_of_range("modality must be 0, 1 or 2");
  }

  static constexpr Modality general() { return Modality(0); }
  static constexpr Modality reversible() { return Modality(1); }
  static constexpr Modality controllable() { return Modality(2); }

  constexpr int value() const { return value_; }
  constexpr bool is_reversible() const { return value_ >= 1; }
  constexpr bool is_controllable() const { return value_ == 2; }

  friend constexpr Modality meet(Modality a, Modality b) {
    return Modality(std::min(a.value_, b.value_));
  }
  friend constexpr auto operator<=>(Modality, Modality) = default;
  friend std::ostream& operator<<(std::ostream& os, Modality m) {
    return os << static_cast<int>(m.value_);
  }

 private:
  std::uint8_t value_ = 2;
};

inline std::string to_string(Modality m) { return std::to_string(m.value()); }

}  // namespace pqc
