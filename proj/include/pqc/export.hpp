#pragma once

#include <string>
#include <string_view>

#include "pqc/circuit.hpp"
#include "pqc/gateset.hpp"

namespace pqc {

class FormatError : public Error {
 public:
  using Error::Error;
};

/// Circuit as JSON. Conjugations are kept as nested circuits.
std::string to_json(const Circuit& c, int indent = 2);

/// Inverse of to_json. Gate names are resolved against `gates`; throws
/// FormatError on malformed input, unknown gates or invalid wire flow.
Circuit from_json(std::string_view text, const GateSet& gates);

/// Text diagram, one row per wire, time flowing left to right.
std::string to_ascii(const Circuit& c);

}  // namespace pqc
