#pragma once

#include <complex>
#include <string>

#include <Eigen/Dense>

#include "pqc/circuit.hpp"

namespace pqc {

/// Dense 2^m x 2^n complex matrix. Basis indices are big-endian over the
/// wire order: the first wire is the most significant bit.
using LinearMap = Eigen::MatrixXcd;

class OracleError : public Error {
 public:
  enum class Kind { UnsupportedGate, DimensionCap, ShapeMismatch, NotSquare };
  OracleError(Kind k, const std::string& msg) : Error(msg), kind_(k) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string to_string(OracleError::Kind k);

inline constexpr int kDefaultWireCap = 10;

/// Matrix of a built-in gate (undaggered, uncontrolled). Throws
/// UnsupportedGate for gates with no registered matrix.
LinearMap gate_matrix(const GateDef& def);

/// Columns index the circuit's inputs, rows its outputs. `cap` bounds the
/// number of simultaneously live wires.
LinearMap circuit_to_map(const Circuit& c, int cap = kDefaultWireCap);

/// P_K (x) U + (I - P_K) (x) I.
LinearMap controlled_map(const ControlSpec& k, const LinearMap& u);

/// Largest absolute entry of a - b. Throws ShapeMismatch.
double max_abs_diff(const LinearMap& a, const LinearMap& b);
bool maps_equal(const LinearMap& a, const LinearMap& b, double tol);

/// Permutation matrix sending wire i of the input to position perm[i].
LinearMap wire_permutation(const std::vector<std::size_t>& perm);

}  // namespace pqc
