#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pqc/ast.hpp"
#include "pqc/gateset.hpp"

namespace pqc {

struct Token {
  enum class Kind {
    Ident,
    KwLet,
    KwIn,
    KwLift,
    KwForce,
    KwBox,
    KwApply,
    KwReverse,
    KwControlled,
    KwWithComputed,
    KwFun,
    Circ,      // Circ, Circ0, Circ1, Circ2
    Lambda,    // backslash
    Dot,
    Comma,
    LParen,
    RParen,
    Colon,
    Equals,
    Star,
    Arrow,     // -o, ->, optionally followed by a modality digit
    Bang,      // !, optionally followed by a modality digit
    CtrlSpec,  // [+-...]
    Eof,
  };

  Kind kind = Kind::Eof;
  std::string text;
  Span span;
  ModHole mod;
  /// First token on its line.
  bool line_start = false;
};

std::string to_string(Token::Kind k);

/// Throws SourceError(E-LEX).
std::vector<Token> tokenize(std::string_view source);

/// Top-level definitions separated by layout: a token in column 1 starts a
/// new declaration or definition. Throws SourceError(E-LEX / E-PARSE).
Program parse_program(std::string_view source);
/// A single term; free identifiers that are not in `bound` become constants.
TermPtr parse_term(std::string_view source, const std::vector<std::string>& bound = {});
TypePtr parse_type(std::string_view source);

/// Replaces gate constants by lifted one-gate circuit literals. A gate with
/// an n-wire input (n >= 2) applied to n separate arguments receives them as
/// one tuple. Throws SourceError(E-TYPE) for unknown constants.
Program elaborate_gates(const Program& p, const GateSet& gates);
TermPtr elaborate_gates(const TermPtr& t, const GateSet& gates);

/// Lift(\a. apply(circ(S, G, U), a)) for one gate.
TermPtr gate_term(const GateDef& def, Span span = {});

}  // namespace pqc
