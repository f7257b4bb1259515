#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace ktlab {

/// One machine word of message payload. Every word is an ID, a small
/// integer, or a hash word.
using Word = std::uint64_t;

/// Unique node identifier. IDs are positive; 0 is reserved as "none".
struct NodeId {
  std::uint32_t value = 0;

  constexpr NodeId() = default;
  constexpr explicit NodeId(std::uint32_t v) : value(v) {}

  constexpr bool valid() const { return value != 0; }
  constexpr Word word() const { return value; }
  static constexpr NodeId from_word(Word w) { return NodeId(static_cast<std::uint32_t>(w)); }

  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

inline std::ostream& operator<<(std::ostream& os, NodeId id) { return os << id.value; }

constexpr NodeId kNoNode{};

// Error hierarchy. Every failure the library reports derives from Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class ContractError : public Error {
 public:
  using Error::Error;
};

/// Raised by the engine for CONGEST violations (width, one message per edge per round, non-edges).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class NonTerminationError : public Error {
 public:
  using Error::Error;
};

/// A node program read knowledge outside its KT-rho ball.
class AuditError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ktlab

template <>
struct std::hash<ktlab::NodeId> {
  std::size_t operator()(ktlab::NodeId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
