#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tsqc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(const std::string& what, long expected, long actual)
      : Error(what + ": expected dimension " + std::to_string(expected) + ", got " +
              std::to_string(actual)) {}
};

/// A value failed the invariant check of its type at construction.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class UnknownLabel : public Error {
 public:
  explicit UnknownLabel(const std::string& label) : Error("unknown outcome label '" + label + "'") {}
};

class LabelMismatch : public Error {
 public:
  using Error::Error;
};

class ZeroProbabilityOutcome : public Error {
 public:
  explicit ZeroProbabilityOutcome(const std::string& label)
      : Error("outcome '" + label + "' has zero probability; cannot collapse onto it") {}
};

/// The post-selected outcome cannot occur once the intermediate measurement is
/// inserted, so the conditional distribution is undefined.
class ImpossiblePostSelection : public Error {
 public:
  explicit ImpossiblePostSelection(const std::string& label)
      : Error("post-selection on '" + label + "' is impossible with the intermediate measurement") {}
};

/// No Monte Carlo trial matched the requested final outcome.
class EmptySelection : public Error {
 public:
  EmptySelection(const std::string& label, std::uint64_t matched, std::uint64_t trials)
      : Error("no trial selected on final outcome '" + label + "' (" + std::to_string(matched) +
              " of " + std::to_string(trials) + " trials matched)"),
        matched_(matched),
        trials_(trials) {}

  std::uint64_t matched() const { return matched_; }
  std::uint64_t trials() const { return trials_; }

 private:
  std::uint64_t matched_;
  std::uint64_t trials_;
};

class UnknownScenario : public Error {
 public:
  explicit UnknownScenario(const std::string& name) : Error("unknown scenario '" + name + "'") {}
};

}  // namespace tsqc
