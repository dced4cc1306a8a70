#pragma once

#include <stdexcept>
#include <string>

namespace pacs {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed formula text. Carries the byte offset of the failure.
class ParseError : public Error {
public:
  ParseError(const std::string& what, size_t position)
      : Error(what), position_(position) {}
  size_t position() const { return position_; }

private:
  size_t position_;
};

/// An operation that requires a consistent context was given an
/// unsatisfiable one.
class InconsistentContext : public Error {
public:
  using Error::Error;
};

/// The atom universe exceeds the exact-counting cap.
class VocabularyTooLarge : public Error {
public:
  using Error::Error;
};

/// A scripted sampler has no continuation for the requested chain.
class SamplerExhausted : public Error {
public:
  using Error::Error;
};

/// A population sampler was conditioned on a chain no reasoner holds.
class ImpossibleCondition : public Error {
public:
  using Error::Error;
};

/// All completion requests failed after retries.
class TransportError : public Error {
public:
  using Error::Error;
};

/// A model generation contained neither a logic line nor a return line.
class UnparseableGeneration : public Error {
public:
  using Error::Error;
};

/// A search halted without collecting any completed path.
class NoPathsFound : public Error {
public:
  using Error::Error;
};

/// estimate_ap was called on an empty path list.
class EmptySampleSet : public Error {
public:
  using Error::Error;
};

/// The early-stopping equivalence check failed. Carries the offending
/// full belief vector, rendered.
class EquivalenceViolation : public Error {
public:
  EquivalenceViolation(const std::string& what, std::string offending)
      : Error(what), offending_(std::move(offending)) {}
  const std::string& offending() const { return offending_; }

private:
  std::string offending_;
};

/// Bad dataset, script, or population file.
class DatasetError : public Error {
public:
  using Error::Error;
};

}  // namespace pacs
