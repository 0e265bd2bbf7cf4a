#pragma once

#include <stdexcept>
#include <string>

namespace elt {

enum class Errc {
  // schema / DSL
  SyntaxError,
  UnknownOperator,
  UnknownPredicate,
  DuplicateEventType,
  AxiomViolation,
  // ingestion
  MissingColumn,
  NonNumericCell,
  TooShort,
  BadInterval,
  // feature / predicate evaluation
  OutOfBounds,
  UnknownChannel,
  SegmentTooShort,
  BadParameter,
  // engine
  ShapeMismatch,
  BudgetExceeded,
  EmptyCandidates,
  EmptyCatalog,
  ChannelMismatch,
  BadThreshold,
  // io / config
  BadConfig,
  IoError,
  VersionMismatch,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void raise(Errc code, const std::string& message);

}  // namespace elt
