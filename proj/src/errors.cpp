#include "elt/errors.hpp"

namespace elt {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UnknownOperator: return "UnknownOperator";
    case Errc::UnknownPredicate: return "UnknownPredicate";
    case Errc::DuplicateEventType: return "DuplicateEventType";
    case Errc::AxiomViolation: return "AxiomViolation";
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::NonNumericCell: return "NonNumericCell";
    case Errc::TooShort: return "TooShort";
    case Errc::BadInterval: return "BadInterval";
    case Errc::OutOfBounds: return "OutOfBounds";
    case Errc::UnknownChannel: return "UnknownChannel";
    case Errc::SegmentTooShort: return "SegmentTooShort";
    case Errc::BadParameter: return "BadParameter";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::EmptyCandidates: return "EmptyCandidates";
    case Errc::EmptyCatalog: return "EmptyCatalog";
    case Errc::ChannelMismatch: return "ChannelMismatch";
    case Errc::BadThreshold: return "BadThreshold";
    case Errc::BadConfig: return "BadConfig";
    case Errc::IoError: return "IoError";
    case Errc::VersionMismatch: return "VersionMismatch";
  }
  return "UnknownError";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

void raise(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace elt
