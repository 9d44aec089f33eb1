#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace saffine {

enum class ErrorKind {
  InvalidArgument,
  Degenerate,
  NotContracting,
  CoefficientSumExceeded,
  ConditionsFailed,
  TargetOutsideDelta,
  ResidualEscape,
  DegenerateParameters,
  CannotSeparate,
  SearchExhausted,
  ViewportEmpty,
  Parse,
};

constexpr std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::NotContracting: return "NotContracting";
    case ErrorKind::CoefficientSumExceeded: return "CoefficientSumExceeded";
    case ErrorKind::ConditionsFailed: return "ConditionsFailed";
    case ErrorKind::TargetOutsideDelta: return "TargetOutsideDelta";
    case ErrorKind::ResidualEscape: return "ResidualEscape";
    case ErrorKind::DegenerateParameters: return "DegenerateParameters";
    case ErrorKind::CannotSeparate: return "CannotSeparate";
    case ErrorKind::SearchExhausted: return "SearchExhausted";
    case ErrorKind::ViewportEmpty: return "ViewportEmpty";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace saffine
