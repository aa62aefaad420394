#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace strata {

enum class ErrorCode {
  // pddl
  SyntaxError,
  DuplicateAction,
  UnboundVariable,
  UnknownAction,
  ArityMismatch,
  // webenv
  ConfigError,
  // llm
  MissingSlot,
  TransportError,
  UnscriptedRequest,
  RateLimited,
  ParseFailure,
  // agent
  InconsistentPlan,
  // eval
  JudgeError,
  EmptyInput,
  SchemaError,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::DuplicateAction: return "DuplicateAction";
    case ErrorCode::UnboundVariable: return "UnboundVariable";
    case ErrorCode::UnknownAction: return "UnknownAction";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::MissingSlot: return "MissingSlot";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::UnscriptedRequest: return "UnscriptedRequest";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::ParseFailure: return "ParseFailure";
    case ErrorCode::InconsistentPlan: return "InconsistentPlan";
    case ErrorCode::JudgeError: return "JudgeError";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::SchemaError: return "SchemaError";
  }
  return "UnknownError";
}

/// Base class for every structured failure raised by the library. The
/// code discriminates the failure class; context fields (line/column,
/// config path, raw model text) are filled where they make sense.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code),
        message_(std::move(message)) {}

  ErrorCode code() const { return code_; }
  const std::string& message() const { return message_; }

  Error& with_location(int line, int column) {
    line_ = line;
    column_ = column;
    return *this;
  }
  Error& with_path(std::string path) {
    path_ = std::move(path);
    return *this;
  }
  Error& with_raw(std::string raw) {
    raw_ = std::move(raw);
    return *this;
  }

  std::optional<int> line() const { return line_; }
  std::optional<int> column() const { return column_; }
  const std::optional<std::string>& path() const { return path_; }
  const std::optional<std::string>& raw() const { return raw_; }

 private:
  ErrorCode code_;
  std::string message_;
  std::optional<int> line_;
  std::optional<int> column_;
  std::optional<std::string> path_;
  std::optional<std::string> raw_;
};

}  // namespace strata
