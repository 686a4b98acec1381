#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace specsyn {

/// Base class of every error raised by the library. `kind()` is a stable
/// short name used in reports and CLI diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column)
      : Error("ParseError", std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

#define SPECSYN_DEFINE_ERROR(Name)                                         \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& msg) : Error(#Name, msg) {}          \
  };

SPECSYN_DEFINE_ERROR(EmptyUnit)
SPECSYN_DEFINE_ERROR(AttachmentError)
SPECSYN_DEFINE_ERROR(DuplicateName)
SPECSYN_DEFINE_ERROR(DanglingDependency)
SPECSYN_DEFINE_ERROR(TransportError)
SPECSYN_DEFINE_ERROR(ReplayMiss)
SPECSYN_DEFINE_ERROR(ExtractionEmpty)
SPECSYN_DEFINE_ERROR(NoApplicableSites)
SPECSYN_DEFINE_ERROR(ToolchainMissing)
SPECSYN_DEFINE_ERROR(EmptyVariantSet)
SPECSYN_DEFINE_ERROR(BackendUnavailable)
SPECSYN_DEFINE_ERROR(MalformedOutput)
SPECSYN_DEFINE_ERROR(NoGenerated)
SPECSYN_DEFINE_ERROR(UnresolvablePOI)
SPECSYN_DEFINE_ERROR(IoError)

#undef SPECSYN_DEFINE_ERROR

/// Invalid configuration value; `field()` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& msg)
      : Error("ConfigError", field + ": " + msg), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace specsyn
