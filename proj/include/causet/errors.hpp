#pragma once

#include <stdexcept>
#include <string>

namespace causet {

/// Base class for every error raised by the toolkit. `code()` is a stable
/// machine-readable identifier used in CLI error blocks.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

  /// Throws an error of the same dynamic type with a new message.
  [[noreturn]] virtual void rethrow(const std::string& message) const {
    throw Error(code_, message);
  }

 private:
  std::string code_;
};

#define CAUSET_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& message) : Error(#Name, message) {} \
    [[noreturn]] void rethrow(const std::string& message) const override { \
      throw Name(message);                                          \
    }                                                               \
  };

// graph
CAUSET_DEFINE_ERROR(ParseError)
CAUSET_DEFINE_ERROR(CycleError)
CAUSET_DEFINE_ERROR(RoleError)
CAUSET_DEFINE_ERROR(UnknownNode)
CAUSET_DEFINE_ERROR(NotIdentifiable)

// frame
CAUSET_DEFINE_ERROR(IoError)
CAUSET_DEFINE_ERROR(RaggedRowError)
CAUSET_DEFINE_ERROR(TypeConflictError)
CAUSET_DEFINE_ERROR(UnknownColumn)
CAUSET_DEFINE_ERROR(KindError)
CAUSET_DEFINE_ERROR(MissingDataError)
CAUSET_DEFINE_ERROR(EmptyFrame)

// numerics
CAUSET_DEFINE_ERROR(DimensionMismatch)
CAUSET_DEFINE_ERROR(SingleClassError)
CAUSET_DEFINE_ERROR(NoValidStrataError)
CAUSET_DEFINE_ERROR(InvalidDimension)
CAUSET_DEFINE_ERROR(InvalidArgument)

// reports
CAUSET_DEFINE_ERROR(SchemaMismatch)

#undef CAUSET_DEFINE_ERROR

}  // namespace causet
