#ifndef MRPC_ERRORS_HPP
#define MRPC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mrpc {

// Broad failure classes; the CLI maps them to exit codes (config=2, io=3, numeric=4).
enum class ErrorCategory { Config, Io, Numeric };

class Error : public std::runtime_error {
 public:
  Error(std::string name, ErrorCategory category, const std::string& message)
      : std::runtime_error(name + ": " + message),
        name_(std::move(name)),
        category_(category) {}

  const std::string& name() const noexcept { return name_; }
  ErrorCategory category() const noexcept { return category_; }

 private:
  std::string name_;
  ErrorCategory category_;
};

#define MRPC_DEFINE_ERROR(NAME, CATEGORY)                       \
  class NAME : public Error {                                   \
   public:                                                      \
    explicit NAME(const std::string& message)                   \
        : Error(#NAME, ErrorCategory::CATEGORY, message) {}     \
  }

MRPC_DEFINE_ERROR(DimensionMismatch, Config);
MRPC_DEFINE_ERROR(KindMismatch, Config);
MRPC_DEFINE_ERROR(ShapeMismatch, Config);
MRPC_DEFINE_ERROR(SpecMismatch, Config);
MRPC_DEFINE_ERROR(LengthMismatch, Config);
MRPC_DEFINE_ERROR(InvalidSize, Config);
MRPC_DEFINE_ERROR(InvalidBeta, Config);
MRPC_DEFINE_ERROR(EmptyInput, Config);
MRPC_DEFINE_ERROR(TooFewPoints, Config);
MRPC_DEFINE_ERROR(TooFewFrames, Config);
MRPC_DEFINE_ERROR(ImageTooSmall, Config);
MRPC_DEFINE_ERROR(ConfigError, Config);

MRPC_DEFINE_ERROR(NonSymmetric, Numeric);
MRPC_DEFINE_ERROR(NotPositiveDefinite, Numeric);
MRPC_DEFINE_ERROR(DegenerateSpectrum, Numeric);

MRPC_DEFINE_ERROR(IoError, Io);
MRPC_DEFINE_ERROR(SchemaError, Io);
MRPC_DEFINE_ERROR(InvariantViolation, Io);

#undef MRPC_DEFINE_ERROR

}  // namespace mrpc

#endif  // MRPC_ERRORS_HPP
