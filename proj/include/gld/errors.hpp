#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace gld {

// Base class for all failures surfaced by the toolkit. kind() is a stable
// machine-readable tag; the CLI prints it on its error line.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

#define GLD_DEFINE_ERROR(Name)                                        \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& message) : Error(#Name, message) {} \
  }

GLD_DEFINE_ERROR(EmptyCaption);
GLD_DEFINE_ERROR(ParseError);
GLD_DEFINE_ERROR(DuplicateId);
GLD_DEFINE_ERROR(MissingEmbedding);
GLD_DEFINE_ERROR(InsufficientImages);
GLD_DEFINE_ERROR(InsufficientBatch);
GLD_DEFINE_ERROR(MissingNeighbor);
GLD_DEFINE_ERROR(UnknownToken);
GLD_DEFINE_ERROR(TraceLengthError);

#undef GLD_DEFINE_ERROR

}  // namespace gld
