#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bell {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (rational strings, model JSON, ledger CSV).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// An operation that requires a well-formed model was handed one that is not.
class InvalidModel : public Error {
 public:
  explicit InvalidModel(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

class UnknownSetting : public Error {
 public:
  using Error::Error;
};

/// A resource guard (product-space cells, enumeration count) refused the request.
class SizeExceeded : public Error {
 public:
  SizeExceeded(const std::string& what, std::uint64_t requested, std::uint64_t limit);
  std::uint64_t requested() const noexcept { return requested_; }
  std::uint64_t limit() const noexcept { return limit_; }

 private:
  std::uint64_t requested_;
  std::uint64_t limit_;
};

/// Precondition failures on numeric arguments (bias vectors, ranges, empty contexts).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace bell
