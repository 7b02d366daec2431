#pragma once

#include <cassert>
#include <optional>
#include <string>
#include <utility>
#include <variant>

namespace v2xrelay {

// Error vocabulary shared by every module. Codes are stable identifiers;
// the detail string carries the offending field or context.
enum class Errc {
  kOutOfRange,
  kInvalidMessage,
  kFrameTruncated,
  kBadMagic,
  kChecksumMismatch,
  kBodyTooLarge,
  kMalformedBody,
  kUnknownKind,
  kNotConnected,
  kUnregisteredClient,
  kProtocolError,
  kDuplicateRecord,
  kCausalityViolation,
  kBadKey,
  kConnectionClosed,
  kProtocolViolation,
  kConfigError,
  kPortInUse,
  kParseError,
  kIoError,
  kChainBroken,
};

const char* errc_name(Errc code);

struct Error {
  Errc code;
  std::string detail;

  std::string to_string() const;
};

inline Error make_error(Errc code, std::string detail = {}) {
  return Error{code, std::move(detail)};
}

template <typename T>
class [[nodiscard]] Result {
 public:
  Result(T value) : v_(std::move(value)) {}
  Result(Error err) : v_(std::move(err)) {}

  bool ok() const { return std::holds_alternative<T>(v_); }
  explicit operator bool() const { return ok(); }

  T& value() {
    assert(ok());
    return std::get<T>(v_);
  }
  const T& value() const {
    assert(ok());
    return std::get<T>(v_);
  }
  const Error& error() const {
    assert(!ok());
    return std::get<Error>(v_);
  }

 private:
  std::variant<T, Error> v_;
};

template <>
class [[nodiscard]] Result<void> {
 public:
  Result() = default;
  Result(Error err) : err_(std::move(err)) {}

  bool ok() const { return !err_.has_value(); }
  explicit operator bool() const { return ok(); }
  const Error& error() const {
    assert(!ok());
    return *err_;
  }

 private:
  std::optional<Error> err_;
};

}  // namespace v2xrelay
