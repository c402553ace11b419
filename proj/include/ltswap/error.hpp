#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ltswap {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or missing configuration (dictionary path, config keys, templates).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. Carries the 1-based line number when known.
class InputError : public Error {
 public:
  InputError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Transport failure talking to an LLM or scorer endpoint.
class BackendError : public Error {
 public:
  using Error::Error;
};

// LLM answered, but the payload could not be extracted.
class MalformedResponse : public Error {
 public:
  MalformedResponse(const std::string& what, std::string raw)
      : Error(what), raw_(std::move(raw)) {}
  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

// A documented precondition was not met by the caller.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace ltswap
