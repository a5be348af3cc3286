#pragma once

#include <stdexcept>
#include <string>

namespace wafergp {

/// Runtime failure with a stable machine-readable code alongside the
/// human-readable message. Codes are short kebab-case tokens
/// ("csv-malformed", "zero-variance", ...) and are part of the CLI
/// contract: the front end prints "error: <code>: <message>" on one line.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace wafergp
