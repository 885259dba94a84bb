#pragma once

#include <stdexcept>
#include <string>

namespace sgc {

/// A caller-supplied callback broke its documented contract.
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

/// Config file rejected; carries the offending line (0 when not line-bound)
/// and the field name.
struct ConfigError : std::runtime_error {
  int line;
  std::string field;
  ConfigError(int line_, std::string field_, const std::string& what_)
      : std::runtime_error(what_), line(line_), field(std::move(field_)) {}
};

}  // namespace sgc
