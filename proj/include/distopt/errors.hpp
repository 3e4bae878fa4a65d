#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace distopt {

// Input violates a modelling assumption or a precondition of an operation.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Integration produced a non-finite or out-of-bound state.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double blowup_time,
                  std::vector<std::size_t> components = {})
      : std::runtime_error(what),
        blowup_time_(blowup_time),
        components_(std::move(components)) {}

  double blowup_time() const { return blowup_time_; }
  // Offending state indices (integrator) or agent indices (simulator).
  const std::vector<std::size_t>& components() const { return components_; }

 private:
  double blowup_time_;
  std::vector<std::size_t> components_;
};

// Scenario file could not be parsed against the schema.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, int line, const std::string& message)
      : std::runtime_error(format(field, line, message)),
        field_(field),
        line_(line) {}

  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& field, int line,
                            const std::string& message) {
    std::string out = "config error";
    if (!field.empty()) out += " in '" + field + "'";
    if (line > 0) out += " (line " + std::to_string(line) + ")";
    return out + ": " + message;
  }

  std::string field_;
  int line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace distopt
