#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wfp {

/// Thrown when an operation's precondition does not hold (composition-domain
/// mismatch, arity mismatch, unknown names, ...). Constraint violations are
/// never exceptions; they are collected into reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One entry of a validation or conformance report.
struct Violation {
  std::string code;                   // short machine-readable tag
  std::string message;                // human-readable text
  std::vector<std::string> witnesses; // element ids, lexicographically ordered

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  void add(std::string code, std::string message, std::vector<std::string> witnesses = {});
  void append(const ValidationReport& other);
  bool mentions(const std::string& witness) const;
};

}  // namespace wfp
