#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wfp/metamodel.hpp"

namespace wfp {

enum class ClaimKind { Atomic, All, Opaque };

/// A named claim: one constraint, a conjunction of other claims, or an
/// opaque statement that only a human can establish.
struct Claim {
  std::string name;
  ClaimKind kind = ClaimKind::Atomic;
  std::optional<ConstraintBody> atom;  // Atomic
  std::vector<std::string> parts;      // All
  std::string text;                    // Opaque
};

enum class StepKind { Definitional, MultiplicityComposition, Conjunction, Semantic };

std::string_view to_string(StepKind k);
std::optional<StepKind> parse_step_kind(std::string_view s);

struct Step {
  int index = 0;
  std::string conclusion;
  StepKind kind = StepKind::Definitional;
  std::vector<std::string> premises;
  std::string justification;
};

struct DerivationTree {
  std::string name;
  Metamodel metamodel;
  std::map<std::string, Claim> claims;
  std::vector<Step> steps;  // ascending index
  std::string top;

  /// Claims no step concludes.
  std::vector<std::string> given() const;
  const Step* concluding(const std::string& claim) const;
};

/// Premises must be given or concluded by an earlier step; given claims must
/// be atomic; non-semantic steps may not involve opaque claims.
ValidationReport check_tree(const DerivationTree& t);

enum class StepStatus { Sound, Refuted, Assumed };
std::string_view to_string(StepStatus s);

struct StepVerdict {
  int index = 0;
  StepStatus status = StepStatus::Sound;
  std::optional<Instance> counterexample;  // satisfies the premises, violates the conclusion
  std::size_t instances = 0;               // premise-satisfying instances examined
  std::string note;
};

/// Exhaustive check over instances with at most `bound` objects per class.
/// `step` is a position in t.steps. Throws on bound 0.
StepVerdict check_step(const DerivationTree& t, std::size_t step, int bound);

struct ChainReport {
  int bound = 0;
  std::vector<StepVerdict> steps;
  bool transitivity_checked = false;
  bool transitivity_holds = false;
  std::size_t transitivity_instances = 0;
  std::optional<Instance> transitivity_counterexample;

  bool refuted() const;
  std::string to_text(const DerivationTree& t) const;
  /// `claim<TAB>status<TAB>premises` per claim.
  std::string to_lines(const DerivationTree& t) const;
};

/// Checks every step; when none is refuted, also checks that every bounded
/// instance satisfying the given claims satisfies the top claim.
ChainReport check_chain(const DerivationTree& t, int bound);

struct ClaimEvaluation {
  std::map<std::string, bool> values;
  std::map<std::string, std::vector<std::string>> failing_leaves;
};

/// Given claims are evaluated directly; a derived claim holds iff every given
/// claim it (recursively) rests on holds.
ClaimEvaluation evaluate_claims(const DerivationTree& t, const Instance& i);

}  // namespace wfp
