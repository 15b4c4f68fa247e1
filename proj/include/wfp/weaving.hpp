#pragma once

#include <string>
#include <vector>

#include "wfp/metamodel.hpp"

namespace wfp {

struct Advice {
  std::string name;
  Metamodel advice;
  Metamodel entry;
  GraphMorphism embedding;  // entry -> advice, injective
};

struct EntryPoint {
  std::string name;
  GraphMorphism binding;  // entry -> main
};

struct Woven {
  Metamodel metamodel;
  GraphMorphism from_main;
  GraphMorphism from_advice;
};

/// Advice embedding must be an injective morphism and every entry constraint
/// must reappear (translated) among the advice constraints.
ValidationReport check_advice(const Advice& a);

/// Pushout of (embedding, binding). Elements glued to the main metamodel keep
/// their main id; advice-only elements are renamed `<prefix><id>`. Advice
/// constraints and derived associations are carried along with the same
/// prefix; a constraint already present in main with equal content is not
/// duplicated, an equal id with different content is an error.
Woven weave(const Metamodel& main, const Advice& a, const EntryPoint& p, const std::string& prefix = "rev1.",
            const std::string& name = "");

/// Weaves at every point. Point k in name order uses prefix `rev<k>.`, so the
/// result does not depend on the order of `points`. Bindings that share a
/// main element other than a value type are rejected.
Metamodel weave_all(const Metamodel& main, const Advice& a, const std::vector<EntryPoint>& points,
                    const std::string& name = "");

}  // namespace wfp
