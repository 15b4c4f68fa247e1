#pragma once

#include "wfp/graph.hpp"
#include "wfp/metamodel.hpp"

namespace wfp {

/// Kind-preserving isomorphism of plain graphs (ids ignored).
bool isomorphic(const Graph& a, const Graph& b);

/// Isomorphism of typed instances over equal type graphs: the bijection must
/// preserve typing and literal bindings.
bool isomorphic(const Instance& a, const Instance& b);

}  // namespace wfp
