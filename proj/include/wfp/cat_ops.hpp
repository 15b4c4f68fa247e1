#pragma once

#include <map>
#include <string>
#include <vector>

#include "wfp/graph.hpp"

namespace wfp {

/// Two arrows out of a common head.
struct Span {
  GraphPtr head;
  GraphMorphism left;
  GraphMorphism right;
};

struct Coproduct {
  GraphPtr sum;
  GraphMorphism left;   // m -> sum
  GraphMorphism right;  // n -> sum
};

struct Pullback {
  GraphPtr apex;
  GraphMorphism left;   // apex -> source(f)
  GraphMorphism right;  // apex -> source(g)
};

struct Pushout {
  GraphPtr object;
  GraphMorphism left;   // A -> object, A = target(e)
  GraphMorphism right;  // M -> object, M = target(w)
};

/// Finite diagram of graphs: labelled objects plus arrows between labels.
struct Diagram {
  struct Arrow {
    std::string src;
    std::string tgt;
    GraphMorphism map;
  };

  std::map<std::string, GraphPtr> objects;
  std::vector<Arrow> arrows;

  void add_object(const std::string& label, GraphPtr g);
  void add_arrow(const std::string& src, const std::string& tgt, GraphMorphism map);
};

struct Colimit {
  GraphPtr object;
  std::map<std::string, GraphMorphism> cocone;  // label -> injection
};

/// Disjoint union; elements are renamed `l.<id>` and `r.<id>`.
Coproduct coproduct(const GraphPtr& m, const GraphPtr& n);

/// Canonical pair construction. Apex ids are `(a|b)`.
Pullback pullback(const GraphMorphism& f, const GraphMorphism& g);

/// Pushout of the span e: E -> A, w: E -> M. Computed as the colimit of the
/// three-object diagram labelled A, E, M.
Pushout pushout(const GraphMorphism& e, const GraphMorphism& w);

/// Disjoint union of all objects modulo the equivalence generated by the
/// arrows. Each class is named by its lexicographically least qualified
/// member `label.id`.
Colimit colimit(const Diagram& d);

/// True iff the pullback of f and g is empty.
bool disjoint_images(const GraphMorphism& f, const GraphMorphism& g);

/// Target elements (nodes, then edges) hit by both maps.
std::vector<std::string> image_overlap(const GraphMorphism& f, const GraphMorphism& g);

}  // namespace wfp
