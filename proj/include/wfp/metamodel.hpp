#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wfp/graph.hpp"
#include "wfp/literal.hpp"

namespace wfp {

// ---------------------------------------------------------------------------
// Constraints

enum class End { Src, Tgt };

std::string_view to_string(End e);

/// `end == Tgt`: every source object has between `lower` and `upper` links.
/// `end == Src`: every target object has between `lower` and `upper` incoming
/// links. `edge` may name an association/attribute edge or a derived
/// association.
struct Multiplicity {
  std::string edge;
  End end = End::Tgt;
  std::int64_t lower = 0;
  std::optional<std::int64_t> upper;  // nullopt = unbounded
  bool operator==(const Multiplicity&) const = default;
};

/// Link tuples over the listed edges identify their source object.
struct Key {
  std::vector<std::string> edges;
  bool operator==(const Key&) const = default;
};

/// Every source object has exactly one link among the listed edges.
struct Xor {
  std::vector<std::string> edges;
  bool operator==(const Xor&) const = default;
};

/// Every value reached through the attribute edge is `true`.
struct ValidityTrue {
  std::string edge;
  bool operator==(const ValidityTrue&) const = default;
};

/// Links of a materialised edge coincide with a derived association.
struct DerivedEquality {
  std::string derived;
  std::string edge;
  bool operator==(const DerivedEquality&) const = default;
};

using ConstraintBody = std::variant<Multiplicity, Key, Xor, ValidityTrue, DerivedEquality>;

struct Constraint {
  std::string id;
  ConstraintBody body;

  bool operator==(const Constraint&) const = default;
  bool same_content(const Constraint& other) const { return body == other.body; }
};

/// Id used when a constraint is declared without an explicit label,
/// e.g. `mult.Containment.tgt` or `xor.SSE.in.FTA.in`.
std::string default_constraint_id(const ConstraintBody& body);

/// One-line rendering, e.g. `mult Containment tgt 1 1`.
std::string describe(const ConstraintBody& body);

/// Edge ids and derived names a constraint mentions.
std::vector<std::string> referenced_names(const ConstraintBody& body);

// ---------------------------------------------------------------------------
// Metamodels

struct DerivedAssoc {
  std::string name;
  std::vector<std::string> chain;  // association edge ids, composable end to end
  bool operator==(const DerivedAssoc&) const = default;
};

struct Metamodel {
  std::string name;
  GraphPtr graph = empty_graph();
  std::vector<Constraint> constraints;          // sorted by id
  std::map<std::string, DerivedAssoc> derived;  // by name

  const Constraint* find_constraint(const std::string& id) const;
  bool operator==(const Metamodel& other) const;
};

/// Checks that constraints and derived chains only mention elements of the
/// type graph, multiplicity bounds are ordered, xor lists share a source.
ValidationReport check_metamodel(const Metamodel& m);

/// Sorts constraints, validates, throws wfp::Error with the first problem.
Metamodel make_metamodel(std::string name, GraphPtr graph, std::vector<Constraint> constraints,
                         std::vector<DerivedAssoc> derived = {});

/// Source and target node of an edge or derived association.
std::pair<std::string, std::string> endpoints(const Metamodel& m, const std::string& edge_or_derived);

/// Sub-metamodel on `keep` (node ids) minus `drop` (edge ids). Edges between
/// kept nodes are included; constraints and derived associations survive when
/// every element they mention survives.
Metamodel sub_metamodel(const Metamodel& base, std::string name, const std::set<std::string>& keep,
                        const std::set<std::string>& drop = {});

// ---------------------------------------------------------------------------
// Instances

/// Data graph typed over a type graph. Value nodes carry literals.
struct Instance {
  GraphPtr data = empty_graph();
  GraphMorphism typing;
  std::map<std::string, Literal> values;

  const GraphPtr& type_graph() const { return typing.target; }
  const std::string& type_of(const std::string& node) const { return typing.node(node); }
  std::vector<std::string> objects_of(const std::string& type) const;

  bool operator==(const Instance& other) const;
};

/// Incremental construction of an Instance. Elements whose id already exists
/// are accepted when they agree with the existing element (same type, same
/// endpoints, same literal) and rejected otherwise.
class InstanceBuilder {
 public:
  explicit InstanceBuilder(GraphPtr type_graph);
  explicit InstanceBuilder(const Instance& base);

  InstanceBuilder& object(const std::string& id, const std::string& type);
  InstanceBuilder& link(const std::string& type_edge, const std::string& src, const std::string& tgt,
                        std::optional<std::string> id = std::nullopt);
  /// Adds a value node `<obj>.<attr>` (or `id`) and the attribute link to it.
  InstanceBuilder& value(const std::string& obj, const std::string& attr_edge, Literal v,
                         std::optional<std::string> id = std::nullopt);
  /// Low-level node insertion; value-typed nodes must carry a literal.
  InstanceBuilder& node(const std::string& id, const std::string& type, std::optional<Literal> value = std::nullopt);
  /// Removes a node (and its incident links) or a link.
  InstanceBuilder& erase(const std::string& id);

  bool has_node(const std::string& id) const { return nodes_.count(id) != 0; }
  bool has_edge(const std::string& id) const { return edges_.count(id) != 0; }
  const GraphPtr& type_graph() const { return type_graph_; }

  Instance build() const;

  static std::string default_link_id(const std::string& type_edge, const std::string& src, const std::string& tgt);
  static std::string default_value_id(const std::string& obj, const std::string& attr_edge);

 private:
  struct NodeRec {
    std::string type;
    std::optional<Literal> value;
  };
  struct EdgeRec {
    std::string type, src, tgt;
  };
  GraphPtr type_graph_;
  std::map<std::string, NodeRec> nodes_;
  std::map<std::string, EdgeRec> edges_;
};

/// Re-types an instance along a metamodel map (writing by composition).
Instance push_forward(const Instance& i, const GraphMorphism& f);

/// Projection of an instance along e: M -> N (computed by pullback of the
/// typing and e). Elements keep their data ids when the type has a single
/// preimage under e and become `<id>@<type>` otherwise.
Instance restrict(const Instance& i, const GraphMorphism& e);

// ---------------------------------------------------------------------------
// Conformance

struct Verdict {
  bool holds = true;
  std::vector<std::string> witnesses;  // sorted
  std::string detail;
};

struct ConformanceReport {
  bool typing_ok = true;
  ValidationReport typing;
  std::vector<std::pair<Constraint, Verdict>> verdicts;

  bool conforms() const;
  std::vector<std::pair<Constraint, Verdict>> violated() const;
  bool mentions(const std::string& witness) const;
  std::string to_text() const;
};

Verdict eval_constraint(const Metamodel& m, const Constraint& c, const Instance& i);

ConformanceReport conforms(const Instance& i, const Metamodel& m);

struct DerivedLinks {
  std::map<std::pair<std::string, std::string>, std::int64_t> pairs;  // (src, tgt) -> path count
  std::int64_t lower = 0;                   // inferred at the target end
  std::optional<std::int64_t> upper;        // nullopt = unbounded
};

/// Relational composition of the chain registered under `name`, with
/// multiplicity bounds inferred by interval product.
DerivedLinks derive_association(const Metamodel& m, const Instance& i, const std::string& name);

struct AttributeMax {
  std::map<std::string, std::int64_t> values;  // group object -> max member value
  ValidationReport violations;                  // empty groups
};

/// For each object of the membership edge's target class, the maximum of the
/// members' integer attribute.
AttributeMax derived_attribute_max(const Instance& i, const std::string& membership_edge,
                                   const std::string& member_attr);

}  // namespace wfp
