#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "wfp/error.hpp"

namespace wfp {

enum class NodeKind { Class, ValueType, ProcessClass, Port };
enum class EdgeKind { Association, Attribute, Dataflow };

std::string_view to_string(NodeKind k);
std::string_view to_string(EdgeKind k);

struct Node {
  std::string id;
  NodeKind kind = NodeKind::Class;
  bool operator==(const Node&) const = default;
};

struct Edge {
  std::string id;
  std::string src;
  std::string tgt;
  EdgeKind kind = EdgeKind::Association;
  bool operator==(const Edge&) const = default;
};

/// Finite directed multigraph with kinded nodes and edges. Immutable once
/// built; nodes and edges are kept in lexicographic id order so every walk
/// over a graph is deterministic.
class Graph {
 public:
  Graph() = default;

  /// Throws wfp::Error on duplicate ids or dangling edge endpoints.
  Graph(std::vector<Node> nodes, std::vector<Edge> edges);

  const std::map<std::string, Node>& nodes() const { return nodes_; }
  const std::map<std::string, Edge>& edges() const { return edges_; }

  bool has_node(const std::string& id) const { return nodes_.count(id) != 0; }
  bool has_edge(const std::string& id) const { return edges_.count(id) != 0; }
  const Node& node(const std::string& id) const;
  const Edge& edge(const std::string& id) const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return nodes_.empty() && edges_.empty(); }

  bool operator==(const Graph&) const = default;

 private:
  std::map<std::string, Node> nodes_;
  std::map<std::string, Edge> edges_;
};

using GraphPtr = std::shared_ptr<const Graph>;

GraphPtr make_graph(std::vector<Node> nodes, std::vector<Edge> edges);
GraphPtr make_graph(Graph g);
GraphPtr empty_graph();

/// Pointer identity or structural equality.
bool same_graph(const GraphPtr& a, const GraphPtr& b);

/// Subgraph on the given node ids plus every edge between them.
GraphPtr induced_subgraph(const Graph& g, const std::set<std::string>& node_ids);

/// Map between graphs. Validity (totality, structure and kind preservation)
/// is not enforced on construction; see check_morphism.
struct GraphMorphism {
  GraphPtr source;
  GraphPtr target;
  std::map<std::string, std::string> node_map;
  std::map<std::string, std::string> edge_map;

  const std::string& node(const std::string& id) const;
  const std::string& edge(const std::string& id) const;

  /// Same source/target graphs and identical maps.
  bool operator==(const GraphMorphism& other) const;
};

GraphMorphism identity(const GraphPtr& g);

/// Identity-on-ids map from `sub` into `super`. Throws if an element of
/// `sub` has no namesake in `super`.
GraphMorphism inclusion(const GraphPtr& sub, const GraphPtr& super);

ValidationReport check_morphism(const GraphMorphism& m);

/// Diagrammatic composition: first `f`, then `g`. Requires target(f) = source(g).
GraphMorphism compose(const GraphMorphism& f, const GraphMorphism& g);

bool is_injective(const GraphMorphism& m);

/// Elements of the target hit by the map (node ids, edge ids).
std::pair<std::set<std::string>, std::set<std::string>> image(const GraphMorphism& m);

}  // namespace wfp
