#include "wfp/graph.hpp"

namespace wfp {

std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Class: return "class";
    case NodeKind::ValueType: return "vtype";
    case NodeKind::ProcessClass: return "pclass";
    case NodeKind::Port: return "port";
  }
  return "?";
}

std::string_view to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::Association: return "assoc";
    case EdgeKind::Attribute: return "attr";
    case EdgeKind::Dataflow: return "dataflow";
  }
  return "?";
}

Graph::Graph(std::vector<Node> nodes, std::vector<Edge> edges) {
  for (auto& n : nodes) {
    const std::string id = n.id;
    if (!nodes_.emplace(id, std::move(n)).second) throw Error("duplicate node id '" + id + "'");
  }
  for (auto& e : edges) {
    if (!has_node(e.src)) throw Error("edge '" + e.id + "' has unknown source '" + e.src + "'");
    if (!has_node(e.tgt)) throw Error("edge '" + e.id + "' has unknown target '" + e.tgt + "'");
    const std::string id = e.id;
    if (!edges_.emplace(id, std::move(e)).second) throw Error("duplicate edge id '" + id + "'");
  }
}

const Node& Graph::node(const std::string& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error("unknown node '" + id + "'");
  return it->second;
}

const Edge& Graph::edge(const std::string& id) const {
  auto it = edges_.find(id);
  if (it == edges_.end()) throw Error("unknown edge '" + id + "'");
  return it->second;
}

GraphPtr make_graph(std::vector<Node> nodes, std::vector<Edge> edges) {
  return std::make_shared<const Graph>(std::move(nodes), std::move(edges));
}

GraphPtr make_graph(Graph g) { return std::make_shared<const Graph>(std::move(g)); }

GraphPtr empty_graph() {
  static const GraphPtr empty = std::make_shared<const Graph>();
  return empty;
}

bool same_graph(const GraphPtr& a, const GraphPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

GraphPtr induced_subgraph(const Graph& g, const std::set<std::string>& node_ids) {
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  for (const auto& [id, n] : g.nodes())
    if (node_ids.count(id)) nodes.push_back(n);
  for (const auto& [id, e] : g.edges())
    if (node_ids.count(e.src) && node_ids.count(e.tgt)) edges.push_back(e);
  return make_graph(std::move(nodes), std::move(edges));
}

const std::string& GraphMorphism::node(const std::string& id) const {
  auto it = node_map.find(id);
  if (it == node_map.end()) throw Error("morphism does not map node '" + id + "'");
  return it->second;
}

const std::string& GraphMorphism::edge(const std::string& id) const {
  auto it = edge_map.find(id);
  if (it == edge_map.end()) throw Error("morphism does not map edge '" + id + "'");
  return it->second;
}

bool GraphMorphism::operator==(const GraphMorphism& other) const {
  return same_graph(source, other.source) && same_graph(target, other.target) &&
         node_map == other.node_map && edge_map == other.edge_map;
}

GraphMorphism identity(const GraphPtr& g) {
  GraphMorphism m{g, g, {}, {}};
  for (const auto& [id, n] : g->nodes()) m.node_map.emplace(id, id);
  for (const auto& [id, e] : g->edges()) m.edge_map.emplace(id, id);
  return m;
}

GraphMorphism inclusion(const GraphPtr& sub, const GraphPtr& super) {
  GraphMorphism m{sub, super, {}, {}};
  for (const auto& [id, n] : sub->nodes()) {
    if (!super->has_node(id)) throw Error("inclusion: node '" + id + "' missing from target");
    m.node_map.emplace(id, id);
  }
  for (const auto& [id, e] : sub->edges()) {
    if (!super->has_edge(id)) throw Error("inclusion: edge '" + id + "' missing from target");
    m.edge_map.emplace(id, id);
  }
  return m;
}

ValidationReport check_morphism(const GraphMorphism& m) {
  ValidationReport r;
  if (!m.source || !m.target) {
    r.add("null-graph", "morphism has no source or target graph");
    return r;
  }
  const Graph& s = *m.source;
  const Graph& t = *m.target;
  for (const auto& [id, n] : s.nodes()) {
    auto it = m.node_map.find(id);
    if (it == m.node_map.end()) {
      r.add("totality", "node '" + id + "' is not mapped", {id});
    } else if (!t.has_node(it->second)) {
      r.add("dangling", "node '" + id + "' maps to missing node '" + it->second + "'", {id});
    } else if (t.node(it->second).kind != n.kind) {
      r.add("kind", "node '" + id + "' maps to a node of another kind", {id});
    }
  }
  for (const auto& [id, e] : s.edges()) {
    auto it = m.edge_map.find(id);
    if (it == m.edge_map.end()) {
      r.add("totality", "edge '" + id + "' is not mapped", {id});
      continue;
    }
    if (!t.has_edge(it->second)) {
      r.add("dangling", "edge '" + id + "' maps to missing edge '" + it->second + "'", {id});
      continue;
    }
    const Edge& img = t.edge(it->second);
    if (img.kind != e.kind) r.add("kind", "edge '" + id + "' maps to an edge of another kind", {id});
    auto src = m.node_map.find(e.src);
    auto tgt = m.node_map.find(e.tgt);
    if (src == m.node_map.end() || tgt == m.node_map.end()) continue;  // reported above
    if (src->second != img.src || tgt->second != img.tgt)
      r.add("structure", "edge '" + id + "' is not mapped compatibly with its endpoints", {id});
  }
  for (const auto& [id, _] : m.node_map)
    if (!s.has_node(id)) r.add("extraneous", "node map mentions unknown node '" + id + "'", {id});
  for (const auto& [id, _] : m.edge_map)
    if (!s.has_edge(id)) r.add("extraneous", "edge map mentions unknown edge '" + id + "'", {id});
  return r;
}

GraphMorphism compose(const GraphMorphism& f, const GraphMorphism& g) {
  if (!same_graph(f.target, g.source)) throw Error("compose: target of first map differs from source of second");
  GraphMorphism h{f.source, g.target, {}, {}};
  for (const auto& [a, b] : f.node_map) h.node_map.emplace(a, g.node(b));
  for (const auto& [a, b] : f.edge_map) h.edge_map.emplace(a, g.edge(b));
  return h;
}

bool is_injective(const GraphMorphism& m) {
  std::set<std::string> seen;
  for (const auto& [_, b] : m.node_map)
    if (!seen.insert(b).second) return false;
  seen.clear();
  for (const auto& [_, b] : m.edge_map)
    if (!seen.insert(b).second) return false;
  return true;
}

std::pair<std::set<std::string>, std::set<std::string>> image(const GraphMorphism& m) {
  std::pair<std::set<std::string>, std::set<std::string>> out;
  for (const auto& [_, b] : m.node_map) out.first.insert(b);
  for (const auto& [_, b] : m.edge_map) out.second.insert(b);
  return out;
}

}  // namespace wfp
