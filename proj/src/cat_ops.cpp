#include "wfp/cat_ops.hpp"

#include <numeric>

namespace wfp {

namespace {

// Union-find over string keys; the representative of a class is always its
// lexicographically least member.
class Partition {
 public:
  void add(const std::string& key) { parent_.emplace(key, key); }

  const std::string& find(const std::string& key) {
    std::string& p = parent_.at(key);
    if (p == key) return p;
    p = find(p);
    return p;
  }

  void unite(const std::string& a, const std::string& b) {
    std::string ra = find(a);
    std::string rb = find(b);
    if (ra == rb) return;
    if (rb < ra) std::swap(ra, rb);
    parent_[rb] = ra;
  }

 private:
  std::map<std::string, std::string> parent_;
};

std::string qualify(const std::string& label, const std::string& id) { return label + "." + id; }

void require_same_target(const GraphMorphism& f, const GraphMorphism& g, const char* op) {
  if (!same_graph(f.target, g.target)) throw Error(std::string(op) + ": maps do not share a target");
}

}  // namespace

void Diagram::add_object(const std::string& label, GraphPtr g) {
  if (!objects.emplace(label, std::move(g)).second) throw Error("diagram: duplicate object label '" + label + "'");
}

void Diagram::add_arrow(const std::string& src, const std::string& tgt, GraphMorphism map) {
  arrows.push_back({src, tgt, std::move(map)});
}

Coproduct coproduct(const GraphPtr& m, const GraphPtr& n) {
  Diagram d;
  d.add_object("l", m);
  d.add_object("r", n);
  Colimit c = colimit(d);
  return {c.object, c.cocone.at("l"), c.cocone.at("r")};
}

Pullback pullback(const GraphMorphism& f, const GraphMorphism& g) {
  require_same_target(f, g, "pullback");
  const Graph& a = *f.source;
  const Graph& b = *g.source;

  std::map<std::string, std::vector<std::string>> node_pre_g, edge_pre_g;
  for (const auto& [id, _] : b.nodes()) node_pre_g[g.node(id)].push_back(id);
  for (const auto& [id, _] : b.edges()) edge_pre_g[g.edge(id)].push_back(id);

  auto pair_id = [](const std::string& x, const std::string& y) { return "(" + x + "|" + y + ")"; };

  std::vector<Node> nodes;
  std::vector<Edge> edges;
  Pullback pb;
  pb.left.source = pb.right.source = nullptr;
  std::map<std::string, std::string> left_nodes, right_nodes, left_edges, right_edges;
  for (const auto& [x, node] : a.nodes()) {
    auto it = node_pre_g.find(f.node(x));
    if (it == node_pre_g.end()) continue;
    for (const auto& y : it->second) {
      const std::string id = pair_id(x, y);
      nodes.push_back({id, node.kind});
      left_nodes.emplace(id, x);
      right_nodes.emplace(id, y);
    }
  }
  for (const auto& [x, edge] : a.edges()) {
    auto it = edge_pre_g.find(f.edge(x));
    if (it == edge_pre_g.end()) continue;
    for (const auto& y : it->second) {
      const Edge& ey = b.edge(y);
      const std::string id = pair_id(x, y);
      edges.push_back({id, pair_id(edge.src, ey.src), pair_id(edge.tgt, ey.tgt), edge.kind});
      left_edges.emplace(id, x);
      right_edges.emplace(id, y);
    }
  }
  pb.apex = make_graph(std::move(nodes), std::move(edges));
  pb.left = {pb.apex, f.source, std::move(left_nodes), std::move(left_edges)};
  pb.right = {pb.apex, g.source, std::move(right_nodes), std::move(right_edges)};
  return pb;
}

Pushout pushout(const GraphMorphism& e, const GraphMorphism& w) {
  if (!same_graph(e.source, w.source)) throw Error("pushout: maps do not share a source");
  Diagram d;
  d.add_object("A", e.target);
  d.add_object("E", e.source);
  d.add_object("M", w.target);
  d.add_arrow("E", "A", e);
  d.add_arrow("E", "M", w);
  Colimit c = colimit(d);
  return {c.object, c.cocone.at("A"), c.cocone.at("M")};
}

Colimit colimit(const Diagram& d) {
  for (const auto& arrow : d.arrows) {
    auto s = d.objects.find(arrow.src);
    auto t = d.objects.find(arrow.tgt);
    if (s == d.objects.end() || t == d.objects.end())
      throw Error("colimit: arrow " + arrow.src + " -> " + arrow.tgt + " references an unknown object");
    if (!same_graph(s->second, arrow.map.source) || !same_graph(t->second, arrow.map.target))
      throw Error("colimit: arrow " + arrow.src + " -> " + arrow.tgt + " does not match its objects");
    if (!check_morphism(arrow.map).ok())
      throw Error("colimit: arrow " + arrow.src + " -> " + arrow.tgt + " is not a valid morphism");
  }

  Partition nodes, edges;
  for (const auto& [label, g] : d.objects) {
    for (const auto& [id, _] : g->nodes()) nodes.add(qualify(label, id));
    for (const auto& [id, _] : g->edges()) edges.add(qualify(label, id));
  }
  for (const auto& arrow : d.arrows) {
    for (const auto& [x, y] : arrow.map.node_map) nodes.unite(qualify(arrow.src, x), qualify(arrow.tgt, y));
    for (const auto& [x, y] : arrow.map.edge_map) edges.unite(qualify(arrow.src, x), qualify(arrow.tgt, y));
  }

  std::map<std::string, Node> out_nodes;
  std::map<std::string, Edge> out_edges;
  Colimit c;
  for (const auto& [label, g] : d.objects) {
    GraphMorphism inj{g, nullptr, {}, {}};
    for (const auto& [id, n] : g->nodes()) {
      const std::string rep = nodes.find(qualify(label, id));
      auto [it, fresh] = out_nodes.emplace(rep, Node{rep, n.kind});
      if (!fresh && it->second.kind != n.kind) throw Error("colimit: node kinds clash in class '" + rep + "'");
      inj.node_map.emplace(id, rep);
    }
    for (const auto& [id, e] : g->edges()) {
      const std::string rep = edges.find(qualify(label, id));
      Edge img{rep, nodes.find(qualify(label, e.src)), nodes.find(qualify(label, e.tgt)), e.kind};
      auto [it, fresh] = out_edges.emplace(rep, img);
      if (!fresh && !(it->second == img)) throw Error("colimit: edge class '" + rep + "' has inconsistent endpoints");
      inj.edge_map.emplace(id, rep);
    }
    c.cocone.emplace(label, std::move(inj));
  }
  std::vector<Node> nv;
  std::vector<Edge> ev;
  for (auto& [_, n] : out_nodes) nv.push_back(std::move(n));
  for (auto& [_, e] : out_edges) ev.push_back(std::move(e));
  c.object = make_graph(std::move(nv), std::move(ev));
  for (auto& [_, inj] : c.cocone) inj.target = c.object;
  return c;
}

bool disjoint_images(const GraphMorphism& f, const GraphMorphism& g) {
  return pullback(f, g).apex->empty();
}

std::vector<std::string> image_overlap(const GraphMorphism& f, const GraphMorphism& g) {
  require_same_target(f, g, "image_overlap");
  auto [fn, fe] = image(f);
  auto [gn, ge] = image(g);
  std::vector<std::string> out;
  for (const auto& n : fn)
    if (gn.count(n)) out.push_back(n);
  for (const auto& e : fe)
    if (ge.count(e)) out.push_back(e);
  return out;
}

}  // namespace wfp
