#include "wfp/metamodel.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "wfp/cat_ops.hpp"

namespace wfp {

std::string_view to_string(End e) { return e == End::Src ? "src" : "tgt"; }

namespace {

std::string join(const std::vector<std::string>& xs, const std::string& sep) {
  std::string out;
  for (std::size_t k = 0; k < xs.size(); ++k) out += (k ? sep : "") + xs[k];
  return out;
}

std::string bound_text(std::optional<std::int64_t> upper) { return upper ? std::to_string(*upper) : "*"; }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string default_constraint_id(const ConstraintBody& body) {
  return std::visit(overloaded{
                        [](const Multiplicity& c) { return "mult." + c.edge + "." + std::string(to_string(c.end)); },
                        [](const Key& c) { return "key." + join(c.edges, "."); },
                        [](const Xor& c) { return "xor." + join(c.edges, "."); },
                        [](const ValidityTrue& c) { return "validity." + c.edge; },
                        [](const DerivedEquality& c) { return "derivedeq." + c.derived; },
                    },
                    body);
}

std::string describe(const ConstraintBody& body) {
  return std::visit(overloaded{
                        [](const Multiplicity& c) {
                          return "mult " + c.edge + " " + std::string(to_string(c.end)) + " " +
                                 std::to_string(c.lower) + " " + bound_text(c.upper);
                        },
                        [](const Key& c) { return "key " + join(c.edges, " "); },
                        [](const Xor& c) { return "xor " + join(c.edges, " "); },
                        [](const ValidityTrue& c) { return "validity " + c.edge; },
                        [](const DerivedEquality& c) { return "derivedeq " + c.derived + " " + c.edge; },
                    },
                    body);
}

std::vector<std::string> referenced_names(const ConstraintBody& body) {
  return std::visit(overloaded{
                        [](const Multiplicity& c) { return std::vector<std::string>{c.edge}; },
                        [](const Key& c) { return c.edges; },
                        [](const Xor& c) { return c.edges; },
                        [](const ValidityTrue& c) { return std::vector<std::string>{c.edge}; },
                        [](const DerivedEquality& c) { return std::vector<std::string>{c.derived, c.edge}; },
                    },
                    body);
}

// ---------------------------------------------------------------------------

const Constraint* Metamodel::find_constraint(const std::string& id) const {
  for (const auto& c : constraints)
    if (c.id == id) return &c;
  return nullptr;
}

bool Metamodel::operator==(const Metamodel& other) const {
  return same_graph(graph, other.graph) && constraints == other.constraints && derived == other.derived;
}

std::pair<std::string, std::string> endpoints(const Metamodel& m, const std::string& name) {
  if (m.graph->has_edge(name)) {
    const Edge& e = m.graph->edge(name);
    return {e.src, e.tgt};
  }
  auto it = m.derived.find(name);
  if (it == m.derived.end() || it->second.chain.empty()) throw Error("unknown edge or derived association '" + name + "'");
  return {m.graph->edge(it->second.chain.front()).src, m.graph->edge(it->second.chain.back()).tgt};
}

ValidationReport check_metamodel(const Metamodel& m) {
  ValidationReport r;
  const Graph& g = *m.graph;
  std::set<std::string> ids;
  for (const auto& [name, d] : m.derived) {
    if (g.has_edge(name) || g.has_node(name)) r.add("derived-name", "derived association '" + name + "' shadows an element", {name});
    if (d.chain.empty()) r.add("derived-chain", "derived association '" + name + "' has an empty chain", {name});
    for (std::size_t k = 0; k < d.chain.size(); ++k) {
      if (!g.has_edge(d.chain[k])) {
        r.add("dangling", "derived '" + name + "' uses unknown edge '" + d.chain[k] + "'", {d.chain[k]});
        continue;
      }
      if (k > 0 && g.has_edge(d.chain[k - 1]) && g.edge(d.chain[k - 1]).tgt != g.edge(d.chain[k]).src)
        r.add("derived-chain", "derived '" + name + "' is not composable at '" + d.chain[k] + "'", {name});
    }
  }
  auto known = [&](const std::string& n) { return g.has_edge(n) || m.derived.count(n); };
  for (const auto& c : m.constraints) {
    if (!ids.insert(c.id).second) r.add("duplicate", "duplicate constraint id '" + c.id + "'", {c.id});
    for (const auto& n : referenced_names(c.body))
      if (!known(n)) r.add("dangling", "constraint '" + c.id + "' references unknown '" + n + "'", {n});
    if (const auto* mu = std::get_if<Multiplicity>(&c.body)) {
      if (mu->lower < 0 || (mu->upper && *mu->upper < mu->lower))
        r.add("bounds", "constraint '" + c.id + "' has lower bound above upper bound", {c.id});
    } else if (const auto* x = std::get_if<Xor>(&c.body)) {
      if (x->edges.size() < 2) r.add("xor-arity", "xor '" + c.id + "' needs at least two edges", {c.id});
      std::set<std::string> srcs;
      for (const auto& e : x->edges)
        if (g.has_edge(e)) srcs.insert(g.edge(e).src);
      if (srcs.size() > 1) r.add("xor-source", "xor '" + c.id + "' edges do not share a source class", {c.id});
    } else if (const auto* k = std::get_if<Key>(&c.body)) {
      if (k->edges.empty()) r.add("key-arity", "key '" + c.id + "' lists no edges", {c.id});
      std::set<std::string> srcs;
      for (const auto& e : k->edges)
        if (g.has_edge(e)) srcs.insert(g.edge(e).src);
      if (srcs.size() > 1) r.add("key-source", "key '" + c.id + "' edges do not share a source class", {c.id});
    } else if (const auto* v = std::get_if<ValidityTrue>(&c.body)) {
      if (g.has_edge(v->edge) && g.edge(v->edge).kind != EdgeKind::Attribute)
        r.add("validity-kind", "validity '" + c.id + "' must name an attribute edge", {c.id});
    } else if (const auto* d = std::get_if<DerivedEquality>(&c.body)) {
      if (!m.derived.count(d->derived))
        r.add("dangling", "constraint '" + c.id + "' names unknown derived '" + d->derived + "'", {d->derived});
      else if (g.has_edge(d->edge) && endpoints(m, d->derived) != endpoints(m, d->edge))
        r.add("derivedeq-ends", "constraint '" + c.id + "' compares associations with different ends", {c.id});
    }
  }
  return r;
}

Metamodel make_metamodel(std::string name, GraphPtr graph, std::vector<Constraint> constraints,
                         std::vector<DerivedAssoc> derived) {
  Metamodel m;
  m.name = std::move(name);
  m.graph = std::move(graph);
  std::sort(constraints.begin(), constraints.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  m.constraints = std::move(constraints);
  for (auto& d : derived) {
    const std::string n = d.name;
    if (!m.derived.emplace(n, std::move(d)).second) throw Error("duplicate derived association '" + n + "'");
  }
  const ValidationReport r = check_metamodel(m);
  if (!r.ok()) throw Error("metamodel '" + m.name + "': " + r.violations.front().message);
  return m;
}

Metamodel sub_metamodel(const Metamodel& base, std::string name, const std::set<std::string>& keep,
                        const std::set<std::string>& drop) {
  for (const auto& n : keep)
    if (!base.graph->has_node(n)) throw Error("view '" + name + "' keeps unknown node '" + n + "'");
  for (const auto& e : drop)
    if (!base.graph->has_edge(e)) throw Error("view '" + name + "' drops unknown edge '" + e + "'");
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  for (const auto& [id, n] : base.graph->nodes())
    if (keep.count(id)) nodes.push_back(n);
  for (const auto& [id, e] : base.graph->edges())
    if (keep.count(e.src) && keep.count(e.tgt) && !drop.count(id)) edges.push_back(e);
  GraphPtr g = make_graph(std::move(nodes), std::move(edges));
  std::vector<DerivedAssoc> derived;
  for (const auto& [n, d] : base.derived)
    if (std::all_of(d.chain.begin(), d.chain.end(), [&](const auto& e) { return g->has_edge(e); })) derived.push_back(d);
  std::set<std::string> derived_names;
  for (const auto& d : derived) derived_names.insert(d.name);
  std::vector<Constraint> constraints;
  for (const auto& c : base.constraints) {
    const auto names = referenced_names(c.body);
    if (std::all_of(names.begin(), names.end(), [&](const auto& n) { return g->has_edge(n) || derived_names.count(n); }))
      constraints.push_back(c);
  }
  return make_metamodel(std::move(name), std::move(g), std::move(constraints), std::move(derived));
}

// ---------------------------------------------------------------------------

std::vector<std::string> Instance::objects_of(const std::string& type) const {
  std::vector<std::string> out;
  for (const auto& [x, t] : typing.node_map)
    if (t == type) out.push_back(x);
  return out;
}

bool Instance::operator==(const Instance& other) const {
  return same_graph(data, other.data) && typing == other.typing && values == other.values;
}

InstanceBuilder::InstanceBuilder(GraphPtr type_graph) : type_graph_(std::move(type_graph)) {}

InstanceBuilder::InstanceBuilder(const Instance& base) : type_graph_(base.type_graph()) {
  for (const auto& [id, n] : base.data->nodes()) {
    NodeRec rec{base.type_of(id), std::nullopt};
    if (auto it = base.values.find(id); it != base.values.end()) rec.value = it->second;
    nodes_.emplace(id, std::move(rec));
  }
  for (const auto& [id, e] : base.data->edges()) edges_.emplace(id, EdgeRec{base.typing.edge(id), e.src, e.tgt});
}

std::string InstanceBuilder::default_link_id(const std::string& type_edge, const std::string& src,
                                             const std::string& tgt) {
  return type_edge + "(" + src + "," + tgt + ")";
}

std::string InstanceBuilder::default_value_id(const std::string& obj, const std::string& attr_edge) {
  return obj + "." + attr_edge;
}

InstanceBuilder& InstanceBuilder::object(const std::string& id, const std::string& type) {
  if (!type_graph_->has_node(type)) throw Error("object '" + id + "': unknown type '" + type + "'");
  if (type_graph_->node(type).kind == NodeKind::ValueType)
    throw Error("object '" + id + "': value type '" + type + "' cannot type an object");
  auto [it, fresh] = nodes_.emplace(id, NodeRec{type, std::nullopt});
  if (!fresh && it->second.type != type)
    throw Error("object '" + id + "' already exists with type '" + it->second.type + "'");
  return *this;
}

InstanceBuilder& InstanceBuilder::node(const std::string& id, const std::string& type, std::optional<Literal> value) {
  if (!type_graph_->has_node(type)) throw Error("node '" + id + "': unknown type '" + type + "'");
  const bool is_value = type_graph_->node(type).kind == NodeKind::ValueType;
  if (is_value != value.has_value())
    throw Error("node '" + id + "': " + (is_value ? "value node needs a literal" : "object cannot carry a literal"));
  auto [it, fresh] = nodes_.emplace(id, NodeRec{type, value});
  if (!fresh && (it->second.type != type || it->second.value != value))
    throw Error("node '" + id + "' already exists with different content");
  return *this;
}

InstanceBuilder& InstanceBuilder::link(const std::string& type_edge, const std::string& src, const std::string& tgt,
                                       std::optional<std::string> id) {
  if (!type_graph_->has_edge(type_edge)) throw Error("link: unknown association '" + type_edge + "'");
  const Edge& te = type_graph_->edge(type_edge);
  auto s = nodes_.find(src);
  auto t = nodes_.find(tgt);
  if (s == nodes_.end()) throw Error("link " + type_edge + ": unknown source object '" + src + "'");
  if (t == nodes_.end()) throw Error("link " + type_edge + ": unknown target object '" + tgt + "'");
  if (s->second.type != te.src)
    throw Error("link " + type_edge + ": source '" + src + "' has type '" + s->second.type + "', expected '" + te.src + "'");
  if (t->second.type != te.tgt)
    throw Error("link " + type_edge + ": target '" + tgt + "' has type '" + t->second.type + "', expected '" + te.tgt + "'");
  const std::string lid = id ? *id : default_link_id(type_edge, src, tgt);
  EdgeRec rec{type_edge, src, tgt};
  auto [it, fresh] = edges_.emplace(lid, rec);
  if (!fresh && (it->second.type != rec.type || it->second.src != rec.src || it->second.tgt != rec.tgt))
    throw Error("link '" + lid + "' already exists with different content");
  return *this;
}

InstanceBuilder& InstanceBuilder::value(const std::string& obj, const std::string& attr_edge, Literal v,
                                        std::optional<std::string> id) {
  if (!type_graph_->has_edge(attr_edge)) throw Error("value: unknown attribute '" + attr_edge + "'");
  const Edge& te = type_graph_->edge(attr_edge);
  if (type_graph_->node(te.tgt).kind != NodeKind::ValueType)
    throw Error("value: '" + attr_edge + "' does not end in a value type");
  const std::string& vt = te.tgt;
  if (vt == "Real" && std::holds_alternative<std::int64_t>(v)) v = Rational(std::get<std::int64_t>(v));
  if ((vt == "Bool" || vt == "Int" || vt == "Real" || vt == "String") && type_name(v) != vt)
    throw Error("value for '" + attr_edge + "' on '" + obj + "' must be " + vt + ", got " + to_text(v));
  const std::string vid = id ? *id : default_value_id(obj, attr_edge);
  auto [it, fresh] = nodes_.emplace(vid, NodeRec{vt, v});
  if (!fresh && (it->second.type != vt || it->second.value != v))
    throw Error("value '" + vid + "' already bound to a different literal");
  return link(attr_edge, obj, vid, vid);
}

InstanceBuilder& InstanceBuilder::erase(const std::string& id) {
  if (nodes_.erase(id)) {
    for (auto it = edges_.begin(); it != edges_.end();) {
      if (it->second.src == id || it->second.tgt == id)
        it = edges_.erase(it);
      else
        ++it;
    }
    return *this;
  }
  if (!edges_.erase(id)) throw Error("erase: unknown element '" + id + "'");
  return *this;
}

Instance InstanceBuilder::build() const {
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  Instance out;
  out.typing.target = type_graph_;
  for (const auto& [id, rec] : nodes_) {
    nodes.push_back({id, type_graph_->node(rec.type).kind});
    out.typing.node_map.emplace(id, rec.type);
    if (rec.value) out.values.emplace(id, *rec.value);
  }
  for (const auto& [id, rec] : edges_) {
    edges.push_back({id, rec.src, rec.tgt, type_graph_->edge(rec.type).kind});
    out.typing.edge_map.emplace(id, rec.type);
  }
  out.data = make_graph(std::move(nodes), std::move(edges));
  out.typing.source = out.data;
  return out;
}

Instance push_forward(const Instance& i, const GraphMorphism& f) {
  Instance out = i;
  out.typing = compose(i.typing, f);
  return out;
}

Instance restrict(const Instance& i, const GraphMorphism& e) {
  if (!same_graph(e.target, i.type_graph())) throw Error("restrict: map does not target the instance's type graph");
  const Pullback pb = pullback(i.typing, e);

  std::map<std::string, int> node_pre, edge_pre;
  for (const auto& [_, t] : e.node_map) ++node_pre[t];
  for (const auto& [_, t] : e.edge_map) ++edge_pre[t];

  std::map<std::string, std::string> rename;
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  Instance out;
  out.typing.target = e.source;
  for (const auto& [id, n] : pb.apex->nodes()) {
    const std::string& x = pb.left.node(id);
    const std::string& c = pb.right.node(id);
    const std::string name = node_pre[e.node(c)] == 1 ? x : x + "@" + c;
    rename.emplace(id, name);
    nodes.push_back({name, n.kind});
    out.typing.node_map.emplace(name, c);
    if (auto it = i.values.find(x); it != i.values.end()) out.values.emplace(name, it->second);
  }
  for (const auto& [id, ed] : pb.apex->edges()) {
    const std::string& l = pb.left.edge(id);
    const std::string& a = pb.right.edge(id);
    const std::string name = edge_pre[e.edge(a)] == 1 ? l : l + "@" + a;
    edges.push_back({name, rename.at(ed.src), rename.at(ed.tgt), ed.kind});
    out.typing.edge_map.emplace(name, a);
  }
  // A value exists only as the target of an attribute link; values whose
  // links were projected away are dropped with them.
  std::set<std::string> owned;
  for (const auto& e : edges) owned.insert(e.tgt);
  std::erase_if(nodes, [&](const Node& n) {
    if (n.kind != NodeKind::ValueType || owned.count(n.id)) return false;
    out.typing.node_map.erase(n.id);
    out.values.erase(n.id);
    return true;
  });
  out.data = make_graph(std::move(nodes), std::move(edges));
  out.typing.source = out.data;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Link {
  std::string id, src, tgt;
};

struct Index {
  const Instance& inst;
  std::map<std::string, std::vector<std::string>> objects;
  std::map<std::string, std::vector<Link>> links;

  explicit Index(const Instance& i) : inst(i) {
    for (const auto& [x, t] : i.typing.node_map) objects[t].push_back(x);
    for (const auto& [id, e] : i.data->edges()) links[i.typing.edge(id)].push_back({id, e.src, e.tgt});
  }

  const std::vector<std::string>& objs(const std::string& t) const {
    static const std::vector<std::string> none;
    auto it = objects.find(t);
    return it == objects.end() ? none : it->second;
  }
  const std::vector<Link>& of(const std::string& e) const {
    static const std::vector<Link> none;
    auto it = links.find(e);
    return it == links.end() ? none : it->second;
  }
};

using PairCounts = std::map<std::pair<std::string, std::string>, std::int64_t>;

PairCounts compose_chain(const Metamodel& m, const Index& idx, const std::vector<std::string>& chain) {
  PairCounts acc;
  if (chain.empty()) return acc;
  for (const auto& l : idx.of(chain.front())) ++acc[{l.src, l.tgt}];
  for (std::size_t k = 1; k < chain.size(); ++k) {
    std::map<std::string, std::vector<std::string>> step;
    for (const auto& l : idx.of(chain[k])) step[l.src].push_back(l.tgt);
    PairCounts next;
    for (const auto& [p, n] : acc) {
      auto it = step.find(p.second);
      if (it == step.end()) continue;
      for (const auto& t : it->second) next[{p.first, t}] += n;
    }
    acc = std::move(next);
  }
  (void)m;
  return acc;
}

// Pairs with multiplicity for an edge or a derived association.
PairCounts pairs_of(const Metamodel& m, const Index& idx, const std::string& name) {
  if (auto it = m.derived.find(name); it != m.derived.end()) return compose_chain(m, idx, it->second.chain);
  PairCounts out;
  for (const auto& l : idx.of(name)) ++out[{l.src, l.tgt}];
  return out;
}

Verdict finish(std::set<std::string> w, std::string detail) {
  Verdict v;
  v.holds = w.empty();
  v.witnesses.assign(w.begin(), w.end());
  if (!v.holds) v.detail = std::move(detail);
  return v;
}

Verdict eval_indexed(const Metamodel& m, const Constraint& c, const Index& idx) {
  const Instance& inst = idx.inst;
  return std::visit(
      overloaded{
          [&](const Multiplicity& mu) {
            const auto [src_cls, tgt_cls] = endpoints(m, mu.edge);
            std::map<std::string, std::int64_t> count;
            const bool at_tgt = mu.end == End::Tgt;
            for (const auto& x : idx.objs(at_tgt ? src_cls : tgt_cls)) count[x] = 0;
            for (const auto& [p, n] : pairs_of(m, idx, mu.edge)) count[at_tgt ? p.first : p.second] += n;
            std::set<std::string> bad;
            for (const auto& [x, n] : count)
              if (n < mu.lower || (mu.upper && n > *mu.upper)) bad.insert(x);
            return finish(std::move(bad), "link count outside [" + std::to_string(mu.lower) + ".." + bound_text(mu.upper) + "]");
          },
          [&](const Key& k) {
            std::set<std::string> bad;
            if (k.edges.size() == 1) {
              std::map<std::pair<std::string, std::string>, std::vector<std::string>> seen;
              for (const auto& l : idx.of(k.edges.front())) seen[{l.src, l.tgt}].push_back(l.id);
              for (const auto& [_, ids] : seen)
                if (ids.size() > 1) bad.insert(ids.begin(), ids.end());
              return finish(std::move(bad), "links share both ends");
            }
            const std::string cls = m.graph->edge(k.edges.front()).src;
            std::map<std::vector<std::vector<std::string>>, std::vector<std::string>> seen;
            std::map<std::string, std::vector<std::vector<std::string>>> tuple;
            for (const auto& x : idx.objs(cls)) tuple[x].assign(k.edges.size(), {});
            for (std::size_t j = 0; j < k.edges.size(); ++j)
              for (const auto& l : idx.of(k.edges[j])) tuple[l.src][j].push_back(l.tgt);
            for (auto& [x, t] : tuple) {
              for (auto& v : t) std::sort(v.begin(), v.end());
              seen[t].push_back(x);
            }
            for (const auto& [_, xs] : seen)
              if (xs.size() > 1) bad.insert(xs.begin(), xs.end());
            return finish(std::move(bad), "objects share all key ends");
          },
          [&](const Xor& x) {
            const std::string cls = m.graph->edge(x.edges.front()).src;
            std::map<std::string, int> count;
            for (const auto& o : idx.objs(cls)) count[o] = 0;
            for (const auto& e : x.edges)
              for (const auto& l : idx.of(e)) ++count[l.src];
            std::set<std::string> bad;
            for (const auto& [o, n] : count)
              if (n != 1) bad.insert(o);
            return finish(std::move(bad), "expected exactly one of the alternatives");
          },
          [&](const ValidityTrue& v) {
            std::set<std::string> bad;
            for (const auto& l : idx.of(v.edge)) {
              auto it = inst.values.find(l.tgt);
              if (it == inst.values.end() || it->second != Literal{true}) bad.insert(l.src);
            }
            return finish(std::move(bad), "validity attribute is not true");
          },
          [&](const DerivedEquality& d) {
            std::set<std::pair<std::string, std::string>> lhs, rhs;
            for (const auto& [p, _] : pairs_of(m, idx, d.edge)) lhs.insert(p);
            for (const auto& [p, _] : pairs_of(m, idx, d.derived)) rhs.insert(p);
            std::set<std::string> bad;
            for (const auto& p : lhs)
              if (!rhs.count(p)) bad.insert(p.first);
            for (const auto& p : rhs)
              if (!lhs.count(p)) bad.insert(p.first);
            return finish(std::move(bad), "links differ from the derived association");
          },
      },
      c.body);
}

}  // namespace

Verdict eval_constraint(const Metamodel& m, const Constraint& c, const Instance& i) {
  return eval_indexed(m, c, Index(i));
}

ConformanceReport conforms(const Instance& i, const Metamodel& m) {
  ConformanceReport r;
  if (!same_graph(i.type_graph(), m.graph)) {
    r.typing_ok = false;
    r.typing.add("type-graph", "instance is not typed over metamodel '" + m.name + "'");
    return r;
  }
  r.typing = check_morphism(i.typing);
  std::set<std::string> owned;
  for (const auto& [_, e] : i.data->edges()) owned.insert(e.tgt);
  for (const auto& [id, n] : i.data->nodes()) {
    const bool is_value = m.graph->has_node(i.typing.node_map.count(id) ? i.type_of(id) : std::string()) &&
                          m.graph->node(i.type_of(id)).kind == NodeKind::ValueType;
    if (is_value != (i.values.count(id) != 0))
      r.typing.add("value-binding", is_value ? "value node '" + id + "' has no literal" : "object '" + id + "' carries a literal", {id});
    else if (is_value && !owned.count(id))
      r.typing.add("value-owner", "value node '" + id + "' is not the target of any attribute link", {id});
  }
  r.typing_ok = r.typing.ok();
  if (!r.typing_ok) return r;
  const Index idx(i);
  for (const auto& c : m.constraints) r.verdicts.emplace_back(c, eval_indexed(m, c, idx));
  return r;
}

bool ConformanceReport::conforms() const {
  return typing_ok && std::all_of(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.second.holds; });
}

std::vector<std::pair<Constraint, Verdict>> ConformanceReport::violated() const {
  std::vector<std::pair<Constraint, Verdict>> out;
  for (const auto& v : verdicts)
    if (!v.second.holds) out.push_back(v);
  return out;
}

bool ConformanceReport::mentions(const std::string& witness) const {
  if (typing.mentions(witness)) return true;
  for (const auto& [_, v] : verdicts)
    if (std::find(v.witnesses.begin(), v.witnesses.end(), witness) != v.witnesses.end()) return true;
  return false;
}

std::string ConformanceReport::to_text() const {
  std::ostringstream os;
  if (!typing_ok) {
    os << "typing: failed\n";
    for (const auto& v : typing.violations) os << "  " << v.code << ": " << v.message << "\n";
  } else {
    os << "typing: ok\n";
  }
  std::size_t bad = 0;
  for (const auto& [c, v] : verdicts) {
    os << (v.holds ? "holds     " : "VIOLATED  ") << c.id << "  [" << describe(c.body) << "]";
    if (!v.holds) {
      ++bad;
      os << "  " << v.detail << "; witnesses: " << join(v.witnesses, ", ");
    }
    os << "\n";
  }
  if (conforms())
    os << "result: conforms\n";
  else
    os << "result: does not conform (" << (typing_ok ? bad : typing.violations.size()) << " violation"
       << ((typing_ok ? bad : typing.violations.size()) == 1 ? "" : "s") << ")\n";
  return os.str();
}

DerivedLinks derive_association(const Metamodel& m, const Instance& i, const std::string& name) {
  auto it = m.derived.find(name);
  if (it == m.derived.end()) throw Error("unknown derived association '" + name + "'");
  DerivedLinks out;
  const Index idx(i);
  out.pairs = compose_chain(m, idx, it->second.chain);
  out.lower = 1;
  out.upper = 1;
  for (const auto& e : it->second.chain) {
    std::int64_t lo = 0;
    std::optional<std::int64_t> hi;
    for (const auto& c : m.constraints) {
      const auto* mu = std::get_if<Multiplicity>(&c.body);
      if (!mu || mu->edge != e || mu->end != End::Tgt) continue;
      lo = std::max(lo, mu->lower);
      if (mu->upper) hi = hi ? std::min(*hi, *mu->upper) : *mu->upper;
    }
    out.lower *= lo;
    if (out.upper && hi)
      *out.upper *= *hi;
    else
      out.upper.reset();
  }
  return out;
}

AttributeMax derived_attribute_max(const Instance& i, const std::string& membership_edge, const std::string& member_attr) {
  const Graph& tg = *i.type_graph();
  const Edge& mem = tg.edge(membership_edge);
  const Edge& attr = tg.edge(member_attr);
  if (attr.src != mem.src) throw Error("derived_attribute_max: attribute '" + member_attr + "' is not on the member class");
  const Index idx(i);
  std::map<std::string, std::vector<std::string>> members;
  for (const auto& g : idx.objs(mem.tgt)) members[g];
  for (const auto& l : idx.of(membership_edge)) members[l.tgt].push_back(l.src);
  std::map<std::string, std::vector<std::int64_t>> vals;
  for (const auto& l : idx.of(member_attr)) {
    const auto& lit = i.values.at(l.tgt);
    if (!std::holds_alternative<std::int64_t>(lit)) throw Error("derived_attribute_max: '" + member_attr + "' is not integer-valued");
    vals[l.src].push_back(std::get<std::int64_t>(lit));
  }
  AttributeMax out;
  for (const auto& [g, ms] : members) {
    if (ms.empty()) {
      out.violations.add("group-nonempty", "group '" + g + "' has no members via '" + membership_edge + "'", {g});
      continue;
    }
    std::optional<std::int64_t> best;
    for (const auto& x : ms)
      for (auto v : vals[x]) best = best ? std::max(*best, v) : v;
    if (!best) {
      out.violations.add("missing-value", "no member of group '" + g + "' carries '" + member_attr + "'", {g});
      continue;
    }
    out.values.emplace(g, *best);
  }
  return out;
}

}  // namespace wfp
