#include "wfp/weaving.hpp"

#include <algorithm>

#include "wfp/cat_ops.hpp"

namespace wfp {

namespace {

std::vector<std::string> rename_all(const std::vector<std::string>& names, const std::map<std::string, std::string>& m) {
  std::vector<std::string> out;
  for (const auto& n : names) out.push_back(m.at(n));
  return out;
}

ConstraintBody rename_body(const ConstraintBody& body, const std::map<std::string, std::string>& m) {
  if (auto* x = std::get_if<Multiplicity>(&body)) return Multiplicity{m.at(x->edge), x->end, x->lower, x->upper};
  if (auto* x = std::get_if<Key>(&body)) return Key{rename_all(x->edges, m)};
  if (auto* x = std::get_if<Xor>(&body)) return Xor{rename_all(x->edges, m)};
  if (auto* x = std::get_if<ValidityTrue>(&body)) return ValidityTrue{m.at(x->edge)};
  const auto& x = std::get<DerivedEquality>(body);
  return DerivedEquality{m.at(x.derived), m.at(x.edge)};
}

}  // namespace

ValidationReport check_advice(const Advice& a) {
  ValidationReport r;
  if (!same_graph(a.embedding.source, a.entry.graph) || !same_graph(a.embedding.target, a.advice.graph)) {
    r.add("embedding", "embedding of advice '" + a.name + "' does not run from entry to advice");
    return r;
  }
  r.append(check_morphism(a.embedding));
  if (!r.ok()) return r;
  if (!is_injective(a.embedding)) r.add("injectivity", "embedding of advice '" + a.name + "' is not injective");
  std::map<std::string, std::string> names = a.embedding.edge_map;
  for (const auto& [n, _] : a.entry.derived) names[n] = n;
  for (const auto& c : a.entry.constraints) {
    const ConstraintBody mapped = rename_body(c.body, names);
    if (std::none_of(a.advice.constraints.begin(), a.advice.constraints.end(),
                     [&](const auto& x) { return x.body == mapped; }))
      r.add("entry-constraint", "entry constraint '" + c.id + "' has no counterpart in the advice", {c.id});
  }
  return r;
}

Woven weave(const Metamodel& main, const Advice& a, const EntryPoint& p, const std::string& prefix,
            const std::string& name) {
  const ValidationReport ar = check_advice(a);
  if (!ar.ok()) throw Error("weave: " + ar.violations.front().message);
  if (!same_graph(p.binding.source, a.entry.graph) || !same_graph(p.binding.target, main.graph))
    throw Error("weave: binding '" + p.name + "' does not run from the entry into the main metamodel");
  const ValidationReport br = check_morphism(p.binding);
  if (!br.ok()) throw Error("weave: binding '" + p.name + "': " + br.violations.front().message);

  const Pushout po = pushout(a.embedding, p.binding);
  // Pushout classes are named `A.<id>` or `M.<id>`; any class holding a main
  // element is named after it.
  std::map<std::string, std::string> node_name, edge_name;
  for (const auto& [x, cls] : po.right.node_map) node_name[cls] = x;
  for (const auto& [x, cls] : po.right.edge_map) edge_name[cls] = x;
  for (const auto& [x, cls] : po.left.node_map) node_name.emplace(cls, prefix + x);
  for (const auto& [x, cls] : po.left.edge_map) edge_name.emplace(cls, prefix + x);

  std::vector<Node> nodes;
  std::vector<Edge> edges;
  for (const auto& [cls, n] : po.object->nodes()) nodes.push_back({node_name.at(cls), n.kind});
  for (const auto& [cls, e] : po.object->edges())
    edges.push_back({edge_name.at(cls), node_name.at(e.src), node_name.at(e.tgt), e.kind});
  GraphPtr g = make_graph(std::move(nodes), std::move(edges));

  Woven w;
  w.from_main = {main.graph, g, {}, {}};
  w.from_advice = {a.advice.graph, g, {}, {}};
  for (const auto& [x, cls] : po.right.node_map) w.from_main.node_map[x] = node_name.at(cls);
  for (const auto& [x, cls] : po.right.edge_map) w.from_main.edge_map[x] = edge_name.at(cls);
  for (const auto& [x, cls] : po.left.node_map) w.from_advice.node_map[x] = node_name.at(cls);
  for (const auto& [x, cls] : po.left.edge_map) w.from_advice.edge_map[x] = edge_name.at(cls);

  std::vector<DerivedAssoc> derived;
  for (const auto& [_, d] : main.derived) derived.push_back(d);
  std::map<std::string, std::string> adv_names = w.from_advice.edge_map;
  for (const auto& [n, d] : a.advice.derived) {
    DerivedAssoc mapped{prefix + n, rename_all(d.chain, w.from_advice.edge_map)};
    adv_names[n] = mapped.name;
    derived.push_back(std::move(mapped));
  }

  std::vector<Constraint> constraints = main.constraints;
  for (const auto& c : a.advice.constraints) {
    Constraint mapped{prefix + c.id, rename_body(c.body, adv_names)};
    if (std::any_of(constraints.begin(), constraints.end(), [&](const auto& x) { return x.same_content(mapped); }))
      continue;
    auto clash = std::find_if(constraints.begin(), constraints.end(), [&](const auto& x) { return x.id == mapped.id; });
    if (clash != constraints.end())
      throw Error("weave: constraint '" + mapped.id + "' already exists with different content");
    constraints.push_back(std::move(mapped));
  }
  w.metamodel = make_metamodel(name.empty() ? main.name : name, g, std::move(constraints), std::move(derived));
  w.from_main.target = w.from_advice.target = w.metamodel.graph;
  return w;
}

Metamodel weave_all(const Metamodel& main, const Advice& a, const std::vector<EntryPoint>& points,
                    const std::string& name) {
  std::vector<EntryPoint> sorted = points;
  std::sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) { return x.name < y.name; });
  for (std::size_t k = 1; k < sorted.size(); ++k)
    if (sorted[k].name == sorted[k - 1].name) throw Error("weave: entry point '" + sorted[k].name + "' given twice");
  for (std::size_t x = 0; x < sorted.size(); ++x)
    for (std::size_t y = x + 1; y < sorted.size(); ++y) {
      for (const auto& shared : image_overlap(sorted[x].binding, sorted[y].binding)) {
        if (main.graph->has_node(shared) && main.graph->node(shared).kind == NodeKind::ValueType) continue;
        throw Error("weave: entry points '" + sorted[x].name + "' and '" + sorted[y].name + "' overlap on '" + shared +
                    "'");
      }
    }
  Metamodel cur = main;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    EntryPoint p = sorted[k];
    // Main ids survive weaving, so the binding carries over by name.
    p.binding.target = cur.graph;
    cur = weave(cur, a, p, "rev" + std::to_string(k + 1) + ".", name.empty() ? main.name : name).metamodel;
  }
  if (sorted.empty() && !name.empty()) cur.name = name;
  return cur;
}

}  // namespace wfp
