#include "wfp/exec.hpp"

#include <algorithm>
#include <cstdio>
#include <future>
#include <memory>
#include <set>
#include <sstream>

#include "wfp/cat_ops.hpp"

namespace wfp {

const GraphMorphism& DataflowDefinition::in_map(const InWire& w) const {
  auto it = in_maps.find({w.process, w.port});
  if (it == in_maps.end()) throw Error("no map for wire " + wire_label(w));
  return it->second;
}

const GraphMorphism& DataflowDefinition::out_map(const OutWire& w) const {
  auto it = out_maps.find({w.process, w.wp});
  if (it == out_maps.end()) throw Error("no map for wire " + wire_label(w));
  return it->second;
}

ValidationReport check_definition(const DataflowDefinition& def) {
  ValidationReport r = build_flow(def.flow).report;
  for (const auto& p : def.flow.processes) {
    auto it = def.processes.find(p.name);
    if (it == def.processes.end()) {
      r.add("dangling", "flow uses undefined process '" + p.name + "'", {p.name});
      continue;
    }
    std::vector<std::string> ports;
    for (const auto& in : it->second.inputs) ports.push_back(in.port);
    if (ports != p.in_ports) r.add("ports", "process '" + p.name + "' ports differ from its schema", {p.name});
    ValidationReport a = check_arity(it->second);
    for (auto& v : a.violations) v.message = p.name + ": " + v.message;
    r.append(a);
  }
  auto wp_graph = [&](const std::string& wp) -> GraphPtr {
    auto it = def.wp_metamodels.find(wp);
    return it == def.wp_metamodels.end() ? nullptr : it->second.graph;
  };
  for (const auto& wp : def.flow.work_products)
    if (!wp_graph(wp)) r.add("dangling", "work product '" + wp + "' has no metamodel", {wp});
  for (const auto& w : def.flow.in_wires) {
    auto proc = def.processes.find(w.process);
    auto m = def.in_maps.find({w.process, w.port});
    if (proc == def.processes.end() || !wp_graph(w.wp)) continue;
    if (m == def.in_maps.end()) {
      r.add("wire-map", "wire " + wire_label(w) + " has no map", {wire_label(w)});
      continue;
    }
    const InputPort* port = nullptr;
    for (const auto& in : proc->second.inputs)
      if (in.port == w.port) port = &in;
    if (!port) continue;
    if (!same_graph(m->second.source, port->metamodel.graph) || !same_graph(m->second.target, wp_graph(w.wp))) {
      r.add("wire-map", "map of wire " + wire_label(w) + " does not run from the port to the product metamodel",
            {wire_label(w)});
      continue;
    }
    ValidationReport c = check_morphism(m->second);
    for (auto& v : c.violations) v.message = wire_label(w) + ": " + v.message;
    r.append(c);
    if (c.ok() && !is_injective(m->second))
      r.add("injectivity", "map of wire " + wire_label(w) + " is not injective", {wire_label(w)});
  }
  for (const auto& w : def.flow.out_wires) {
    auto proc = def.processes.find(w.process);
    auto m = def.out_maps.find({w.process, w.wp});
    if (proc == def.processes.end() || !wp_graph(w.wp)) continue;
    if (m == def.out_maps.end()) {
      r.add("wire-map", "wire " + wire_label(w) + " has no map", {wire_label(w)});
      continue;
    }
    if (!same_graph(m->second.source, proc->second.output.metamodel.graph) ||
        !same_graph(m->second.target, wp_graph(w.wp))) {
      r.add("wire-map", "map of wire " + wire_label(w) + " does not run from the output to the product metamodel",
            {wire_label(w)});
      continue;
    }
    ValidationReport c = check_morphism(m->second);
    for (auto& v : c.violations) v.message = wire_label(w) + ": " + v.message;
    r.append(c);
  }
  if (r.ok()) {
    const Acyclicity a = check_acyclic(def.flow);
    if (!a.acyclic) {
      std::string text;
      for (std::size_t k = 0; k < a.cycle.size(); ++k) text += (k ? " -> " : "") + a.cycle[k];
      r.add("cycle", "flow is cyclic: " + text, a.cycle);
    }
  }
  return r;
}

DataflowDefinition with_idle_processes(const DataflowDefinition& def) {
  auto [flow, added] = normalize_id(def.flow);
  DataflowDefinition out = def;
  out.flow = std::move(flow);
  for (const auto& ins : added) {
    const Metamodel& mm = def.wp_metamodels.count(ins.reads) ? def.wp_metamodels.at(ins.reads)
                                                              : out.wp_metamodels.at(ins.reads);
    ProcessSchema s;
    s.name = ins.process;
    s.inner = mm;
    s.inputs.push_back({"in", mm, identity(mm.graph)});
    s.output = {"out", mm, identity(mm.graph)};
    s.semantics = sem::Identity{};
    out.processes.emplace(ins.process, std::move(s));
    out.wp_metamodels.emplace(ins.writes, mm);
    out.in_maps.emplace(std::pair{ins.process, std::string("in")}, identity(mm.graph));
    out.out_maps.emplace(std::pair{ins.process, ins.writes}, identity(mm.graph));
  }
  return out;
}

std::string ExecutionState::trace_text() const {
  std::ostringstream os;
  for (const auto& t : trace) {
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(t.hash));
    os << t.stratum << "\t" << t.process << "\t" << hex << "\n";
  }
  return os.str();
}

std::string canonical_text(const Instance& i) {
  std::ostringstream os;
  for (const auto& [id, _] : i.data->nodes()) {
    os << "node " << id << " : " << i.type_of(id);
    if (auto it = i.values.find(id); it != i.values.end()) os << " = " << to_text(it->second);
    os << "\n";
  }
  for (const auto& [id, e] : i.data->edges())
    os << "edge " << id << " : " << i.typing.edge(id) << " " << e.src << " -> " << e.tgt << "\n";
  return os.str();
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Instance read(const ExecutionState& state, const DataflowDefinition& def, const InWire& wire) {
  auto it = state.products.find(wire.wp);
  if (it == state.products.end()) throw Error("read " + wire_label(wire) + ": work product '" + wire.wp + "' is empty");
  return restrict(it->second, def.in_map(wire));
}

// ---------------------------------------------------------------------------

std::vector<Correspondence> correspondences_by_id(const std::vector<Contribution>& parts) {
  std::vector<Correspondence> out;
  auto node_type = [&](std::size_t k, const std::string& id) { return parts[k].map.node(parts[k].data.type_of(id)); };
  auto edge_type = [&](std::size_t k, const std::string& id) {
    return parts[k].map.edge(parts[k].data.typing.edge(id));
  };
  for (std::size_t a = 0; a < parts.size(); ++a)
    for (std::size_t b = a + 1; b < parts.size(); ++b) {
      Correspondence c{a, b, {}, {}};
      const Graph& ga = *parts[a].data.data;
      const Graph& gb = *parts[b].data.data;
      std::set<std::string> paired;
      for (const auto& [id, _] : ga.nodes())
        if (gb.has_node(id) && node_type(a, id) == node_type(b, id)) {
          c.nodes.emplace_back(id, id);
          paired.insert(id);
        }
      for (const auto& [id, e] : ga.edges()) {
        if (!gb.has_edge(id) || edge_type(a, id) != edge_type(b, id)) continue;
        const Edge& f = gb.edge(id);
        if (e.src == f.src && e.tgt == f.tgt && paired.count(e.src) && paired.count(e.tgt)) c.edges.emplace_back(id, id);
      }
      if (!c.nodes.empty()) out.push_back(std::move(c));
    }
  return out;
}

namespace {

std::string label_of(std::size_t k) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "c%zu", k);
  return buf;
}

}  // namespace

Instance merge_instances(const std::vector<Contribution>& parts, const std::vector<Correspondence>& corrs,
                         const GraphPtr& product_graph) {
  Diagram d;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (!same_graph(parts[k].map.source, parts[k].data.type_graph()) || !same_graph(parts[k].map.target, product_graph))
      throw Error("merge: contribution " + std::to_string(k) + " is not mapped into the product metamodel");
    d.add_object(label_of(k), parts[k].data.data);
  }
  for (std::size_t j = 0; j < corrs.size(); ++j) {
    const Correspondence& c = corrs[j];
    if (c.left >= parts.size() || c.right >= parts.size()) throw Error("merge: correspondence refers to a missing part");
    const Graph& l = *parts[c.left].data.data;
    const Graph& r = *parts[c.right].data.data;
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    GraphMorphism to_l, to_r;
    std::map<std::pair<std::string, std::string>, std::string> head_node;
    for (const auto& [a, b] : c.nodes) {
      const std::string id = "(" + a + "|" + b + ")";
      nodes.push_back({id, l.node(a).kind});
      head_node[{a, b}] = id;
      to_l.node_map[id] = a;
      to_r.node_map[id] = b;
    }
    for (const auto& [a, b] : c.edges) {
      const Edge& ea = l.edge(a);
      const Edge& eb = r.edge(b);
      auto s = head_node.find({ea.src, eb.src});
      auto t = head_node.find({ea.tgt, eb.tgt});
      if (s == head_node.end() || t == head_node.end())
        throw Error("merge: corresponding edges " + a + "/" + b + " have unrelated endpoints");
      const std::string id = "(" + a + "|" + b + ")";
      edges.push_back({id, s->second, t->second, ea.kind});
      to_l.edge_map[id] = a;
      to_r.edge_map[id] = b;
    }
    GraphPtr head = make_graph(std::move(nodes), std::move(edges));
    const std::string hl = "r" + std::to_string(j);
    d.add_object(hl, head);
    to_l.source = to_r.source = head;
    to_l.target = parts[c.left].data.data;
    to_r.target = parts[c.right].data.data;
    d.add_arrow(hl, label_of(c.left), std::move(to_l));
    d.add_arrow(hl, label_of(c.right), std::move(to_r));
  }
  const Colimit col = colimit(d);

  // Class -> raw ids of its members, for renaming back.
  std::map<std::string, std::set<std::string>> node_raw, edge_raw;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const GraphMorphism& inj = col.cocone.at(label_of(k));
    for (const auto& [x, cls] : inj.node_map) node_raw[cls].insert(x);
    for (const auto& [x, cls] : inj.edge_map) edge_raw[cls].insert(x);
  }
  auto naming = [](const std::map<std::string, std::set<std::string>>& raw) {
    std::map<std::string, int> uses;
    for (const auto& [_, ids] : raw)
      for (const auto& id : ids) ++uses[id];
    std::map<std::string, std::string> name;
    for (const auto& [cls, ids] : raw)
      name[cls] = (ids.size() == 1 && uses[*ids.begin()] == 1) ? *ids.begin() : cls;
    return name;
  };
  const auto node_name = naming(node_raw);
  const auto edge_name = naming(edge_raw);

  std::map<std::string, std::string> node_type, edge_type;
  std::map<std::string, Literal> values;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Contribution& p = parts[k];
    const GraphMorphism& inj = col.cocone.at(label_of(k));
    for (const auto& [x, cls] : inj.node_map) {
      const std::string& n = node_name.at(cls);
      const std::string& t = p.map.node(p.data.type_of(x));
      auto [it, fresh] = node_type.emplace(n, t);
      if (!fresh && it->second != t) throw Error("merge: '" + n + "' is typed both " + it->second + " and " + t);
      if (auto v = p.data.values.find(x); v != p.data.values.end()) {
        auto [vit, vfresh] = values.emplace(n, v->second);
        if (!vfresh && vit->second != v->second)
          throw Error("merge: '" + n + "' is bound to both " + to_text(vit->second) + " and " + to_text(v->second));
      }
    }
    for (const auto& [x, cls] : inj.edge_map) {
      const std::string& n = edge_name.at(cls);
      const std::string& t = p.map.edge(p.data.typing.edge(x));
      auto [it, fresh] = edge_type.emplace(n, t);
      if (!fresh && it->second != t) throw Error("merge: '" + n + "' is typed both " + it->second + " and " + t);
    }
  }
  InstanceBuilder b(product_graph);
  for (const auto& [cls, n] : col.object->nodes()) {
    const std::string& name = node_name.at(cls);
    std::optional<Literal> v;
    if (auto it = values.find(name); it != values.end()) v = it->second;
    b.node(name, node_type.at(name), v);
  }
  for (const auto& [cls, e] : col.object->edges()) {
    const std::string& name = edge_name.at(cls);
    b.link(edge_type.at(name), node_name.at(e.src), node_name.at(e.tgt), name);
  }
  return b.build();
}

MergeResult write_merge(const std::vector<Contribution>& parts, const std::vector<Correspondence>& corrs,
                        const Metamodel& product) {
  MergeResult r;
  Instance merged = merge_instances(parts, corrs, product.graph);
  r.report = conforms(merged, product);
  if (r.report.conforms()) r.merged = std::move(merged);
  return r;
}

// ---------------------------------------------------------------------------

RunResult run(const DataflowDefinition& def, const std::map<std::string, Instance>& initial, const RunOptions& opts) {
  RunResult res;
  res.errors = check_definition(def);
  if (!res.errors.ok()) {
    res.ok = false;
    res.failed = def.name;
    return res;
  }
  for (const auto& wp : def.flow.initial_products())
    if (!initial.count(wp)) throw Error("run: no initial instance for work product '" + wp + "'");
  for (const auto& [wp, inst] : initial) {
    auto mm = def.wp_metamodels.find(wp);
    if (mm == def.wp_metamodels.end()) throw Error("run: initial instance for unknown work product '" + wp + "'");
    ConformanceReport c = conforms(inst, mm->second);
    if (!c.conforms()) {
      res.ok = false;
      res.failed = wp;
      res.conformance = std::move(c);
      return res;
    }
    res.state.products.emplace(wp, inst);
  }

  const ApplyContext ctx{opts.verdicts};
  const Acyclicity acyc = check_acyclic(def.flow);
  for (std::size_t stratum = 0; stratum < acyc.strata.size(); ++stratum) {
    const auto& procs = acyc.strata[stratum];
    struct Job {
      std::string name;
      std::vector<Instance> inputs;
      Application result;
      std::string error;
    };
    std::vector<Job> jobs;
    try {
      for (const auto& p : procs) {
        Job j{p, {}, {}, {}};
        const ProcessSchema& s = def.processes.at(p);
        for (const auto& in : s.inputs) {
          auto w = std::find_if(def.flow.in_wires.begin(), def.flow.in_wires.end(),
                                [&](const InWire& x) { return x.process == p && x.port == in.port; });
          j.inputs.push_back(read(res.state, def, *w));
        }
        jobs.push_back(std::move(j));
      }
    } catch (const Error& e) {
      res.ok = false;
      res.errors.add("read", e.what());
      return res;
    }
    auto work = [&](Job& j) {
      try {
        j.result = apply(def.processes.at(j.name), j.inputs, ctx);
      } catch (const std::exception& e) {
        j.error = e.what();
      }
    };
    if (opts.parallel && jobs.size() > 1) {
      std::vector<std::future<void>> fs;
      for (auto& j : jobs) fs.push_back(std::async(std::launch::async, work, std::ref(j)));
      for (auto& f : fs) f.get();
    } else {
      for (auto& j : jobs) work(j);
    }
    for (auto& j : jobs) {
      if (!j.error.empty()) {
        res.ok = false;
        res.failed = j.name;
        res.errors.add("process", j.name + ": " + j.error, {j.name});
        return res;
      }
      res.state.trace.push_back({static_cast<int>(stratum), j.name, j.result.inner, j.result.output,
                                 fnv1a(canonical_text(j.result.output))});
    }

    // Gather writes per product; commit in product order.
    std::map<std::string, std::vector<Contribution>> writes;
    for (const auto& j : jobs)
      for (const auto& w : def.flow.out_wires)
        if (w.process == j.name) writes[w.wp].push_back({j.result.output, def.out_map(w)});
    for (auto& [wp, parts] : writes) {
      const Metamodel& mm = def.wp_metamodels.at(wp);
      if (auto it = res.state.products.find(wp); it != res.state.products.end())
        parts.insert(parts.begin(), Contribution{it->second, identity(mm.graph)});
      MergeResult m;
      try {
        m = write_merge(parts, correspondences_by_id(parts), mm);
      } catch (const Error& e) {
        res.ok = false;
        res.failed = wp;
        res.errors.add("merge", wp + ": " + e.what(), {wp});
        return res;
      }
      if (!m.merged) {
        res.ok = false;
        res.failed = wp;
        res.conformance = std::move(m.report);
        return res;
      }
      res.state.products[wp] = std::move(*m.merged);
    }
  }
  return res;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> map_names(const std::vector<std::string>& names, const GraphMorphism& m,
                                   const std::map<std::string, std::string>& derived_rename) {
  std::vector<std::string> out;
  for (const auto& n : names) {
    if (auto it = derived_rename.find(n); it != derived_rename.end())
      out.push_back(it->second);
    else
      out.push_back(m.edge(n));
  }
  return out;
}

ConstraintBody map_body(const ConstraintBody& body, const GraphMorphism& m,
                        const std::map<std::string, std::string>& dr) {
  auto one = [&](const std::string& n) { return map_names({n}, m, dr).front(); };
  if (auto* x = std::get_if<Multiplicity>(&body)) return Multiplicity{one(x->edge), x->end, x->lower, x->upper};
  if (auto* x = std::get_if<Key>(&body)) return Key{map_names(x->edges, m, dr)};
  if (auto* x = std::get_if<Xor>(&body)) return Xor{map_names(x->edges, m, dr)};
  if (auto* x = std::get_if<ValidityTrue>(&body)) return ValidityTrue{one(x->edge)};
  const auto& x = std::get<DerivedEquality>(body);
  return DerivedEquality{one(x.derived), one(x.edge)};
}

}  // namespace

ProcessSchema encapsulate(const DataflowDefinition& def_in) {
  const ValidationReport r = check_definition(def_in);
  if (!r.ok()) throw Error("encapsulate " + def_in.name + ": " + r.violations.front().message);
  auto def = std::make_shared<const DataflowDefinition>(def_in);

  Diagram d;
  for (const auto& [wp, mm] : def->wp_metamodels)
    if (def->flow.work_products.count(wp)) d.add_object("wp." + wp, mm.graph);
  for (const auto& [name, s] : def->processes) {
    if (!def->flow.process(name)) continue;
    d.add_object("inner." + name, s.inner.graph);
    d.add_object("out." + name, s.output.metamodel.graph);
    d.add_arrow("out." + name, "inner." + name, s.output.map);
    for (const auto& in : s.inputs) {
      const std::string label = "in." + name + "." + in.port;
      d.add_object(label, in.metamodel.graph);
      d.add_arrow(label, "inner." + name, in.injection);
    }
  }
  for (const auto& w : def->flow.in_wires) d.add_arrow("in." + w.process + "." + w.port, "wp." + w.wp, def->in_map(w));
  for (const auto& w : def->flow.out_wires) d.add_arrow("out." + w.process, "wp." + w.wp, def->out_map(w));
  const Colimit col = colimit(d);

  // Carry product constraints and derived associations into the colimit.
  std::vector<Constraint> constraints;
  std::vector<DerivedAssoc> derived;
  std::set<std::string> derived_names;
  std::set<std::string> ids;
  for (const auto& wp : def->flow.work_products) {
    const Metamodel& mm = def->wp_metamodels.at(wp);
    const GraphMorphism& inj = col.cocone.at("wp." + wp);
    std::map<std::string, std::string> dr;
    for (const auto& [n, da] : mm.derived) {
      DerivedAssoc mapped{n, map_names(da.chain, inj, {})};
      auto same = std::find_if(derived.begin(), derived.end(),
                               [&](const DerivedAssoc& x) { return x.chain == mapped.chain; });
      if (same != derived.end()) {
        dr[n] = same->name;
        continue;
      }
      if (derived_names.count(n)) mapped.name = wp + "." + n;
      derived_names.insert(mapped.name);
      dr[n] = mapped.name;
      derived.push_back(std::move(mapped));
    }
    for (const auto& c : mm.constraints) {
      Constraint mapped{c.id, map_body(c.body, inj, dr)};
      if (std::any_of(constraints.begin(), constraints.end(), [&](const auto& x) { return x.same_content(mapped); }))
        continue;
      if (ids.count(mapped.id)) mapped.id = wp + "." + mapped.id;
      ids.insert(mapped.id);
      constraints.push_back(std::move(mapped));
    }
  }

  ProcessSchema s;
  s.name = def->name;
  s.inner = make_metamodel(def->name + ".inner", col.object, std::move(constraints), std::move(derived));
  for (const auto& wp : def->flow.initial_products())
    s.inputs.push_back({wp, def->wp_metamodels.at(wp), col.cocone.at("wp." + wp)});
  const auto finals = def->flow.final_products();
  if (finals.size() != 1)
    throw Error("encapsulate " + def->name + ": expected one final work product, found " + std::to_string(finals.size()));
  const std::string out = *finals.begin();
  s.output = {out, def->wp_metamodels.at(out), col.cocone.at("wp." + out)};

  const GraphPtr inner_graph = col.object;
  const auto cocone = col.cocone;
  s.semantics = sem::Custom{
      "workflow:" + def->name,
      [def, inner_graph, cocone](const Instance&, const std::vector<Instance>& inputs, const ProcessSchema& schema,
                                 const ApplyContext& ctx) {
        std::map<std::string, Instance> initial;
        for (std::size_t k = 0; k < inputs.size(); ++k) initial.emplace(schema.inputs[k].port, inputs[k]);
        RunResult rr = run(*def, initial, RunOptions{ctx.verdicts, false});
        if (!rr.ok) {
          std::string why = rr.conformance ? "violates " + rr.failed
                                           : (rr.errors.ok() ? rr.failed : rr.errors.violations.front().message);
          throw Error("workflow " + def->name + " failed: " + why);
        }
        InstanceBuilder b(inner_graph);
        for (const auto& [wp, inst] : rr.state.products) {
          const Instance pushed = push_forward(inst, cocone.at("wp." + wp));
          for (const auto& [id, _] : pushed.data->nodes()) {
            std::optional<Literal> v;
            if (auto it = pushed.values.find(id); it != pushed.values.end()) v = it->second;
            b.node(id, pushed.type_of(id), v);
          }
          for (const auto& [id, e] : pushed.data->edges()) b.link(pushed.typing.edge(id), e.src, e.tgt, id);
        }
        return b.build();
      }};
  return s;
}

}  // namespace wfp
