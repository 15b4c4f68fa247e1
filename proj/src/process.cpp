#include "wfp/process.hpp"

#include <mutex>

#include "wfp/cat_ops.hpp"
#include "wfp/iso.hpp"

namespace wfp {

namespace {

std::mutex hooks_mutex;
std::map<std::string, sem::HookFn>& hooks() {
  static std::map<std::string, sem::HookFn> registry;
  return registry;
}

// (object, attribute edge) -> literal
std::map<std::pair<std::string, std::string>, Literal> attribute_values(const Instance& i) {
  std::map<std::pair<std::string, std::string>, Literal> out;
  for (const auto& [id, e] : i.data->edges()) {
    auto v = i.values.find(e.tgt);
    if (v != i.values.end()) out.emplace(std::pair{e.src, i.typing.edge(id)}, v->second);
  }
  return out;
}

std::multimap<std::string, std::string> links_of(const Instance& i, const std::string& type_edge) {
  std::multimap<std::string, std::string> out;
  for (const auto& [id, e] : i.data->edges())
    if (i.typing.edge(id) == type_edge) out.emplace(e.src, e.tgt);
  return out;
}

void require_edge(const Metamodel& m, const std::string& e, const std::string& what) {
  if (!m.graph->has_edge(e)) throw Error(what + ": '" + e + "' is not an edge of the inner metamodel");
}

Instance run_semantics(const ProcessSchema& s, const Instance& embedded, const std::vector<Instance>& inputs,
                       const ApplyContext& ctx) {
  struct Visitor {
    const ProcessSchema& s;
    const Instance& embedded;
    const std::vector<Instance>& inputs;
    const ApplyContext& ctx;

    Instance operator()(const sem::Identity&) const { return embedded; }

    Instance operator()(const sem::Constant& c) const {
      if (!same_graph(c.data.type_graph(), s.inner.graph))
        throw Error("process " + s.name + ": constant data is not typed over the inner metamodel");
      InstanceBuilder b(embedded);
      for (const auto& [id, _] : c.data.data->nodes()) {
        std::optional<Literal> v;
        if (auto it = c.data.values.find(id); it != c.data.values.end()) v = it->second;
        b.node(id, c.data.type_of(id), v);
      }
      for (const auto& [id, e] : c.data.data->edges()) b.link(c.data.typing.edge(id), e.src, e.tgt, id);
      return b.build();
    }

    Instance operator()(const sem::ComposeLinks& c) const {
      require_edge(s.inner, c.result_edge, "compose");
      if (c.chain.empty()) throw Error("compose: empty chain");
      std::set<std::pair<std::string, std::string>> acc;
      for (const auto& [a, b] : links_of(embedded, c.chain.front())) acc.insert({a, b});
      for (std::size_t k = 1; k < c.chain.size(); ++k) {
        const auto step = links_of(embedded, c.chain[k]);
        std::set<std::pair<std::string, std::string>> next;
        for (const auto& [a, b] : acc) {
          auto [lo, hi] = step.equal_range(b);
          for (auto it = lo; it != hi; ++it) next.insert({a, it->second});
        }
        acc = std::move(next);
      }
      InstanceBuilder b(embedded);
      for (const auto& [x, y] : acc) b.link(c.result_edge, x, y);
      return b.build();
    }

    Instance operator()(const sem::AttributeMax& c) const {
      require_edge(s.inner, c.group_attr, "max");
      const auto agg = derived_attribute_max(embedded, c.membership_edge, c.member_attr);
      InstanceBuilder b(embedded);
      for (const auto& [g, v] : agg.values) b.value(g, c.group_attr, v);
      return b.build();
    }

    Instance operator()(const sem::ThresholdCompare& c) const {
      for (const auto* e : {&c.path_edge, &c.value_attr, &c.key_attr, &c.out_attr}) require_edge(s.inner, *e, "threshold");
      const auto vals = attribute_values(embedded);
      const auto path = links_of(embedded, c.path_edge);
      InstanceBuilder b(embedded);
      for (const auto& subject : embedded.objects_of(c.subject)) {
        bool ok = false;
        auto [lo, hi] = path.equal_range(subject);
        if (std::distance(lo, hi) == 1) {
          const std::string& x = lo->second;
          auto v = vals.find({x, c.value_attr});
          auto k = vals.find({x, c.key_attr});
          if (v != vals.end() && k != vals.end() && std::holds_alternative<std::int64_t>(k->second)) {
            auto row = c.rows.find(std::get<std::int64_t>(k->second));
            if (row != c.rows.end()) {
              if (const auto* r = std::get_if<Rational>(&v->second)) ok = *r < row->second;
              if (const auto* n = std::get_if<std::int64_t>(&v->second)) ok = Rational(*n) < row->second;
            }
          }
        }
        b.value(subject, c.out_attr, ok);
      }
      return b.build();
    }

    Instance operator()(const sem::SetValidity& c) const {
      require_edge(s.inner, c.attr, "validity");
      InstanceBuilder b(embedded);
      if (ctx.verdicts)
        for (const auto& x : embedded.objects_of(c.cls))
          if (auto it = ctx.verdicts->find(x); it != ctx.verdicts->end()) b.value(x, c.attr, it->second);
      return b.build();
    }

    Instance operator()(const sem::Custom& c) const {
      sem::HookFn fn = c.fn;
      if (!fn) {
        std::lock_guard lock(hooks_mutex);
        auto it = hooks().find(c.id);
        if (it == hooks().end()) throw Error("process " + s.name + ": no hook registered as '" + c.id + "'");
        fn = it->second;
      }
      Instance out = fn(embedded, inputs, s, ctx);
      if (!same_graph(out.type_graph(), s.inner.graph))
        throw Error("process " + s.name + ": hook '" + c.id + "' returned data outside the inner metamodel");
      return out;
    }
  };
  return std::visit(Visitor{s, embedded, inputs, ctx}, s.semantics);
}

}  // namespace

std::string semantics_name(const Semantics& s) {
  static const char* names[] = {"identity", "constant", "compose", "max", "threshold", "validity", "custom"};
  return names[s.index()];
}

void register_hook(const std::string& id, sem::HookFn fn) {
  std::lock_guard lock(hooks_mutex);
  hooks()[id] = std::move(fn);
}

InputPort input_port(const std::string& port, const Metamodel& mm, const Metamodel& inner) {
  return {port, mm, inclusion(mm.graph, inner.graph)};
}

OutputPort output_port(const std::string& port, const Metamodel& mm, const Metamodel& inner) {
  return {port, mm, inclusion(mm.graph, inner.graph)};
}

ValidationReport check_arity(const ProcessSchema& s) {
  ValidationReport r;
  std::set<std::string> ports;
  for (const auto& in : s.inputs) {
    if (!ports.insert(in.port).second) r.add("duplicate-port", "port '" + in.port + "' is declared twice", {in.port});
    if (!same_graph(in.injection.source, in.metamodel.graph) || !same_graph(in.injection.target, s.inner.graph)) {
      r.add("port-map", "injection of port '" + in.port + "' does not run from its metamodel into the inner one", {in.port});
      continue;
    }
    ValidationReport m = check_morphism(in.injection);
    for (auto& v : m.violations) v.message = "port '" + in.port + "': " + v.message;
    r.append(m);
    if (m.ok() && !is_injective(in.injection))
      r.add("injectivity", "injection of port '" + in.port + "' is not injective", {in.port});
  }
  for (std::size_t a = 0; a < s.inputs.size(); ++a)
    for (std::size_t b = a + 1; b < s.inputs.size(); ++b) {
      const auto& x = s.inputs[a].injection;
      const auto& y = s.inputs[b].injection;
      if (!same_graph(x.target, y.target)) continue;
      auto overlap = image_overlap(x, y);
      if (!overlap.empty())
        r.add("disjointness", "images of ports '" + s.inputs[a].port + "' and '" + s.inputs[b].port + "' overlap",
              std::move(overlap));
    }
  if (!same_graph(s.output.map.source, s.output.metamodel.graph) || !same_graph(s.output.map.target, s.inner.graph)) {
    r.add("port-map", "output map does not run from the output metamodel into the inner one", {s.output.port});
  } else {
    ValidationReport m = check_morphism(s.output.map);
    for (auto& v : m.violations) v.message = "output: " + v.message;
    r.append(m);
  }
  return r;
}

Instance embed_inputs(const ProcessSchema& s, const std::vector<Instance>& inputs) {
  if (inputs.size() != s.inputs.size())
    throw Error("process " + s.name + ": expected " + std::to_string(s.inputs.size()) + " inputs, got " +
                std::to_string(inputs.size()));
  std::map<std::string, int> node_uses, edge_uses;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    if (!same_graph(inputs[k].type_graph(), s.inputs[k].metamodel.graph))
      throw Error("process " + s.name + ": input '" + s.inputs[k].port + "' is not typed over its port metamodel");
    for (const auto& [id, _] : inputs[k].data->nodes()) ++node_uses[id];
    for (const auto& [id, _] : inputs[k].data->edges()) ++edge_uses[id];
  }
  InstanceBuilder b(s.inner.graph);
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const Instance& in = inputs[k];
    const GraphMorphism& inj = s.inputs[k].injection;
    const std::string prefix = s.inputs[k].port + ".";
    auto node_name = [&](const std::string& id) { return node_uses[id] > 1 ? prefix + id : id; };
    for (const auto& [id, _] : in.data->nodes()) {
      std::optional<Literal> v;
      if (auto it = in.values.find(id); it != in.values.end()) v = it->second;
      b.node(node_name(id), inj.node(in.type_of(id)), v);
    }
    for (const auto& [id, e] : in.data->edges())
      b.link(inj.edge(in.typing.edge(id)), node_name(e.src), node_name(e.tgt), edge_uses[id] > 1 ? prefix + id : id);
  }
  return b.build();
}

Application apply(const ProcessSchema& s, const std::vector<Instance>& inputs, const ApplyContext& ctx) {
  const Instance embedded = embed_inputs(s, inputs);
  Application a;
  a.inner = run_semantics(s, embedded, inputs, ctx);
  a.output = restrict(a.inner, s.output.map);
  return a;
}

bool check_putget(const ProcessSchema& s, const std::vector<Instance>& inputs, const ApplyContext& ctx) {
  const Application a = apply(s, inputs, ctx);
  for (std::size_t k = 0; k < inputs.size(); ++k)
    if (!isomorphic(restrict(a.inner, s.inputs[k].injection), inputs[k])) return false;
  return true;
}

std::optional<Instance> signal_semantics(const ProcessSchema& s, bool triggered, const ApplyContext& ctx) {
  if (s.inputs.empty()) return apply(s, {}, ctx).output;
  if (s.inputs.size() != 1 || !s.inputs.front().metamodel.graph->empty())
    throw Error("process " + s.name + ": signal semantics needs one port with the empty metamodel");
  if (!triggered) return std::nullopt;
  Instance signal = InstanceBuilder(s.inputs.front().metamodel.graph).build();
  return apply(s, {signal}, ctx).output;
}

}  // namespace wfp
