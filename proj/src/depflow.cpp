#include "wfp/depflow.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>

namespace wfp {

const ProcessPorts* DependencyFlow::process(const std::string& name) const {
  for (const auto& p : processes)
    if (p.name == name) return &p;
  return nullptr;
}

std::set<std::string> DependencyFlow::initial_products() const {
  std::set<std::string> out = work_products;
  for (const auto& w : out_wires) out.erase(w.wp);
  return out;
}

std::set<std::string> DependencyFlow::final_products() const {
  std::set<std::string> out = work_products;
  for (const auto& w : in_wires) out.erase(w.wp);
  return out;
}

std::string wire_label(const InWire& w) { return w.wp + "->" + w.process + "." + w.port; }
std::string wire_label(const OutWire& w) { return w.process + "->" + w.wp; }

FlowBuild build_flow(DependencyFlow parts) {
  FlowBuild b;
  ValidationReport& r = b.report;
  std::sort(parts.processes.begin(), parts.processes.end(),
            [](const auto& x, const auto& y) { return x.name < y.name; });
  std::sort(parts.in_wires.begin(), parts.in_wires.end());
  std::sort(parts.out_wires.begin(), parts.out_wires.end());

  for (std::size_t k = 1; k < parts.processes.size(); ++k)
    if (parts.processes[k].name == parts.processes[k - 1].name)
      r.add("duplicate-process", "process '" + parts.processes[k].name + "' occurs twice", {parts.processes[k].name});
  for (const auto& p : parts.processes)
    if (parts.work_products.count(p.name))
      r.add("name-clash", "'" + p.name + "' names both a process and a work product", {p.name});

  std::map<std::pair<std::string, std::string>, int> in_count;
  for (const auto& p : parts.processes)
    for (const auto& port : p.in_ports) in_count[{p.name, port}] = 0;

  for (std::size_t k = 0; k < parts.in_wires.size(); ++k) {
    const InWire& w = parts.in_wires[k];
    if (k > 0 && parts.in_wires[k - 1] == w) {
      r.add("key", "wire " + wire_label(w) + " is declared twice; wires are determined by their ends", {wire_label(w)});
      continue;
    }
    if (!parts.work_products.count(w.wp)) r.add("dangling", "wire " + wire_label(w) + ": unknown work product", {w.wp});
    const ProcessPorts* p = parts.process(w.process);
    if (!p) {
      r.add("dangling", "wire " + wire_label(w) + ": unknown process", {w.process});
      continue;
    }
    auto it = in_count.find({w.process, w.port});
    if (it == in_count.end()) {
      r.add("dangling", "wire " + wire_label(w) + ": process has no in-port '" + w.port + "'", {w.process + "." + w.port});
      continue;
    }
    ++it->second;
  }
  for (const auto& [pp, n] : in_count) {
    const std::string port = pp.first + "." + pp.second;
    if (n == 0) r.add("in-port-unwired", "in-port " + port + " has no incoming wire", {port});
    if (n > 1) r.add("in-port-multiple", "in-port " + port + " has " + std::to_string(n) + " incoming wires", {port});
  }

  std::map<std::string, int> out_count;
  for (const auto& p : parts.processes) out_count[p.name] = 0;
  for (std::size_t k = 0; k < parts.out_wires.size(); ++k) {
    const OutWire& w = parts.out_wires[k];
    if (k > 0 && parts.out_wires[k - 1] == w) {
      r.add("key", "wire " + wire_label(w) + " is declared twice; wires are determined by their ends", {wire_label(w)});
      continue;
    }
    if (!parts.work_products.count(w.wp)) r.add("dangling", "wire " + wire_label(w) + ": unknown work product", {w.wp});
    auto it = out_count.find(w.process);
    if (it == out_count.end())
      r.add("dangling", "wire " + wire_label(w) + ": unknown process", {w.process});
    else
      ++it->second;
  }
  for (const auto& [p, n] : out_count)
    if (n == 0) r.add("out-port-unwired", "out-port of " + p + " has no outgoing wire", {p});

  b.flow = std::move(parts);
  return b;
}

DerivedRelations derived_relations(const DependencyFlow& f) {
  DerivedRelations d;
  for (const auto& o : f.out_wires)
    for (const auto& i : f.in_wires)
      if (o.wp == i.wp) d.ps2ps.insert({o.process, i.process});
  for (const auto& i : f.in_wires)
    for (const auto& o : f.out_wires)
      if (i.process == o.process) d.wp2wp.insert({i.wp, o.wp});
  return d;
}

bool relation_acyclic(const std::set<std::pair<std::string, std::string>>& rel) {
  std::map<std::string, int> indeg;
  std::map<std::string, std::vector<std::string>> succ;
  for (const auto& [a, b] : rel) {
    indeg[a];
    ++indeg[b];
    succ[a].push_back(b);
  }
  std::deque<std::string> ready;
  for (const auto& [n, d] : indeg)
    if (d == 0) ready.push_back(n);
  std::size_t seen = 0;
  while (!ready.empty()) {
    const std::string n = ready.front();
    ready.pop_front();
    ++seen;
    for (const auto& m : succ[n])
      if (--indeg[m] == 0) ready.push_back(m);
  }
  return seen == indeg.size();
}

namespace {

// Lexicographically least among the shortest cycles through `start`.
std::vector<std::string> shortest_cycle_from(const std::string& start,
                                             const std::map<std::string, std::set<std::string>>& adj) {
  std::map<std::string, std::string> parent;
  std::deque<std::string> queue{start};
  std::set<std::string> seen{start};
  while (!queue.empty()) {
    const std::string n = queue.front();
    queue.pop_front();
    auto it = adj.find(n);
    if (it == adj.end()) continue;
    for (const auto& m : it->second) {
      if (m == start) {
        std::vector<std::string> path{start};
        for (std::string x = n; x != start; x = parent.at(x)) path.push_back(x);
        std::reverse(path.begin() + 1, path.end());
        path.push_back(start);
        return path;
      }
      if (seen.insert(m).second) {
        parent[m] = n;
        queue.push_back(m);
      }
    }
  }
  return {};
}

}  // namespace

Acyclicity check_acyclic(const DependencyFlow& f) {
  Acyclicity a;
  std::map<std::string, std::set<std::string>> adj;
  for (const auto& w : f.out_wires) adj[w.process].insert(w.wp);
  for (const auto& w : f.in_wires) adj[w.wp].insert(w.process);

  const DerivedRelations rel = derived_relations(f);
  if (!relation_acyclic(rel.ps2ps)) {
    a.acyclic = false;
    for (const auto& [n, _] : adj) {
      auto c = shortest_cycle_from(n, adj);
      if (c.empty()) continue;
      if (a.cycle.empty() || c.size() < a.cycle.size() || (c.size() == a.cycle.size() && c < a.cycle)) a.cycle = c;
    }
    return a;
  }

  std::map<std::string, std::vector<std::string>> preds;
  for (const auto& [p, q] : rel.ps2ps) preds[q].push_back(p);
  std::map<std::string, int> depth;
  std::function<int(const std::string&)> depth_of = [&](const std::string& p) {
    if (auto it = depth.find(p); it != depth.end()) return it->second;
    int d = 0;
    for (const auto& q : preds[p]) d = std::max(d, depth_of(q) + 1);
    depth[p] = d;
    return d;
  };
  for (const auto& p : f.processes) {
    const int d = depth_of(p.name);
    if (a.strata.size() <= static_cast<std::size_t>(d)) a.strata.resize(d + 1);
    a.strata[d].push_back(p.name);
  }
  return a;
}

std::pair<DependencyFlow, std::vector<IdInsertion>> normalize_id(const DependencyFlow& f) {
  const Acyclicity a = check_acyclic(f);
  if (!a.acyclic) throw Error("normalize_id: flow is cyclic");
  std::map<std::string, int> depth;
  for (std::size_t k = 0; k < a.strata.size(); ++k)
    for (const auto& p : a.strata[k]) depth[p] = static_cast<int>(k);
  std::map<std::string, int> produced;
  for (const auto& wp : f.work_products) produced[wp] = -1;
  for (const auto& w : f.out_wires) produced[w.wp] = std::max(produced[w.wp], depth[w.process]);

  DependencyFlow out = f;
  std::vector<IdInsertion> added;
  std::map<std::string, std::string> relay;  // "<wp>.<k>" already created
  std::vector<InWire> extra;
  for (auto& w : out.in_wires) {
    const int want = depth[w.process] - 1;
    std::string cur = w.wp;
    for (int k = produced[w.wp] + 1; k <= want; ++k) {
      const std::string next = w.wp + "." + std::to_string(k);
      if (!relay.count(next)) {
        const std::string proc = "Id." + w.wp + "." + std::to_string(k);
        relay.emplace(next, proc);
        out.processes.push_back({proc, {"in"}, "out"});
        out.work_products.insert(next);
        extra.push_back({cur, proc, "in"});
        out.out_wires.push_back({proc, next});
        added.push_back({proc, cur, next});
      }
      cur = next;
    }
    w.wp = cur;
  }
  out.in_wires.insert(out.in_wires.end(), extra.begin(), extra.end());
  FlowBuild b = build_flow(std::move(out));
  return {std::move(b.flow), std::move(added)};
}

}  // namespace wfp
