#include "wfp/derivation.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "wfp/exec.hpp"

namespace wfp {

std::string_view to_string(StepKind k) {
  switch (k) {
    case StepKind::Definitional: return "definitional";
    case StepKind::MultiplicityComposition: return "multiplicity_composition";
    case StepKind::Conjunction: return "conjunction";
    case StepKind::Semantic: return "semantic";
  }
  return "?";
}

std::optional<StepKind> parse_step_kind(std::string_view s) {
  for (auto k : {StepKind::Definitional, StepKind::MultiplicityComposition, StepKind::Conjunction, StepKind::Semantic})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

std::string_view to_string(StepStatus s) {
  switch (s) {
    case StepStatus::Sound: return "sound";
    case StepStatus::Refuted: return "refuted";
    case StepStatus::Assumed: return "assumed";
  }
  return "?";
}

std::vector<std::string> DerivationTree::given() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : claims)
    if (!concluding(name)) out.push_back(name);
  return out;
}

const Step* DerivationTree::concluding(const std::string& claim) const {
  for (const auto& s : steps)
    if (s.conclusion == claim) return &s;
  return nullptr;
}

ValidationReport check_tree(const DerivationTree& t) {
  ValidationReport r;
  auto known = [&](const std::string& n) { return t.metamodel.graph->has_edge(n) || t.metamodel.derived.count(n); };
  for (const auto& [name, c] : t.claims) {
    if (c.kind == ClaimKind::Atomic) {
      if (!c.atom) {
        r.add("claim", "claim '" + name + "' has no content", {name});
        continue;
      }
      for (const auto& n : referenced_names(*c.atom))
        if (!known(n)) r.add("dangling", "claim '" + name + "' references unknown '" + n + "'", {name, n});
    }
    if (c.kind == ClaimKind::All)
      for (const auto& p : c.parts)
        if (!t.claims.count(p)) r.add("dangling", "claim '" + name + "' uses undeclared claim '" + p + "'", {name, p});
  }
  // Conjunctions must be well-founded.
  std::map<std::string, int> state;
  std::function<bool(const std::string&)> cyclic = [&](const std::string& n) {
    auto it = t.claims.find(n);
    if (it == t.claims.end()) return false;
    int& s = state[n];
    if (s == 1) return true;
    if (s == 2) return false;
    s = 1;
    for (const auto& p : it->second.parts)
      if (cyclic(p)) return true;
    s = 2;
    return false;
  };
  for (const auto& [name, _] : t.claims)
    if (cyclic(name)) {
      r.add("cycle", "claim '" + name + "' is defined in terms of itself", {name});
      break;
    }

  std::set<std::string> available;
  std::set<int> indices;
  std::set<std::string> concluded;
  for (const auto& s : t.steps) {
    if (!concluded.insert(s.conclusion).second)
      r.add("duplicate", "claim '" + s.conclusion + "' is concluded twice", {s.conclusion});
  }
  for (const auto& name : t.given()) {
    available.insert(name);
    if (t.claims.at(name).kind != ClaimKind::Atomic)
      r.add("given", "given claim '" + name + "' must be a single constraint", {name});
  }
  int last = -1;
  for (const auto& s : t.steps) {
    const std::string label = "step " + std::to_string(s.index);
    if (s.index <= last) r.add("order", label + " is out of order", {label});
    last = std::max(last, s.index);
    if (!indices.insert(s.index).second) r.add("duplicate", label + " is declared twice", {label});
    if (!t.claims.count(s.conclusion))
      r.add("dangling", label + " concludes undeclared claim '" + s.conclusion + "'", {s.conclusion});
    if (s.premises.empty()) r.add("premises", label + " has no premises", {label});
    for (const auto& p : s.premises) {
      if (!t.claims.count(p))
        r.add("dangling", label + " uses undeclared claim '" + p + "'", {p});
      else if (!available.count(p))
        r.add("forward-reference", label + " uses '" + p + "' before it is derived", {p});
    }
    if (s.kind != StepKind::Semantic) {
      std::vector<std::string> involved = s.premises;
      involved.push_back(s.conclusion);
      for (const auto& n : involved) {
        auto it = t.claims.find(n);
        if (it != t.claims.end() && it->second.kind == ClaimKind::Opaque)
          r.add("opaque", label + " is " + std::string(to_string(s.kind)) + " but '" + n + "' is opaque", {n});
      }
    }
    available.insert(s.conclusion);
  }
  if (t.top.empty())
    r.add("top", "no top claim declared");
  else if (!t.claims.count(t.top))
    r.add("dangling", "top claim '" + t.top + "' is undeclared", {t.top});
  return r;
}

// ---------------------------------------------------------------------------

namespace {

void flatten(const DerivationTree& t, const std::string& name, std::vector<ConstraintBody>& out) {
  const Claim& c = t.claims.at(name);
  switch (c.kind) {
    case ClaimKind::Atomic: out.push_back(*c.atom); break;
    case ClaimKind::All:
      for (const auto& p : c.parts) flatten(t, p, out);
      break;
    case ClaimKind::Opaque: throw Error("claim '" + name + "' is opaque and cannot be checked mechanically");
  }
}

// Atoms that make a claim true when read intrinsically: opaque claims stand
// for the conjunction of the premises of the step that concludes them.
void intrinsic(const DerivationTree& t, const std::string& name, std::vector<ConstraintBody>& out) {
  const Claim& c = t.claims.at(name);
  switch (c.kind) {
    case ClaimKind::Atomic: out.push_back(*c.atom); break;
    case ClaimKind::All:
      for (const auto& p : c.parts) intrinsic(t, p, out);
      break;
    case ClaimKind::Opaque: {
      const Step* s = t.concluding(name);
      if (!s) throw Error("opaque claim '" + name + "' is not concluded by any step");
      for (const auto& p : s->premises) intrinsic(t, p, out);
      break;
    }
  }
}

std::vector<std::string> atom_edges(const Metamodel& m, const ConstraintBody& a) {
  std::vector<std::string> out;
  for (const auto& n : referenced_names(a)) {
    if (auto it = m.derived.find(n); it != m.derived.end())
      out.insert(out.end(), it->second.chain.begin(), it->second.chain.end());
    else
      out.push_back(n);
  }
  return out;
}

struct Component {
  std::vector<ConstraintBody> assume, check;
};

// Groups atoms that share a class (value types excepted) or an edge.
std::vector<Component> components(const Metamodel& m, const std::vector<ConstraintBody>& assume,
                                  const std::vector<ConstraintBody>& check) {
  std::vector<ConstraintBody> all = assume;
  all.insert(all.end(), check.begin(), check.end());
  std::vector<std::size_t> parent(all.size());
  for (std::size_t k = 0; k < parent.size(); ++k) parent[k] = k;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  std::map<std::string, std::size_t> owner;
  for (std::size_t k = 0; k < all.size(); ++k)
    for (const auto& e : atom_edges(m, all[k])) {
      const Edge& edge = m.graph->edge(e);
      for (const std::string& key : {"e:" + e, "n:" + edge.src, "n:" + edge.tgt}) {
        if (key[0] == 'n' && m.graph->node(key.substr(2)).kind == NodeKind::ValueType) continue;
        auto [it, fresh] = owner.emplace(key, k);
        if (!fresh) parent[find(k)] = find(it->second);
      }
    }
  std::map<std::size_t, Component> groups;
  for (std::size_t k = 0; k < all.size(); ++k) {
    Component& c = groups[find(k)];
    (k < assume.size() ? c.assume : c.check).push_back(all[k]);
  }
  std::vector<Component> out;
  for (auto& [_, c] : groups) out.push_back(std::move(c));
  return out;
}

// Exhaustive enumeration of instances over the footprint of some atoms.
class Enumerator {
 public:
  Enumerator(const Metamodel& m, std::vector<ConstraintBody> assume, std::vector<ConstraintBody> check, int bound)
      : m_(m), assume_(std::move(assume)), check_(std::move(check)), bound_(bound) {
    std::set<std::string> edges, classes;
    for (const auto* list : {&assume_, &check_})
      for (const auto& a : *list)
        for (const auto& e : atom_edges(m, a)) edges.insert(e);
    for (const auto& e : edges) {
      const Edge& edge = m.graph->edge(e);
      classes.insert(edge.src);
      if (m.graph->node(edge.tgt).kind != NodeKind::ValueType) classes.insert(edge.tgt);
    }
    classes_.assign(classes.begin(), classes.end());
    edges_.assign(edges.begin(), edges.end());
    for (const auto& a : assume_) {
      if (const auto* mu = std::get_if<Multiplicity>(&a); mu && mu->end == End::Tgt && m.graph->has_edge(mu->edge)) {
        auto& w = window_[mu->edge];
        w.first = std::max(w.first, mu->lower);
        if (mu->upper) w.second = w.second ? std::min(*w.second, *mu->upper) : *mu->upper;
      }
      if (const auto* v = std::get_if<ValidityTrue>(&a)) only_true_.insert(v->edge);
    }
  }

  // Calls `visit` for each instance satisfying the assumptions until it
  // returns false.
  void for_each(const std::function<bool(const Instance&)>& visit) {
    counts_.assign(classes_.size(), 0);
    stop_ = false;
    count_level(0, visit);
  }

  std::size_t models = 0;

 private:
  struct Slot {
    std::string edge, src;
    std::vector<std::vector<std::size_t>> target_sets;  // association: chosen targets
    std::vector<std::vector<Literal>> value_sets;        // attribute: chosen literals
  };

  static std::string object_id(const std::string& cls, int k) { return cls + "_" + std::to_string(k); }

  int count_of(const std::string& cls) const {
    auto it = std::find(classes_.begin(), classes_.end(), cls);
    return counts_[it - classes_.begin()];
  }

  bool in_window(const std::string& edge, std::size_t n) const {
    auto it = window_.find(edge);
    if (it == window_.end()) return true;
    return static_cast<std::int64_t>(n) >= it->second.first &&
           (!it->second.second || static_cast<std::int64_t>(n) <= *it->second.second);
  }

  void count_level(std::size_t level, const std::function<bool(const Instance&)>& visit) {
    if (stop_) return;
    if (level == classes_.size()) {
      build_slots();
      choice_.assign(slots_.size(), 0);
      slot_level(0, visit);
      return;
    }
    for (int n = 0; n <= bound_ && !stop_; ++n) {
      counts_[level] = n;
      count_level(level + 1, visit);
    }
  }

  void build_slots() {
    slots_.clear();
    for (const auto& e : edges_) {
      const Edge& edge = m_.graph->edge(e);
      const bool attr = m_.graph->node(edge.tgt).kind == NodeKind::ValueType;
      for (int s = 1; s <= count_of(edge.src); ++s) {
        Slot slot{e, object_id(edge.src, s), {}, {}};
        if (attr) {
          std::vector<Literal> domain;
          if (edge.tgt == "Bool") {
            domain.push_back(true);
            if (!only_true_.count(e)) domain.push_back(false);
          } else if (edge.tgt == "Int") {
            domain.push_back(std::int64_t{0});
          } else if (edge.tgt == "Real") {
            domain.push_back(Rational(0));
          } else {
            domain.push_back(std::string("v"));
          }
          // Multisets of literals of size 0..bound.
          std::function<void(std::size_t, std::vector<Literal>&)> gen = [&](std::size_t from, std::vector<Literal>& cur) {
            if (in_window(e, cur.size())) slot.value_sets.push_back(cur);
            if (static_cast<int>(cur.size()) == bound_) return;
            for (std::size_t d = from; d < domain.size(); ++d) {
              cur.push_back(domain[d]);
              gen(d, cur);
              cur.pop_back();
            }
          };
          std::vector<Literal> cur;
          gen(0, cur);
        } else {
          const int nt = count_of(edge.tgt);
          for (std::uint32_t mask = 0; mask < (1u << nt); ++mask) {
            std::vector<std::size_t> set;
            for (int t = 0; t < nt; ++t)
              if (mask & (1u << t)) set.push_back(t + 1);
            if (in_window(e, set.size())) slot.target_sets.push_back(std::move(set));
          }
        }
        slots_.push_back(std::move(slot));
      }
    }
  }

  std::size_t options(const Slot& s) const { return s.target_sets.size() + s.value_sets.size(); }

  void slot_level(std::size_t level, const std::function<bool(const Instance&)>& visit) {
    if (stop_) return;
    if (level == slots_.size()) {
      const Instance i = build();
      for (const auto& a : assume_)
        if (!eval_constraint(m_, {"", a}, i).holds) return;
      ++models;
      if (!visit(i)) stop_ = true;
      return;
    }
    for (std::size_t c = 0; c < options(slots_[level]) && !stop_; ++c) {
      choice_[level] = c;
      slot_level(level + 1, visit);
    }
  }

  Instance build() const {
    InstanceBuilder b(m_.graph);
    for (std::size_t k = 0; k < classes_.size(); ++k)
      for (int n = 1; n <= counts_[k]; ++n) b.object(object_id(classes_[k], n), classes_[k]);
    for (std::size_t k = 0; k < slots_.size(); ++k) {
      const Slot& s = slots_[k];
      const Edge& edge = m_.graph->edge(s.edge);
      if (!s.target_sets.empty()) {
        for (std::size_t t : s.target_sets[choice_[k]]) b.link(s.edge, s.src, object_id(edge.tgt, static_cast<int>(t)));
      } else {
        const auto& vals = s.value_sets[choice_[k]];
        for (std::size_t v = 0; v < vals.size(); ++v)
          b.value(s.src, s.edge, vals[v], s.src + "." + s.edge + "." + std::to_string(v + 1));
      }
    }
    return b.build();
  }

  const Metamodel& m_;
  std::vector<ConstraintBody> assume_, check_;
  int bound_;
  std::vector<std::string> classes_, edges_;
  std::map<std::string, std::pair<std::int64_t, std::optional<std::int64_t>>> window_;
  std::set<std::string> only_true_;
  std::vector<int> counts_;
  std::vector<Slot> slots_;
  std::vector<std::size_t> choice_;
  bool stop_ = false;
};

bool all_hold(const Metamodel& m, const std::vector<ConstraintBody>& atoms, const Instance& i) {
  for (const auto& a : atoms)
    if (!eval_constraint(m, {"", a}, i).holds) return false;
  return true;
}

Instance combine(const Metamodel& m, const std::vector<Instance>& parts) {
  InstanceBuilder b(m.graph);
  for (const auto& p : parts) {
    for (const auto& [id, _] : p.data->nodes()) {
      std::optional<Literal> v;
      if (auto it = p.values.find(id); it != p.values.end()) v = it->second;
      b.node(id, p.type_of(id), v);
    }
    for (const auto& [id, e] : p.data->edges()) b.link(p.typing.edge(id), e.src, e.tgt, id);
  }
  return b.build();
}

struct Search {
  bool holds = true;
  std::size_t instances = 0;
  std::optional<Instance> counterexample;
  bool vacuous = false;
};

// Every bounded instance satisfying `assume` satisfies `check`?
Search entails(const Metamodel& m, const std::vector<ConstraintBody>& assume, const std::vector<ConstraintBody>& check,
               int bound) {
  Search out;
  const auto comps = components(m, assume, check);
  std::vector<Instance> witnesses;  // satisfying instances of assumption-only components
  for (const auto& c : comps) {
    if (!c.check.empty()) continue;
    Enumerator e(m, c.assume, {}, bound);
    std::optional<Instance> found;
    e.for_each([&](const Instance& i) {
      found = i;
      return false;
    });
    if (!found) {
      out.vacuous = true;
      return out;
    }
    witnesses.push_back(*found);
  }
  for (const auto& c : comps) {
    if (c.check.empty()) continue;
    Enumerator e(m, c.assume, c.check, bound);
    e.for_each([&](const Instance& i) {
      if (all_hold(m, c.check, i)) return true;
      std::vector<Instance> parts = witnesses;
      parts.push_back(i);
      out.counterexample = combine(m, parts);
      return false;
    });
    out.instances += e.models;
    if (out.counterexample) {
      out.holds = false;
      return out;
    }
  }
  return out;
}

}  // namespace

StepVerdict check_step(const DerivationTree& t, std::size_t index, int bound) {
  if (bound <= 0) throw Error("check_step: enumeration bound must be positive");
  if (index >= t.steps.size()) throw Error("check_step: no step at position " + std::to_string(index));
  const Step& s = t.steps[index];
  StepVerdict v;
  v.index = s.index;
  if (s.kind == StepKind::Semantic) {
    v.status = StepStatus::Assumed;
    v.note = s.justification.empty() ? "needs a justified argument" : s.justification;
    return v;
  }
  std::vector<ConstraintBody> premises, conclusion;
  for (const auto& p : s.premises) flatten(t, p, premises);
  flatten(t, s.conclusion, conclusion);
  const Search r = entails(t.metamodel, premises, conclusion, bound);
  v.instances = r.instances;
  if (r.vacuous) v.note = "premises unsatisfiable within bound";
  if (!r.holds) {
    v.status = StepStatus::Refuted;
    v.counterexample = r.counterexample;
  }
  return v;
}

bool ChainReport::refuted() const {
  return std::any_of(steps.begin(), steps.end(), [](const auto& s) { return s.status == StepStatus::Refuted; });
}

ChainReport check_chain(const DerivationTree& t, int bound) {
  const ValidationReport wf = check_tree(t);
  if (!wf.ok()) throw Error("derivation " + t.name + ": " + wf.violations.front().message);
  if (bound <= 0) throw Error("check_chain: enumeration bound must be positive");
  ChainReport r;
  r.bound = bound;
  for (std::size_t k = 0; k < t.steps.size(); ++k) r.steps.push_back(check_step(t, k, bound));
  if (r.refuted()) return r;
  std::vector<ConstraintBody> given, target;
  for (const auto& g : t.given()) flatten(t, g, given);
  intrinsic(t, t.top, target);
  const Search s = entails(t.metamodel, given, target, bound);
  r.transitivity_checked = true;
  r.transitivity_holds = s.holds;
  r.transitivity_instances = s.instances;
  r.transitivity_counterexample = s.counterexample;
  return r;
}

namespace {

std::string claim_text(const Claim& c) {
  switch (c.kind) {
    case ClaimKind::Atomic: return describe(*c.atom);
    case ClaimKind::All: {
      std::string s = "all";
      for (const auto& p : c.parts) s += " " + p;
      return s;
    }
    case ClaimKind::Opaque: return "opaque \"" + c.text + "\"";
  }
  return "";
}

std::string joined(const std::vector<std::string>& xs, const char* sep) {
  std::string s;
  for (std::size_t k = 0; k < xs.size(); ++k) s += (k ? sep : "") + xs[k];
  return s;
}

}  // namespace

std::string ChainReport::to_text(const DerivationTree& t) const {
  std::ostringstream os;
  os << "derivation " << t.name << " over " << t.metamodel.name << " (bound " << bound << ")\n";
  for (const auto& g : t.given()) os << "  given  " << g << "  " << claim_text(t.claims.at(g)) << "\n";
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const Step& s = t.steps[k];
    const StepVerdict& v = steps[k];
    os << "  step " << s.index << "  " << s.conclusion << " <= " << joined(s.premises, ", ") << "  ["
       << to_string(s.kind) << "]  " << to_string(v.status);
    if (v.status == StepStatus::Sound) os << " (" << v.instances << " instances)";
    if (!v.note.empty()) os << "  " << v.note;
    os << "\n";
    if (v.counterexample) {
      os << "    counterexample:\n";
      std::istringstream lines(canonical_text(*v.counterexample));
      for (std::string line; std::getline(lines, line);) os << "      " << line << "\n";
    }
  }
  os << "  top  " << t.top << "\n";
  if (transitivity_checked) {
    os << "transitivity: " << (transitivity_holds ? "holds" : "fails") << " (" << transitivity_instances
       << " instances satisfy the given claims)\n";
    if (transitivity_counterexample) {
      std::istringstream lines(canonical_text(*transitivity_counterexample));
      for (std::string line; std::getline(lines, line);) os << "      " << line << "\n";
    }
  } else {
    os << "transitivity: not established\n";
  }
  os << "result: " << (refuted() || (transitivity_checked && !transitivity_holds) ? "refuted" : "sound") << "\n";
  return os.str();
}

std::string ChainReport::to_lines(const DerivationTree& t) const {
  std::ostringstream os;
  for (const auto& g : t.given()) os << g << "\tgiven\t-\n";
  for (std::size_t k = 0; k < steps.size(); ++k)
    os << t.steps[k].conclusion << "\t" << to_string(steps[k].status) << "\t" << joined(t.steps[k].premises, ",")
       << "\n";
  return os.str();
}

ClaimEvaluation evaluate_claims(const DerivationTree& t, const Instance& i) {
  ClaimEvaluation out;
  std::map<std::string, bool> given_value;
  for (const auto& g : t.given()) {
    std::vector<ConstraintBody> atoms;
    flatten(t, g, atoms);
    given_value[g] = all_hold(t.metamodel, atoms, i);
  }
  std::function<void(const std::string&, std::set<std::string>&)> leaves = [&](const std::string& n,
                                                                               std::set<std::string>& acc) {
    const Step* s = t.concluding(n);
    if (!s) {
      acc.insert(n);
      return;
    }
    for (const auto& p : s->premises) leaves(p, acc);
  };
  for (const auto& [name, _] : t.claims) {
    std::set<std::string> acc;
    leaves(name, acc);
    bool ok = true;
    for (const auto& l : acc)
      if (!given_value.at(l)) {
        ok = false;
        out.failing_leaves[name].push_back(l);
      }
    out.values[name] = ok;
  }
  return out;
}

}  // namespace wfp
