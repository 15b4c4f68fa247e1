#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "wfp/model.hpp"

namespace wfp::dsl {

Literal parse_literal(const Token& t) {
  if (t.kind == TokenKind::String) return t.text;
  if (t.kind == TokenKind::Ident) {
    if (t.text == "true") return true;
    if (t.text == "false") return false;
  }
  if (t.kind == TokenKind::Number) {
    if (t.text.find_first_of(".eE") == std::string::npos) {
      try {
        return static_cast<std::int64_t>(std::stoll(t.text));
      } catch (const std::exception&) {
        throw Error("integer literal '" + t.text + "' is out of range");
      }
    }
    return Rational::parse(t.text);
  }
  throw Error("'" + t.spelling() + "' is not a literal");
}

namespace {

struct Located {
  const Section* section;
  std::string file;
};

class Loader {
 public:
  explicit Loader(const std::vector<Document>& docs) {
    for (const auto& d : docs)
      for (const auto& s : d.sections) {
        const std::string group = s.kind == "view" ? "metamodel" : s.kind;
        auto [it, fresh] = by_name_[group].emplace(s.name.text, Located{&s, d.file});
        if (!fresh) error(d.file, s.name, "duplicate " + group + " '" + s.name.text + "'");
        else order_.push_back({group, s.name.text});
      }
  }

  LoadResult run() {
    for (const auto& [name, _] : by_name_["metamodel"]) metamodel(name);
    for (const auto& [name, _] : by_name_["morphism"]) morphism(name);
    for (const auto& [name, _] : by_name_["instance"]) instance(name);
    for (const auto& [name, _] : by_name_["process"]) process(name);
    for (const auto& [name, _] : by_name_["flow"]) flow(name);
    for (const auto& [name, _] : by_name_["advice"]) advice(name);
    for (const auto& [name, _] : by_name_["derivation"]) derivation(name);
    std::stable_sort(diags_.begin(), diags_.end(), [](const auto& a, const auto& b) {
      return std::tie(a.file, a.line, a.col) < std::tie(b.file, b.line, b.col);
    });
    return {std::move(model_), std::move(diags_)};
  }

 private:
  void error(const std::string& file, const Token& t, std::string message) {
    diags_.push_back({file, t.line, t.col, std::move(message), t.spelling(), "error"});
  }

  const Located* find(const std::string& group, const std::string& name) {
    auto g = by_name_.find(group);
    if (g == by_name_.end()) return nullptr;
    auto it = g->second.find(name);
    return it == g->second.end() ? nullptr : &it->second;
  }

  // ---- metamodels ----------------------------------------------------------

  const Metamodel* metamodel_ref(const std::string& file, const Token& t) {
    if (!find("metamodel", t.text)) {
      error(file, t, "undeclared metamodel '" + t.text + "'");
      return nullptr;
    }
    return metamodel(t.text);
  }

  const Metamodel* metamodel(const std::string& name) {
    if (auto it = model_.metamodels.find(name); it != model_.metamodels.end()) return &it->second;
    if (failed_.count("metamodel:" + name)) return nullptr;
    const Located* loc = find("metamodel", name);
    if (!loc) return nullptr;
    if (!visiting_.insert(name).second) {
      error(loc->file, loc->section->name, "view '" + name + "' is derived from itself");
      failed_.insert("metamodel:" + name);
      return nullptr;
    }
    std::optional<Metamodel> built =
        loc->section->kind == "view" ? build_view(*loc) : build_metamodel(*loc);
    visiting_.erase(name);
    if (!built) {
      failed_.insert("metamodel:" + name);
      return nullptr;
    }
    return &model_.metamodels.emplace(name, std::move(*built)).first->second;
  }

  std::optional<Metamodel> build_metamodel(const Located& loc) {
    const Section& s = *loc.section;
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    std::vector<Constraint> constraints;
    std::vector<DerivedAssoc> derived;
    for (const auto& d : s.decls) {
      const std::string& k = d.keyword.text;
      const auto& a = d.args;
      if (k == "class") nodes.push_back({a[0].text, NodeKind::Class});
      if (k == "vtype") nodes.push_back({a[0].text, NodeKind::ValueType});
      if (k == "pclass") nodes.push_back({a[0].text, NodeKind::ProcessClass});
      if (k == "port") nodes.push_back({a[0].text, NodeKind::Port});
      if (k == "assoc") edges.push_back({a[0].text, a[1].text, a[3].text, EdgeKind::Association});
      if (k == "attr") edges.push_back({a[0].text, a[1].text, a[3].text, EdgeKind::Attribute});
      if (k == "dataflow") edges.push_back({a[0].text, a[1].text, a[3].text, EdgeKind::Dataflow});
      if (k == "derived") {
        DerivedAssoc da{a[0].text, {}};
        for (std::size_t j = 1; j < a.size(); ++j) da.chain.push_back(a[j].text);
        derived.push_back(std::move(da));
      }
      std::optional<ConstraintBody> body;
      std::vector<std::string> names;
      std::size_t n = a.size();
      std::optional<std::string> label;
      if (n >= 2 && a[n - 2].kind == TokenKind::Ident && a[n - 2].text == "as") {
        label = a[n - 1].text;
        n -= 2;
      }
      for (std::size_t j = 0; j < n; ++j) names.push_back(a[j].text);
      if (k == "mult") {
        std::optional<std::int64_t> upper;
        if (a[3].kind == TokenKind::Number) upper = std::stoll(a[3].text);
        body = Multiplicity{a[0].text, a[1].text == "src" ? End::Src : End::Tgt, std::stoll(a[2].text), upper};
      }
      if (k == "key") body = Key{names};
      if (k == "xor") body = Xor{names};
      if (k == "validity") body = ValidityTrue{a[0].text};
      if (k == "derivedeq") body = DerivedEquality{a[0].text, a[1].text};
      if (body) constraints.push_back({label ? *label : default_constraint_id(*body), *body});
    }
    try {
      return make_metamodel(s.name.text, make_graph(std::move(nodes), std::move(edges)), std::move(constraints),
                            std::move(derived));
    } catch (const Error& e) {
      error(loc.file, s.name, e.what());
      return std::nullopt;
    }
  }

  std::optional<Metamodel> build_view(const Located& loc) {
    const Section& s = *loc.section;
    const Metamodel* base = metamodel_ref(loc.file, s.header[1]);
    if (!base) return std::nullopt;
    std::set<std::string> keep, drop;
    bool ok = true;
    for (const auto& d : s.decls)
      for (const auto& t : d.args) {
        if (d.keyword.text == "keep") {
          if (!base->graph->has_node(t.text)) {
            error(loc.file, t, "'" + t.text + "' is not a node of " + base->name);
            ok = false;
          }
          keep.insert(t.text);
        } else {
          if (!base->graph->has_edge(t.text)) {
            error(loc.file, t, "'" + t.text + "' is not an edge of " + base->name);
            ok = false;
          }
          drop.insert(t.text);
        }
      }
    if (!ok) return std::nullopt;
    try {
      return sub_metamodel(*base, s.name.text, keep, drop);
    } catch (const Error& e) {
      error(loc.file, s.name, e.what());
      return std::nullopt;
    }
  }

  // ---- morphisms -----------------------------------------------------------

  const GraphMorphism* morphism_ref(const std::string& file, const Token& t) {
    if (!find("morphism", t.text)) {
      error(file, t, "undeclared morphism '" + t.text + "'");
      return nullptr;
    }
    return morphism(t.text);
  }

  const GraphMorphism* morphism(const std::string& name) {
    if (auto it = model_.morphisms.find(name); it != model_.morphisms.end()) return &it->second;
    if (failed_.count("morphism:" + name)) return nullptr;
    const Located& loc = *find("morphism", name);
    const Section& s = *loc.section;
    auto fail = [&]() -> const GraphMorphism* {
      failed_.insert("morphism:" + name);
      return nullptr;
    };
    const Metamodel* src = metamodel_ref(loc.file, s.header[0]);
    const Metamodel* tgt = metamodel_ref(loc.file, s.header[2]);
    if (!src || !tgt) return fail();
    GraphMorphism m{src->graph, tgt->graph, {}, {}};
    bool ok = true;
    for (const auto& d : s.decls) {
      const Token& a = d.args[0];
      const Token& b = d.args[1];
      if (src->graph->has_node(a.text)) {
        if (!tgt->graph->has_node(b.text)) {
          error(loc.file, b, "'" + b.text + "' is not a node of " + tgt->name);
          ok = false;
        }
        m.node_map[a.text] = b.text;
      } else if (src->graph->has_edge(a.text)) {
        if (!tgt->graph->has_edge(b.text)) {
          error(loc.file, b, "'" + b.text + "' is not an edge of " + tgt->name);
          ok = false;
        }
        m.edge_map[a.text] = b.text;
      } else {
        error(loc.file, a, "'" + a.text + "' is not an element of " + src->name);
        ok = false;
      }
    }
    if (!ok) return fail();
    for (const auto& [id, _] : src->graph->nodes())
      if (!m.node_map.count(id)) {
        if (!tgt->graph->has_node(id)) {
          error(loc.file, s.name, "node '" + id + "' has no image in " + tgt->name);
          return fail();
        }
        m.node_map[id] = id;
      }
    for (const auto& [id, _] : src->graph->edges())
      if (!m.edge_map.count(id)) {
        if (!tgt->graph->has_edge(id)) {
          error(loc.file, s.name, "edge '" + id + "' has no image in " + tgt->name);
          return fail();
        }
        m.edge_map[id] = id;
      }
    const ValidationReport r = check_morphism(m);
    if (!r.ok()) {
      error(loc.file, s.name, "morphism '" + name + "': " + r.violations.front().message);
      return fail();
    }
    return &model_.morphisms.emplace(name, std::move(m)).first->second;
  }

  // Explicit map, checked against the expected ends, or the inclusion by ids.
  std::optional<GraphMorphism> map_or_inclusion(const std::string& file, const Decl& d, const Metamodel& from,
                                                 const Metamodel& to) {
    for (std::size_t j = 0; j + 1 < d.args.size(); ++j)
      if (d.args[j].kind == TokenKind::Ident && d.args[j].text == "via" && j + 2 == d.args.size()) {
        const GraphMorphism* m = morphism_ref(file, d.args[j + 1]);
        if (!m) return std::nullopt;
        if (!same_graph(m->source, from.graph) || !same_graph(m->target, to.graph)) {
          error(file, d.args[j + 1], "morphism '" + d.args[j + 1].text + "' does not run from " + from.name + " to " + to.name);
          return std::nullopt;
        }
        return *m;
      }
    try {
      return inclusion(from.graph, to.graph);
    } catch (const Error& e) {
      error(file, d.keyword, std::string(e.what()) + " (" + from.name + " is not included in " + to.name + ")");
      return std::nullopt;
    }
  }

  // ---- instances -----------------------------------------------------------

  const NamedInstance* instance_ref(const std::string& file, const Token& t) {
    if (!find("instance", t.text)) {
      error(file, t, "undeclared instance '" + t.text + "'");
      return nullptr;
    }
    return instance(t.text);
  }

  const NamedInstance* instance(const std::string& name) {
    if (auto it = model_.instances.find(name); it != model_.instances.end()) return &it->second;
    if (failed_.count("instance:" + name)) return nullptr;
    const Located& loc = *find("instance", name);
    const Section& s = *loc.section;
    const Metamodel* mm = metamodel_ref(loc.file, s.header[1]);
    if (!mm) {
      failed_.insert("instance:" + name);
      return nullptr;
    }
    InstanceBuilder b(mm->graph);
    bool ok = true;
    auto attempt = [&](const Token& at, const std::function<void()>& f) {
      try {
        f();
      } catch (const Error& e) {
        error(loc.file, at, e.what());
        ok = false;
      }
    };
    for (const auto& d : s.decls)
      if (d.keyword.text == "obj") attempt(d.args[1], [&] { b.object(d.args[0].text, d.args[1].text); });
    for (const auto& d : s.decls) {
      const auto& a = d.args;
      std::optional<std::string> label;
      if (a.size() >= 2 && a[a.size() - 2].text == "as" && a[a.size() - 2].kind == TokenKind::Ident) label = a.back().text;
      if (d.keyword.text == "link") attempt(a[0], [&] { b.link(a[0].text, a[1].text, a[2].text, label); });
      if (d.keyword.text == "val") {
        std::optional<Literal> lit;
        attempt(a[2], [&] { lit = parse_literal(a[2]); });
        if (!lit) continue;
        const bool attr_ok = mm->graph->has_edge(a[1].text);
        attempt(attr_ok ? a[2] : a[1], [&] { b.value(a[0].text, a[1].text, *lit, label); });
      }
    }
    if (!ok) {
      failed_.insert("instance:" + name);
      return nullptr;
    }
    return &model_.instances.emplace(name, NamedInstance{mm->name, b.build()}).first->second;
  }

  // ---- processes -----------------------------------------------------------

  const ProcessSchema* process(const std::string& name) {
    if (auto it = model_.processes.find(name); it != model_.processes.end()) return &it->second;
    if (failed_.count("process:" + name)) return nullptr;
    const Located& loc = *find("process", name);
    const Section& s = *loc.section;
    auto fail = [&]() -> const ProcessSchema* {
      failed_.insert("process:" + name);
      return nullptr;
    };
    const Decl* inner_decl = nullptr;
    for (const auto& d : s.decls)
      if (d.keyword.text == "inner") inner_decl = &d;
    const Metamodel* inner = metamodel_ref(loc.file, inner_decl->args[0]);
    if (!inner) return fail();
    ProcessSchema p;
    p.name = name;
    p.inner = *inner;
    bool ok = true;
    for (const auto& d : s.decls) {
      if (d.keyword.text != "in" && d.keyword.text != "out") continue;
      const Metamodel* mm = metamodel_ref(loc.file, d.args[1]);
      if (!mm) {
        ok = false;
        continue;
      }
      auto m = map_or_inclusion(loc.file, d, *mm, *inner);
      if (!m) {
        ok = false;
        continue;
      }
      if (d.keyword.text == "in")
        p.inputs.push_back({d.args[0].text, *mm, *m});
      else
        p.output = {d.args[0].text, *mm, *m};
    }
    std::map<std::int64_t, Rational> rows;
    for (const auto& d : s.decls) {
      if (d.keyword.text != "row") continue;
      try {
        const Literal v = parse_literal(d.args[1]);
        const std::int64_t key = std::stoll(d.args[0].text);
        if (auto* r = std::get_if<Rational>(&v))
          rows[key] = *r;
        else if (auto* i = std::get_if<std::int64_t>(&v))
          rows[key] = Rational(*i);
        else
          throw Error("row target must be a number");
      } catch (const Error& e) {
        error(loc.file, d.args[1], e.what());
        ok = false;
      }
    }
    for (const auto& d : s.decls) {
      if (d.keyword.text != "sem") continue;
      const auto& a = d.args;
      const std::string& kind = a[0].text;
      auto edge = [&](const Token& t) {
        if (!inner->graph->has_edge(t.text)) {
          error(loc.file, t, "'" + t.text + "' is not an edge of " + inner->name);
          ok = false;
        }
        return t.text;
      };
      auto node = [&](const Token& t) {
        if (!inner->graph->has_node(t.text)) {
          error(loc.file, t, "'" + t.text + "' is not a node of " + inner->name);
          ok = false;
        }
        return t.text;
      };
      if (kind == "identity") p.semantics = sem::Identity{};
      if (kind == "constant") {
        const NamedInstance* c = instance_ref(loc.file, a[1]);
        if (!c) {
          ok = false;
        } else if (!same_graph(c->instance.type_graph(), inner->graph)) {
          error(loc.file, a[1], "instance '" + a[1].text + "' is not typed over " + inner->name);
          ok = false;
        } else {
          p.semantics = sem::Constant{c->instance};
        }
      }
      if (kind == "compose") {
        sem::ComposeLinks c{edge(a[1]), {}};
        for (std::size_t j = 2; j < a.size(); ++j) c.chain.push_back(edge(a[j]));
        p.semantics = c;
      }
      if (kind == "max") p.semantics = sem::AttributeMax{edge(a[1]), edge(a[2]), edge(a[3])};
      if (kind == "threshold")
        p.semantics = sem::ThresholdCompare{node(a[1]), edge(a[2]), edge(a[3]), edge(a[4]), edge(a[5]), rows};
      if (kind == "validity") p.semantics = sem::SetValidity{node(a[1]), edge(a[2])};
      if (kind == "custom") p.semantics = sem::Custom{a[1].text, nullptr};
    }
    if (!ok) return fail();
    return &model_.processes.emplace(name, std::move(p)).first->second;
  }

  // ---- flows ---------------------------------------------------------------

  void flow(const std::string& name) {
    const Located& loc = *find("flow", name);
    const Section& s = *loc.section;
    FlowModel fm;
    DataflowDefinition& def = fm.def;
    def.name = name;
    bool ok = true;
    for (const auto& d : s.decls) {
      if (d.keyword.text != "wp") continue;
      const Metamodel* mm = metamodel_ref(loc.file, d.args[1]);
      if (!mm) {
        ok = false;
        continue;
      }
      def.flow.work_products.insert(d.args[0].text);
      def.wp_metamodels.emplace(d.args[0].text, *mm);
    }
    std::set<std::string> procs;
    for (const auto& d : s.decls) {
      if (d.keyword.text != "wire") continue;
      const Token& from = d.args[0];
      const Token& to = d.args[2];
      if (def.flow.work_products.count(from.text)) {
        const auto dot = to.text.rfind('.');
        if (dot == std::string::npos) {
          error(loc.file, to, "expected <process>.<port>, found '" + to.text + "'");
          ok = false;
          continue;
        }
        const std::string proc = to.text.substr(0, dot), port = to.text.substr(dot + 1);
        const ProcessSchema* p = find("process", proc) ? process(proc) : nullptr;
        if (!p) {
          if (!find("process", proc)) error(loc.file, to, "undeclared process '" + proc + "'");
          ok = false;
          continue;
        }
        auto in = std::find_if(p->inputs.begin(), p->inputs.end(), [&](const auto& x) { return x.port == port; });
        if (in == p->inputs.end()) {
          error(loc.file, to, "process '" + proc + "' has no in-port '" + port + "'");
          ok = false;
          continue;
        }
        auto m = map_or_inclusion(loc.file, d, in->metamodel, def.wp_metamodels.at(from.text));
        if (!m) {
          ok = false;
          continue;
        }
        procs.insert(proc);
        def.flow.in_wires.push_back({from.text, proc, port});
        def.in_maps.emplace(std::pair{proc, port}, *m);
      } else if (find("process", from.text)) {
        const ProcessSchema* p = process(from.text);
        if (!p) {
          ok = false;
          continue;
        }
        if (!def.flow.work_products.count(to.text)) {
          error(loc.file, to, "undeclared work product '" + to.text + "'");
          ok = false;
          continue;
        }
        auto m = map_or_inclusion(loc.file, d, p->output.metamodel, def.wp_metamodels.at(to.text));
        if (!m) {
          ok = false;
          continue;
        }
        procs.insert(from.text);
        def.flow.out_wires.push_back({from.text, to.text});
        def.out_maps.emplace(std::pair{from.text, to.text}, *m);
      } else {
        error(loc.file, from, "'" + from.text + "' is neither a work product of " + name + " nor a process");
        ok = false;
      }
    }
    for (const auto& p : procs) {
      const ProcessSchema& schema = model_.processes.at(p);
      ProcessPorts pp{p, {}, schema.output.port};
      for (const auto& in : schema.inputs) pp.in_ports.push_back(in.port);
      def.flow.processes.push_back(std::move(pp));
      def.processes.emplace(p, schema);
    }
    std::sort(def.flow.processes.begin(), def.flow.processes.end(),
              [](const auto& a, const auto& b) { return a.name < b.name; });
    std::sort(def.flow.in_wires.begin(), def.flow.in_wires.end());
    std::sort(def.flow.out_wires.begin(), def.flow.out_wires.end());
    for (const auto& d : s.decls) {
      if (d.keyword.text != "init") continue;
      const NamedInstance* i = instance_ref(loc.file, d.args[1]);
      if (!i) {
        ok = false;
        continue;
      }
      auto mm = def.wp_metamodels.find(d.args[0].text);
      if (mm == def.wp_metamodels.end()) continue;
      if (!same_graph(i->instance.type_graph(), mm->second.graph)) {
        error(loc.file, d.args[1], "instance '" + d.args[1].text + "' is not typed over " + mm->second.name);
        ok = false;
        continue;
      }
      fm.initial.emplace(d.args[0].text, i->instance);
    }
    if (ok) model_.flows.emplace(name, std::move(fm));
  }

  // ---- advice --------------------------------------------------------------

  void advice(const std::string& name) {
    const Located& loc = *find("advice", name);
    const Section& s = *loc.section;
    AdviceModel am;
    am.advice.name = name;
    bool ok = true;
    for (const auto& d : s.decls) {
      if (d.keyword.text == "metamodel") {
        const Metamodel* m = metamodel_ref(loc.file, d.args[0]);
        if (m) am.advice.advice = *m;
        ok = ok && m;
      }
    }
    for (const auto& d : s.decls) {
      if (d.keyword.text != "entry" || !ok) continue;
      const Metamodel* e = metamodel_ref(loc.file, d.args[0]);
      const GraphMorphism* emb = morphism_ref(loc.file, d.args[2]);
      if (!e || !emb) {
        ok = false;
        continue;
      }
      if (!same_graph(emb->source, e->graph) || !same_graph(emb->target, am.advice.advice.graph)) {
        error(loc.file, d.args[2], "embedding '" + d.args[2].text + "' does not run from " + e->name + " to " +
                                       am.advice.advice.name);
        ok = false;
        continue;
      }
      am.advice.entry = *e;
      am.advice.embedding = *emb;
      const ValidationReport r = check_advice(am.advice);
      if (!r.ok()) {
        error(loc.file, d.args[2], r.violations.front().message);
        ok = false;
      }
    }
    for (const auto& d : s.decls) {
      if (d.keyword.text != "point" || !ok) continue;
      const GraphMorphism* b = morphism_ref(loc.file, d.args[1]);
      if (!b) {
        ok = false;
        continue;
      }
      if (!same_graph(b->source, am.advice.entry.graph)) {
        error(loc.file, d.args[1], "binding '" + d.args[1].text + "' does not start at the entry metamodel");
        ok = false;
        continue;
      }
      am.points.push_back({d.args[0].text, *b});
    }
    if (ok) model_.advices.emplace(name, std::move(am));
  }

  // ---- derivations ---------------------------------------------------------

  void derivation(const std::string& name) {
    const Located& loc = *find("derivation", name);
    const Section& s = *loc.section;
    const Metamodel* mm = metamodel_ref(loc.file, s.header[1]);
    if (!mm) return;
    DerivationTree t;
    t.name = name;
    t.metamodel = *mm;
    bool ok = true;
    auto known = [&](const Token& tok, bool derived_ok) {
      if (mm->graph->has_edge(tok.text) || (derived_ok && mm->derived.count(tok.text))) return true;
      error(loc.file, tok, "'" + tok.text + "' is not an edge of " + mm->name);
      ok = false;
      return false;
    };
    std::map<std::string, const Token*> claim_token;
    for (const auto& d : s.decls) {
      const auto& a = d.args;
      if (d.keyword.text == "top") t.top = a[0].text;
      if (d.keyword.text != "claim") continue;
      Claim c;
      c.name = a[0].text;
      claim_token[c.name] = &a[0];
      const std::string& k = a[1].text;
      std::vector<std::string> rest;
      for (std::size_t j = 2; j < a.size(); ++j) rest.push_back(a[j].text);
      if (k == "mult") {
        known(a[2], true);
        std::optional<std::int64_t> upper;
        if (a[5].kind == TokenKind::Number) upper = std::stoll(a[5].text);
        if (upper && *upper < std::stoll(a[4].text)) {
          error(loc.file, a[5], "upper bound " + a[5].text + " is below lower bound " + a[4].text);
          ok = false;
        }
        c.atom = Multiplicity{a[2].text, a[3].text == "src" ? End::Src : End::Tgt, std::stoll(a[4].text), upper};
      } else if (k == "key" || k == "xor" || k == "validity" || k == "derivedeq") {
        for (std::size_t j = 2; j < a.size(); ++j) known(a[j], k == "derivedeq" && j == 2);
        if (k == "key") c.atom = Key{rest};
        if (k == "xor") c.atom = Xor{rest};
        if (k == "validity") c.atom = ValidityTrue{rest[0]};
        if (k == "derivedeq") c.atom = DerivedEquality{rest[0], rest[1]};
      } else if (k == "all") {
        c.kind = ClaimKind::All;
        c.parts = rest;
      } else {
        c.kind = ClaimKind::Opaque;
        c.text = a[2].text;
      }
      t.claims.emplace(c.name, std::move(c));
    }
    std::vector<const Decl*> steps;
    for (const auto& d : s.decls)
      if (d.keyword.text == "step") steps.push_back(&d);
    std::sort(steps.begin(), steps.end(),
              [](const Decl* x, const Decl* y) { return std::stoll(x->args[0].text) < std::stoll(y->args[0].text); });
    std::set<std::string> concluded;
    for (const Decl* d : steps) concluded.insert(d->args[1].text);
    std::set<std::string> available;
    for (const auto& [c, _] : t.claims)
      if (!concluded.count(c)) available.insert(c);
    for (const Decl* d : steps) {
      const auto& a = d->args;
      Step st;
      st.index = static_cast<int>(std::stoll(a[0].text));
      st.conclusion = a[1].text;
      st.kind = *parse_step_kind(a[2].text);
      for (std::size_t j = 3; j < a.size(); ++j) {
        if (a[j].kind == TokenKind::String) {
          st.justification = a[j].text;
          continue;
        }
        st.premises.push_back(a[j].text);
        if (t.claims.count(a[j].text) && !available.count(a[j].text)) {
          error(loc.file, a[j], "step " + a[0].text + " uses '" + a[j].text + "' before it is derived");
          ok = false;
        }
      }
      available.insert(st.conclusion);
      t.steps.push_back(std::move(st));
    }
    if (!ok) return;
    const ValidationReport r = check_tree(t);
    if (!r.ok()) {
      const Violation& v = r.violations.front();
      const Token* at = &s.name;
      for (const auto& w : v.witnesses)
        if (auto it = claim_token.find(w); it != claim_token.end()) {
          at = it->second;
          break;
        }
      error(loc.file, *at, v.message);
      return;
    }
    model_.derivations.emplace(name, std::move(t));
  }

  std::map<std::string, std::map<std::string, Located>> by_name_;
  std::vector<std::pair<std::string, std::string>> order_;
  std::set<std::string> visiting_, failed_;
  Model model_;
  std::vector<Diagnostic> diags_;
};

Token tok(std::string text) {
  Token t;
  t.text = std::move(text);
  if (t.text == "->")
    t.kind = TokenKind::Arrow;
  else if (t.text == ":")
    t.kind = TokenKind::Colon;
  else if (t.text == "*")
    t.kind = TokenKind::Star;
  else if (!t.text.empty() && (std::isdigit(static_cast<unsigned char>(t.text[0])) || t.text[0] == '-'))
    t.kind = TokenKind::Number;
  return t;
}

Token literal_token(const Literal& v) {
  if (const auto* s = std::get_if<std::string>(&v)) {
    Token t;
    t.kind = TokenKind::String;
    t.text = *s;
    return t;
  }
  return tok(to_text(v));
}

Decl decl(const std::string& keyword, std::vector<Token> args) { return {tok(keyword), std::move(args)}; }

std::vector<Token> toks(const std::vector<std::string>& xs) {
  std::vector<Token> out;
  for (const auto& x : xs) out.push_back(tok(x));
  return out;
}

}  // namespace

LoadResult load(const std::vector<Document>& docs) { return Loader(docs).run(); }

LoadResult load_files(const std::vector<std::string>& paths) {
  std::vector<Document> docs;
  LoadResult out;
  for (const auto& p : paths) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
      out.diagnostics.push_back({p, 0, 0, "cannot read file", "", "error"});
      continue;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    ParseResult r = parse(buf.str(), p);
    out.diagnostics.insert(out.diagnostics.end(), r.diagnostics.begin(), r.diagnostics.end());
    docs.push_back(std::move(r.doc));
  }
  if (!out.diagnostics.empty()) return out;
  return load(docs);
}

Section to_section(const Metamodel& m) {
  Section s;
  s.kind = "metamodel";
  s.keyword = tok("metamodel");
  s.name = tok(m.name);
  for (const auto& [id, n] : m.graph->nodes()) {
    static const char* kw[] = {"class", "vtype", "pclass", "port"};
    s.decls.push_back(decl(kw[static_cast<int>(n.kind)], toks({id})));
  }
  for (const auto& [id, e] : m.graph->edges()) {
    static const char* kw[] = {"assoc", "attr", "dataflow"};
    s.decls.push_back(decl(kw[static_cast<int>(e.kind)], toks({id, e.src, "->", e.tgt})));
  }
  for (const auto& [name, d] : m.derived) {
    std::vector<std::string> args{name};
    args.insert(args.end(), d.chain.begin(), d.chain.end());
    s.decls.push_back(decl("derived", toks(args)));
  }
  for (const auto& c : m.constraints) {
    std::istringstream is(describe(c.body));
    std::string keyword;
    is >> keyword;
    std::vector<std::string> args;
    for (std::string w; is >> w;) args.push_back(w);
    if (c.id != default_constraint_id(c.body)) {
      args.push_back("as");
      args.push_back(c.id);
    }
    s.decls.push_back(decl(keyword, toks(args)));
  }
  return s;
}

Section to_section(const std::string& name, const std::string& metamodel, const Instance& i) {
  Section s;
  s.kind = "instance";
  s.keyword = tok("instance");
  s.name = tok(name);
  s.header = toks({":", metamodel});
  std::map<std::string, std::vector<std::string>> into;  // value node -> incoming edges
  for (const auto& [id, e] : i.data->edges())
    if (i.values.count(e.tgt)) into[e.tgt].push_back(id);
  for (const auto& [id, _] : i.data->nodes()) {
    if (!i.values.count(id)) s.decls.push_back(decl("obj", toks({id, i.type_of(id)})));
  }
  for (const auto& [id, e] : i.data->edges()) {
    if (i.values.count(e.tgt)) {
      const auto& in = into[e.tgt];
      if (in.size() != 1 || in.front() != e.tgt)
        throw Error("value node '" + e.tgt + "' cannot be written as a single val declaration");
      std::vector<Token> args = toks({e.src, i.typing.edge(id)});
      args.push_back(literal_token(i.values.at(e.tgt)));
      if (e.tgt != InstanceBuilder::default_value_id(e.src, i.typing.edge(id))) {
        args.push_back(tok("as"));
        args.push_back(tok(e.tgt));
      }
      s.decls.push_back(decl("val", std::move(args)));
      continue;
    }
    std::vector<std::string> args{i.typing.edge(id), e.src, e.tgt};
    if (id != InstanceBuilder::default_link_id(i.typing.edge(id), e.src, e.tgt)) {
      args.push_back("as");
      args.push_back(id);
    }
    s.decls.push_back(decl("link", toks(args)));
  }
  for (const auto& [id, _] : i.values)
    if (!into.count(id)) throw Error("value node '" + id + "' has no owner");
  return s;
}

}  // namespace wfp::dsl
