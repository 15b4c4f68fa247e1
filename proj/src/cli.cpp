#include "wfp/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "wfp/iso.hpp"
#include "wfp/model.hpp"

namespace wfp::cli {
namespace {

using nlohmann::json;

struct Options {
  std::vector<std::string> files;
  bool json_out = false;
  int bound = 3;
  std::string verdicts;
  bool normalize_id = false;
  bool sequential = false;
  std::string flow, instance, metamodel, tree, advice, main_mm, name, out_file;
};

struct Usage : Error {
  using Error::Error;
};

json lines_json(const std::string& text) {
  json a = json::array();
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) a.push_back(l);
  return a;
}

json violations_json(const ValidationReport& r) {
  json a = json::array();
  for (const auto& v : r.violations) a.push_back({{"code", v.code}, {"message", v.message}, {"witnesses", v.witnesses}});
  return a;
}

json conformance_json(const ConformanceReport& r) {
  json cs = json::array();
  for (const auto& [c, v] : r.verdicts)
    cs.push_back({{"id", c.id},
                  {"constraint", describe(c.body)},
                  {"holds", v.holds},
                  {"witnesses", v.witnesses},
                  {"detail", v.detail}});
  return {{"conforms", r.conforms()}, {"typing", violations_json(r.typing)}, {"constraints", cs}};
}

std::string report_text(const ValidationReport& r) {
  std::string s;
  for (const auto& v : r.violations) {
    s += v.code + ": " + v.message;
    if (!v.witnesses.empty()) {
      s += "; witnesses:";
      for (std::size_t j = 0; j < v.witnesses.size(); ++j) s += (j ? ", " : " ") + v.witnesses[j];
    }
    s += "\n";
  }
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Usage("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Verdicts read_verdicts(const std::string& path) {
  Verdicts v;
  std::istringstream is(read_file(path));
  int line_no = 0;
  for (std::string line; std::getline(is, line);) {
    ++line_no;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string key, eq, value, extra;
    if (!(ls >> key)) continue;
    if (!(ls >> eq >> value) || eq != "=" || (value != "true" && value != "false") || (ls >> extra))
      throw Usage(path + ":" + std::to_string(line_no) + ": expected '<object> = true|false'");
    v[key] = value == "true";
  }
  return v;
}

dsl::Model load(const Options& o, std::ostream& err) {
  dsl::LoadResult r = dsl::load_files(o.files);
  for (const auto& d : r.diagnostics) err << d.str() << "\n";
  if (!r.ok()) throw Usage("");
  return std::move(r.model);
}

template <class Map>
const typename Map::mapped_type& pick(const Map& m, const std::string& wanted, const char* what) {
  if (!wanted.empty()) {
    auto it = m.find(wanted);
    if (it == m.end()) throw Usage(std::string("no ") + what + " named '" + wanted + "'");
    return it->second;
  }
  if (m.size() != 1)
    throw Usage(std::string("expected exactly one ") + what + ", found " + std::to_string(m.size()) +
                "; choose one with --" + what);
  return m.begin()->second;
}

std::string instance_text(const std::string& name, const std::string& mm, const Instance& i) {
  try {
    return dsl::serialize(dsl::to_section(name, mm, i));
  } catch (const Error&) {
    return canonical_text(i);
  }
}

// ---- verbs ---------------------------------------------------------------

int validate(const Options& o, std::ostream& out, std::ostream& err) {
  const dsl::Model m = load(o, err);
  ValidationReport all;
  json flows = json::array();
  for (const auto& [name, f] : m.flows) {
    const ValidationReport r = check_definition(o.normalize_id ? with_idle_processes(f.def) : f.def);
    flows.push_back({{"flow", name}, {"ok", r.ok()}, {"violations", violations_json(r)}});
    if (!o.json_out) {
      out << "flow " << name << ": " << (r.ok() ? "ok" : "invalid") << "\n" << report_text(r);
    }
    all.append(r);
  }
  if (o.json_out) {
    out << json{{"verb", "validate"},
                {"ok", all.ok()},
                {"metamodels", m.metamodels.size()},
                {"instances", m.instances.size()},
                {"processes", m.processes.size()},
                {"flows", flows},
                {"derivations", m.derivations.size()}}
               .dump(2)
        << "\n";
  } else {
    out << "loaded " << m.metamodels.size() << " metamodels, " << m.instances.size() << " instances, "
        << m.processes.size() << " processes, " << m.flows.size() << " flows, " << m.advices.size()
        << " advices, " << m.derivations.size() << " derivations\n";
    out << "result: " << (all.ok() ? "valid" : "invalid") << "\n";
  }
  return all.ok() ? 0 : 1;
}

int conform(const Options& o, std::ostream& out, std::ostream& err) {
  const dsl::Model m = load(o, err);
  std::vector<std::string> names;
  if (!o.instance.empty()) {
    if (!m.instances.count(o.instance)) throw Usage("no instance named '" + o.instance + "'");
    names.push_back(o.instance);
  } else {
    for (const auto& [n, _] : m.instances) names.push_back(n);
  }
  if (names.empty()) throw Usage("no instance to check");
  bool ok = true;
  json results = json::array();
  for (const auto& n : names) {
    const dsl::NamedInstance& ni = m.instances.at(n);
    const std::string mm_name = o.metamodel.empty() ? ni.metamodel : o.metamodel;
    auto mm = m.metamodels.find(mm_name);
    if (mm == m.metamodels.end()) throw Usage("no metamodel named '" + mm_name + "'");
    if (!same_graph(mm->second.graph, ni.instance.type_graph()))
      throw Usage("instance '" + n + "' is not typed over " + mm_name);
    const ConformanceReport r = conforms(ni.instance, mm->second);
    ok = ok && r.conforms();
    if (o.json_out) {
      json j = conformance_json(r);
      j["instance"] = n;
      j["metamodel"] = mm_name;
      results.push_back(j);
    } else {
      out << "instance " << n << " : " << mm_name << "\n" << r.to_text();
    }
  }
  if (o.json_out) out << json{{"verb", "conform"}, {"ok", ok}, {"results", results}}.dump(2) << "\n";
  return ok ? 0 : 1;
}

int run_verb(const Options& o, std::ostream& out, std::ostream& err) {
  const dsl::Model m = load(o, err);
  const dsl::FlowModel& fm = pick(m.flows, o.flow, "flow");
  const DataflowDefinition def = o.normalize_id ? with_idle_processes(fm.def) : fm.def;
  Verdicts verdicts;
  if (!o.verdicts.empty()) verdicts = read_verdicts(o.verdicts);
  RunOptions ro;
  ro.verdicts = &verdicts;
  ro.parallel = !o.sequential;
  const RunResult r = run(def, fm.initial, ro);

  std::string products;
  json pj = json::object();
  const auto finals = def.flow.final_products();
  for (const auto& [wp, inst] : r.state.products) {
    if (!finals.count(wp)) continue;
    products += (products.empty() ? "" : "\n") + instance_text(def.name + "." + wp, def.wp_metamodels.at(wp).name, inst);
    pj[wp] = lines_json(canonical_text(inst));
  }
  if (r.ok && !o.out_file.empty()) {
    std::ofstream f(o.out_file, std::ios::binary);
    if (!f) throw Usage("cannot write '" + o.out_file + "'");
    f << products;
  }
  if (o.json_out) {
    json trace = json::array();
    for (const auto& e : r.state.trace) {
      char h[17];
      std::snprintf(h, sizeof h, "%016llx", static_cast<unsigned long long>(e.hash));
      trace.push_back({{"stratum", e.stratum}, {"process", e.process}, {"hash", h}});
    }
    out << json{{"verb", "run"},
                {"flow", def.name},
                {"ok", r.ok},
                {"failed", r.failed},
                {"errors", violations_json(r.errors)},
                {"trace", trace},
                {"conformance", r.conformance ? conformance_json(*r.conformance) : json()},
                {"products", pj}}
               .dump(2)
        << "\n";
  } else {
    out << "trace:\n" << r.state.trace_text();
    if (!r.errors.ok()) out << report_text(r.errors);
    if (r.conformance) out << "product " << r.failed << ":\n" << r.conformance->to_text();
    if (r.ok && o.out_file.empty()) out << products;
    out << "result: " << (r.ok ? "ok" : "failed at " + r.failed) << "\n";
  }
  return r.ok ? 0 : 1;
}

int derive(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.bound < 1) throw Usage("--bound must be at least 1");
  const dsl::Model m = load(o, err);
  const DerivationTree& t = pick(m.derivations, o.tree, "tree");
  const ChainReport r = check_chain(t, o.bound);
  bool ok = !r.refuted() && (!r.transitivity_checked || r.transitivity_holds);
  std::optional<ClaimEvaluation> ev;
  if (!o.instance.empty()) {
    auto it = m.instances.find(o.instance);
    if (it == m.instances.end()) throw Usage("no instance named '" + o.instance + "'");
    ev = evaluate_claims(t, it->second.instance);
    ok = ok && ev->values.at(t.top);
  }
  if (o.json_out) {
    json steps = json::array();
    for (const auto& s : r.steps) {
      const Step& st = *std::find_if(t.steps.begin(), t.steps.end(), [&](const Step& x) { return x.index == s.index; });
      steps.push_back({{"index", s.index},
                       {"conclusion", st.conclusion},
                       {"kind", to_string(st.kind)},
                       {"premises", st.premises},
                       {"status", to_string(s.status)},
                       {"instances", s.instances},
                       {"note", s.note},
                       {"counterexample", s.counterexample ? lines_json(canonical_text(*s.counterexample)) : json()}});
    }
    json j{{"verb", "derive"},
           {"tree", t.name},
           {"bound", r.bound},
           {"steps", steps},
           {"transitivity",
            {{"checked", r.transitivity_checked},
             {"holds", r.transitivity_holds},
             {"instances", r.transitivity_instances},
             {"counterexample",
              r.transitivity_counterexample ? lines_json(canonical_text(*r.transitivity_counterexample)) : json()}}},
           {"result", ok ? "sound" : "refuted"}};
    if (ev) j["evaluation"] = {{"instance", o.instance}, {"values", ev->values}, {"failing_leaves", ev->failing_leaves}};
    out << j.dump(2) << "\n";
  } else {
    out << r.to_text(t);
    if (ev) {
      out << "evaluation over " << o.instance << ":\n";
      for (const auto& [c, v] : ev->values) {
        out << "  " << c << ": " << (v ? "holds" : "fails");
        if (auto f = ev->failing_leaves.find(c); f != ev->failing_leaves.end() && !f->second.empty()) {
          out << " (";
          for (std::size_t j = 0; j < f->second.size(); ++j) out << (j ? ", " : "") << f->second[j];
          out << ")";
        }
        out << "\n";
      }
    }
  }
  return ok ? 0 : 1;
}

int weave_verb(const Options& o, std::ostream& out, std::ostream& err) {
  const dsl::Model m = load(o, err);
  const dsl::AdviceModel& a = pick(m.advices, o.advice, "advice");
  if (o.main_mm.empty()) throw Usage("--main is required");
  auto main = m.metamodels.find(o.main_mm);
  if (main == m.metamodels.end()) throw Usage("no metamodel named '" + o.main_mm + "'");
  const std::string name = o.name.empty() ? main->second.name + "Woven" : o.name;
  const Metamodel w = weave_all(main->second, a.advice, a.points, name);
  const std::string text = dsl::serialize(dsl::to_section(w));
  if (o.json_out)
    out << json{{"verb", "weave"},
                {"metamodel", name},
                {"nodes", w.graph->nodes().size()},
                {"edges", w.graph->edges().size()},
                {"constraints", w.constraints.size()},
                {"text", text}}
               .dump(2)
        << "\n";
  else
    out << text;
  return 0;
}

int encapsulate_verb(const Options& o, std::ostream& out, std::ostream& err) {
  const dsl::Model m = load(o, err);
  const dsl::FlowModel& fm = pick(m.flows, o.flow, "flow");
  Verdicts verdicts;
  if (!o.verdicts.empty()) verdicts = read_verdicts(o.verdicts);
  const ProcessSchema s = encapsulate(fm.def);
  std::vector<Instance> inputs;
  for (const auto& in : s.inputs) {
    auto it = fm.initial.find(in.port);
    if (it == fm.initial.end()) throw Usage("flow '" + fm.def.name + "' has no initial instance for " + in.port);
    inputs.push_back(it->second);
  }
  ApplyContext ctx{&verdicts};
  RunOptions ro;
  ro.verdicts = &verdicts;
  const RunResult r = run(fm.def, fm.initial, ro);
  const Application a = apply(s, inputs, ctx);
  const bool agrees = r.ok && isomorphic(a.output, r.state.products.at(s.output.port));
  const bool putget = check_putget(s, inputs, ctx);
  std::string ports;
  for (const auto& in : s.inputs) ports += (ports.empty() ? "" : " ") + in.port;
  if (o.json_out) {
    out << json{{"verb", "encapsulate"},
                {"flow", fm.def.name},
                {"inputs", lines_json(ports)},
                {"output", s.output.port},
                {"inner_nodes", s.inner.graph->nodes().size()},
                {"inner_edges", s.inner.graph->edges().size()},
                {"agrees_with_run", agrees},
                {"putget", putget}}
               .dump(2)
        << "\n";
  } else {
    out << "process " << s.name << "\n"
        << "inputs: " << ports << "\n"
        << "output: " << s.output.port << "\n"
        << "inner: " << s.inner.graph->nodes().size() << " nodes, " << s.inner.graph->edges().size()
        << " edges\n"
        << "apply agrees with run: " << (agrees ? "yes" : "no") << "\n"
        << "putget: " << (putget ? "holds" : "fails") << "\n";
  }
  return agrees && putget ? 0 : 1;
}

int fmt(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.files.size() != 1) throw Usage("fmt takes exactly one file");
  const dsl::ParseResult r = dsl::parse(read_file(o.files[0]), o.files[0]);
  for (const auto& d : r.diagnostics) err << d.str() << "\n";
  if (!r.ok()) return 2;
  const std::string text = dsl::serialize(r.doc);
  if (o.json_out)
    out << json{{"verb", "fmt"}, {"text", text}}.dump(2) << "\n";
  else
    out << text;
  return 0;
}

}  // namespace

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Workflow engine over .wfp files", "wfp"};
  app.require_subcommand(1);
  Options o;
  auto files = [&](CLI::App* c) {
    c->add_option("files", o.files, ".wfp input files")->required()->check(CLI::ExistingFile);
    c->add_flag("--json", o.json_out, "machine-readable report");
  };
  auto* validate_c = app.add_subcommand("validate", "parse, resolve and check flows");
  files(validate_c);
  validate_c->add_flag("--normalize-id", o.normalize_id, "insert idle processes before checking");
  auto* conform_c = app.add_subcommand("conform", "check instances against their metamodels");
  files(conform_c);
  conform_c->add_option("--instance", o.instance, "instance to check (default: all)");
  conform_c->add_option("--metamodel", o.metamodel, "check against this metamodel instead");
  auto* run_c = app.add_subcommand("run", "execute a flow");
  files(run_c);
  run_c->add_option("--flow", o.flow, "flow to run");
  run_c->add_option("--verdicts", o.verdicts, "review verdicts file")->check(CLI::ExistingFile);
  run_c->add_flag("--normalize-id", o.normalize_id, "insert idle processes");
  run_c->add_flag("--sequential", o.sequential, "run each stratum on one thread");
  run_c->add_option("--out", o.out_file, "write final products as instance sections");
  auto* derive_c = app.add_subcommand("derive", "check a derivation chain");
  files(derive_c);
  derive_c->add_option("--tree", o.tree, "derivation to check");
  derive_c->add_option("--bound", o.bound, "objects per class in the enumeration")->capture_default_str();
  derive_c->add_option("--instance", o.instance, "also evaluate the claims over this instance");
  auto* weave_c = app.add_subcommand("weave", "weave an advice at its entry points");
  files(weave_c);
  weave_c->add_option("--advice", o.advice, "advice to weave");
  weave_c->add_option("--main", o.main_mm, "metamodel to weave into");
  weave_c->add_option("--name", o.name, "name of the woven metamodel");
  auto* enc_c = app.add_subcommand("encapsulate", "package a flow as one process");
  files(enc_c);
  enc_c->add_option("--flow", o.flow, "flow to encapsulate");
  enc_c->add_option("--verdicts", o.verdicts, "review verdicts file")->check(CLI::ExistingFile);
  auto* fmt_c = app.add_subcommand("fmt", "print the canonical form of a file");
  files(fmt_c);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  try {
    if (*validate_c) return validate(o, out, err);
    if (*conform_c) return conform(o, out, err);
    if (*run_c) return run_verb(o, out, err);
    if (*derive_c) return derive(o, out, err);
    if (*weave_c) return weave_verb(o, out, err);
    if (*enc_c) return encapsulate_verb(o, out, err);
    return fmt(o, out, err);
  } catch (const Usage& e) {
    if (*e.what()) err << "wfp: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "wfp: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace wfp::cli
