#include <doctest.h>

#include "support/gen.hpp"
#include "support/oracles.hpp"
#include "support/processes.hpp"
#include "wfp/iso.hpp"
#include "wfp/process.hpp"

using namespace wfp;
using procs::part;
using procs::schema;
using procs::world;

namespace {

std::set<oracle::Pair> links(const Instance& i, const std::string& type) {
  std::set<oracle::Pair> out;
  for (const auto& [id, e] : i.data->edges())
    if (i.typing.edge(id) == type) out.insert({e.src, e.tgt});
  return out;
}

std::map<std::string, Literal> attr(const Instance& i, const std::string& type) {
  std::map<std::string, Literal> out;
  for (const auto& [id, e] : i.data->edges())
    if (i.typing.edge(id) == type) out.emplace(e.src, i.values.at(e.tgt));
  return out;
}

bool has_code(const ValidationReport& r, const std::string& code) {
  for (const auto& v : r.violations)
    if (v.code == code) return true;
  return false;
}

}  // namespace

TEST_SUITE("process") {
  TEST_CASE("arity: disjoint inputs pass, overlapping inputs are rejected with the overlap") {
    const Metamodel inner = world();
    ProcessSchema s;
    s.name = "P";
    s.inner = inner;
    s.inputs = {input_port("x", part("X", {"A", "B"}), inner), input_port("y", part("Y", {"G"}), inner)};
    s.output = output_port("out", inner, inner);
    CHECK(check_arity(s).ok());

    s.inputs.push_back(input_port("z", part("Z", {"B", "G"}, {"s"}), inner));
    const ValidationReport r = check_arity(s);
    REQUIRE(has_code(r, "disjointness"));
    std::set<std::string> seen;
    for (const auto& v : r.violations)
      if (v.code == "disjointness") seen.insert(v.witnesses.begin(), v.witnesses.end());
    CHECK(seen == std::set<std::string>{"B", "G"});

    s.inputs.back().port = "x";
    CHECK(has_code(check_arity(s), "duplicate-port"));
  }

  TEST_CASE("arity: port maps must be injective and typed correctly") {
    const Metamodel inner = world();
    ProcessSchema s = schema("P", part("X", {"A"}), inner, sem::Identity{});
    s.inputs[0].injection.target = part("Other", {"A"}).graph;
    CHECK(has_code(check_arity(s), "port-map"));

    const Metamodel two = make_metamodel("Two", make_graph({{"A1"}, {"A2"}}, {}), {});
    ProcessSchema t = schema("Q", part("X", {"A"}), inner, sem::Identity{});
    t.inputs[0] = {"in", two, GraphMorphism{two.graph, inner.graph, {{"A1", "A"}, {"A2", "A"}}, {}}};
    CHECK_FALSE(check_arity(t).ok());
  }

  TEST_CASE("inputs with clashing ids are prefixed by port") {
    const Metamodel inner = world();
    ProcessSchema s;
    s.name = "P";
    s.inner = inner;
    const Metamodel xa = part("XA", {"A"}), xg = part("XG", {"G"});
    s.inputs = {input_port("left", xa, inner), input_port("right", xg, inner)};
    s.output = output_port("out", inner, inner);
    InstanceBuilder a(xa.graph), g(xg.graph);
    a.object("o", "A").object("only", "A");
    g.object("o", "G");
    const Instance e = embed_inputs(s, {a.build(), g.build()});
    CHECK(e.data->has_node("left.o"));
    CHECK(e.data->has_node("right.o"));
    CHECK(e.data->has_node("only"));
    CHECK_THROWS_AS(apply(s, {a.build()}), Error);
  }

  TEST_CASE("compose adds exactly the joined pairs") {
    const ProcessSchema s = schema("C", part("In", {"A", "B", "G"}, {"t", "m"}), part("Inner", {"A", "B", "G"}, {"m"}),
                                   sem::ComposeLinks{"t", {"r", "s"}});
    gen::Rng rng(23);
    for (int round = 0; round < 40; ++round) {
      const Instance in = gen::random_population(rng, s.inputs[0].metamodel.graph);
      const Application a = apply(s, {in});
      const auto rs = links(in, "r"), ss = links(in, "s");
      const std::vector<oracle::Pair> r(rs.begin(), rs.end()), sl(ss.begin(), ss.end());
      std::set<oracle::Pair> want;
      for (const auto& [p, _] : oracle::join({r, sl})) want.insert(p);
      CHECK(links(a.output, "t") == want);
    }
  }

  TEST_CASE("max sets the group attribute from members") {
    const ProcessSchema s = schema("M", part("In", {"A", "G", "Int"}, {"t", "g.n"}), part("Inner", {"A", "G", "Int"}, {"t"}),
                                   sem::AttributeMax{"m", "a.n", "g.n"});
    InstanceBuilder b(s.inputs[0].metamodel.graph);
    b.object("a1", "A").object("a2", "A").object("g", "G");
    b.link("m", "a1", "g").link("m", "a2", "g");
    b.value("a1", "a.n", std::int64_t{4}).value("a2", "a.n", std::int64_t{2});
    const auto got = attr(apply(s, {b.build()}).output, "g.n");
    CHECK(got == std::map<std::string, Literal>{{"g", std::int64_t{4}}});
  }

  TEST_CASE("threshold compares strictly and defaults to false") {
    const std::map<std::int64_t, Rational> rows{{1, Rational::parse("1e-2")}, {2, Rational::parse("1e-3")}};
    const ProcessSchema s =
        schema("T", part("In", {"A", "B", "Int", "Real"}, {"a.n"}), part("Inner", {"A", "B", "Int", "Real", "Bool"}, {"a.n"}),
               sem::ThresholdCompare{"A", "r", "b.p", "b.k", "a.ok", rows});
    InstanceBuilder b(s.inputs[0].metamodel.graph);
    auto hazard = [&](const std::string& a, const std::string& bb, std::optional<std::int64_t> k,
                      std::optional<Rational> p) {
      b.object(a, "A").object(bb, "B").link("r", a, bb);
      if (k) b.value(bb, "b.k", *k);
      if (p) b.value(bb, "b.p", *p);
    };
    hazard("below", "b1", 2, Rational::parse("1e-4"));
    hazard("equal", "b2", 2, Rational::parse("1e-3"));
    hazard("above", "b3", 1, Rational::parse("0.5"));
    hazard("norow", "b4", 4, Rational::parse("0"));
    hazard("noval", "b5", 1, std::nullopt);
    b.object("nopath", "A");
    const auto got = attr(apply(s, {b.build()}).output, "a.ok");
    CHECK(got == std::map<std::string, Literal>{{"below", true},
                                                {"equal", false},
                                                {"above", false},
                                                {"norow", false},
                                                {"noval", false},
                                                {"nopath", false}});
  }

  TEST_CASE("validity copies verdicts and leaves unknown objects unset") {
    const ProcessSchema s = schema("V", part("In", {"A"}), part("Inner", {"A", "Bool"}), sem::SetValidity{"A", "a.ok"});
    InstanceBuilder b(s.inputs[0].metamodel.graph);
    b.object("x", "A").object("y", "A").object("z", "A");
    const Verdicts v{{"x", true}, {"y", false}};
    const auto got = attr(apply(s, {b.build()}, {&v}).output, "a.ok");
    CHECK(got == std::map<std::string, Literal>{{"x", true}, {"y", false}});
  }

  TEST_CASE("constant adds its data and must agree with inputs") {
    const Metamodel inner = part("Inner", {"A", "B"});
    InstanceBuilder c(inner.graph);
    c.object("k", "B").object("a", "A").link("r", "a", "k");
    const ProcessSchema s = schema("K", part("In", {"A"}), inner, sem::Constant{c.build()});
    InstanceBuilder in(s.inputs[0].metamodel.graph);
    in.object("a", "A");
    const Application a = apply(s, {in.build()});
    CHECK(a.output.data->node_count() == 2);
    CHECK(links(a.output, "r") == std::set<oracle::Pair>{{"a", "k"}});
    InstanceBuilder clash(s.inputs[0].metamodel.graph);
    clash.object("k", "A");
    CHECK_THROWS_AS(apply(s, {clash.build()}), Error);
  }

  TEST_CASE("every built-in semantics satisfies putget; a deleting hook does not") {
    const std::vector<ProcessSchema> schemas = procs::builtin_schemas();
    gen::Rng rng(29);
    int cases = 0;
    for (const auto& s : schemas) {
      REQUIRE(check_arity(s).ok());
      for (int round = 0; round < 40; ++round) {
        const Instance in = procs::random_input(rng, s);
        Verdicts v;
        for (const auto& a : in.objects_of("A")) v[a] = gen::pick(rng, 0, 1) == 1;
        INFO(s.name);
        CHECK(check_putget(s, {in}, {&v}));
        ++cases;
      }
    }
    CHECK(cases >= 100);

    const ProcessSchema bad = procs::deleter();
    InstanceBuilder in(bad.inputs[0].metamodel.graph);
    in.object("victim", "A");
    CHECK_FALSE(check_putget(bad, {in.build()}));
  }

  TEST_CASE("registered hooks are found by id") {
    register_hook("test.tag", [](const Instance& e, const std::vector<Instance>&, const ProcessSchema&, const ApplyContext&) {
      return InstanceBuilder(e).object("tagged", "G").build();
    });
    const ProcessSchema s = schema("H", part("In", {"A"}), part("Inner", {"A", "G"}), sem::Custom{"test.tag", nullptr});
    CHECK(apply(s, {InstanceBuilder(s.inputs[0].metamodel.graph).build()}).output.data->has_node("tagged"));
    const ProcessSchema missing = schema("H", part("In", {"A"}), part("Inner", {"A", "G"}), sem::Custom{"nope", nullptr});
    CHECK_THROWS_AS(apply(missing, {InstanceBuilder(s.inputs[0].metamodel.graph).build()}), Error);
    CHECK(semantics_name(s.semantics) == "custom");
  }

  TEST_CASE("source processes and signals") {
    const Metamodel inner = part("Inner", {"A"});
    InstanceBuilder c(inner.graph);
    c.object("made", "A");
    ProcessSchema src;
    src.name = "Src";
    src.inner = inner;
    src.output = output_port("out", inner, inner);
    src.semantics = sem::Constant{c.build()};
    CHECK(signal_semantics(src, false)->data->has_node("made"));

    ProcessSchema trig = src;
    const Metamodel empty = make_metamodel("Empty", empty_graph(), {});
    trig.inputs.push_back({"go", empty, GraphMorphism{empty.graph, inner.graph, {}, {}}});
    CHECK_FALSE(signal_semantics(trig, false).has_value());
    CHECK(signal_semantics(trig, true)->data->has_node("made"));
  }
}
