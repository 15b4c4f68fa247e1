#include <doctest.h>

#include "support/gen.hpp"
#include "support/oracles.hpp"
#include "wfp/iso.hpp"
#include "wfp/metamodel.hpp"

using namespace wfp;

namespace {

GraphPtr library_graph() {
  return make_graph({{"Person"}, {"Book"}, {"Shelf"}, {"Int", NodeKind::ValueType}, {"Bool", NodeKind::ValueType},
                     {"Real", NodeKind::ValueType}},
                    {{"owns", "Person", "Book"},
                     {"on", "Book", "Shelf"},
                     {"near", "Book", "Shelf"},
                     {"home", "Person", "Shelf"},
                     {"age", "Person", "Int", EdgeKind::Attribute},
                     {"ok", "Book", "Bool", EdgeKind::Attribute},
                     {"price", "Book", "Real", EdgeKind::Attribute}});
}

Metamodel library(std::vector<Constraint> cs = {}) {
  return make_metamodel("Library", library_graph(), std::move(cs), {{"personShelf", {"owns", "on"}}});
}

Verdict eval(const Metamodel& m, const ConstraintBody& body, const Instance& i) {
  return eval_constraint(m, {default_constraint_id(body), body}, i);
}

using V = std::vector<std::string>;

}  // namespace

TEST_SUITE("metamodel") {
  TEST_CASE("make_metamodel validates constraints and derived chains") {
    CHECK_THROWS_AS(library({{"c", Multiplicity{"nope", End::Tgt, 0, 1}}}), Error);
    CHECK_THROWS_AS(library({{"c", Multiplicity{"owns", End::Tgt, 2, 1}}}), Error);
    CHECK_THROWS_AS(library({{"c", Xor{{"owns", "on"}}}}), Error);  // different sources
    CHECK_THROWS_AS(library({{"c", ValidityTrue{"owns"}}}), Error);
    CHECK_THROWS_AS(make_metamodel("M", library_graph(), {}, {{"bad", {"on", "owns"}}}), Error);
    CHECK_NOTHROW(library({{"c", Multiplicity{"personShelf", End::Tgt, 0, 3}}}));
  }

  TEST_CASE("default ids and descriptions") {
    CHECK(default_constraint_id(Multiplicity{"owns", End::Tgt, 1, 1}) == "mult.owns.tgt");
    CHECK(default_constraint_id(Xor{{"SSE.in", "FTA.in"}}) == "xor.SSE.in.FTA.in");
    CHECK(describe(Multiplicity{"owns", End::Src, 1, std::nullopt}) == "mult owns src 1 *");
    CHECK(describe(ValidityTrue{"ok"}) == "validity ok");
  }

  TEST_CASE("instance builder merges agreeing elements and rejects conflicts") {
    InstanceBuilder b(library_graph());
    b.object("p", "Person").object("p", "Person");
    CHECK_THROWS_AS(b.object("p", "Book"), Error);
    b.object("b", "Book");
    b.link("owns", "p", "b");
    CHECK(b.has_edge("owns(p,b)"));
    CHECK_THROWS_AS(b.link("owns", "b", "p"), Error);  // wrong endpoint types
    b.value("p", "age", std::int64_t{30});
    CHECK(b.has_node("p.age"));
    CHECK_THROWS_AS(b.value("p", "age", std::int64_t{31}), Error);
    CHECK_THROWS_AS(b.value("b", "ok", std::int64_t{1}), Error);  // Int literal on a Bool
    b.value("b", "price", std::int64_t{3});                        // Int widens to Real
    const Instance i = b.build();
    CHECK(std::get<Rational>(i.values.at("b.price")) == Rational(3));
    CHECK(i.objects_of("Person") == V{"p"});
  }

  TEST_CASE("multiplicity counts links at the chosen end") {
    InstanceBuilder b(library_graph());
    b.object("p1", "Person").object("p2", "Person").object("b1", "Book").object("b2", "Book").object("b3", "Book");
    b.link("owns", "p1", "b1").link("owns", "p1", "b2");
    const Instance i = b.build();
    const Metamodel m = library();
    const Verdict tgt = eval(m, Multiplicity{"owns", End::Tgt, 1, 1}, i);
    CHECK_FALSE(tgt.holds);
    CHECK(tgt.witnesses == V{"p1", "p2"});  // two books, zero books
    const Verdict src = eval(m, Multiplicity{"owns", End::Src, 1, 1}, i);
    CHECK(src.witnesses == V{"b3"});
    CHECK(eval(m, Multiplicity{"owns", End::Tgt, 0, std::nullopt}, i).holds);
  }

  TEST_CASE("key, xor, validity and derived equality") {
    const Metamodel m = library();
    InstanceBuilder b(library_graph());
    b.object("p1", "Person").object("p2", "Person").object("s", "Shelf").object("t", "Shelf");
    b.object("b1", "Book").object("b2", "Book");
    b.link("on", "b1", "s", "on1").link("on", "b1", "s", "on2");
    b.link("near", "b2", "t");
    b.value("b1", "ok", true).value("b2", "ok", false);
    b.link("owns", "p1", "b1").link("home", "p1", "s").link("owns", "p2", "b2").link("home", "p2", "s");
    const Instance i = b.build();

    const Verdict key1 = eval(m, Key{{"on"}}, i);
    CHECK_FALSE(key1.holds);
    CHECK(key1.witnesses == V{"on1", "on2"});

    const Verdict key2 = eval(m, Key{{"home"}}, i);  // single edge: pairs are distinct
    CHECK(key2.holds);
    InstanceBuilder b2(i);
    b2.link("owns", "p1", "b2");
    const Verdict key3 = eval(m, Key{{"home", "owns"}}, b2.build());
    CHECK(key3.holds);

    const Verdict x = eval(m, Xor{{"on", "near"}}, i);
    CHECK_FALSE(x.holds);
    CHECK(x.witnesses == V{"b1"});  // two links in total

    const Verdict v = eval(m, ValidityTrue{"ok"}, i);
    CHECK(v.witnesses == V{"b2"});

    const Verdict d = eval(m, DerivedEquality{"personShelf", "home"}, i);
    CHECK_FALSE(d.holds);
    CHECK(d.witnesses == V{"p2"});  // p2's book is on no shelf
  }

  TEST_CASE("derived association agrees with a nested-loop join") {
    const Metamodel m = library();
    gen::Rng rng(3);
    for (int round = 0; round < 100; ++round) {
      const Instance i = gen::random_instance(rng, m.graph, 8, 12);
      std::vector<oracle::Pair> owns, on;
      for (const auto& [id, e] : i.data->edges()) {
        if (i.typing.edge(id) == "owns") owns.push_back({e.src, e.tgt});
        if (i.typing.edge(id) == "on") on.push_back({e.src, e.tgt});
      }
      const auto want = oracle::join({owns, on});
      const DerivedLinks got = derive_association(m, i, "personShelf");
      std::map<oracle::Pair, long> g;
      for (const auto& [p, n] : got.pairs) g[p] = n;
      CHECK(g == want);
    }
  }

  TEST_CASE("derived bounds multiply along the chain") {
    const Metamodel m = library({{"a", Multiplicity{"owns", End::Tgt, 1, 2}}, {"b", Multiplicity{"on", End::Tgt, 1, 1}}});
    const DerivedLinks d = derive_association(m, InstanceBuilder(m.graph).build(), "personShelf");
    CHECK(d.lower == 1);
    CHECK(d.upper == 2);
  }

  TEST_CASE("group maximum") {
    const GraphPtr g = make_graph({{"H"}, {"G"}, {"Int", NodeKind::ValueType}},
                                  {{"in", "H", "G"}, {"sil", "H", "Int", EdgeKind::Attribute}});
    InstanceBuilder b(g);
    b.object("h1", "H").object("h2", "H").object("h3", "H").object("g1", "G").object("g2", "G").object("g3", "G");
    b.link("in", "h1", "g1").link("in", "h2", "g1").link("in", "h3", "g2");
    b.value("h1", "sil", std::int64_t{4}).value("h2", "sil", std::int64_t{3}).value("h3", "sil", std::int64_t{2});
    const AttributeMax a = derived_attribute_max(b.build(), "in", "sil");
    CHECK(a.values == std::map<std::string, std::int64_t>{{"g1", 4}, {"g2", 2}});
    REQUIRE(a.violations.violations.size() == 1);
    CHECK(a.violations.violations[0].witnesses == V{"g3"});
  }

  TEST_CASE("restriction along a sub-metamodel and along identity") {
    const Metamodel m = library();
    gen::Rng rng(5);
    const Metamodel sub = sub_metamodel(m, "Shelving", {"Book", "Shelf"});
    CHECK(sub.graph->edge_count() == 2);
    CHECK(sub.derived.empty());
    for (int round = 0; round < 50; ++round) {
      const Instance i = gen::random_instance(rng, m.graph, 8, 10);
      CHECK(restrict(i, identity(m.graph)) == i);
      const Instance r = restrict(i, inclusion(sub.graph, m.graph));
      std::size_t books = i.objects_of("Book").size() + i.objects_of("Shelf").size();
      CHECK(r.data->node_count() == books);
      for (const auto& [id, _] : r.data->nodes()) CHECK(i.data->has_node(id));
      // Pushing forward and restricting back is the identity on sub-data.
      CHECK(restrict(push_forward(r, inclusion(sub.graph, m.graph)), inclusion(sub.graph, m.graph)) == r);
    }
  }

  TEST_CASE("restriction along a non-injective map duplicates and renames") {
    const GraphPtr two = make_graph({{"A"}, {"B"}}, {});
    const GraphPtr one = make_graph({{"X"}}, {});
    GraphMorphism e{two, one, {{"A", "X"}, {"B", "X"}}, {}};
    InstanceBuilder b(one);
    b.object("x", "X");
    const Instance r = restrict(b.build(), e);
    CHECK(r.data->node_count() == 2);
    CHECK(r.data->has_node("x@A"));
    CHECK(r.data->has_node("x@B"));
  }

  TEST_CASE("conformance report") {
    const Metamodel m = library({{"one-book", Multiplicity{"owns", End::Tgt, 1, 1}}, {"v", ValidityTrue{"ok"}}});
    InstanceBuilder b(m.graph);
    b.object("p", "Person");
    const ConformanceReport r = conforms(b.build(), m);
    CHECK_FALSE(r.conforms());
    CHECK(r.mentions("p"));
    CHECK(r.violated().size() == 1);
    const std::string text = r.to_text();
    CHECK(text.find("typing: ok") == 0);
    CHECK(text.find("VIOLATED  one-book") != std::string::npos);
    CHECK(text.find("holds     v") != std::string::npos);
    CHECK(text.find("result: does not conform (1 violation)") != std::string::npos);

    Instance bad = b.build();
    bad.typing.node_map["p"] = "Book";  // typing no longer matches the data
    bad.typing.node_map.erase("p");
    CHECK_FALSE(conforms(bad, m).typing_ok);
  }

  TEST_CASE("isomorphism ignores ids but not types or literals") {
    const GraphPtr g = library_graph();
    InstanceBuilder a(g), b(g), c(g);
    a.object("p", "Person").object("q", "Book").link("owns", "p", "q").value("p", "age", std::int64_t{1});
    b.object("x", "Person").object("y", "Book").link("owns", "x", "y", "e").value("x", "age", std::int64_t{1}, "w");
    c.object("x", "Person").object("y", "Book").link("owns", "x", "y").value("x", "age", std::int64_t{2});
    CHECK(isomorphic(a.build(), b.build()));
    CHECK_FALSE(isomorphic(a.build(), c.build()));
    CHECK(isomorphic(*g, *library_graph()));
  }
}
