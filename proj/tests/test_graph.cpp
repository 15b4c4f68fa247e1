#include <doctest.h>

#include "support/gen.hpp"
#include "wfp/graph.hpp"

using namespace wfp;

namespace {

GraphPtr triangle() {
  return make_graph({{"a", NodeKind::Class}, {"b", NodeKind::Class}, {"c", NodeKind::Class}},
                    {{"ab", "a", "b"}, {"bc", "b", "c"}, {"ca", "c", "a"}});
}

bool has_code(const ValidationReport& r, const std::string& code) {
  for (const auto& v : r.violations)
    if (v.code == code) return true;
  return false;
}

}  // namespace

TEST_SUITE("graph") {
  TEST_CASE("construction rejects duplicate ids and dangling edges") {
    CHECK_THROWS_AS(make_graph({{"a"}, {"a"}}, {}), Error);
    CHECK_THROWS_AS(make_graph({{"a"}}, {{"e", "a", "zz"}}), Error);
    CHECK_THROWS_AS(make_graph({{"a"}}, {{"e", "a", "a"}, {"e", "a", "a"}}), Error);
    CHECK_NOTHROW(make_graph({{"a"}}, {{"loop", "a", "a"}}));
  }

  TEST_CASE("elements iterate in id order") {
    const GraphPtr g = make_graph({{"z"}, {"a"}, {"m"}}, {});
    std::vector<std::string> ids;
    for (const auto& [id, _] : g->nodes()) ids.push_back(id);
    CHECK(ids == std::vector<std::string>{"a", "m", "z"});
  }

  TEST_CASE("identity and inclusion are valid morphisms") {
    const GraphPtr t = triangle();
    CHECK(check_morphism(identity(t)).ok());
    const GraphPtr sub = make_graph({{"a"}, {"b"}}, {{"ab", "a", "b"}});
    const GraphMorphism inc = inclusion(sub, t);
    CHECK(check_morphism(inc).ok());
    CHECK(is_injective(inc));
    CHECK_THROWS_AS(inclusion(t, sub), Error);
  }

  TEST_CASE("check_morphism reports each kind of defect") {
    const GraphPtr t = triangle();
    GraphMorphism m = identity(t);
    m.node_map.erase("c");
    CHECK(has_code(check_morphism(m), "totality"));

    m = identity(t);
    m.node_map["a"] = "b";  // ab would need b -> b
    CHECK(has_code(check_morphism(m), "structure"));

    const GraphPtr v = make_graph({{"a", NodeKind::ValueType}, {"b"}, {"c"}}, {{"ab", "a", "b"}, {"bc", "b", "c"}, {"ca", "c", "a"}});
    GraphMorphism k{t, v, identity(t).node_map, identity(t).edge_map};
    CHECK(has_code(check_morphism(k), "kind"));

    m = identity(t);
    m.node_map["ghost"] = "a";
    CHECK(has_code(check_morphism(m), "extraneous"));
  }

  TEST_CASE("composition is diagrammatic and associative") {
    gen::Rng rng(7);
    for (int round = 0; round < 50; ++round) {
      const GraphPtr c = gen::random_graph(rng, 4, 5, "c");
      const GraphMorphism g = gen::random_preimage(rng, c, 4, 6, "b");
      const GraphMorphism f = gen::random_preimage(rng, g.source, 4, 6, "a");
      const GraphMorphism h0 = gen::random_preimage(rng, f.source, 4, 6, "z");
      const GraphMorphism fg = compose(f, g);
      REQUIRE(check_morphism(fg).ok());
      for (const auto& [x, y] : f.node_map) CHECK(fg.node(x) == g.node(y));
      CHECK(compose(compose(h0, f), g) == compose(h0, compose(f, g)));
      CHECK(compose(identity(f.source), f) == f);
      CHECK(compose(f, identity(f.target)) == f);
    }
    const GraphPtr t = triangle();
    CHECK_THROWS_AS(compose(identity(t), identity(make_graph({{"q"}}, {}))), Error);
  }

  TEST_CASE("image and injectivity") {
    const GraphPtr t = triangle();
    const GraphPtr two = make_graph({{"x"}, {"y"}}, {});
    GraphMorphism m{two, t, {{"x", "a"}, {"y", "a"}}, {}};
    CHECK_FALSE(is_injective(m));
    const auto [ns, es] = image(m);
    CHECK(ns == std::set<std::string>{"a"});
    CHECK(es.empty());
  }

  TEST_CASE("induced subgraph keeps edges between chosen nodes") {
    const GraphPtr s = induced_subgraph(*triangle(), {"a", "b"});
    CHECK(s->node_count() == 2);
    CHECK(s->edge_count() == 1);
    CHECK(s->has_edge("ab"));
  }
}
