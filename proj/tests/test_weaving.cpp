#include <doctest.h>

#include <algorithm>

#include "support/gen.hpp"
#include "wfp/dsl.hpp"
#include "wfp/iso.hpp"
#include "wfp/model.hpp"
#include "wfp/weaving.hpp"

using namespace wfp;

namespace {

// Entry {X}; advice adds a few classes around X and a Bool attribute.
Advice random_advice(gen::Rng& rng) {
  std::vector<Node> nodes{{"X", NodeKind::Class}, {"Bool", NodeKind::ValueType}};
  const int extra = gen::pick(rng, 1, 3);
  for (int k = 0; k < extra; ++k) nodes.push_back({"R" + std::to_string(k), NodeKind::Class});
  std::vector<Edge> edges{{"ok", "R0", "Bool", EdgeKind::Attribute}};
  for (int k = 0; k < extra; ++k) {
    const std::string r = "R" + std::to_string(k);
    if (gen::pick(rng, 0, 1)) edges.push_back({"to" + r, "X", r, EdgeKind::Association});
    else edges.push_back({"from" + r, r, "X", EdgeKind::Association});
  }
  Advice a;
  a.name = "Adv";
  a.advice = make_metamodel("Adv", make_graph(nodes, edges), {{"one-ok", Multiplicity{"ok", End::Tgt, 1, 1}}});
  a.entry = make_metamodel("Entry", make_graph({{"X", NodeKind::Class}}, {}), {});
  a.embedding = inclusion(a.entry.graph, a.advice.graph);
  return a;
}

std::vector<EntryPoint> random_points(gen::Rng& rng, const Metamodel& main, const Advice& a) {
  std::vector<std::string> classes;
  for (const auto& [id, n] : main.graph->nodes())
    if (n.kind == NodeKind::Class) classes.push_back(id);
  std::shuffle(classes.begin(), classes.end(), rng);
  const int k = gen::pick(rng, 1, static_cast<int>(std::min<std::size_t>(classes.size(), 4)));
  std::vector<EntryPoint> out;
  for (int p = 0; p < k; ++p)
    out.push_back({"at_" + classes[p], GraphMorphism{a.entry.graph, main.graph, {{"X", classes[p]}}, {}}});
  return out;
}

std::string fixture(const std::string& rel) { return std::string(WFP_FIXTURES) + "/" + rel; }

}  // namespace

TEST_SUITE("weaving") {
  TEST_CASE("single weave is a pushout: counts, commuting square, prefixes") {
    gen::Rng rng(71);
    for (int round = 0; round < 50; ++round) {
      const Metamodel main = make_metamodel("Main", gen::random_graph(rng, 5, 6, "m", true), {});
      const Advice a = random_advice(rng);
      REQUIRE(check_advice(a).ok());
      const EntryPoint p = random_points(rng, main, a).front();
      const Woven w = weave(main, a, p, "rev1.");
      const auto& g = *w.metamodel.graph;
      CHECK(g.node_count() == main.graph->node_count() + a.advice.graph->node_count() - 1);
      CHECK(g.edge_count() == main.graph->edge_count() + a.advice.graph->edge_count());
      CHECK(check_morphism(w.from_main).ok());
      CHECK(check_morphism(w.from_advice).ok());
      CHECK(is_injective(w.from_main));
      const GraphMorphism left = compose(a.embedding, w.from_advice), right = compose(p.binding, w.from_main);
      CHECK(left.node("X") == right.node("X"));
      for (const auto& [id, _] : main.graph->nodes()) CHECK(w.from_main.node(id) == id);
      for (const auto& [id, _] : a.advice.graph->nodes())
        if (id != "X") CHECK(w.from_advice.node(id) == "rev1." + id);
      CHECK(w.metamodel.find_constraint("rev1.one-ok"));
    }
  }

  TEST_CASE("weave_all: counts, point-order invariance, restriction back to main") {
    gen::Rng rng(73);
    for (int round = 0; round < 40; ++round) {
      const Metamodel main = make_metamodel("Main", gen::random_graph(rng, 6, 6, "m", true), {});
      const Advice a = random_advice(rng);
      auto points = random_points(rng, main, a);
      const Metamodel w = weave_all(main, a, points, "W");
      const std::size_t k = points.size();
      CHECK(w.graph->node_count() == main.graph->node_count() + k * (a.advice.graph->node_count() - 1));
      CHECK(w.graph->edge_count() == main.graph->edge_count() + k * a.advice.graph->edge_count());
      CHECK(w.constraints.size() == main.constraints.size() + k);
      std::shuffle(points.begin(), points.end(), rng);
      CHECK(weave_all(main, a, points, "W") == w);
      // Main is included unchanged, so its instances survive the round trip.
      const GraphMorphism incl = inclusion(main.graph, w.graph);
      REQUIRE(check_morphism(incl).ok());
      const Instance i = gen::random_population(rng, main.graph, 2);
      CHECK(isomorphic(restrict(push_forward(i, incl), incl), i));
    }
  }

  TEST_CASE("points in name order get rev1, rev2, ...") {
    const Metamodel main = make_metamodel("Main", make_graph({{"P", NodeKind::Class}, {"Q", NodeKind::Class}}, {}), {});
    gen::Rng rng(79);
    const Advice a = random_advice(rng);
    const std::vector<EntryPoint> points{{"zeta", GraphMorphism{a.entry.graph, main.graph, {{"X", "P"}}, {}}},
                                         {"alpha", GraphMorphism{a.entry.graph, main.graph, {{"X", "Q"}}, {}}}};
    const Metamodel w = weave_all(main, a, points);
    CHECK(w.graph->has_node("rev1.R0"));
    CHECK(w.graph->has_node("rev2.R0"));
    CHECK(w.graph->has_edge("rev1.ok"));
    // alpha binds Q, so rev1's edges touch Q.
    bool found = false;
    for (const auto& [id, e] : w.graph->edges())
      if (id.rfind("rev1.", 0) == 0 && (e.src == "Q" || e.tgt == "Q")) found = true;
    CHECK(found);
  }

  TEST_CASE("overlapping points and bad advice are rejected") {
    const Metamodel main = make_metamodel("Main", make_graph({{"P", NodeKind::Class}}, {}), {});
    gen::Rng rng(83);
    const Advice a = random_advice(rng);
    const std::vector<EntryPoint> twice{{"a", GraphMorphism{a.entry.graph, main.graph, {{"X", "P"}}, {}}},
                                        {"b", GraphMorphism{a.entry.graph, main.graph, {{"X", "P"}}, {}}}};
    CHECK_THROWS_AS(weave_all(main, a, twice), Error);

    Advice folded = a;
    folded.entry = make_metamodel("Entry", make_graph({{"X1", NodeKind::Class}, {"X2", NodeKind::Class}}, {}), {});
    folded.embedding = GraphMorphism{folded.entry.graph, a.advice.graph, {{"X1", "X"}, {"X2", "X"}}, {}};
    CHECK_FALSE(check_advice(folded).ok());

    Advice lost = a;
    // The advice only says ok is 1..1, not the entry's 0..1.
    lost.entry = make_metamodel("Entry",
                                make_graph({{"R0", NodeKind::Class}, {"Bool", NodeKind::ValueType}},
                                           {{"ok", "R0", "Bool", EdgeKind::Attribute}}),
                                {{"needs", Multiplicity{"ok", End::Tgt, 0, 1}}});
    lost.embedding = inclusion(lost.entry.graph, a.advice.graph);
    CHECK_FALSE(check_advice(lost).ok());
  }

  TEST_CASE("a main constraint with the woven id but other content is an error") {
    gen::Rng rng(89);
    const Advice a = random_advice(rng);
    const Metamodel main = make_metamodel("Main", make_graph({{"P", NodeKind::Class}, {"Bool", NodeKind::ValueType}},
                                                             {{"p.b", "P", "Bool", EdgeKind::Attribute}}),
                                          {{"rev1.one-ok", Multiplicity{"p.b", End::Tgt, 0, 1}}});
    const EntryPoint p{"at", GraphMorphism{a.entry.graph, main.graph, {{"X", "P"}}, {}}};
    CHECK_THROWS_AS(weave(main, a, p, "rev1."), Error);
  }

  TEST_CASE("the review advice woven into the process metamodel matches the checked-in result") {
    const auto loaded = dsl::load_files({fixture("controlsys/sep.wfp"), fixture("controlsys/review.wfp"),
                                         fixture("controlsys/sep_reviewed.wfp")});
    REQUIRE(loaded.ok());
    const auto& m = loaded.model;
    const dsl::AdviceModel& review = m.advices.at("Review");
    CHECK(check_advice(review.advice).ok());
    const Metamodel w = weave_all(m.metamodels.at("SEP"), review.advice, review.points, "SEPReviewed");
    CHECK(w == m.metamodels.at("SEPReviewed"));
    const std::size_t k = review.points.size();
    CHECK(k == 6);
    CHECK(w.graph->node_count() == m.metamodels.at("SEP").graph->node_count() +
                                       k * (review.advice.advice.graph->node_count() - review.advice.entry.graph->node_count()));
    CHECK(w.graph->edge_count() == m.metamodels.at("SEP").graph->edge_count() +
                                       k * (review.advice.advice.graph->edge_count() - review.advice.entry.graph->edge_count()));
  }
}
