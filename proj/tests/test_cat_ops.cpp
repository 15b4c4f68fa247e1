#include <doctest.h>

#include "support/gen.hpp"
#include "support/oracles.hpp"
#include "wfp/cat_ops.hpp"
#include "wfp/iso.hpp"

using namespace wfp;

namespace {

// Apex element as the pair of its projections.
oracle::PullbackPairs pairs_of(const Pullback& pb) {
  oracle::PullbackPairs out;
  for (const auto& [id, _] : pb.apex->nodes()) out.nodes.insert({pb.left.node(id), pb.right.node(id)});
  for (const auto& [id, _] : pb.apex->edges()) out.edges.insert({pb.left.edge(id), pb.right.edge(id)});
  return out;
}

// Same partition: elements share a class in the oracle iff the cocone glues them.
template <class Get>
bool same_partition(const std::vector<std::set<oracle::Pair>>& blocks, const Colimit& c, Get image, std::size_t count) {
  if (blocks.size() != count) return false;
  std::set<std::string> seen;
  for (const auto& b : blocks) {
    std::set<std::string> imgs;
    for (const auto& [label, id] : b) imgs.insert(image(c.cocone.at(label), id));
    if (imgs.size() != 1 || !seen.insert(*imgs.begin()).second) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("cat_ops") {
  TEST_CASE("coproduct is a disjoint union with l./r. names") {
    const GraphPtr a = make_graph({{"x"}, {"y"}}, {{"e", "x", "y"}});
    const GraphPtr b = make_graph({{"x"}}, {});
    const Coproduct c = coproduct(a, b);
    CHECK(c.sum->node_count() == 3);
    CHECK(c.sum->edge_count() == 1);
    CHECK(c.left.node("x") == "l.x");
    CHECK(c.right.node("x") == "r.x");
    CHECK(check_morphism(c.left).ok());
    CHECK(check_morphism(c.right).ok());
  }

  TEST_CASE("pullback over a hand-made cospan") {
    // Two objects over A and one over B pulled back against one over A.
    const GraphPtr base = make_graph({{"A"}, {"B"}}, {{"r", "A", "B"}});
    const GraphPtr s1 = make_graph({{"p"}, {"q"}, {"u"}}, {{"pr", "p", "u"}});
    GraphMorphism f{s1, base, {{"p", "A"}, {"q", "A"}, {"u", "B"}}, {{"pr", "r"}}};
    const GraphPtr s2 = make_graph({{"k"}}, {});
    GraphMorphism g{s2, base, {{"k", "A"}}, {}};
    const Pullback pb = pullback(f, g);
    CHECK(pb.apex->node_count() == 2);
    CHECK(pb.apex->has_node("(p|k)"));
    CHECK(pb.apex->has_node("(q|k)"));
    CHECK(pb.apex->edge_count() == 0);
  }

  TEST_CASE("pullback agrees with pair enumeration") {
    gen::Rng rng(11);
    for (int round = 0; round < 150; ++round) {
      const GraphPtr c = gen::random_graph(rng, 4, 5, "c");
      const GraphMorphism f = gen::random_preimage(rng, c, 5, 6, "a");
      const GraphMorphism g = gen::random_preimage(rng, c, 5, 6, "b");
      const Pullback pb = pullback(f, g);
      REQUIRE(check_morphism(pb.left).ok());
      REQUIRE(check_morphism(pb.right).ok());
      const auto want = oracle::pullback_pairs(f, g);
      const auto got = pairs_of(pb);
      CHECK(got.nodes == want.nodes);
      CHECK(got.edges == want.edges);
      CHECK(pb.apex->node_count() == want.nodes.size());
      CHECK(compose(pb.left, f) == compose(pb.right, g));
      CHECK(disjoint_images(f, g) == (want.nodes.empty() && want.edges.empty()));
    }
  }

  TEST_CASE("image_overlap lists shared target elements") {
    const GraphPtr t = make_graph({{"a"}, {"b"}, {"c"}}, {});
    const GraphPtr one = make_graph({{"x"}}, {});
    const GraphPtr two = make_graph({{"x"}, {"y"}}, {});
    GraphMorphism f{two, t, {{"x", "a"}, {"y", "b"}}, {}};
    GraphMorphism g{one, t, {{"x", "b"}}, {}};
    CHECK(image_overlap(f, g) == std::vector<std::string>{"b"});
    GraphMorphism h{one, t, {{"x", "c"}}, {}};
    CHECK(image_overlap(f, h).empty());
    CHECK(disjoint_images(f, h));
  }

  TEST_CASE("colimit agrees with the equivalence-closure quotient") {
    gen::Rng rng(13);
    for (int round = 0; round < 120; ++round) {
      Diagram d;
      const GraphPtr base = gen::random_graph(rng, 3, 4, "t");
      d.add_object("T", base);
      const int k = gen::pick(rng, 1, 3);
      for (int j = 0; j < k; ++j) {
        const GraphMorphism m = gen::random_preimage(rng, base, 3, 4, "s");
        const std::string label = "S" + std::to_string(j);
        d.add_object(label, m.source);
        d.add_arrow(label, "T", m);
        if (j > 0 && gen::pick(rng, 0, 1)) {
          // A second arrow between sources through a random map.
          const GraphMorphism n = gen::random_preimage(rng, m.source, 3, 3, "w");
          const std::string w = "W" + std::to_string(j);
          d.add_object(w, n.source);
          d.add_arrow(w, label, n);
        }
      }
      // An object connected to nothing stays as a disjoint summand.
      d.add_object("Z", gen::random_graph(rng, 2, 2, "z"));
      const Colimit c = colimit(d);
      for (const auto& [label, inj] : c.cocone) REQUIRE(check_morphism(inj).ok());
      for (const auto& a : d.arrows) CHECK(compose(a.map, c.cocone.at(a.tgt)) == c.cocone.at(a.src));
      const auto q = oracle::colimit_classes(d);
      CHECK(same_partition(
          q.nodes, c, [](const GraphMorphism& m, const std::string& id) { return m.node(id); }, c.object->node_count()));
      CHECK(same_partition(
          q.edges, c, [](const GraphMorphism& m, const std::string& id) { return m.edge(id); }, c.object->edge_count()));
    }
  }

  TEST_CASE("colimit names classes by the least qualified member") {
    Diagram d;
    const GraphPtr a = make_graph({{"x"}}, {});
    const GraphPtr b = make_graph({{"y"}}, {});
    d.add_object("B", b);
    d.add_object("A", a);
    d.add_arrow("A", "B", GraphMorphism{a, b, {{"x", "y"}}, {}});
    const Colimit c = colimit(d);
    CHECK(c.object->node_count() == 1);
    CHECK(c.cocone.at("B").node("y") == c.cocone.at("A").node("x"));
  }

  TEST_CASE("pushout satisfies the universal property against every small cocone") {
    // Target of candidate cocones: two nodes with one edge for every ordered pair.
    const GraphPtr x = make_graph({{"0"}, {"1"}}, {{"00", "0", "0"}, {"01", "0", "1"}, {"10", "1", "0"}, {"11", "1", "1"}});
    auto maps_into_x = [&](const GraphPtr& src) {
      std::vector<GraphMorphism> out;
      std::vector<std::string> ns;
      for (const auto& [id, _] : src->nodes()) ns.push_back(id);
      for (unsigned bits = 0; bits < (1u << ns.size()); ++bits) {
        GraphMorphism m{src, x, {}, {}};
        for (std::size_t k = 0; k < ns.size(); ++k) m.node_map[ns[k]] = (bits >> k) & 1 ? "1" : "0";
        for (const auto& [id, e] : src->edges()) m.edge_map[id] = m.node_map[e.src] + m.node_map[e.tgt];
        out.push_back(m);
      }
      return out;
    };
    gen::Rng rng(17);
    int checked = 0;
    for (int round = 0; round < 200; ++round) {
      const GraphPtr a = gen::random_graph(rng, 3, 3, "a");
      const GraphMorphism e = gen::random_preimage(rng, a, 2, 2, "e");
      // A second map out of the same E into a random M.
      const GraphPtr m = gen::random_graph(rng, 3, 3, "m");
      GraphMorphism w{e.source, m, {}, {}};
      std::vector<std::string> mnodes;
      for (const auto& [id, _] : m->nodes()) mnodes.push_back(id);
      bool ok = true;
      for (const auto& [id, _] : e.source->nodes()) w.node_map[id] = gen::choose(rng, mnodes);
      for (const auto& [id, ed] : e.source->edges()) {
        std::vector<std::string> cands;
        for (const auto& [mid, me] : m->edges())
          if (me.src == w.node_map[ed.src] && me.tgt == w.node_map[ed.tgt]) cands.push_back(mid);
        if (cands.empty()) ok = false;
        else w.edge_map[id] = gen::choose(rng, cands);
      }
      if (!ok) continue;
      const Pushout po = pushout(e, w);
      REQUIRE(check_morphism(po.left).ok());
      REQUIRE(check_morphism(po.right).ok());
      CHECK(compose(e, po.left) == compose(w, po.right));
      for (const auto& qa : maps_into_x(a))
        for (const auto& qm : maps_into_x(m)) {
          if (!(compose(e, qa) == compose(w, qm))) continue;
          // The mediating map is forced by joint surjectivity; it must be well defined.
          GraphMorphism u{po.object, x, {}, {}};
          bool defined = true;
          auto put = [&](std::map<std::string, std::string>& mp, const std::string& k, const std::string& v) {
            auto [it, fresh] = mp.emplace(k, v);
            if (!fresh && it->second != v) defined = false;
          };
          for (const auto& [id, _] : a->nodes()) put(u.node_map, po.left.node(id), qa.node(id));
          for (const auto& [id, _] : m->nodes()) put(u.node_map, po.right.node(id), qm.node(id));
          for (const auto& [id, _] : a->edges()) put(u.edge_map, po.left.edge(id), qa.edge(id));
          for (const auto& [id, _] : m->edges()) put(u.edge_map, po.right.edge(id), qm.edge(id));
          CHECK(defined);
          CHECK(u.node_map.size() == po.object->node_count());
          CHECK(u.edge_map.size() == po.object->edge_count());
          CHECK(check_morphism(u).ok());
          ++checked;
        }
    }
    CHECK(checked > 100);
  }

  TEST_CASE("pullback pasting") {
    gen::Rng rng(19);
    for (int round = 0; round < 100; ++round) {
      const GraphPtr c = gen::random_graph(rng, 3, 4, "c");
      const GraphMorphism f = gen::random_preimage(rng, c, 4, 5, "a");
      const GraphMorphism g = gen::random_preimage(rng, c, 4, 5, "b");
      const GraphMorphism h = gen::random_preimage(rng, g.source, 4, 5, "d");
      const Pullback inner = pullback(f, g);
      const Pullback outer_left = pullback(inner.right, h);
      const Pullback whole = pullback(f, compose(h, g));
      CHECK(isomorphic(*outer_left.apex, *whole.apex));
    }
  }
}
