#include <doctest.h>

#include "support/flows.hpp"
#include "support/oracles.hpp"

using namespace wfp;

namespace {

std::set<std::string> codes(const ValidationReport& r) {
  std::set<std::string> out;
  for (const auto& v : r.violations) out.insert(v.code);
  return out;
}

struct Relations {
  std::set<oracle::Pair> ps2ps, wp2wp;
};

// Straight from the definitions: p feeds q through a product; w feeds v through a process.
Relations relations_by_definition(const DependencyFlow& f) {
  Relations r;
  for (const auto& o : f.out_wires)
    for (const auto& i : f.in_wires) {
      if (o.wp == i.wp) r.ps2ps.insert({o.process, i.process});
      if (o.process == i.process) r.wp2wp.insert({i.wp, o.wp});
    }
  return r;
}

}  // namespace

TEST_SUITE("depflow") {
  TEST_CASE("two-stratum topology is valid with two strata") {
    const FlowBuild b = build_flow(flows::two_stratum_topology());
    CHECK(b.ok());
    const Acyclicity a = check_acyclic(b.flow);
    REQUIRE(a.acyclic);
    CHECK(a.strata == std::vector<std::vector<std::string>>{{"P", "P'", "P''"}, {"Id", "Q", "Q'"}});
    CHECK(b.flow.initial_products() == std::set<std::string>{"W", "W'"});
    CHECK(b.flow.final_products() == std::set<std::string>{"U"});
  }

  TEST_CASE("build_flow reports every structural defect") {
    DependencyFlow f = flows::two_stratum_topology();
    f.in_wires.push_back({"W", "P", "1"});
    CHECK(codes(build_flow(f).report).count("key"));
    CHECK(build_flow(f).flow.in_wires.size() == 10);  // kept for reporting

    f = flows::two_stratum_topology();
    f.in_wires.push_back({"W'", "P", "1"});
    CHECK(codes(build_flow(f).report) == std::set<std::string>{"in-port-multiple"});

    f = flows::two_stratum_topology();
    f.in_wires.erase(f.in_wires.begin());
    CHECK(codes(build_flow(f).report) == std::set<std::string>{"in-port-unwired"});

    f = flows::two_stratum_topology();
    f.out_wires.erase(std::remove_if(f.out_wires.begin(), f.out_wires.end(), [](const OutWire& w) { return w.process == "Q"; }),
                      f.out_wires.end());
    CHECK(codes(build_flow(f).report) == std::set<std::string>{"out-port-unwired"});

    f = flows::two_stratum_topology();
    f.in_wires.push_back({"Nowhere", "Q", "9"});
    CHECK(codes(build_flow(f).report).count("dangling"));

    f = flows::two_stratum_topology();
    f.processes.push_back({"P", {}, "out"});
    CHECK(codes(build_flow(f).report).count("duplicate-process"));

    f = flows::two_stratum_topology();
    f.work_products.insert("Q");
    CHECK(codes(build_flow(f).report).count("name-clash"));
  }

  TEST_CASE("derived relations follow their definitions on random flows") {
    gen::Rng rng(31);
    for (int round = 0; round < 200; ++round) {
      const DependencyFlow f = flows::random_flow(rng);
      const DerivedRelations d = derived_relations(f);
      const Relations want = relations_by_definition(f);
      CHECK(d.ps2ps == want.ps2ps);
      CHECK(d.wp2wp == want.wp2wp);
      CHECK(relation_acyclic(d.ps2ps) == oracle::acyclic(want.ps2ps));
      CHECK(check_acyclic(f).acyclic == oracle::acyclic(want.ps2ps));
    }
  }

  TEST_CASE("a cycle is reported by its shortest witness") {
    DependencyFlow f = flows::two_stratum_topology();
    // U feeds P back: P -> V -> Q -> U -> P, plus a short loop P -> V -> P through a new port.
    f.processes[1].in_ports.push_back("3");
    f.in_wires.push_back({"V", "P", "3"});
    std::sort(f.in_wires.begin(), f.in_wires.end());
    const Acyclicity a = check_acyclic(f);
    CHECK_FALSE(a.acyclic);
    CHECK(a.cycle == std::vector<std::string>{"P", "V", "P"});
    CHECK(a.strata.empty());
    CHECK_THROWS_AS(normalize_id(f), Error);
  }

  TEST_CASE("self-loop through one product") {
    DependencyFlow f;
    f.processes = {{"A", {"x"}, "out"}};
    f.work_products = {"w"};
    f.in_wires = {{"w", "A", "x"}};
    f.out_wires = {{"A", "w"}};
    CHECK(check_acyclic(f).cycle == std::vector<std::string>{"A", "w", "A"});
  }

  TEST_CASE("normalize_id relays products that skip a stratum") {
    DependencyFlow f;
    f.processes = {{"A", {"x"}, "out"}, {"B", {"x"}, "out"}, {"C", {"x", "y"}, "out"}};
    f.work_products = {"in", "a", "b", "c"};
    f.in_wires = {{"in", "A", "x"}, {"a", "B", "x"}, {"b", "C", "x"}, {"in", "C", "y"}};
    f.out_wires = {{"A", "a"}, {"B", "b"}, {"C", "c"}};
    std::sort(f.in_wires.begin(), f.in_wires.end());
    const auto [g, added] = normalize_id(f);
    CHECK(build_flow(g).ok());
    REQUIRE(added.size() == 2);
    CHECK(added[0].process == "Id.in.0");
    CHECK(added[0].writes == "in.0");
    CHECK(added[1].process == "Id.in.1");
    CHECK(added[1].reads == "in.0");
    // Every product is now consumed exactly one stratum after it is made.
    const Acyclicity a = check_acyclic(g);
    std::map<std::string, int> depth;
    for (std::size_t k = 0; k < a.strata.size(); ++k)
      for (const auto& p : a.strata[k]) depth[p] = static_cast<int>(k);
    std::map<std::string, int> made;
    for (const auto& wp : g.work_products) made[wp] = -1;
    for (const auto& w : g.out_wires) made[w.wp] = depth[w.process];
    for (const auto& w : g.in_wires) CHECK(depth[w.process] == made[w.wp] + 1);
  }

  TEST_CASE("two-stratum topology needs no relays") {
    CHECK(normalize_id(flows::two_stratum_topology()).second.empty());
  }
}
