#pragma once

// Process schemas shared by the unit and acceptance tests.

#include "support/gen.hpp"
#include "wfp/process.hpp"

namespace procs {

using namespace wfp;

// Everything any test process may compute.
inline Metamodel world() {
  static const Metamodel m = make_metamodel(
      "World",
      make_graph({{"A"}, {"B"}, {"G"}, {"Int", NodeKind::ValueType}, {"Bool", NodeKind::ValueType},
                  {"Real", NodeKind::ValueType}},
                 {{"r", "A", "B"},
                  {"s", "B", "G"},
                  {"t", "A", "G"},
                  {"m", "A", "G"},
                  {"a.n", "A", "Int", EdgeKind::Attribute},
                  {"g.n", "G", "Int", EdgeKind::Attribute},
                  {"b.p", "B", "Real", EdgeKind::Attribute},
                  {"b.k", "B", "Int", EdgeKind::Attribute},
                  {"a.ok", "A", "Bool", EdgeKind::Attribute}}),
      {});
  return m;
}

inline Metamodel part(const std::string& name, std::set<std::string> keep, std::set<std::string> drop = {}) {
  return sub_metamodel(world(), name, keep, drop);
}

inline ProcessSchema schema(const std::string& name, const Metamodel& in, const Metamodel& inner, Semantics sem) {
  ProcessSchema s;
  s.name = name;
  s.inner = inner;
  s.inputs.push_back(input_port("in", in, inner));
  s.output = output_port("out", inner, inner);
  s.semantics = std::move(sem);
  return s;
}

/// One schema per built-in semantic kind plus a well-behaved hook.
inline std::vector<ProcessSchema> builtin_schemas() {
  const std::map<std::int64_t, Rational> rows{{1, Rational(1, 100)}, {2, Rational(1, 1000)}, {3, Rational(1, 1000000)}};
  InstanceBuilder k(part("KInner", {"A", "B", "G"}).graph);
  k.object("const.b", "B").object("const.g", "G").link("s", "const.b", "const.g");
  return {
      schema("identity", part("I", {"A", "B", "G", "Int"}), part("I", {"A", "B", "G", "Int"}), sem::Identity{}),
      schema("constant", part("In", {"A"}), part("KInner", {"A", "B", "G"}), sem::Constant{k.build()}),
      schema("compose", part("In", {"A", "B", "G"}, {"t"}), part("Inner", {"A", "B", "G"}), sem::ComposeLinks{"t", {"r", "s"}}),
      schema("max", part("In", {"A", "G", "Int"}, {"g.n"}), part("Inner", {"A", "G", "Int"}), sem::AttributeMax{"m", "a.n", "g.n"}),
      schema("threshold", part("In", {"A", "B", "Int", "Real"}), part("Inner", {"A", "B", "Int", "Real", "Bool"}),
             sem::ThresholdCompare{"A", "r", "b.p", "b.k", "a.ok", rows}),
      schema("validity", part("In", {"A", "B"}), part("Inner", {"A", "B", "Bool"}), sem::SetValidity{"A", "a.ok"}),
      schema("custom", part("In", {"A"}), part("Inner", {"A", "G"}),
             sem::Custom{"adds-group", [](const Instance& e, const std::vector<Instance>&, const ProcessSchema&,
                                          const ApplyContext&) { return InstanceBuilder(e).object("fresh", "G").build(); }}),
  };
}

/// A random input for the single port of `s`, up to 4 objects per class.
inline Instance random_input(gen::Rng& rng, const ProcessSchema& s) {
  Instance in = gen::random_population(rng, s.inputs[0].metamodel.graph);
  if (s.name == "max") {
    // max needs every member valued; fill in the gaps.
    InstanceBuilder b(in);
    for (const auto& a : in.objects_of("A"))
      if (!b.has_node(InstanceBuilder::default_value_id(a, "a.n"))) b.value(a, "a.n", std::int64_t{1});
    in = b.build();
  }
  return in;
}

/// A hook that deletes one input object.
inline ProcessSchema deleter() {
  return schema(
      "deleter", part("In", {"A"}), part("Inner", {"A"}),
      sem::Custom{"deleter", [](const Instance& e, const std::vector<Instance>&, const ProcessSchema&, const ApplyContext&) {
                    InstanceBuilder b(e);
                    for (const auto& a : e.objects_of("A")) return b.erase(a).build();
                    return b.build();
                  }});
}

}  // namespace procs
