#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wfp/depflow.hpp"
#include "wfp/metamodel.hpp"
#include "wfp/process.hpp"

namespace wfp {

struct DataflowDefinition {
  std::string name;
  DependencyFlow flow;
  std::map<std::string, ProcessSchema> processes;
  std::map<std::string, Metamodel> wp_metamodels;
  /// (process, in-port) -> map from the port metamodel into the product's.
  std::map<std::pair<std::string, std::string>, GraphMorphism> in_maps;
  /// (process, product) -> map from the output metamodel into the product's.
  std::map<std::pair<std::string, std::string>, GraphMorphism> out_maps;

  const GraphMorphism& in_map(const InWire& w) const;
  const GraphMorphism& out_map(const OutWire& w) const;
};

/// Flow validity, acyclicity, per-wire maps (in-wire maps injective), and the
/// arity of every process.
ValidationReport check_definition(const DataflowDefinition& def);

/// Adds idle processes (see normalize_id) with identity semantics.
DataflowDefinition with_idle_processes(const DataflowDefinition& def);

struct TraceEntry {
  int stratum = 0;
  std::string process;
  Instance inner;
  Instance output;
  std::uint64_t hash = 0;  // of the canonical output text
};

struct ExecutionState {
  std::map<std::string, Instance> products;
  std::vector<TraceEntry> trace;

  /// One line per entry: `<stratum>\t<process>\t<hash>`.
  std::string trace_text() const;
};

/// Sorted one-element-per-line rendering used for hashing and golden diffs.
std::string canonical_text(const Instance& i);
std::uint64_t fnv1a(const std::string& text);

Instance read(const ExecutionState& state, const DataflowDefinition& def, const InWire& wire);

/// One process output (or existing product content) and its map into the
/// product metamodel.
struct Contribution {
  Instance data;
  GraphMorphism map;
};

/// Identifies elements of contributions `left` and `right`.
struct Correspondence {
  std::size_t left = 0, right = 0;
  std::vector<std::pair<std::string, std::string>> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
};

/// Pairs every element that two contributions share by id and product type.
std::vector<Correspondence> correspondences_by_id(const std::vector<Contribution>& parts);

/// Colimit of the contributions glued along the correspondences, typed over
/// the product graph. Merged elements keep their id when it is unambiguous
/// and are named `c<k>.<id>` otherwise. Throws when glued elements disagree
/// on type or literal.
Instance merge_instances(const std::vector<Contribution>& parts, const std::vector<Correspondence>& corrs,
                         const GraphPtr& product_graph);

struct MergeResult {
  std::optional<Instance> merged;  // empty when the merge violates the product
  ConformanceReport report;
};

MergeResult write_merge(const std::vector<Contribution>& parts, const std::vector<Correspondence>& corrs,
                        const Metamodel& product);

struct RunOptions {
  const Verdicts* verdicts = nullptr;
  bool parallel = true;
};

struct RunResult {
  ExecutionState state;
  bool ok = true;
  std::string failed;                 // process or product that stopped the run
  ValidationReport errors;            // flow and processing errors
  std::optional<ConformanceReport> conformance;  // set when a merge violated its product
};

RunResult run(const DataflowDefinition& def, const std::map<std::string, Instance>& initial,
              const RunOptions& opts = {});

/// The whole workflow as one process: inputs are the initial products, the
/// inner metamodel is the colimit of the carrier diagram, the output is the
/// unique final product.
ProcessSchema encapsulate(const DataflowDefinition& def);

}  // namespace wfp
