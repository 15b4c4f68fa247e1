#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wfp/error.hpp"

namespace wfp {

struct ProcessPorts {
  std::string name;
  std::vector<std::string> in_ports;
  std::string out_port = "out";
};

/// Work product to process port.
struct InWire {
  std::string wp, process, port;
  bool operator==(const InWire&) const = default;
  auto operator<=>(const InWire&) const = default;
};

/// Process out-port to work product.
struct OutWire {
  std::string process, wp;
  bool operator==(const OutWire&) const = default;
  auto operator<=>(const OutWire&) const = default;
};

struct DependencyFlow {
  std::vector<ProcessPorts> processes;  // sorted by name
  std::set<std::string> work_products;
  std::vector<InWire> in_wires;  // sorted
  std::vector<OutWire> out_wires;  // sorted

  const ProcessPorts* process(const std::string& name) const;
  /// Products not written by any process.
  std::set<std::string> initial_products() const;
  /// Products not read by any process.
  std::set<std::string> final_products() const;
};

std::string wire_label(const InWire& w);
std::string wire_label(const OutWire& w);

struct FlowBuild {
  DependencyFlow flow;
  ValidationReport report;
  bool ok() const { return report.ok(); }
};

/// Validates key constraints (no two wires share both ends) and port
/// multiplicities (each in-port exactly one wire, each out-port at least one).
/// The flow is returned even when the report is not empty.
FlowBuild build_flow(DependencyFlow parts);

struct DerivedRelations {
  std::set<std::pair<std::string, std::string>> ps2ps;
  std::set<std::pair<std::string, std::string>> wp2wp;
};

DerivedRelations derived_relations(const DependencyFlow& f);

struct Acyclicity {
  bool acyclic = true;
  std::vector<std::vector<std::string>> strata;  // by longest-path depth
  std::vector<std::string> cycle;                  // first element repeated at the end
};

Acyclicity check_acyclic(const DependencyFlow& f);

/// True iff the relation has no directed cycle.
bool relation_acyclic(const std::set<std::pair<std::string, std::string>>& rel);

struct IdInsertion {
  std::string process;  // Id.<wp>.<k>
  std::string reads;
  std::string writes;   // <wp>.<k>
};

/// Inserts idle processes so that a product made at stratum k (or given
/// initially, k = -1) is only consumed at stratum k+1. Requires an acyclic
/// flow. Id processes have one in-port `in` and the out-port `out`.
std::pair<DependencyFlow, std::vector<IdInsertion>> normalize_id(const DependencyFlow& f);

}  // namespace wfp
