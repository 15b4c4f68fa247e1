#pragma once

#include <map>
#include <string>
#include <vector>

#include "wfp/derivation.hpp"
#include "wfp/dsl.hpp"
#include "wfp/exec.hpp"
#include "wfp/weaving.hpp"

namespace wfp::dsl {

struct NamedInstance {
  std::string metamodel;
  Instance instance;
};

struct FlowModel {
  DataflowDefinition def;
  std::map<std::string, Instance> initial;
};

struct AdviceModel {
  Advice advice;
  std::vector<EntryPoint> points;
};

/// Everything declared by a set of documents, resolved and type-checked.
struct Model {
  std::map<std::string, Metamodel> metamodels;  // metamodel and view sections
  std::map<std::string, GraphMorphism> morphisms;
  std::map<std::string, NamedInstance> instances;
  std::map<std::string, ProcessSchema> processes;
  std::map<std::string, FlowModel> flows;
  std::map<std::string, AdviceModel> advices;
  std::map<std::string, DerivationTree> derivations;
};

struct LoadResult {
  Model model;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

/// Resolves references across all documents. Elements that fail to resolve
/// are left out of the model and reported.
LoadResult load(const std::vector<Document>& docs);

/// Reads, parses and loads files; parse diagnostics stop before loading.
LoadResult load_files(const std::vector<std::string>& paths);

Literal parse_literal(const Token& t);

Section to_section(const Metamodel& m);
Section to_section(const std::string& name, const std::string& metamodel, const Instance& i);

}  // namespace wfp::dsl
