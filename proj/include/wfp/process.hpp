#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wfp/literal.hpp"
#include "wfp/metamodel.hpp"

namespace wfp {

struct ProcessSchema;

/// Review verdicts keyed by the id of the reviewed execution object.
using Verdicts = std::map<std::string, bool>;

struct ApplyContext {
  const Verdicts* verdicts = nullptr;
};

namespace sem {

/// Inner data = the embedded inputs, nothing added.
struct Identity {};

/// Adds a fixed instance (typed over the inner metamodel). Elements whose id
/// is already present must agree with it.
struct Constant {
  Instance data;
};

/// Adds a `result_edge` link for every pair related by the chain.
struct ComposeLinks {
  std::string result_edge;
  std::vector<std::string> chain;
};

/// Sets `group_attr` on every group to the max of its members' `member_attr`.
struct AttributeMax {
  std::string membership_edge;
  std::string member_attr;
  std::string group_attr;
};

/// For every `subject` object s reached to x by `path_edge`:
/// `out_attr(s) = value_attr(x) < rows[key_attr(x)]`. A missing value or a
/// key without a row yields false.
struct ThresholdCompare {
  std::string subject;
  std::string path_edge;
  std::string value_attr;
  std::string key_attr;
  std::string out_attr;
  std::map<std::int64_t, Rational> rows;
};

/// Sets `attr` on each object of `cls` from the verdict with the object's id.
/// Objects without a verdict get no value.
struct SetValidity {
  std::string cls;
  std::string attr;
};

using HookFn = std::function<Instance(const Instance& embedded, const std::vector<Instance>& inputs,
                                      const ProcessSchema& schema, const ApplyContext& ctx)>;

/// Escape hatch: `fn` if set, otherwise the hook registered under `id`.
struct Custom {
  std::string id;
  HookFn fn;
};

}  // namespace sem

using Semantics =
    std::variant<sem::Identity, sem::Constant, sem::ComposeLinks, sem::AttributeMax, sem::ThresholdCompare,
                 sem::SetValidity, sem::Custom>;

std::string semantics_name(const Semantics& s);

void register_hook(const std::string& id, sem::HookFn fn);

struct InputPort {
  std::string port;
  Metamodel metamodel;
  GraphMorphism injection;  // metamodel.graph -> inner.graph
};

struct OutputPort {
  std::string port;
  Metamodel metamodel;
  GraphMorphism map;  // metamodel.graph -> inner.graph
};

struct ProcessSchema {
  std::string name;
  std::vector<InputPort> inputs;
  Metamodel inner;
  OutputPort output;
  Semantics semantics = sem::Identity{};
};

/// Input port whose injection is the inclusion by ids.
InputPort input_port(const std::string& port, const Metamodel& mm, const Metamodel& inner);
OutputPort output_port(const std::string& port, const Metamodel& mm, const Metamodel& inner);

ValidationReport check_arity(const ProcessSchema& s);

struct Application {
  Instance inner;
  Instance output;
};

/// Embeds the inputs disjointly into the inner metamodel. Data ids are kept
/// unless two inputs use the same id, in which case they become `<port>.<id>`.
Instance embed_inputs(const ProcessSchema& s, const std::vector<Instance>& inputs);

Application apply(const ProcessSchema& s, const std::vector<Instance>& inputs, const ApplyContext& ctx = {});

/// True iff restricting the inner result along every input injection gives
/// back that input up to isomorphism.
bool check_putget(const ProcessSchema& s, const std::vector<Instance>& inputs, const ApplyContext& ctx = {});

/// Source processes: a zero-port process always emits; a process whose only
/// port has the empty metamodel emits only when triggered.
std::optional<Instance> signal_semantics(const ProcessSchema& s, bool triggered, const ApplyContext& ctx = {});

}  // namespace wfp
