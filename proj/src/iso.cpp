#include "wfp/iso.hpp"

#include <algorithm>
#include <tuple>

namespace wfp {

namespace {

// Graph with every node and edge reduced to a colour string.
struct Coloured {
  std::vector<std::string> ids;
  std::vector<std::string> colour;
  std::map<std::string, std::size_t> index;
  // (src, tgt, colour) -> multiplicity
  std::map<std::tuple<std::size_t, std::size_t, std::string>, int> edges;
  std::vector<std::string> signature;  // colour + degree profile, used for pruning
};

Coloured colour(const Graph& g, const std::map<std::string, std::string>& node_colour,
                const std::map<std::string, std::string>& edge_colour) {
  Coloured c;
  for (const auto& [id, _] : g.nodes()) {
    c.index.emplace(id, c.ids.size());
    c.ids.push_back(id);
    c.colour.push_back(node_colour.at(id));
  }
  std::vector<std::vector<std::string>> out(c.ids.size()), in(c.ids.size());
  for (const auto& [id, e] : g.edges()) {
    const std::size_t s = c.index.at(e.src), t = c.index.at(e.tgt);
    const std::string& col = edge_colour.at(id);
    ++c.edges[{s, t, col}];
    out[s].push_back(col);
    in[t].push_back(col);
  }
  for (std::size_t k = 0; k < c.ids.size(); ++k) {
    std::sort(out[k].begin(), out[k].end());
    std::sort(in[k].begin(), in[k].end());
    std::string sig = c.colour[k] + "|";
    for (const auto& x : out[k]) sig += x + ",";
    sig += "|";
    for (const auto& x : in[k]) sig += x + ",";
    c.signature.push_back(std::move(sig));
  }
  return c;
}

bool edges_match(const Coloured& a, const Coloured& b, const std::vector<std::size_t>& map) {
  for (const auto& [key, n] : a.edges) {
    const auto& [s, t, col] = key;
    auto it = b.edges.find({map[s], map[t], col});
    if (it == b.edges.end() || it->second != n) return false;
  }
  return true;
}

// Backtracking search; partial maps are checked against edges among already
// assigned nodes.
bool extend(const Coloured& a, const Coloured& b, const std::vector<std::size_t>& order,
            const std::vector<std::vector<std::size_t>>& candidates, std::size_t depth,
            std::vector<std::size_t>& map, std::vector<bool>& used, std::vector<bool>& assigned) {
  if (depth == order.size()) return edges_match(a, b, map);
  const std::size_t x = order[depth];
  for (std::size_t y : candidates[x]) {
    if (used[y]) continue;
    map[x] = y;
    assigned[x] = true;
    bool ok = true;
    for (const auto& [key, n] : a.edges) {
      const auto& [s, t, col] = key;
      if ((s != x && t != x) || !assigned[s] || !assigned[t]) continue;
      auto it = b.edges.find({map[s], map[t], col});
      if (it == b.edges.end() || it->second != n) {
        ok = false;
        break;
      }
    }
    if (ok) {
      used[y] = true;
      if (extend(a, b, order, candidates, depth + 1, map, used, assigned)) return true;
      used[y] = false;
    }
    assigned[x] = false;
  }
  return false;
}

bool coloured_iso(const Coloured& a, const Coloured& b) {
  if (a.ids.size() != b.ids.size()) return false;
  std::size_t ea = 0, eb = 0;
  for (const auto& [_, n] : a.edges) ea += n;
  for (const auto& [_, n] : b.edges) eb += n;
  if (ea != eb) return false;
  {
    auto sa = a.signature, sb = b.signature;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) return false;
  }
  // Identical ids with identical colours is the common case.
  std::vector<std::size_t> map(a.ids.size());
  bool same_ids = true;
  for (std::size_t k = 0; k < a.ids.size() && same_ids; ++k) {
    auto it = b.index.find(a.ids[k]);
    if (it == b.index.end() || b.signature[it->second] != a.signature[k])
      same_ids = false;
    else
      map[k] = it->second;
  }
  if (same_ids && edges_match(a, b, map)) return true;

  std::vector<std::vector<std::size_t>> candidates(a.ids.size());
  for (std::size_t x = 0; x < a.ids.size(); ++x)
    for (std::size_t y = 0; y < b.ids.size(); ++y)
      if (a.signature[x] == b.signature[y]) candidates[x].push_back(y);
  std::vector<std::size_t> order(a.ids.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t p, std::size_t q) { return candidates[p].size() < candidates[q].size(); });
  std::vector<bool> used(b.ids.size(), false), assigned(a.ids.size(), false);
  return extend(a, b, order, candidates, 0, map, used, assigned);
}

}  // namespace

bool isomorphic(const Graph& a, const Graph& b) {
  std::map<std::string, std::string> nca, eca, ncb, ecb;
  for (const auto& [id, n] : a.nodes()) nca.emplace(id, std::string(to_string(n.kind)));
  for (const auto& [id, e] : a.edges()) eca.emplace(id, std::string(to_string(e.kind)));
  for (const auto& [id, n] : b.nodes()) ncb.emplace(id, std::string(to_string(n.kind)));
  for (const auto& [id, e] : b.edges()) ecb.emplace(id, std::string(to_string(e.kind)));
  return coloured_iso(colour(a, nca, eca), colour(b, ncb, ecb));
}

bool isomorphic(const Instance& a, const Instance& b) {
  if (!same_graph(a.type_graph(), b.type_graph())) return false;
  auto colours = [](const Instance& i) {
    std::map<std::string, std::string> nc, ec;
    for (const auto& [id, _] : i.data->nodes()) {
      std::string c = i.type_of(id);
      if (auto it = i.values.find(id); it != i.values.end()) c += "=" + to_text(it->second);
      nc.emplace(id, std::move(c));
    }
    for (const auto& [id, _] : i.data->edges()) ec.emplace(id, i.typing.edge(id));
    return colour(*i.data, nc, ec);
  };
  return coloured_iso(colours(a), colours(b));
}

}  // namespace wfp
