#pragma once

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <vector>

#include "rtc/netmodel.hpp"
#include "rtc/queries.hpp"

namespace rtc {

/// Parent-pointer tree rooted at the sink. queryId < 0 marks the full
/// spanning tree before pruning.
struct RoutingTree {
  int queryId = -1;
  NodeId root = 0;
  std::map<NodeId, NodeId> parent;  // child -> parent; root has no entry
  std::set<NodeId> members;         // includes root

  bool contains(NodeId u) const { return members.count(u) != 0; }

  /// Path from u to the root, inclusive.
  std::vector<NodeId> pathToRoot(NodeId u) const {
    std::vector<NodeId> path{u};
    while (u != root) {
      auto it = parent.find(u);
      if (it == parent.end())
        throw std::logic_error("node has no path to root");
      u = it->second;
      path.push_back(u);
    }
    return path;
  }

  int depth() const {
    int d = 0;
    for (NodeId u : members)
      d = std::max(d, int(pathToRoot(u).size()) - 1);
    return d;
  }

  std::map<NodeId, std::vector<NodeId>> children() const {
    std::map<NodeId, std::vector<NodeId>> ch;
    for (const auto& [c, p] : parent) ch[p].push_back(c);
    for (auto& [p, cs] : ch) std::sort(cs.begin(), cs.end());
    return ch;
  }
};

struct Cds {
  std::set<NodeId> dominators;
  std::set<NodeId> connectors;

  std::set<NodeId> all() const {
    std::set<NodeId> s = dominators;
    s.insert(connectors.begin(), connectors.end());
    return s;
  }

  bool contains(NodeId u) const {
    return dominators.count(u) || connectors.count(u);
  }
};

namespace detail {

inline bool setConnected(const Network& net, const std::set<NodeId>& s) {
  if (s.empty()) return true;
  std::set<NodeId> seen{*s.begin()};
  std::queue<NodeId> q;
  q.push(*s.begin());
  while (!q.empty()) {
    NodeId u = q.front();
    q.pop();
    for (NodeId w : net.neighbors(u))
      if (s.count(w) && seen.insert(w).second) q.push(w);
  }
  return seen.size() == s.size();
}

inline bool setDominates(const Network& net, const std::set<NodeId>& doms) {
  for (const auto& n : net.nodes()) {
    if (doms.count(n.id)) continue;
    bool covered = false;
    for (NodeId w : net.neighbors(n.id))
      if (doms.count(w)) { covered = true; break; }
    if (!covered) return false;
  }
  return true;
}

}  // namespace detail

/// Connected dominating set: greedy maximal independent set in
/// (BFS-layer-from-sink, id) order, connected with shortest-path connectors,
/// then pruned of redundant members in descending id order. Deterministic.
inline Cds buildCds(const Network& net) {
  const auto layer = net.hopDistances(net.sink());
  if (layer.size() != net.nodes().size())
    throw NetworkError("buildCds: graph disconnected");

  std::vector<NodeId> order;
  for (const auto& n : net.nodes()) order.push_back(n.id);
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    const int la = layer.at(a), lb = layer.at(b);
    return la != lb ? la < lb : a < b;
  });

  Cds cds;
  for (NodeId u : order) {
    bool blocked = false;
    for (NodeId w : net.neighbors(u))
      if (cds.dominators.count(w)) { blocked = true; break; }
    if (!blocked) cds.dominators.insert(u);
  }

  // Connect dominators: grow the component reachable from the BFS-first
  // dominator, attaching the nearest unconnected dominator via the interior
  // of a shortest path (BFS with lowest-id tie-breaking).
  std::set<NodeId> inCds = cds.dominators;
  auto connectedPart = [&]() {
    NodeId seed = *std::find_if(order.begin(), order.end(), [&](NodeId u) {
      return cds.dominators.count(u) != 0;
    });
    std::set<NodeId> seen{seed};
    std::queue<NodeId> q;
    q.push(seed);
    while (!q.empty()) {
      NodeId u = q.front();
      q.pop();
      for (NodeId w : net.neighbors(u))
        if (inCds.count(w) && seen.insert(w).second) q.push(w);
    }
    return seen;
  };
  while (true) {
    const std::set<NodeId> comp = connectedPart();
    std::vector<NodeId> missing;
    for (NodeId d : cds.dominators)
      if (!comp.count(d)) missing.push_back(d);
    if (missing.empty()) break;
    // BFS from the component to the closest missing dominator.
    std::map<NodeId, NodeId> pred;
    std::queue<NodeId> q;
    for (NodeId u : comp) {
      pred[u] = u;
      q.push(u);
    }
    NodeId hit = -1;
    while (!q.empty() && hit < 0) {
      NodeId u = q.front();
      q.pop();
      for (NodeId w : net.neighbors(u)) {
        if (pred.count(w)) continue;
        pred[w] = u;
        if (std::binary_search(missing.begin(), missing.end(), w)) {
          hit = w;
          break;
        }
        q.push(w);
      }
    }
    if (hit < 0) throw NetworkError("buildCds: cannot connect dominators");
    for (NodeId u = pred.at(hit); pred.at(u) != u; u = pred.at(u)) {
      cds.connectors.insert(u);
      inCds.insert(u);
    }
  }

  // Drop members whose removal keeps the set connected and dominating
  // (domination judged against the whole set: a node kept only as a
  // connector still covers its neighbors).
  std::vector<NodeId> byIdDesc(inCds.begin(), inCds.end());
  std::sort(byIdDesc.rbegin(), byIdDesc.rend());
  for (NodeId u : byIdDesc) {
    std::set<NodeId> rest = cds.all();
    rest.erase(u);
    if (rest.empty()) continue;
    if (!detail::setConnected(net, rest)) continue;
    if (!detail::setDominates(net, rest)) continue;
    cds.dominators.erase(u);
    cds.connectors.erase(u);
  }

  // Promote connectors that outside nodes now rely on, so that every node is
  // in or adjacent to a dominator.
  const std::set<NodeId> members = cds.all();
  for (const auto& n : net.nodes()) {
    if (members.count(n.id)) continue;
    bool covered = false;
    for (NodeId w : net.neighbors(n.id))
      if (cds.dominators.count(w)) { covered = true; break; }
    if (covered) continue;
    for (NodeId w : net.neighbors(n.id)) {  // ascending id
      if (cds.connectors.count(w)) {
        cds.connectors.erase(w);
        cds.dominators.insert(w);
        break;
      }
    }
  }
  return cds;
}

/// Spanning tree of G rooted at the sink: BFS from the sink over the
/// CDS-plus-sink induced subgraph orients the backbone (parent = lowest-id
/// predecessor); every other node hangs as a leaf off its lowest-id
/// neighboring dominator.
inline RoutingTree buildSpanningTree(const Network& net, const Cds& cds) {
  RoutingTree tree;
  tree.queryId = -1;
  tree.root = net.sink();
  tree.members.insert(tree.root);

  std::set<NodeId> backbone = cds.all();
  backbone.insert(net.sink());

  std::map<NodeId, int> level{{net.sink(), 0}};
  std::queue<NodeId> q;
  q.push(net.sink());
  while (!q.empty()) {
    NodeId u = q.front();
    q.pop();
    for (NodeId w : net.neighbors(u)) {  // ascending id
      if (!backbone.count(w) || level.count(w)) continue;
      level[w] = level[u] + 1;
      tree.parent[w] = u;
      tree.members.insert(w);
      q.push(w);
    }
  }
  if (tree.members.size() != backbone.size())
    throw NetworkError("CDS backbone not connected to sink");

  for (const auto& n : net.nodes()) {
    if (tree.members.count(n.id)) continue;
    NodeId best = -1;
    for (NodeId w : net.neighbors(n.id)) {
      if (cds.dominators.count(w)) { best = w; break; }  // lowest id
    }
    if (best < 0) throw NetworkError("node " + std::to_string(n.id) +
                                     " has no neighboring dominator");
    tree.parent[n.id] = best;
    tree.members.insert(n.id);
  }
  return tree;
}

/// Keep node u iff the subtree of the spanning tree rooted at u contains a
/// source of the query; the sink always stays.
inline RoutingTree pruneTree(const RoutingTree& spanning, const Query& query) {
  RoutingTree pruned;
  pruned.queryId = query.id;
  pruned.root = spanning.root;
  pruned.members.insert(spanning.root);
  for (NodeId s : query.sources) {
    if (!spanning.contains(s))
      throw std::invalid_argument("source " + std::to_string(s) +
                                  " not in spanning tree");
    // Every node on a source's path to the root has that source in its
    // subtree, and only such nodes survive.
    for (NodeId u : spanning.pathToRoot(s)) {
      if (pruned.members.count(u)) break;
      pruned.members.insert(u);
      pruned.parent[u] = spanning.parent.at(u);
    }
  }
  return pruned;
}

/// PhIM routing graph: same nodes, links restricted to
/// shrinkFactor * maximum transmission radius.
inline Network reducedGraph(const Network& net, const Phim& model,
                            double shrinkFactor = kPhimLinkShrink) {
  if (shrinkFactor <= 0.0 || shrinkFactor > 1.0)
    throw std::invalid_argument("shrinkFactor must be in (0, 1]");
  const double maxLen = shrinkFactor * phimMaxRadius(model);
  LinkSet kept;
  for (const auto& [a, b] : net.links())
    if (dist(net.pos(a), net.pos(b)) <= maxLen) kept.insert({a, b});
  // Network's constructor reports the critical cut if this disconnects.
  return Network(net.nodes(), net.sink(), net.txRange(), std::move(kept));
}

/// Sum of chi/p over queries whose routing tree contains `node`.
inline double relayLoadNode(NodeId node, const std::vector<Query>& queries,
                            const std::vector<RoutingTree>& trees) {
  double load = 0.0;
  for (const auto& q : queries) {
    for (const auto& t : trees) {
      if (t.queryId == q.id && t.contains(node)) {
        load += q.chi / q.period;
        break;
      }
    }
  }
  return load;
}

/// Per-node and per-region relay load, sparse over non-empty cells.
inline LoadMap relayLoads(const Network& net, const std::vector<Query>& queries,
                          const std::vector<RoutingTree>& trees,
                          double lambda) {
  LoadMap m;
  for (const auto& n : net.nodes()) {
    const double l = relayLoadNode(n.id, queries, trees);
    if (l > 0.0) {
      m.perNode[n.id] = l;
      m.perRegion[regionOf(n.pos, lambda)] += l;
    }
  }
  return m;
}

/// Pruned tree for every query over the CDS spanning tree of `net`.
inline std::vector<RoutingTree> buildRoutingTrees(
    const Network& net, const std::vector<Query>& queries) {
  const Cds cds = buildCds(net);
  const RoutingTree spanning = buildSpanningTree(net, cds);
  std::vector<RoutingTree> trees;
  trees.reserve(queries.size());
  for (const auto& q : queries) trees.push_back(pruneTree(spanning, q));
  return trees;
}

}  // namespace rtc
