#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "rtc/netmodel.hpp"
#include "rtc/queries.hpp"
#include "rtc/routing.hpp"

namespace rtc {

inline long nonnegMod(long x, long m) { return ((x % m) + m) % m; }

/// Algorithm-1 color of a region: (v mod K)*K + (h mod K), with the
/// mathematically nonnegative modulo so the formula extends to all of Z^2.
inline int regionColor(const RegionIndex& g, int k) {
  return int(nonnegMod(g.v, k) * k + nonnegMod(g.h, k));
}

inline std::map<RegionIndex, int> colorRegions(
    const std::set<RegionIndex>& occupied, const InterferenceModel& model) {
  const int k = kFactor(model);
  std::map<RegionIndex, int> colors;
  for (const auto& g : occupied) colors[g] = regionColor(g, k);
  return colors;
}

/// Linear time assignment: each node gets frameT * L(u) / L(region).
/// A region with zero load gets all-zero allotments.
inline std::map<NodeId, double> assignTimes(
    const std::vector<NodeId>& nodesInRegion,
    const std::map<NodeId, double>& relayLoads, double frameT) {
  if (frameT <= 0.0) throw std::invalid_argument("frameT must be positive");
  double regionLoad = 0.0;
  for (NodeId u : nodesInRegion) {
    auto it = relayLoads.find(u);
    if (it != relayLoads.end()) regionLoad += it->second;
  }
  std::map<NodeId, double> out;
  for (NodeId u : nodesInRegion) {
    auto it = relayLoads.find(u);
    const double l = it == relayLoads.end() ? 0.0 : it->second;
    out[u] = regionLoad > 0.0 ? frameT * l / regionLoad : 0.0;
  }
  return out;
}

/// One Algorithm-1 cycle: frame length c2(M)*T, color k active on
/// [k*T, (k+1)*T); inside an active region nodes transmit back to back in
/// ascending id order for their allotted durations.
struct FrameSchedule {
  double frameT = 1.0;
  int colorCount = 4;
  std::map<RegionIndex, int> regionColors;
  std::map<NodeId, double> allotments;
  std::map<RegionIndex, std::vector<NodeId>> regionNodes;  // sorted by id
  std::map<NodeId, RegionIndex> nodeRegion;

  double frameLength() const { return frameT * colorCount; }

  struct Window {
    double start = 0.0;  // offset within the frame
    double end = 0.0;
  };

  /// Node's transmission window as an offset within one frame, or nullopt
  /// for zero allotment.
  std::optional<Window> windowOf(NodeId u) const {
    auto rit = nodeRegion.find(u);
    if (rit == nodeRegion.end()) return std::nullopt;
    auto ait = allotments.find(u);
    if (ait == allotments.end() || ait->second <= 0.0) return std::nullopt;
    double offset = regionColors.at(rit->second) * frameT;
    for (NodeId w : regionNodes.at(rit->second)) {
      if (w == u) break;
      offset += allotments.at(w);
    }
    return Window{offset, offset + ait->second};
  }
};

inline FrameSchedule buildFrame(const Network& net,
                                const std::vector<Query>& queries,
                                const std::vector<RoutingTree>& trees,
                                const InterferenceModel& model,
                                double frameT) {
  if (frameT <= 0.0) throw std::invalid_argument("frameT must be positive");
  FrameSchedule fs;
  fs.frameT = frameT;
  fs.colorCount = int(c2(model));
  const double lambda = interferenceRadius(model, net.txRange());
  const LoadMap loads = relayLoads(net, queries, trees, lambda);

  std::set<RegionIndex> occupied;
  for (const auto& n : net.nodes()) {
    auto it = loads.perNode.find(n.id);
    if (it == loads.perNode.end()) continue;  // zero-load nodes never transmit
    const RegionIndex g = regionOf(n.pos, lambda);
    occupied.insert(g);
    fs.regionNodes[g].push_back(n.id);
    fs.nodeRegion[n.id] = g;
  }
  fs.regionColors = colorRegions(occupied, model);
  for (auto& [g, nodes] : fs.regionNodes) {
    std::sort(nodes.begin(), nodes.end());
    auto times = assignTimes(nodes, loads.perNode, frameT);
    fs.allotments.insert(times.begin(), times.end());
  }
  return fs;
}

/// One in-flight data unit.
struct Packet {
  int queryId = 0;
  long instance = 1;       // period index t, 1-based
  NodeId sourceNode = 0;
  double createdAt = 0.0;  // a_i + (t-1)*p_i
  double deadlineAt = 0.0; // createdAt + d_i
  double chi = 1.0;
  double period = 1.0;
  double release = 0.0;    // a_i, for the current-instance test
};

/// A packet is "current" at time `now` if `now` falls inside the period
/// window in which the packet was produced.
inline bool isCurrentInstance(const Packet& p, double now) {
  return now < p.createdAt + p.period && now >= p.createdAt;
}

/// Strict RM priority order: previous-instance packets first, then by
/// period, FIFO within a query's previous instances; remaining ties by
/// (class, period, queryId, createdAt, instance, source).
inline bool rmHigherPriority(const Packet& a, const Packet& b, double now) {
  const int ca = isCurrentInstance(a, now) ? 1 : 0;
  const int cb = isCurrentInstance(b, now) ? 1 : 0;
  return std::tie(ca, a.period, a.queryId, a.createdAt, a.instance,
                  a.sourceNode) < std::tie(cb, b.period, b.queryId,
                                           b.createdAt, b.instance,
                                           b.sourceNode);
}

/// Per-node transmission plan: the RM-ordered buffer of pending packets.
struct TransmissionPlan {
  NodeId node = 0;
  std::vector<Packet> buffer;

  void sortBuffer(double now) {
    std::stable_sort(buffer.begin(), buffer.end(),
                     [now](const Packet& a, const Packet& b) {
                       return rmHigherPriority(a, b, now);
                     });
  }
};

/// Index of the highest-priority buffered packet whose chi fits in the
/// remaining allotment; nullopt when idle. Packets are never split across
/// windows.
inline std::optional<size_t> nextTransmission(const TransmissionPlan& plan,
                                              double now,
                                              double remainingAllotment) {
  std::optional<size_t> best;
  for (size_t i = 0; i < plan.buffer.size(); ++i) {
    if (plan.buffer[i].chi > remainingAllotment + 1e-12) continue;
    if (!best || rmHigherPriority(plan.buffer[i], plan.buffer[*best], now))
      best = i;
  }
  return best;
}

}  // namespace rtc
