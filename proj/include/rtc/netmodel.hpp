#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rtc/geometry.hpp"

namespace rtc {

using NodeId = int;

struct Node {
  NodeId id = 0;
  Point pos;
};

/// Protocol interference model: a sender interferes with every node within
/// rho * txRange of it, except its intended receiver. rho > 1.
struct Prim {
  double rho = 2.0;
};

/// RTS/CTS model: while a link is active, nodes within the interference
/// range of either endpoint must stay silent. The interference range
/// defaults to the transmission range when unset.
struct RtsCts {
  std::optional<double> interferenceRange;
};

/// Physical (SINR) model. kappa > 2 required.
struct Phim {
  double power = 1.0;
  double noise = 0.01;
  double beta = 2.0;
  double kappa = 3.0;
};

using InterferenceModel = std::variant<Prim, RtsCts, Phim>;

/// Link lengths under PhIM are assumed to be at most this fraction of the
/// maximum transmission radius; routing uses reducedGraph with the same
/// factor so the coloring bound in kFactor() matches the links it protects.
inline constexpr double kPhimLinkShrink = 0.7;

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void validateModel(const InterferenceModel& model) {
  if (const auto* p = std::get_if<Prim>(&model)) {
    if (p->rho <= 1.0) throw ModelError("PrIM requires rho > 1");
  } else if (const auto* r = std::get_if<RtsCts>(&model)) {
    if (r->interferenceRange && *r->interferenceRange <= 0.0)
      throw ModelError("RTS/CTS interference range must be positive");
  } else {
    const auto& ph = std::get<Phim>(model);
    if (ph.power <= 0.0 || ph.noise <= 0.0 || ph.beta <= 0.0)
      throw ModelError("PhIM requires positive power, noise and beta");
    if (ph.kappa < 2.0) throw ModelError("PhIM requires kappa >= 2");
  }
}

/// Maximum transmission radius under PhIM: the largest distance at which a
/// lone transmission still meets the SINR threshold.
inline double phimMaxRadius(const Phim& m) {
  return std::pow(m.power / (m.noise * m.beta), 1.0 / m.kappa);
}

using Link = std::pair<NodeId, NodeId>;  // normalized: first < second

inline Link makeLink(NodeId a, NodeId b) {
  return a < b ? Link{a, b} : Link{b, a};
}

using LinkSet = std::set<Link>;

/// Link between every pair of nodes within txRange of each other.
/// Throws NetworkError naming the components if the result is disconnected.
LinkSet buildLinks(const std::vector<Node>& nodes, double txRange);

/// Static geometric network. Immutable after construction.
class Network {
 public:
  /// Derives links from positions via buildLinks.
  Network(std::vector<Node> nodes, NodeId sink, double txRange)
      : Network(std::move(nodes), sink, txRange, std::nullopt) {}

  /// Explicit link set; each link must span at most txRange and the
  /// resulting graph must be connected.
  Network(std::vector<Node> nodes, NodeId sink, double txRange,
          std::optional<LinkSet> links)
      : nodes_(std::move(nodes)), sink_(sink), txRange_(txRange) {
    if (txRange_ <= 0.0) throw NetworkError("txRange must be positive");
    for (size_t i = 0; i < nodes_.size(); ++i) {
      const auto& n = nodes_[i];
      if (!std::isfinite(n.pos.x) || !std::isfinite(n.pos.y))
        throw NetworkError("non-finite node position");
      if (!index_.emplace(n.id, i).second)
        throw NetworkError("duplicate node id " + std::to_string(n.id));
    }
    if (!index_.count(sink_)) throw NetworkError("sink not among nodes");
    if (links) {
      links_ = std::move(*links);
      for (const auto& [a, b] : links_) {
        if (!index_.count(a) || !index_.count(b))
          throw NetworkError("link endpoint not among nodes");
        if (dist(pos(a), pos(b)) > txRange_)
          throw NetworkError("link longer than txRange");
      }
      checkConnected();
    } else {
      links_ = buildLinks(nodes_, txRange_);
    }
    for (const auto& [a, b] : links_) {
      adj_[a].push_back(b);
      adj_[b].push_back(a);
    }
    for (auto& [id, nb] : adj_) std::sort(nb.begin(), nb.end());
  }

  const std::vector<Node>& nodes() const { return nodes_; }
  NodeId sink() const { return sink_; }
  double txRange() const { return txRange_; }
  const LinkSet& links() const { return links_; }

  bool hasNode(NodeId id) const { return index_.count(id) != 0; }

  const Point& pos(NodeId id) const {
    auto it = index_.find(id);
    if (it == index_.end())
      throw NetworkError("unknown node id " + std::to_string(id));
    return nodes_[it->second].pos;
  }

  const std::vector<NodeId>& neighbors(NodeId id) const {
    static const std::vector<NodeId> kNone;
    auto it = adj_.find(id);
    return it == adj_.end() ? kNone : it->second;
  }

  bool linked(NodeId a, NodeId b) const { return links_.count(makeLink(a, b)) != 0; }

  /// Hop distance from `from` to every node (BFS, lowest-id first).
  std::map<NodeId, int> hopDistances(NodeId from) const {
    std::map<NodeId, int> d;
    d[from] = 0;
    std::queue<NodeId> q;
    q.push(from);
    while (!q.empty()) {
      NodeId u = q.front();
      q.pop();
      for (NodeId w : neighbors(u)) {
        if (!d.count(w)) {
          d[w] = d[u] + 1;
          q.push(w);
        }
      }
    }
    return d;
  }

  /// Max hop distance from the sink to any node.
  int hopRadius() const {
    auto d = hopDistances(sink_);
    int r = 0;
    for (const auto& [id, h] : d) r = std::max(r, h);
    return r;
  }

 private:
  void checkConnected() const {
    std::map<NodeId, std::vector<NodeId>> adj;
    for (const auto& [a, b] : links_) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    std::set<NodeId> seen{sink_};
    std::queue<NodeId> q;
    q.push(sink_);
    while (!q.empty()) {
      NodeId u = q.front();
      q.pop();
      for (NodeId w : adj[u])
        if (seen.insert(w).second) q.push(w);
    }
    if (seen.size() != nodes_.size()) {
      std::string msg = "graph disconnected; unreachable from sink:";
      int listed = 0;
      for (const auto& n : nodes_)
        if (!seen.count(n.id) && listed++ < 8)
          msg += " " + std::to_string(n.id);
      throw NetworkError(msg);
    }
  }

  std::vector<Node> nodes_;
  NodeId sink_;
  double txRange_;
  LinkSet links_;
  std::map<NodeId, size_t> index_;
  std::map<NodeId, std::vector<NodeId>> adj_;
};

inline LinkSet buildLinks(const std::vector<Node>& nodes, double txRange) {
  if (nodes.empty()) throw NetworkError("need at least one node");
  LinkSet links;
  for (size_t i = 0; i < nodes.size(); ++i)
    for (size_t j = i + 1; j < nodes.size(); ++j)
      if (dist(nodes[i].pos, nodes[j].pos) <= txRange)
        links.insert(makeLink(nodes[i].id, nodes[j].id));
  // Connectivity check mirrors Network's, but names components here so the
  // error is useful before a Network exists.
  std::map<NodeId, std::vector<NodeId>> adj;
  for (const auto& n : nodes) adj[n.id];
  for (const auto& [a, b] : links) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::set<NodeId> seen;
  int components = 0;
  for (const auto& n : nodes) {
    if (seen.count(n.id)) continue;
    ++components;
    std::queue<NodeId> q;
    q.push(n.id);
    seen.insert(n.id);
    while (!q.empty()) {
      NodeId u = q.front();
      q.pop();
      for (NodeId w : adj[u])
        if (seen.insert(w).second) q.push(w);
    }
  }
  if (components > 1)
    throw NetworkError("communication graph has " +
                       std::to_string(components) + " components");
  return links;
}

/// Index of the half-open grid cell [v*lambda,(v+1)*lambda) x [h*lambda,...).
struct RegionIndex {
  long v = 0;
  long h = 0;
  auto operator<=>(const RegionIndex&) const = default;
};

inline RegionIndex regionOf(const Point& p, double lambda) {
  if (lambda <= 0.0) throw ModelError("lambda must be positive");
  return {static_cast<long>(std::floor(p.x / lambda)),
          static_cast<long>(std::floor(p.y / lambda))};
}

/// Interference-aware radius lambda(M): the largest sender-to-sender
/// distance at which two links can still interfere.
///   PrIM:    txRange * (1 + rho). A receiver sits within txRange of its own
///            sender, so senders farther apart than rho*txRange + txRange
///            cannot place either receiver inside the other's interference
///            range.
///   RTS/CTS: 2*txRange + interference range (endpoints are within txRange
///            of their senders on both sides).
///   PhIM:    the maximum transmission radius r = (P/(N0*beta))^(1/kappa).
inline double interferenceRadius(const InterferenceModel& model,
                                 double txRange) {
  validateModel(model);
  if (const auto* p = std::get_if<Prim>(&model))
    return txRange * (1.0 + p->rho);
  if (const auto* r = std::get_if<RtsCts>(&model))
    return 2.0 * txRange + r->interferenceRange.value_or(txRange);
  return phimMaxRadius(std::get<Phim>(model));
}

/// SINR at `receiver` for the transmission from `sender`, with every other
/// node in `transmitters` acting as an interferer. Path loss d^-kappa.
inline double sinr(const Network& net, const std::vector<NodeId>& transmitters,
                   NodeId sender, NodeId receiver, const Phim& model) {
  const double ds = dist(net.pos(sender), net.pos(receiver));
  if (ds <= 0.0) throw ModelError("zero sender-receiver distance");
  double interference = 0.0;
  for (NodeId k : transmitters) {
    if (k == sender) continue;
    const double dk = dist(net.pos(k), net.pos(receiver));
    if (dk <= 0.0) throw ModelError("interferer co-located with receiver");
    interference += model.power * std::pow(dk, -model.kappa);
  }
  return model.power * std::pow(ds, -model.kappa) /
         (model.noise + interference);
}

struct Tx {
  NodeId sender;
  NodeId receiver;
};

/// Whether two simultaneous transmissions interfere under `model`.
/// PhIM is a pairwise check; cumulative SINR over whole concurrent sets is
/// validated separately by the simulator's audit.
inline bool conflicts(const Network& net, const Tx& a, const Tx& b,
                      const InterferenceModel& model) {
  validateModel(model);
  if (const auto* p = std::get_if<Prim>(&model)) {
    const double range = p->rho * net.txRange();
    const bool aHitsB = b.receiver != a.receiver &&
                        dist(net.pos(a.sender), net.pos(b.receiver)) <= range;
    const bool bHitsA = a.receiver != b.receiver &&
                        dist(net.pos(b.sender), net.pos(a.receiver)) <= range;
    return aHitsB || bHitsA;
  }
  if (const auto* r = std::get_if<RtsCts>(&model)) {
    const double range = r->interferenceRange.value_or(net.txRange());
    const NodeId ea[2] = {a.sender, a.receiver};
    const NodeId eb[2] = {b.sender, b.receiver};
    for (NodeId u : ea)
      for (NodeId w : eb)
        if (u != w && dist(net.pos(u), net.pos(w)) <= range) return true;
    return false;
  }
  const auto& ph = std::get<Phim>(model);
  const std::vector<NodeId> both{a.sender, b.sender};
  return sinr(net, both, a.sender, a.receiver, ph) < ph.beta ||
         sinr(net, both, b.sender, b.receiver, ph) < ph.beta;
}

/// c1(M): max number of nodes inside one interference-aware region that can
/// transmit concurrently. Floored because it counts nodes.
inline long c1(const InterferenceModel& model) {
  validateModel(model);
  if (const auto* p = std::get_if<Prim>(&model)) {
    const double r = p->rho;
    return static_cast<long>(std::floor(16.0 * r * r / ((r - 1.0) * (r - 1.0))));
  }
  if (std::holds_alternative<RtsCts>(model)) return 36;
  const auto& ph = std::get<Phim>(model);
  return static_cast<long>(
      std::floor(std::pow(2.0, ph.kappa) * ph.power / (ph.noise * ph.beta * ph.beta)));
}

/// Smallest color-grid separation K such that same-color active regions
/// (one transmitter each) cannot violate any link's SINR.
///
/// Pairwise models: K = 2 suffices. Same-color cells differ by a multiple
/// of K in each index, so two same-color senders are strictly farther apart
/// than (K-1)*lambda >= lambda, beyond which no interference is possible.
///
/// PhIM: links are at most kPhimLinkShrink * r long (reduced graph), so the
/// victim's signal is at least P*(s*r)^-kappa. A same-color sender at cell
/// offset (a*K, b*K) is at least D(a,b)*lambda from the victim receiver,
/// D(a,b) = hypot(max(0,|a|K-2), max(0,|b|K-2)) (one cell of sender slack,
/// one lambda of receiver slack). Requiring
///   sum over (a,b) != 0 of D(a,b)^-kappa  <=  (s^-kappa - 1) / beta
/// guarantees cumulative SINR >= beta for every active link.
inline int kFactor(const InterferenceModel& model) {
  validateModel(model);
  if (!std::holds_alternative<Phim>(model)) return 2;
  const auto& ph = std::get<Phim>(model);
  // The over-all-cells interference sum only converges for kappa > 2.
  if (ph.kappa <= 2.0)
    throw ModelError("PhIM region coloring requires kappa > 2");
  const double budget =
      (std::pow(kPhimLinkShrink, -ph.kappa) - 1.0) / ph.beta;
  for (int k = 2; k <= 64; ++k) {
    double sum = 0.0;
    bool feasible = true;
    bool decided = false;
    // Sum by Chebyshev rings of same-color cell offsets (8m cells on ring
    // m, min distance ~ m*K); convergent for kappa > 2. Accept once the
    // geometric tail bound cannot push the sum past the budget; reject as
    // soon as the partial sum exceeds it.
    for (long m = 1; !decided; ++m) {
      double ring = 0.0;
      bool touching = false;
      auto add = [&](long a, long b) {
        const double dx = std::max(0.0, double(std::labs(a) * k - 2));
        const double dy = std::max(0.0, double(std::labs(b) * k - 2));
        const double d = std::hypot(dx, dy);
        if (d <= 0.0) {
          touching = true;
          return;
        }
        ring += std::pow(d, -ph.kappa);
      };
      for (long a = -m; a <= m && !touching; ++a) {
        add(a, -m);
        add(a, m);
      }
      for (long b = -m + 1; b <= m - 1 && !touching; ++b) {
        add(-m, b);
        add(m, b);
      }
      if (touching) {  // a same-color cell can abut the victim's; K fails
        feasible = false;
        break;
      }
      sum += ring;
      if (sum > budget) {
        feasible = false;
        break;
      }
      if (m >= 2) {
        // ring_j <= 8j*(jK-2)^-kappa <= 8*(K/2)^-kappa * j^(1-kappa) for
        // j >= 2, so the tail past m is at most the integral bound below.
        const double tail = 8.0 * std::pow(double(k) / 2.0, -ph.kappa) *
                            std::pow(double(m), 2.0 - ph.kappa) /
                            (ph.kappa - 2.0);
        if (sum + tail <= budget) decided = true;
        if (m > 1000000) { feasible = false; break; }
      }
    }
    if (feasible && decided) return k;
  }
  throw ModelError("no feasible color separation K <= 64 for PhIM parameters");
}

/// Chromatic number of the region coloring: K(M)^2; 4 under PrIM/RTS-CTS.
inline long c2(const InterferenceModel& model) {
  const long k = kFactor(model);
  return k * k;
}

/// c3(M): max CDS size inside one interference-aware region, plus one.
inline long c3(const InterferenceModel& model) {
  validateModel(model);
  if (const auto* p = std::get_if<Prim>(&model)) {
    const double s = p->rho + 4.0;
    return static_cast<long>(std::floor(8.0 * s * s));
  }
  return 200;
}

}  // namespace rtc
