#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "rtc/netmodel.hpp"
#include "rtc/queries.hpp"
#include "rtc/routing.hpp"
#include "rtc/scheduler.hpp"

namespace rtc {

inline constexpr double kTimeEps = 1e-9;

/// One transmission on the medium; failed attempts still occupy the air.
struct TxInterval {
  double start = 0.0;
  double end = 0.0;
  NodeId sender = 0;
  NodeId receiver = 0;
  int queryId = 0;
  long instance = 0;
  NodeId source = 0;
  bool delivered = true;
};

/// Outcome of one period instance of one query.
struct RoundRecord {
  int queryId = 0;
  long instance = 0;
  double releasedAt = 0.0;
  double deadlineAt = 0.0;
  std::set<NodeId> deliveredSources;
  size_t expectedSources = 0;
  bool success = false;
};

inline double successRatio(const std::vector<RoundRecord>& records) {
  if (records.empty()) return 1.0;
  size_t ok = 0;
  for (const auto& r : records) ok += r.success ? 1 : 0;
  return double(ok) / double(records.size());
}

struct Metrics {
  std::vector<RoundRecord> rounds;
  size_t bufferDrops = 0;
  double maxLatency = 0.0;
  std::map<int, std::pair<size_t, size_t>> perQuery;  // id -> (ok, total)

  double ratio() const { return successRatio(rounds); }
};

struct SimResult {
  Metrics metrics;
  std::vector<TxInterval> trace;
};

struct SimOptions {
  double duration = 0.0;
  size_t bufferLimit = std::numeric_limits<size_t>::max();
  double lossScale = 0.0;       // per-tx failure prob = dist/txRange * scale
  bool staggeredRelease = false;
  std::uint64_t seed = 0;       // loss RNG only; unused when lossScale == 0
  bool recordTrace = true;
};

namespace detail {

enum class EvKind : int { TxEnd = 0, Release = 1, SliceStart = 2, FrameTick = 3, Deadline = 4 };

struct Event {
  double time = 0.0;
  EvKind kind = EvKind::TxEnd;
  int a = 0;  // node id or query index
  long b = 0; // instance, or slice-end encoding handled separately
  double x = 0.0;  // slice end / auxiliary
  std::uint64_t seq = 0;
};

struct EventLater {
  bool operator()(const Event& l, const Event& r) const {
    if (l.time != r.time) return l.time > r.time;
    if (l.kind != r.kind) return int(l.kind) > int(r.kind);
    if (l.a != r.a) return l.a > r.a;
    return l.seq > r.seq;
  }
};

}  // namespace detail

/// Deterministic event-driven execution of the frame schedule: per-period
/// packet generation at sources, RM packet selection inside each node's
/// allotted window, hop-by-hop forwarding along the per-query trees,
/// buffer-limited queues, per-round success records.
class Simulation {
 public:
  Simulation(const Network& net, std::vector<Query> queries,
             std::vector<RoutingTree> trees, FrameSchedule frame,
             SimOptions options)
      : net_(net),
        queries_(std::move(queries)),
        trees_(std::move(trees)),
        frame_(std::move(frame)),
        opt_(options),
        rng_(options.seed) {
    if (opt_.duration <= 0.0)
      throw std::invalid_argument("duration must be positive");
    if (opt_.bufferLimit < 1)
      throw std::invalid_argument("bufferLimit must be >= 1");
    for (const auto& q : queries_) q.validate();
    for (size_t i = 0; i < queries_.size(); ++i) {
      if (trees_[i].queryId != queries_[i].id)
        throw std::invalid_argument("trees must align with queries by index");
      queryIndex_[queries_[i].id] = i;
    }
  }

  SimResult run() {
    scheduleFrame(0);
    if (frame_.frameLength() <= opt_.duration)
      push(frame_.frameLength(), detail::EvKind::FrameTick, 1, 1, 0.0);

    if (opt_.staggeredRelease) {
      if (!queries_.empty()) activateQuery(0, queries_[0].release);
    } else {
      for (size_t i = 0; i < queries_.size(); ++i)
        activateQuery(i, queries_[i].release);
    }

    while (!events_.empty() && !stopped_) {
      detail::Event ev = events_.top();
      events_.pop();
      if (ev.time > opt_.duration + kTimeEps) break;
      now_ = ev.time;
      switch (ev.kind) {
        case detail::EvKind::TxEnd: onTxEnd(ev.a); break;
        case detail::EvKind::Release: onRelease(size_t(ev.a), ev.b); break;
        case detail::EvKind::SliceStart: onSliceStart(ev.a, ev.x); break;
        case detail::EvKind::FrameTick: {
          // Tick b fires at b * frameLength and lays out frame b's slices.
          scheduleFrame(ev.b);
          const double next = double(ev.b + 1) * frame_.frameLength();
          if (next <= opt_.duration)
            push(next, detail::EvKind::FrameTick, 1, ev.b + 1, 0.0);
          break;
        }
        case detail::EvKind::Deadline: onDeadline(size_t(ev.a), ev.b); break;
      }
    }

    SimResult result;
    result.metrics.rounds = std::move(rounds_);
    result.metrics.bufferDrops = drops_;
    result.metrics.maxLatency = maxLatency_;
    for (const auto& r : result.metrics.rounds) {
      auto& pq = result.metrics.perQuery[r.queryId];
      pq.second += 1;
      pq.first += r.success ? 1 : 0;
    }
    result.trace = std::move(trace_);
    std::sort(result.trace.begin(), result.trace.end(),
              [](const TxInterval& a, const TxInterval& b) {
                return std::tie(a.start, a.sender) < std::tie(b.start, b.sender);
              });
    return result;
  }

 private:
  struct NodeState {
    TransmissionPlan plan;
    double sliceEnd = -1.0;
    bool busy = false;
  };

  void push(double t, detail::EvKind k, int a, long b, double x) {
    events_.push({t, k, a, b, x, seq_++});
  }

  void scheduleFrame(long f) {
    const double base = double(f) * frame_.frameLength();
    if (base > opt_.duration) return;
    for (const auto& [u, allot] : frame_.allotments) {
      if (allot <= 0.0) continue;
      const auto w = frame_.windowOf(u);
      if (!w) continue;
      push(base + w->start, detail::EvKind::SliceStart, u, f, base + w->end);
    }
  }

  void activateQuery(size_t qi, double releaseAt) {
    active_.insert(qi);
    releaseAt_[qi] = releaseAt;
    push(releaseAt, detail::EvKind::Release, int(qi), 1, 0.0);
  }

  void onRelease(size_t qi, long t) {
    const Query& q = queries_[qi];
    const double created = releaseAt_.at(qi) + double(t - 1) * q.period;
    const double deadline = created + q.deadline;
    if (deadline <= opt_.duration + kTimeEps)
      push(deadline, detail::EvKind::Deadline, int(qi), t, 0.0);
    std::vector<NodeId> sources(q.sources.begin(), q.sources.end());
    std::sort(sources.begin(), sources.end());
    for (NodeId s : sources) {
      Packet p;
      p.queryId = q.id;
      p.instance = t;
      p.sourceNode = s;
      p.createdAt = created;
      p.deadlineAt = deadline;
      p.chi = q.chi;
      p.period = q.period;
      p.release = releaseAt_.at(qi);
      if (s == net_.sink()) {
        recordDelivery(p, created);  // source co-located with the sink
        continue;
      }
      insertBuffer(s, p);
      attemptTransmit(s);
    }
    const double nextCreated = created + q.period;
    if (nextCreated < opt_.duration) push(nextCreated, detail::EvKind::Release, int(qi), t + 1, 0.0);
  }

  void onSliceStart(NodeId u, double end) {
    auto& st = state(u);
    st.sliceEnd = end;
    attemptTransmit(u);
  }

  void attemptTransmit(NodeId u) {
    auto& st = state(u);
    if (st.busy || now_ >= st.sliceEnd - kTimeEps) return;
    auto pick = nextTransmission(st.plan, now_, st.sliceEnd - now_);
    if (!pick) return;
    inflight_[u] = st.plan.buffer[*pick];
    st.plan.buffer.erase(st.plan.buffer.begin() + long(*pick));
    st.busy = true;
    push(now_ + inflight_[u].chi, detail::EvKind::TxEnd, u, 0, 0.0);
  }

  void onTxEnd(NodeId u) {
    auto& st = state(u);
    Packet pkt = inflight_.at(u);
    inflight_.erase(u);
    st.busy = false;

    const RoutingTree& tree = trees_[queryIndex_.at(pkt.queryId)];
    const NodeId parent = tree.parent.at(u);
    const bool ok = lossRoll(u, parent);
    if (opt_.recordTrace)
      trace_.push_back({now_ - pkt.chi, now_, u, parent, pkt.queryId,
                        pkt.instance, pkt.sourceNode, ok});
    if (!ok) {
      // Failed transmission: packet stays at u for a retry.
      st.plan.buffer.push_back(pkt);
    } else if (parent == net_.sink()) {
      recordDelivery(pkt, now_);
    } else {
      insertBuffer(parent, pkt);
      attemptTransmit(parent);
    }
    attemptTransmit(u);
  }

  bool lossRoll(NodeId from, NodeId to) {
    if (opt_.lossScale <= 0.0) return true;
    const double q =
        dist(net_.pos(from), net_.pos(to)) / net_.txRange() * opt_.lossScale;
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) >= q;
  }

  void insertBuffer(NodeId u, const Packet& pkt) {
    auto& buf = state(u).plan.buffer;
    buf.push_back(pkt);
    if (buf.size() > opt_.bufferLimit) {
      size_t worst = 0;
      for (size_t i = 1; i < buf.size(); ++i)
        if (rmHigherPriority(buf[worst], buf[i], now_)) worst = i;
      buf.erase(buf.begin() + long(worst));
      ++drops_;
    }
  }

  void recordDelivery(const Packet& pkt, double at) {
    auto& entry = deliveries_[{pkt.queryId, pkt.instance}];
    entry.insert(pkt.sourceNode);
    maxLatency_ = std::max(maxLatency_, at - pkt.createdAt);
  }

  void onDeadline(size_t qi, long t) {
    const Query& q = queries_[qi];
    RoundRecord rec;
    rec.queryId = q.id;
    rec.instance = t;
    rec.releasedAt = releaseAt_.at(qi) + double(t - 1) * q.period;
    rec.deadlineAt = rec.releasedAt + q.deadline;
    rec.expectedSources = q.sources.size();
    auto it = deliveries_.find({q.id, t});
    if (it != deliveries_.end()) rec.deliveredSources = it->second;
    rec.success = rec.deliveredSources.size() == rec.expectedSources;
    latestOutcome_[qi] = rec.success;
    rounds_.push_back(rec);

    if (opt_.staggeredRelease) {
      bool allSatisfied = active_.size() == latestOutcome_.size();
      bool anySatisfied = false;
      for (const auto& [idx, ok] : latestOutcome_) {
        allSatisfied = allSatisfied && ok;
        anySatisfied = anySatisfied || ok;
      }
      if (allSatisfied && active_.size() < queries_.size()) {
        activateQuery(active_.size(), now_);
      } else if (!anySatisfied && latestOutcome_.size() == active_.size()) {
        stopped_ = true;  // none of the existing queries is satisfied
      }
    }
  }

  NodeState& state(NodeId u) {
    auto it = states_.find(u);
    if (it == states_.end()) {
      it = states_.emplace(u, NodeState{}).first;
      it->second.plan.node = u;
    }
    return it->second;
  }

  const Network& net_;
  std::vector<Query> queries_;
  std::vector<RoutingTree> trees_;
  FrameSchedule frame_;
  SimOptions opt_;
  std::mt19937_64 rng_;

  std::priority_queue<detail::Event, std::vector<detail::Event>,
                      detail::EventLater>
      events_;
  std::uint64_t seq_ = 0;
  double now_ = 0.0;
  bool stopped_ = false;

  std::map<int, size_t> queryIndex_;  // query id -> index in queries_
  std::map<NodeId, NodeState> states_;
  std::map<NodeId, Packet> inflight_;
  std::map<std::pair<int, long>, std::set<NodeId>> deliveries_;
  std::map<size_t, double> releaseAt_;
  std::map<size_t, bool> latestOutcome_;
  std::set<size_t> active_;
  std::vector<RoundRecord> rounds_;
  std::vector<TxInterval> trace_;
  size_t drops_ = 0;
  double maxLatency_ = 0.0;
};

/// Runs the full stack on an explicit instance: routing trees (reduced
/// graph under PhIM), Algorithm-1 frame, then the event loop.
inline SimResult simulate(const Network& net, const std::vector<Query>& queries,
                          const InterferenceModel& model, double frameT,
                          const SimOptions& options,
                          double shrinkFactor = kPhimLinkShrink) {
  const Network* routingNet = &net;
  std::optional<Network> reduced;
  if (const auto* ph = std::get_if<Phim>(&model)) {
    reduced = reducedGraph(net, *ph, shrinkFactor);
    routingNet = &*reduced;
  }
  auto trees = buildRoutingTrees(*routingNet, queries);
  auto frame = buildFrame(net, queries, trees, model, frameT);
  Simulation sim(net, queries, trees, frame, options);
  return sim.run();
}

struct Violation {
  double time = 0.0;
  NodeId senderA = 0;
  NodeId senderB = 0;  // == senderA for cumulative-SINR violations
  std::string what;
};

/// Empty iff every concurrent transmitter set in the trace is pairwise
/// conflict-free and, under PhIM, every active link's cumulative SINR
/// stays at or above beta.
inline std::vector<Violation> interferenceAudit(
    const std::vector<TxInterval>& trace, const Network& net,
    const InterferenceModel& model) {
  std::vector<Violation> out;
  std::vector<double> bounds;
  bounds.reserve(trace.size() * 2);
  for (const auto& tx : trace) {
    bounds.push_back(tx.start);
    bounds.push_back(tx.end);
  }
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end(),
                           [](double a, double b) { return std::abs(a - b) < kTimeEps; }),
               bounds.end());
  std::set<std::pair<NodeId, NodeId>> seenPairs;
  std::set<NodeId> seenCumulative;
  const auto* phim = std::get_if<Phim>(&model);
  for (size_t i = 0; i + 1 < bounds.size(); ++i) {
    const double t1 = bounds[i], t2 = bounds[i + 1];
    std::vector<const TxInterval*> act;
    for (const auto& tx : trace)
      if (tx.start <= t1 + kTimeEps && tx.end >= t2 - kTimeEps)
        act.push_back(&tx);
    if (act.size() < 2) continue;
    for (size_t a = 0; a < act.size(); ++a) {
      for (size_t b = a + 1; b < act.size(); ++b) {
        if (conflicts(net, {act[a]->sender, act[a]->receiver},
                      {act[b]->sender, act[b]->receiver}, model)) {
          auto key = std::minmax(act[a]->sender, act[b]->sender);
          if (seenPairs.insert({key.first, key.second}).second)
            out.push_back({t1, key.first, key.second, "pairwise conflict"});
        }
      }
    }
    if (phim) {
      std::vector<NodeId> senders;
      for (const auto* tx : act) senders.push_back(tx->sender);
      for (const auto* tx : act) {
        const double s = sinr(net, senders, tx->sender, tx->receiver, *phim);
        if (s < phim->beta && seenCumulative.insert(tx->sender).second)
          out.push_back({t1, tx->sender, tx->sender,
                         "cumulative SINR " + std::to_string(s) + " < beta"});
      }
    }
  }
  return out;
}

/// Almost-tight example for the sufficient condition: single-source queries
/// whose only route to the sink is an explicit chain of exactly c3(M)
/// relay nodes inside one interference-aware region. The figure's
/// geometric serpentine is enforced combinatorially by the link set, so
/// the region's initial load is zero while its relay load is exactly
/// c3(M) * sum(|S_i| chi_i / p_i).
struct TightnessFixture {
  Network net;
  std::vector<Query> queries;
  RegionIndex region;  // the loaded interference-aware region
  double lambda = 0.0;
};

inline TightnessFixture buildTightnessFixture(const InterferenceModel& model,
                                              int numQueries = 3) {
  validateModel(model);
  double txRange = 1.0;
  if (const auto* ph = std::get_if<Phim>(&model))
    txRange = phimMaxRadius(*ph) / 3.0;
  const double lambda = interferenceRadius(model, txRange);
  const long chain = c3(model);

  std::vector<Node> nodes;
  LinkSet links;
  const NodeId sink = 0;
  // Chain nodes cluster near the region's origin corner so both the sink
  // (left of x=0) and the bridge node t (below y=0) stay within txRange.
  const double span = 0.3 * std::min(txRange, lambda);
  const long grid = long(std::ceil(std::sqrt(double(chain))));
  const double step = span / double(grid + 1);
  nodes.push_back({sink, {-0.25 * txRange, step}});
  for (long i = 0; i < chain; ++i) {
    const long col = i / grid, row = i % grid;
    const double y = (col % 2 == 0) ? double(row + 1) * step
                                    : double(grid - row) * step;
    nodes.push_back({int(i + 1), {double(col + 1) * step, y}});
    links.insert(makeLink(int(i), int(i + 1)));
  }
  const NodeId bridge = int(chain + 1);
  nodes.push_back({bridge, {nodes.back().pos.x, -0.2 * txRange}});
  links.insert(makeLink(int(chain), bridge));
  for (int j = 0; j < numQueries; ++j) {
    const NodeId s = bridge + 1 + j;
    nodes.push_back({s, {nodes.back().pos.x, nodes.back().pos.y - 0.5 * txRange}});
    links.insert(makeLink(s - 1, s));
  }

  TightnessFixture fx{Network(std::move(nodes), sink, txRange, std::move(links)),
                      {}, {0, 0}, lambda};
  for (int j = 0; j < numQueries; ++j) {
    Query q;
    q.id = j;
    q.sources = {bridge + 1 + j};
    q.chi = 1.0;
    q.period = 50.0 + 25.0 * j;
    q.deadline = q.period;
    q.weight = 1.0;
    fx.queries.push_back(q);
  }
  return fx;
}

}  // namespace rtc
