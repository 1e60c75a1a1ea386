#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <variant>
#include <vector>

#include "rtc/netmodel.hpp"
#include "rtc/queries.hpp"
#include "rtc/sim.hpp"

namespace rtc {

struct RandomCount {
  int count = 10;  // sources per query
};
struct FixedFraction {
  double fraction = 0.5;  // sources per query as a fraction of the network
};
using SourceSelection = std::variant<RandomCount, FixedFraction>;

/// Scenario generator + simulator configuration.
struct SimConfig {
  std::uint64_t seed = 1;
  double areaW = 400.0;
  double areaH = 400.0;
  int nodeCount = 100;
  double txRange = 50.0;
  InterferenceModel model = RtsCts{};
  double frameT = 8.0;
  int maxQueries = 20;
  size_t bufferLimit = std::numeric_limits<size_t>::max();
  SourceSelection sourceSelection = RandomCount{10};
  double duration = 0.0;  // 0: derived from query periods
  double lossScale = 0.0;
  bool staggeredRelease = true;
  double shrinkFactor = kPhimLinkShrink;
  // Query synthesis: chi fixed, period uniform in [periodMin, periodMax],
  // deadline = deadlineFactor * c2 * frameT * 2R (the end-to-end delay bound).
  double chi = 0.05;
  double periodMin = 20.0;
  double periodMax = 40.0;
  double deadlineFactor = 1.0;

  void validate() const {
    if (areaW <= 0.0 || areaH <= 0.0 || txRange <= 0.0)
      throw std::invalid_argument("positive dimensions required");
    if (nodeCount < 2) throw std::invalid_argument("nodeCount >= 2 required");
    if (bufferLimit < 1) throw std::invalid_argument("bufferLimit >= 1");
    if (maxQueries < 0) throw std::invalid_argument("maxQueries >= 0");
    if (frameT <= 0.0) throw std::invalid_argument("frameT must be positive");
    if (chi <= 0.0 || periodMin <= 0.0 || periodMax < periodMin)
      throw std::invalid_argument("bad query distribution parameters");
    validateModel(model);
  }
};

/// Uniform node placement in the area, node 0 as the sink, rejection
/// sampled until the communication graph is connected. Sparse settings
/// (e.g. 50 nodes at range 50 in a 400x400 area) are essentially never
/// connected under pure uniform placement, so after `maxAttempts` failures
/// the generator falls back to connected-by-construction placement: each
/// node is redrawn uniformly until it lands within range of an already
/// placed node. Deterministic given `rng`.
inline Network randomConnectedNetwork(int nodeCount, double areaW,
                                      double areaH, double txRange,
                                      std::mt19937_64& rng,
                                      int maxAttempts = 200) {
  std::uniform_real_distribution<double> ux(0.0, areaW), uy(0.0, areaH);
  for (int attempt = 0; attempt < maxAttempts; ++attempt) {
    std::vector<Node> nodes;
    nodes.reserve(size_t(nodeCount));
    for (int i = 0; i < nodeCount; ++i) nodes.push_back({i, {ux(rng), uy(rng)}});
    try {
      return Network(std::move(nodes), 0, txRange);
    } catch (const NetworkError&) {
      continue;  // disconnected draw
    }
  }
  std::vector<Node> nodes{{0, {ux(rng), uy(rng)}}};
  nodes.reserve(size_t(nodeCount));
  for (int i = 1; i < nodeCount; ++i) {
    for (;;) {
      const Point p{ux(rng), uy(rng)};
      bool attached = false;
      for (const auto& n : nodes)
        if (dist(n.pos, p) <= txRange) { attached = true; break; }
      if (attached) {
        nodes.push_back({i, p});
        break;
      }
    }
  }
  return Network(std::move(nodes), 0, txRange);
}

inline std::vector<Query> synthesizeQueries(const Network& net,
                                            const SimConfig& cfg,
                                            std::mt19937_64& rng) {
  std::vector<NodeId> pool;
  for (const auto& n : net.nodes())
    if (n.id != net.sink()) pool.push_back(n.id);

  int perQuery = 0;
  if (const auto* rc = std::get_if<RandomCount>(&cfg.sourceSelection))
    perQuery = rc->count;
  else
    perQuery = std::max(1, int(std::llround(
                   std::get<FixedFraction>(cfg.sourceSelection).fraction *
                   double(net.nodes().size()))));
  perQuery = std::min<int>(perQuery, int(pool.size()));

  const double delayBound =
      double(c2(cfg.model)) * cfg.frameT * 2.0 * net.hopRadius();
  std::uniform_real_distribution<double> up(cfg.periodMin, cfg.periodMax);
  std::vector<Query> queries;
  for (int i = 0; i < cfg.maxQueries; ++i) {
    Query q;
    q.id = i;
    std::vector<NodeId> shuffled = pool;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    q.sources.assign(shuffled.begin(), shuffled.begin() + perQuery);
    std::sort(q.sources.begin(), q.sources.end());
    q.chi = cfg.chi;
    q.period = up(rng);
    q.release = 0.0;
    q.deadline = std::max(cfg.deadlineFactor * delayBound, q.period);
    q.weight = 1.0;
    queries.push_back(q);
  }
  return queries;
}

/// Full scenario run: seeded random topology, synthesized queries,
/// routing + frame schedule + event loop. Deterministic given the config.
inline SimResult runScenario(const SimConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  const Network net = randomConnectedNetwork(cfg.nodeCount, cfg.areaW,
                                             cfg.areaH, cfg.txRange, rng);
  const std::vector<Query> queries = synthesizeQueries(net, cfg, rng);

  SimOptions opt;
  opt.bufferLimit = cfg.bufferLimit;
  opt.lossScale = cfg.lossScale;
  opt.staggeredRelease = cfg.staggeredRelease;
  opt.seed = cfg.seed ^ 0x9e3779b97f4a7c15ull;
  double maxDeadline = 0.0, maxPeriod = 0.0;
  for (const auto& q : queries) {
    maxDeadline = std::max(maxDeadline, q.deadline);
    maxPeriod = std::max(maxPeriod, q.period);
  }
  opt.duration = cfg.duration > 0.0
                     ? cfg.duration
                     : double(cfg.maxQueries) * (maxPeriod * 4.0) + maxDeadline;
  return simulate(net, queries, cfg.model, cfg.frameT, opt, cfg.shrinkFactor);
}

struct SweepRow {
  double parameter = 0.0;
  std::uint64_t seed = 0;
  double successRatio = 1.0;
  size_t drops = 0;
  double offeredLoad = 0.0;  // sum |S_i| chi_i / p_i
  size_t rounds = 0;
};

/// One row per (parameter value, seed); caller varies cfg via `apply`.
template <typename Apply>
std::vector<SweepRow> sweep(const SimConfig& base,
                            const std::vector<double>& values,
                            const std::vector<std::uint64_t>& seeds,
                            Apply&& apply) {
  std::vector<SweepRow> rows;
  for (double v : values) {
    for (std::uint64_t s : seeds) {
      SimConfig cfg = base;
      cfg.seed = s;
      apply(cfg, v);
      // Offered load is a property of the generated instance; regenerate
      // the same way runScenario does.
      std::mt19937_64 rng(cfg.seed);
      const Network net = randomConnectedNetwork(cfg.nodeCount, cfg.areaW,
                                                 cfg.areaH, cfg.txRange, rng);
      const auto queries = synthesizeQueries(net, cfg, rng);
      const SimResult res = runScenario(cfg);
      rows.push_back({v, s, res.metrics.ratio(), res.metrics.bufferDrops,
                      totalSinkLoad(queries), res.metrics.rounds.size()});
    }
  }
  return rows;
}

}  // namespace rtc
