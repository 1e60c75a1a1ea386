#pragma once

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "rtc/netmodel.hpp"

namespace rtc {

/// A periodic data-collection query: every source emits one data unit per
/// period, to reach the sink within `deadline` of the instance release.
struct Query {
  int id = 0;
  std::vector<NodeId> sources;
  double chi = 1.0;      // per-data-unit transmission time
  double period = 1.0;
  double release = 0.0;  // first instance release time
  double deadline = 1.0; // relative end-to-end deadline
  double weight = 1.0;

  void validate() const {
    if (sources.empty()) throw std::invalid_argument("query needs sources");
    if (chi <= 0.0 || period <= 0.0 || deadline <= 0.0 || weight <= 0.0)
      throw std::invalid_argument("chi, period, deadline, weight must be positive");
    if (release < 0.0) throw std::invalid_argument("release must be >= 0");
  }

  /// |S_i| * chi / p: the load this query puts on the sink.
  double sinkLoad() const { return double(sources.size()) * chi / period; }
};

inline double totalSinkLoad(const std::vector<Query>& queries) {
  double s = 0.0;
  for (const auto& q : queries) s += q.sinkLoad();
  return s;
}

inline bool isSource(const Query& q, NodeId u) {
  for (NodeId s : q.sources)
    if (s == u) return true;
  return false;
}

/// Sum of chi/p over queries for which `node` is a source.
inline double initialLoadNode(NodeId node, const std::vector<Query>& queries) {
  double load = 0.0;
  for (const auto& q : queries)
    if (isSource(q, node)) load += q.chi / q.period;
  return load;
}

/// Sum of initialLoadNode over all nodes located in `region`.
inline double initialLoadRegion(const RegionIndex& region,
                                const std::vector<Query>& queries,
                                const Network& net, double lambda) {
  double load = 0.0;
  for (const auto& n : net.nodes())
    if (regionOf(n.pos, lambda) == region)
      load += initialLoadNode(n.id, queries);
  return load;
}

/// Per-node and per-region initial load, sparse over non-empty cells.
struct LoadMap {
  std::map<NodeId, double> perNode;
  std::map<RegionIndex, double> perRegion;
};

inline LoadMap initialLoads(const std::vector<Query>& queries,
                            const Network& net, double lambda) {
  LoadMap m;
  for (const auto& n : net.nodes()) {
    const double l = initialLoadNode(n.id, queries);
    if (l > 0.0) {
      m.perNode[n.id] = l;
      m.perRegion[regionOf(n.pos, lambda)] += l;
    }
  }
  return m;
}

struct Verdict {
  bool pass = true;
  std::string reason;  // violated clause, empty on pass
  double value = 0.0;  // the violating (or checked) quantity

  explicit operator bool() const { return pass; }
};

/// Necessary admission condition: every region's initial load <= c1(M) and
/// the sink load sum <= 1.
inline Verdict necessaryCondition(const Network& net,
                                  const std::vector<Query>& queries,
                                  const InterferenceModel& model) {
  const double lambda = interferenceRadius(model, net.txRange());
  const double cap = double(c1(model));
  const LoadMap loads = initialLoads(queries, net, lambda);
  for (const auto& [region, load] : loads.perRegion) {
    if (load > cap) {
      Verdict v;
      v.pass = false;
      v.value = load;
      v.reason = "region (" + std::to_string(region.v) + "," +
                 std::to_string(region.h) + ") initial load " +
                 std::to_string(load) + " > c1 " + std::to_string(cap);
      return v;
    }
  }
  const double sink = totalSinkLoad(queries);
  if (sink > 1.0) {
    Verdict v;
    v.pass = false;
    v.value = sink;
    v.reason = "sink load " + std::to_string(sink) + " > 1";
    return v;
  }
  return {true, "", sink};
}

/// Sufficient admission condition: total sink load <= 0.69 / (c2 * c3).
inline Verdict sufficientCondition(const Network& net,
                                   const std::vector<Query>& queries,
                                   const InterferenceModel& model) {
  (void)net;
  const double threshold = 0.69 / (double(c2(model)) * double(c3(model)));
  const double sink = totalSinkLoad(queries);
  if (sink > threshold) {
    Verdict v;
    v.pass = false;
    v.value = sink;
    v.reason = "total load " + std::to_string(sink) + " > 0.69/(c2*c3) = " +
               std::to_string(threshold);
    return v;
  }
  return {true, "", sink};
}

struct DelayVerdict {
  int queryId = 0;
  bool pass = true;
  double bound = 0.0;  // c2 * T * 2R
};

struct DelayReport {
  int hopRadius = 0;
  std::vector<DelayVerdict> perQuery;

  bool allPass() const {
    for (const auto& v : perQuery)
      if (!v.pass) return false;
    return true;
  }
};

/// Delay feasibility: d_i >= c2(M) * T * 2R, with R the hop eccentricity of
/// the sink in G (data flows to the sink; hop count bounds frame traversals).
inline DelayReport delayFeasible(const Network& net,
                                 const std::vector<Query>& queries,
                                 const InterferenceModel& model,
                                 double frameT) {
  if (frameT <= 0.0) throw std::invalid_argument("frameT must be positive");
  DelayReport report;
  report.hopRadius = net.hopRadius();
  const double bound = double(c2(model)) * frameT * 2.0 * report.hopRadius;
  for (const auto& q : queries)
    report.perQuery.push_back({q.id, q.deadline >= bound, bound});
  return report;
}

/// Liu-Layland bound n * (2^(1/n) - 1); tends to ln 2 ~ 0.69.
inline double rmUtilizationBound(int n) {
  if (n < 1) throw std::invalid_argument("n >= 1 required");
  return double(n) * (std::pow(2.0, 1.0 / double(n)) - 1.0);
}

}  // namespace rtc
