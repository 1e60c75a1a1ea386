#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "rtc/netmodel.hpp"
#include "rtc/queries.hpp"
#include "rtc/routing.hpp"
#include "rtc/scenario.hpp"
#include "rtc/scheduler.hpp"
#include "rtc/sim.hpp"

namespace rtc {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line(line) {}
  int line;
};

// Topology file:
//   sink <id> txrange <range>
//   <id> <x> <y>          (one node per line; '#' starts a comment)
inline Network parseTopology(std::istream& in) {
  std::string line;
  int lineNo = 0;
  NodeId sink = 0;
  double txRange = 0.0;
  bool haveHeader = false;
  std::vector<Node> nodes;
  while (std::getline(in, line)) {
    ++lineNo;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (!haveHeader) {
      std::string kw;
      if (first != "sink" || !(ls >> sink >> kw >> txRange) || kw != "txrange")
        throw ParseError("expected header 'sink <id> txrange <range>'", lineNo);
      haveHeader = true;
      continue;
    }
    Node n;
    try {
      n.id = std::stoi(first);
    } catch (const std::exception&) {
      throw ParseError("bad node id '" + first + "'", lineNo);
    }
    if (!(ls >> n.pos.x >> n.pos.y))
      throw ParseError("expected '<id> <x> <y>'", lineNo);
    nodes.push_back(n);
  }
  if (!haveHeader) throw ParseError("missing topology header", 1);
  return Network(std::move(nodes), sink, txRange);
}

inline void writeTopology(std::ostream& out, const Network& net) {
  out << "sink " << net.sink() << " txrange " << net.txRange() << "\n";
  for (const auto& n : net.nodes())
    out << n.id << " " << n.pos.x << " " << n.pos.y << "\n";
}

// Query file, one record per line:
//   <id> <chi> <period> <release> <deadline> <weight> <source>...
inline std::vector<Query> parseQueries(std::istream& in) {
  std::vector<Query> queries;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    Query q;
    if (!(ls >> q.id)) continue;  // blank
    if (!(ls >> q.chi >> q.period >> q.release >> q.deadline >> q.weight))
      throw ParseError(
          "expected '<id> <chi> <period> <release> <deadline> <weight> <sources...>'",
          lineNo);
    NodeId s;
    while (ls >> s) q.sources.push_back(s);
    try {
      q.validate();
    } catch (const std::exception& e) {
      throw ParseError(e.what(), lineNo);
    }
    queries.push_back(q);
  }
  return queries;
}

inline void writeQueries(std::ostream& out, const std::vector<Query>& queries) {
  for (const auto& q : queries) {
    out << q.id << " " << q.chi << " " << q.period << " " << q.release << " "
        << q.deadline << " " << q.weight;
    for (NodeId s : q.sources) out << " " << s;
    out << "\n";
  }
}

/// Parent-list records: queryId child parent.
inline void writeTree(std::ostream& out, const RoutingTree& tree) {
  for (const auto& [child, parent] : tree.parent)
    out << tree.queryId << " " << child << " " << parent << "\n";
}

/// Frame records: color v h node startOffset duration.
inline void writeFrame(std::ostream& out, const FrameSchedule& fs) {
  out << std::setprecision(12);
  for (const auto& [region, color] : fs.regionColors) {
    for (NodeId u : fs.regionNodes.at(region)) {
      const auto w = fs.windowOf(u);
      if (!w) continue;
      out << color << " " << region.v << " " << region.h << " " << u << " "
          << w->start << " " << (w->end - w->start) << "\n";
    }
  }
}

/// Trace records: start end sender receiver queryId instance source ok.
inline void writeTrace(std::ostream& out, const std::vector<TxInterval>& trace) {
  out << std::setprecision(12);
  for (const auto& tx : trace)
    out << tx.start << " " << tx.end << " " << tx.sender << " " << tx.receiver
        << " " << tx.queryId << " " << tx.instance << " " << tx.source << " "
        << (tx.delivered ? 1 : 0) << "\n";
}

inline std::string metricsText(const Metrics& m) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(6);
  out << "rounds " << m.rounds.size() << "\n";
  out << "success_ratio " << m.ratio() << "\n";
  out << "buffer_drops " << m.bufferDrops << "\n";
  out << "max_latency " << m.maxLatency << "\n";
  for (const auto& [id, sr] : m.perQuery)
    out << "query " << id << " " << sr.first << "/" << sr.second << "\n";
  return out.str();
}

inline std::string sweepCsv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << std::setprecision(12);
  out << "parameter,seed,success_ratio,drops,offered_load,rounds\n";
  for (const auto& r : rows)
    out << r.parameter << "," << r.seed << "," << r.successRatio << ","
        << r.drops << "," << r.offeredLoad << "," << r.rounds << "\n";
  return out.str();
}

}  // namespace rtc
