// Command-line front end: schedulability checks, schedule/selection dumps,
// single simulations, and parameter sweeps.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "rtc/rtc.hpp"

namespace {

struct ModelFlags {
  std::string name = "rtscts";
  double rho = 2.0;
  double power = 1.0;
  double noise = 0.01;
  double beta = 2.0;
  double kappa = 3.0;

  rtc::InterferenceModel build() const {
    if (name == "prim") return rtc::Prim{rho};
    if (name == "rtscts") return rtc::RtsCts{};
    if (name == "phim") return rtc::Phim{power, noise, beta, kappa};
    throw CLI::ValidationError("--model must be prim, rtscts, or phim");
  }
};

void addModelFlags(CLI::App* cmd, ModelFlags& m) {
  cmd->add_option("--model", m.name, "Interference model: prim|rtscts|phim")
      ->check(CLI::IsMember({"prim", "rtscts", "phim"}));
  cmd->add_option("--rho", m.rho, "PrIM interference range multiplier");
  cmd->add_option("--power", m.power, "PhIM transmission power P");
  cmd->add_option("--noise", m.noise, "PhIM ambient noise N0");
  cmd->add_option("--beta", m.beta, "PhIM SINR threshold beta");
  cmd->add_option("--kappa", m.kappa, "PhIM path-loss exponent kappa");
}

rtc::Network loadTopology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("cannot open topology file " + path);
  return rtc::parseTopology(in);
}

std::vector<rtc::Query> loadQueries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("cannot open query file " + path);
  return rtc::parseQueries(in);
}

std::ostream& openOut(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw CLI::ValidationError("cannot open output file " + path);
  return file;
}

int cmdCheck(const std::string& topoPath, const std::string& queryPath,
             const ModelFlags& mf, double frameT) {
  const rtc::Network net = loadTopology(topoPath);
  const auto queries = loadQueries(queryPath);
  const rtc::InterferenceModel model = mf.build();
  if (queries.empty())
    std::cout << "warning: empty query set; conditions hold vacuously\n";

  const rtc::Verdict nec = rtc::necessaryCondition(net, queries, model);
  std::cout << "necessary: " << (nec.pass ? "PASS" : "FAIL (" + nec.reason + ")")
            << "\n";
  const rtc::Verdict suf = rtc::sufficientCondition(net, queries, model);
  std::cout << "sufficient: "
            << (suf.pass ? "PASS" : "FAIL (" + suf.reason + ")") << "\n";
  const rtc::DelayReport delay = rtc::delayFeasible(net, queries, model, frameT);
  std::cout << "delay (hop radius " << delay.hopRadius << "):";
  if (delay.perQuery.empty()) {
    std::cout << " PASS\n";
  } else {
    std::cout << (delay.allPass() ? " PASS" : " FAIL");
    for (const auto& v : delay.perQuery)
      if (!v.pass)
        std::cout << " query " << v.queryId << " deadline < " << v.bound;
    std::cout << "\n";
  }
  return suf.pass ? 0 : 1;
}

int cmdSchedule(const std::string& topoPath, const std::string& queryPath,
                const ModelFlags& mf, double frameT,
                const std::string& outPath) {
  const rtc::Network net = loadTopology(topoPath);
  const auto queries = loadQueries(queryPath);
  const rtc::InterferenceModel model = mf.build();

  const rtc::Network* routingNet = &net;
  std::optional<rtc::Network> reduced;
  if (const auto* ph = std::get_if<rtc::Phim>(&model)) {
    reduced = rtc::reducedGraph(net, *ph);
    routingNet = &*reduced;
  }
  const auto trees = rtc::buildRoutingTrees(*routingNet, queries);
  const rtc::FrameSchedule frame =
      rtc::buildFrame(net, queries, trees, model, frameT);

  std::ofstream file;
  std::ostream& out = openOut(outPath, file);
  out << "# tree records: queryId child parent\n";
  for (const auto& t : trees) rtc::writeTree(out, t);
  out << "# frame records: color v h node startOffset duration\n";
  rtc::writeFrame(out, frame);
  return 0;
}

int cmdSelect(const std::string& queryPath, const ModelFlags& mf) {
  const auto queries = loadQueries(queryPath);
  const rtc::SelectionResult sel =
      rtc::selectQueries(queries, mf.build());
  std::cout << "selected";
  for (int id : sel.ids) std::cout << " " << id;
  std::cout << "\nweight " << sel.weight << "\n";
  std::cout << "phase " << (sel.fromKnapsack ? "knapsack" : "singleton")
            << "\n";
  return 0;
}

int cmdSimulate(const std::string& topoPath, const std::string& queryPath,
                const ModelFlags& mf, double frameT, double duration,
                std::uint64_t seed, std::size_t bufferLimit, double lossScale,
                bool staggered, const std::string& outPath) {
  const rtc::Network net = loadTopology(topoPath);
  const auto queries = loadQueries(queryPath);
  rtc::SimOptions opt;
  opt.duration = duration;
  opt.seed = seed;
  opt.bufferLimit = bufferLimit;
  opt.lossScale = lossScale;
  opt.staggeredRelease = staggered;
  const rtc::SimResult res =
      rtc::simulate(net, queries, mf.build(), frameT, opt);
  std::cout << rtc::metricsText(res.metrics);
  if (!outPath.empty()) {
    std::ofstream file;
    rtc::writeTrace(openOut(outPath, file), res.trace);
  }
  return 0;
}

int cmdSweep(const std::string& kind, const ModelFlags& mf, double frameT,
             std::uint64_t seed, int seedCount, std::size_t bufferLimit,
             double lossScale, const std::string& outPath) {
  rtc::SimConfig cfg;
  cfg.model = mf.build();
  cfg.frameT = frameT;
  cfg.bufferLimit = bufferLimit;
  cfg.lossScale = lossScale;

  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < seedCount; ++i) seeds.push_back(seed + std::uint64_t(i));

  std::vector<double> values;
  std::vector<rtc::SweepRow> rows;
  if (kind == "size") {
    for (double n = 50.0; n <= 250.0; n += 25.0) values.push_back(n);
    rows = rtc::sweep(cfg, values, seeds,
                      [](rtc::SimConfig& c, double v) { c.nodeCount = int(v); });
  } else if (kind == "sources") {
    for (double s = 10.0; s <= 100.0; s += 10.0) values.push_back(s);
    cfg.nodeCount = 100;
    rows = rtc::sweep(cfg, values, seeds, [](rtc::SimConfig& c, double v) {
      c.sourceSelection = rtc::RandomCount{int(v)};
    });
  } else {
    throw CLI::ValidationError("--sweep must be size or sources");
  }
  std::ofstream file;
  openOut(outPath, file) << rtc::sweepCsv(rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Real-time convergecast scheduling toolkit"};
  app.require_subcommand(1);

  std::string topoPath, queryPath, outPath, sweepKind;
  ModelFlags mf;
  double frameT = 8.0;
  double duration = 1000.0;
  double lossScale = 0.0;
  std::uint64_t seed = 1;
  int seedCount = 10;
  std::size_t bufferLimit = std::numeric_limits<std::size_t>::max();
  bool staggered = false;

  auto* check = app.add_subcommand(
      "check", "Evaluate the schedulability conditions for an instance");
  check->add_option("--topology", topoPath)->required();
  check->add_option("--queries", queryPath)->required();
  check->add_option("--frame-t", frameT, "Color slot duration T");
  addModelFlags(check, mf);

  auto* schedule = app.add_subcommand(
      "schedule", "Emit routing trees and the frame schedule");
  schedule->add_option("--topology", topoPath)->required();
  schedule->add_option("--queries", queryPath)->required();
  schedule->add_option("--frame-t", frameT, "Color slot duration T");
  schedule->add_option("--out", outPath, "Output file (default stdout)");
  addModelFlags(schedule, mf);

  auto* select = app.add_subcommand(
      "select", "Maximum weighted query selection");
  select->add_option("--queries", queryPath)->required();
  addModelFlags(select, mf);

  auto* simulate = app.add_subcommand(
      "simulate", "Run the deterministic event simulator on an instance");
  simulate->add_option("--topology", topoPath)->required();
  simulate->add_option("--queries", queryPath)->required();
  simulate->add_option("--frame-t", frameT, "Color slot duration T");
  simulate->add_option("--duration", duration, "Simulated time span");
  simulate->add_option("--seed", seed, "Loss-model RNG seed");
  simulate->add_option("--buffer-limit", bufferLimit, "Packets per node");
  simulate->add_option("--loss-scale", lossScale,
                       "Per-hop loss probability scale (0 = lossless)");
  simulate->add_flag("--staggered", staggered,
                     "Release queries one at a time, gated on success");
  simulate->add_option("--out", outPath, "Trace output file");
  addModelFlags(simulate, mf);

  auto* sweepCmd = app.add_subcommand(
      "sweep", "Parameter sweep over random scenarios (CSV output)");
  sweepCmd->add_option("--sweep", sweepKind, "size (50..250) or sources (10..100)")
      ->required()
      ->check(CLI::IsMember({"size", "sources"}));
  sweepCmd->add_option("--frame-t", frameT, "Color slot duration T");
  sweepCmd->add_option("--seed", seed, "First seed");
  sweepCmd->add_option("--seeds", seedCount, "Number of seeds per point");
  sweepCmd->add_option("--buffer-limit", bufferLimit, "Packets per node");
  sweepCmd->add_option("--loss-scale", lossScale, "Per-hop loss scale");
  sweepCmd->add_option("--out", outPath, "CSV output file (default stdout)");
  addModelFlags(sweepCmd, mf);

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return cmdCheck(topoPath, queryPath, mf, frameT);
    if (schedule->parsed())
      return cmdSchedule(topoPath, queryPath, mf, frameT, outPath);
    if (select->parsed()) return cmdSelect(queryPath, mf);
    if (simulate->parsed())
      return cmdSimulate(topoPath, queryPath, mf, frameT, duration, seed,
                         bufferLimit, lossScale, staggered, outPath);
    if (sweepCmd->parsed())
      return cmdSweep(sweepKind, mf, frameT, seed, seedCount, bufferLimit,
                      lossScale, outPath);
  } catch (const rtc::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
