#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "rtc/netmodel.hpp"
#include "rtc/queries.hpp"

namespace rtc {

struct KnapsackItem {
  int queryId = 0;
  double size = 0.0;    // |S_i| * chi_i / p_i
  double weight = 0.0;  // w_i
};

inline std::vector<KnapsackItem> knapsackItems(
    const std::vector<Query>& queries) {
  std::vector<KnapsackItem> items;
  items.reserve(queries.size());
  for (const auto& q : queries)
    items.push_back({q.id, q.sinkLoad(), q.weight});
  return items;
}

namespace detail {

struct KsState {
  const std::vector<KnapsackItem>* items;  // sorted by density desc
  double capacity;
  double bestWeight = 0.0;
  std::vector<int> bestIds;  // sorted ascending
  std::vector<int> chosen;
};

inline double fractionalBound(const KsState& s, size_t from, double size,
                              double weight) {
  double cap = s.capacity - size;
  double bound = weight;
  for (size_t i = from; i < s.items->size() && cap > 0.0; ++i) {
    const auto& it = (*s.items)[i];
    if (it.size <= cap) {
      cap -= it.size;
      bound += it.weight;
    } else {
      bound += it.weight * cap / it.size;
      cap = 0.0;
    }
  }
  return bound;
}

inline void ksDfs(KsState& s, size_t i, double size, double weight) {
  if (i == s.items->size()) {
    std::vector<int> ids = s.chosen;
    std::sort(ids.begin(), ids.end());
    if (weight > s.bestWeight + 1e-12 ||
        (std::abs(weight - s.bestWeight) <= 1e-12 && ids < s.bestIds)) {
      s.bestWeight = weight;
      s.bestIds = ids;
    }
    return;
  }
  if (fractionalBound(s, i, size, weight) < s.bestWeight - 1e-12) return;
  const auto& it = (*s.items)[i];
  if (size + it.size <= s.capacity + 1e-12) {
    s.chosen.push_back(it.queryId);
    ksDfs(s, i + 1, size + it.size, weight + it.weight);
    s.chosen.pop_back();
  }
  ksDfs(s, i + 1, size, weight);
}

}  // namespace detail

struct KnapsackSolution {
  std::vector<int> ids;  // selected query ids, ascending
  double weight = 0.0;
};

/// Exact 0-1 knapsack via branch and bound with a fractional-relaxation
/// bound for instances up to `exactLimit` items; weight-scaling FPTAS with
/// eps = 0.01 beyond that. Real-valued sizes rule out the classic
/// size-indexed DP. Tie-break among equal-weight optima: lexicographically
/// smallest id set.
inline KnapsackSolution knapsack(std::vector<KnapsackItem> items,
                                 double capacity, size_t exactLimit = 25) {
  if (capacity < 0.0) throw std::invalid_argument("capacity must be >= 0");
  for (const auto& it : items)
    if (it.size <= 0.0 || it.weight <= 0.0)
      throw std::invalid_argument("item sizes and weights must be positive");
  std::erase_if(items, [&](const KnapsackItem& it) {
    return it.size > capacity;
  });
  if (items.empty()) return {};

  if (items.size() <= exactLimit) {
    std::sort(items.begin(), items.end(),
              [](const KnapsackItem& a, const KnapsackItem& b) {
                const double da = a.weight / a.size, db = b.weight / b.size;
                return da != db ? da > db : a.queryId < b.queryId;
              });
    detail::KsState s;
    s.items = &items;
    s.capacity = capacity;
    s.bestIds.assign(1, std::numeric_limits<int>::max());
    detail::ksDfs(s, 0, 0.0, 0.0);
    KnapsackSolution sol;
    if (s.bestWeight > 0.0) {
      sol.ids = s.bestIds;
      sol.weight = s.bestWeight;
    }
    return sol;
  }

  // FPTAS: scale weights to integers, DP over total profit minimizing size.
  constexpr double eps = 0.01;
  const size_t n = items.size();
  double wmax = 0.0;
  for (const auto& it : items) wmax = std::max(wmax, it.weight);
  const double scale = eps * wmax / double(n);
  std::vector<long> profit(n);
  long totalProfit = 0;
  for (size_t i = 0; i < n; ++i) {
    profit[i] = std::max<long>(1, long(std::floor(items[i].weight / scale)));
    totalProfit += profit[i];
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> minSize(size_t(totalProfit) + 1, inf);
  std::vector<std::vector<bool>> take(
      n, std::vector<bool>(size_t(totalProfit) + 1, false));
  minSize[0] = 0.0;
  for (size_t i = 0; i < n; ++i) {
    for (long p = totalProfit; p >= profit[i]; --p) {
      const double cand = minSize[size_t(p - profit[i])] + items[i].size;
      if (cand < minSize[size_t(p)]) {
        minSize[size_t(p)] = cand;
        take[i][size_t(p)] = true;
      }
    }
  }
  long bestP = 0;
  for (long p = totalProfit; p >= 0; --p)
    if (minSize[size_t(p)] <= capacity + 1e-12) { bestP = p; break; }
  KnapsackSolution sol;
  long p = bestP;
  for (size_t i = n; i-- > 0;) {
    if (p >= profit[i] && take[i][size_t(p)]) {
      sol.ids.push_back(items[i].queryId);
      sol.weight += items[i].weight;
      p -= profit[i];
    }
  }
  std::sort(sol.ids.begin(), sol.ids.end());
  return sol;
}

struct SelectionResult {
  std::vector<int> ids;  // ascending
  double weight = 0.0;
  bool fromKnapsack = false;  // phase II won (or tied)
};

/// Algorithm 2, Maximum Weighted Query Selection. Phase I: heaviest single
/// query with sink load <= 1 (empty when none qualifies). Phase II:
/// KS(0.69/(c2*c3)). Returns whichever candidate weighs more; ties go to
/// the knapsack set.
inline SelectionResult selectQueries(const std::vector<Query>& queries,
                                     const InterferenceModel& model) {
  const double d = 0.69 / (double(c2(model)) * double(c3(model)));

  const Query* single = nullptr;
  for (const auto& q : queries) {
    if (q.sinkLoad() > 1.0) continue;
    if (!single || q.weight > single->weight ||
        (q.weight == single->weight && q.id < single->id))
      single = &q;
  }
  const KnapsackSolution ks = knapsack(knapsackItems(queries), d);

  SelectionResult result;
  if (single && single->weight > ks.weight) {
    result.ids = {single->id};
    result.weight = single->weight;
    result.fromKnapsack = false;
  } else {
    result.ids = ks.ids;
    result.weight = ks.weight;
    result.fromKnapsack = true;
  }
  return result;
}

/// Exhaustive KS(1) optimum; oracle for the approximation guarantee.
inline double bruteForceOptKs1(const std::vector<Query>& queries) {
  if (queries.size() > 20)
    throw std::invalid_argument("brute-force oracle limited to 20 queries");
  const size_t n = queries.size();
  double best = 0.0;
  for (size_t mask = 0; mask < (size_t(1) << n); ++mask) {
    double size = 0.0, weight = 0.0;
    for (size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) {
        size += queries[i].sinkLoad();
        weight += queries[i].weight;
      }
    }
    if (size <= 1.0 + 1e-12) best = std::max(best, weight);
  }
  return best;
}

struct ApproximationReport {
  double selectedWeight = 0.0;
  double optKs1 = 0.0;
  double ratioBound = 0.0;  // d/2
  bool holds = false;       // selectedWeight >= (d/2) * optKs1
};

/// Checks w(A) >= (d/2) * OPT_KS(1) with the exhaustive oracle.
inline ApproximationReport approximationCheck(
    const std::vector<Query>& queries, const InterferenceModel& model) {
  ApproximationReport rep;
  const double d = 0.69 / (double(c2(model)) * double(c3(model)));
  rep.ratioBound = d / 2.0;
  rep.selectedWeight = selectQueries(queries, model).weight;
  rep.optKs1 = bruteForceOptKs1(queries);
  rep.holds = rep.selectedWeight >= rep.ratioBound * rep.optKs1 - 1e-12;
  return rep;
}

}  // namespace rtc
