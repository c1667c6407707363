#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace shapeval {

// Dense row-major cost matrix. Metric users keep entries in [0, 1]; the
// solvers only require finite, non-negative values.
struct CostMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> cost;

  CostMatrix() = default;
  CostMatrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), cost(r * c, fill) {}

  double& at(std::size_t r, std::size_t c) { return cost[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return cost[r * cols + c]; }
};

// One-to-one row/column pairing. Unmatched entries hold -1. total_cost sums
// the matrix entries over matched pairs.
struct Matching {
  std::vector<std::int64_t> row_to_col;
  std::vector<std::int64_t> col_to_row;
  double total_cost = 0.0;

  std::size_t size() const {
    std::size_t n = 0;
    for (std::int64_t c : row_to_col) n += (c >= 0);
    return n;
  }
};

// Fractional coupling between rows and columns: flow[i * cols + j] is the
// mass shipped from row i to column j. Rows sum to 1/rows, columns to 1/cols.
struct TransportPlan {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> flow;
  double total_cost = 0.0;

  double at(std::size_t r, std::size_t c) const { return flow[r * cols + c]; }
};

namespace detail {

inline void require_valid_costs(const CostMatrix& c) {
  if (c.cost.size() != c.rows * c.cols)
    throw std::invalid_argument("cost buffer does not match matrix dimensions");
  for (double v : c.cost)
    if (!(std::isfinite(v) && v >= 0.0))
      throw std::invalid_argument("costs must be finite and non-negative");
}

// Shortest-augmenting-path assignment over rows 1..m and columns 1..n with
// m <= n. Returns the column matched to each row. Strict comparisons make
// ties resolve to the lowest scanned column index, so results are
// reproducible bit for bit.
inline std::vector<std::int64_t> augmenting_path_assign(const CostMatrix& c) {
  const auto m = static_cast<std::int64_t>(c.rows);
  const auto n = static_cast<std::int64_t>(c.cols);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(m + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::int64_t> match(n + 1, 0), way(n + 1, 0);
  for (std::int64_t i = 1; i <= m; ++i) {
    match[0] = i;
    std::int64_t j0 = 0;
    std::vector<double> dist(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::int64_t i0 = match[j0];
      std::int64_t j1 = -1;
      double delta = inf;
      for (std::int64_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = c.at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < dist[j]) {
          dist[j] = cur;
          way[j] = j0;
        }
        if (dist[j] < delta) {
          delta = dist[j];
          j1 = j;
        }
      }
      for (std::int64_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          dist[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::int64_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::int64_t> row_to_col(m, -1);
  for (std::int64_t j = 1; j <= n; ++j)
    if (match[j] != 0) row_to_col[match[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace detail

// Minimum-cost one-to-one matching of cardinality min(rows, cols).
inline Matching solve_assignment(const CostMatrix& c) {
  detail::require_valid_costs(c);
  Matching m;
  m.row_to_col.assign(c.rows, -1);
  m.col_to_row.assign(c.cols, -1);
  if (c.rows == 0 || c.cols == 0) return m;
  if (c.rows <= c.cols) {
    m.row_to_col = detail::augmenting_path_assign(c);
  } else {
    CostMatrix t(c.cols, c.rows);
    for (std::size_t r = 0; r < c.rows; ++r)
      for (std::size_t j = 0; j < c.cols; ++j) t.at(j, r) = c.at(r, j);
    const auto col_to_row = detail::augmenting_path_assign(t);
    for (std::size_t j = 0; j < c.cols; ++j)
      if (col_to_row[j] >= 0) m.row_to_col[col_to_row[j]] = static_cast<std::int64_t>(j);
  }
  for (std::size_t r = 0; r < c.rows; ++r) {
    const std::int64_t j = m.row_to_col[r];
    if (j >= 0) {
      m.col_to_row[j] = static_cast<std::int64_t>(r);
      m.total_cost += c.at(r, static_cast<std::size_t>(j));
    }
  }
  return m;
}

// Like solve_assignment but pairs costing more than max_cost are never
// matched. Among all matchings that maximize the number of kept pairs, the
// result minimizes their total cost.
inline Matching solve_assignment_capped(const CostMatrix& c, double max_cost) {
  detail::require_valid_costs(c);
  if (c.rows == 0 || c.cols == 0) {
    Matching m;
    m.row_to_col.assign(c.rows, -1);
    m.col_to_row.assign(c.cols, -1);
    return m;
  }
  const double big =
      static_cast<double>(std::min(c.rows, c.cols)) * std::max(max_cost, 1.0) + 1.0;
  CostMatrix capped(c.rows, c.cols);
  for (std::size_t i = 0; i < c.cost.size(); ++i)
    capped.cost[i] = (c.cost[i] <= max_cost) ? c.cost[i] : big;
  Matching m = solve_assignment(capped);
  m.total_cost = 0.0;
  for (std::size_t r = 0; r < c.rows; ++r) {
    const std::int64_t j = m.row_to_col[r];
    if (j < 0) continue;
    if (c.at(r, static_cast<std::size_t>(j)) > max_cost) {
      m.row_to_col[r] = -1;
      m.col_to_row[static_cast<std::size_t>(j)] = -1;
    } else {
      m.total_cost += c.at(r, static_cast<std::size_t>(j));
    }
  }
  return m;
}

// Rows claim their cheapest free column in descending priority order. Only
// pairs with cost <= max_cost are taken. Ties on priority fall back to the
// lower row index, ties on cost to the lower column index.
inline Matching greedy_match(const CostMatrix& c, const std::vector<double>& row_priority,
                             double max_cost) {
  detail::require_valid_costs(c);
  if (row_priority.size() != c.rows)
    throw std::invalid_argument("row priority size must match row count");
  Matching m;
  m.row_to_col.assign(c.rows, -1);
  m.col_to_row.assign(c.cols, -1);
  std::vector<std::size_t> order(c.rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return row_priority[a] > row_priority[b];
  });
  for (std::size_t r : order) {
    std::int64_t best = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < c.cols; ++j) {
      if (m.col_to_row[j] >= 0) continue;
      const double v = c.at(r, j);
      if (v <= max_cost && v < best_cost) {
        best_cost = v;
        best = static_cast<std::int64_t>(j);
      }
    }
    if (best >= 0) {
      m.row_to_col[r] = best;
      m.col_to_row[static_cast<std::size_t>(best)] = static_cast<std::int64_t>(r);
      m.total_cost += best_cost;
    }
  }
  return m;
}

namespace detail {

struct FlowEdge {
  std::int32_t to = 0;
  std::int64_t cap = 0;
  double cost = 0.0;
  std::size_t rev = 0;
};

// Successive shortest paths with potentials on the bipartite transport graph.
// Supplies and demands are integers, so the optimum is exact for the uniform
// marginals 1/rows and 1/cols.
class MinCostTransport {
 public:
  explicit MinCostTransport(std::size_t nodes) : graph_(nodes) {}

  void add_edge(std::size_t from, std::size_t to, std::int64_t cap, double cost) {
    graph_[from].push_back({static_cast<std::int32_t>(to), cap, cost, graph_[to].size()});
    graph_[to].push_back({static_cast<std::int32_t>(from), 0, -cost, graph_[from].size() - 1});
  }

  // Sends `flow` units from source to sink; returns total cost.
  double run(std::size_t source, std::size_t sink, std::int64_t flow) {
    const std::size_t n = graph_.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> potential(n, 0.0), dist(n);
    std::vector<char> done(n);
    std::vector<std::int32_t> prev_node(n);
    std::vector<std::size_t> prev_edge(n);
    double total = 0.0;
    while (flow > 0) {
      std::fill(dist.begin(), dist.end(), inf);
      std::fill(done.begin(), done.end(), 0);
      dist[source] = 0.0;
      for (;;) {
        std::size_t best = n;
        double best_dist = inf;
        for (std::size_t v = 0; v < n; ++v)
          if (!done[v] && dist[v] < best_dist) {
            best_dist = dist[v];
            best = v;
          }
        if (best == n) break;
        done[best] = 1;
        for (std::size_t e = 0; e < graph_[best].size(); ++e) {
          const FlowEdge& edge = graph_[best][e];
          if (edge.cap <= 0) continue;
          const double reduced =
              std::max(0.0, edge.cost + potential[best] - potential[edge.to]);
          if (dist[best] + reduced < dist[edge.to]) {
            dist[edge.to] = dist[best] + reduced;
            prev_node[edge.to] = static_cast<std::int32_t>(best);
            prev_edge[edge.to] = e;
          }
        }
      }
      if (dist[sink] == inf)
        throw std::runtime_error("transport network is infeasible");
      for (std::size_t v = 0; v < n; ++v)
        if (dist[v] < inf) potential[v] += dist[v];
      std::int64_t push = flow;
      for (std::size_t v = sink; v != source;) {
        const std::size_t u = static_cast<std::size_t>(prev_node[v]);
        push = std::min(push, graph_[u][prev_edge[v]].cap);
        v = u;
      }
      for (std::size_t v = sink; v != source;) {
        const std::size_t u = static_cast<std::size_t>(prev_node[v]);
        FlowEdge& edge = graph_[u][prev_edge[v]];
        edge.cap -= push;
        graph_[edge.to][edge.rev].cap += push;
        total += static_cast<double>(push) * edge.cost;
        v = u;
      }
      flow -= push;
    }
    return total;
  }

  const std::vector<std::vector<FlowEdge>>& graph() const { return graph_; }

 private:
  std::vector<std::vector<FlowEdge>> graph_;
};

}  // namespace detail

// Optimal coupling of the uniform distributions over rows and columns.
// Solved as an integer transportation problem: every row supplies
// cols / gcd(rows, cols) units and every column demands rows / gcd units, so
// the rational marginals are met exactly.
inline TransportPlan solve_transport(const CostMatrix& c) {
  detail::require_valid_costs(c);
  if (c.rows == 0 || c.cols == 0)
    throw std::invalid_argument("transport requires non-empty row and column sets");
  const auto m = static_cast<std::int64_t>(c.rows);
  const auto n = static_cast<std::int64_t>(c.cols);
  const std::int64_t g = std::gcd(m, n);
  const std::int64_t supply = n / g;
  const std::int64_t demand = m / g;
  const std::size_t source = 0;
  const std::size_t sink = static_cast<std::size_t>(m + n) + 1;
  detail::MinCostTransport net(static_cast<std::size_t>(m + n) + 2);
  for (std::int64_t i = 0; i < m; ++i)
    net.add_edge(source, static_cast<std::size_t>(1 + i), supply, 0.0);
  for (std::int64_t i = 0; i < m; ++i)
    for (std::int64_t j = 0; j < n; ++j)
      net.add_edge(static_cast<std::size_t>(1 + i), static_cast<std::size_t>(1 + m + j),
                   supply, c.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
  for (std::int64_t j = 0; j < n; ++j)
    net.add_edge(static_cast<std::size_t>(1 + m + j), sink, demand, 0.0);
  net.run(source, sink, m * supply);

  TransportPlan plan;
  plan.rows = c.rows;
  plan.cols = c.cols;
  plan.flow.assign(c.rows * c.cols, 0.0);
  const double unit = static_cast<double>(g) / (static_cast<double>(m) * static_cast<double>(n));
  for (std::int64_t i = 0; i < m; ++i) {
    for (const detail::FlowEdge& e : net.graph()[static_cast<std::size_t>(1 + i)]) {
      if (e.to <= m || e.to > m + n) continue;
      const std::int64_t sent = supply - e.cap;
      if (sent <= 0) continue;
      const auto j = static_cast<std::size_t>(e.to - 1 - m);
      const double mass = static_cast<double>(sent) * unit;
      plan.flow[static_cast<std::size_t>(i) * c.cols + j] = mass;
      plan.total_cost += mass * c.at(static_cast<std::size_t>(i), j);
    }
  }
  return plan;
}

}  // namespace shapeval
