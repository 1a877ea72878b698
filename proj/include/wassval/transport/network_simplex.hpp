#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "wassval/core/numerics.hpp"

namespace wassval {

struct TransportPlanEntry {
  std::int64_t i = 0;  // row (first marginal) index
  std::int64_t j = 0;  // column (second marginal) index
  double mass = 0.0;
};

struct TransportOptions {
  bool want_plan = true;
  // 0 = auto (~sqrt of the arc count, clamped to [256, 4096]).
  std::int64_t block_size = 0;
  // 0 = auto; exceeding it means the solver is cycling -> runtime_error.
  std::int64_t max_pivots = 0;
  // Entering threshold on reduced costs; 0 = auto (1e-13 x cost scale).
  double pricing_tol = 0.0;
  // Optional row/column orders for the initial northwest-corner basis. A
  // near-monotone order (sort by principal-axis projection) starts the solver
  // close to optimal; empty means natural order.
  std::vector<std::int64_t> row_order;
  std::vector<std::int64_t> col_order;
};

struct TransportResult {
  double cost = 0.0;  // optimal value of sum c_ij * mass_ij
  std::vector<TransportPlanEntry> plan;  // positive-mass support, sorted (i,j)
  std::int64_t pivots = 0;
};

namespace detail {

// Primal network simplex specialized to the dense transportation polytope
// (every source-sink pair is an arc, arcs enumerated implicitly as i*n+j, so
// nothing of size m*n is ever stored). The spanning tree lives in per-node
// arrays: parent / pred arc / arc flow / potential / depth plus intrusive
// child lists for subtree walks.
//
// Pricing is block search over the implicit arc range with a persistent
// cursor. The leaving arc is the last blocking arc in cycle direction
// (Cunningham's rule); if a long degenerate streak appears anyway, the solver
// falls back to Bland's rule (lowest eligible arc ids) until a pivot moves
// mass again, which guarantees termination.
template <class CostFn>
class NetSimplex {
  using i64 = std::int64_t;
  using i32 = std::int32_t;

 public:
  NetSimplex(std::span<const double> supply, std::span<const double> demand,
             CostFn& cost, const TransportOptions& opts)
      : m_(static_cast<i64>(supply.size())),
        n_(static_cast<i64>(demand.size())),
        nodes_(m_ + n_),
        cost_(cost),
        opts_(opts),
        supply_(supply.begin(), supply.end()),
        demand_(demand.begin(), demand.end()) {}

  TransportResult run() {
    validate();
    build_initial_basis();
    pivot_loop();
    recompute_flows_on_tree();
    return assemble();
  }

 private:
  // Node ids: sources are [0, m), sink j is node m + j.
  i64 m_, n_, nodes_;
  CostFn& cost_;
  const TransportOptions& opts_;
  std::vector<double> supply_, demand_;

  std::vector<i32> parent_, first_child_, next_sib_, prev_sib_, depth_;
  std::vector<i64> pred_;    // arc id of the arc to the parent; -1 at root
  std::vector<double> flow_;  // flow on the arc to the parent
  std::vector<double> pi_;    // potentials; rc(i,j) = c + pi[i] - pi[m+j]
  i32 root_ = 0;

  i64 block_ = 0;
  i64 cursor_ = 0;
  double eps_ = 0.0;
  i64 pivots_ = 0;
  i64 degenerate_streak_ = 0;
  bool bland_ = false;
  static constexpr i64 kBlandTrigger = 1000;

  // Scratch reused across pivots.
  std::vector<i32> path_s_, path_t_, reroot_nodes_, dfs_stack_, order_;
  std::vector<i64> saved_pred_;
  std::vector<double> saved_flow_;

  double arc_cost(i64 arc) const { return cost_(arc / n_, arc % n_); }

  void validate() const {
    if (m_ <= 0 || n_ <= 0) {
      throw std::invalid_argument("transport: empty marginal");
    }
    if (m_ * n_ <= 0 || nodes_ > std::numeric_limits<i32>::max()) {
      throw std::invalid_argument("transport: problem too large");
    }
    double sa = 0.0, sb = 0.0;
    for (double v : supply_) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument("transport: bad supply");
      }
      sa += v;
    }
    for (double v : demand_) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument("transport: bad demand");
      }
      sb += v;
    }
    if (sa <= 0.0 || std::abs(sa - sb) > 1e-6 * std::max(sa, sb)) {
      throw std::invalid_argument("transport: marginals must balance");
    }
  }

  void detach(i32 v) {
    const i32 p = parent_[v];
    if (prev_sib_[v] >= 0) {
      next_sib_[prev_sib_[v]] = next_sib_[v];
    } else {
      first_child_[p] = next_sib_[v];
    }
    if (next_sib_[v] >= 0) prev_sib_[next_sib_[v]] = prev_sib_[v];
  }

  void attach(i32 v, i32 p) {
    parent_[v] = p;
    next_sib_[v] = first_child_[p];
    if (next_sib_[v] >= 0) prev_sib_[next_sib_[v]] = v;
    prev_sib_[v] = -1;
    first_child_[p] = v;
  }

  void build_initial_basis() {
    std::vector<i64> ro = opts_.row_order, co = opts_.col_order;
    if (ro.empty()) {
      ro.resize(static_cast<std::size_t>(m_));
      for (i64 i = 0; i < m_; ++i) ro[static_cast<std::size_t>(i)] = i;
    }
    if (co.empty()) {
      co.resize(static_cast<std::size_t>(n_));
      for (i64 j = 0; j < n_; ++j) co[static_cast<std::size_t>(j)] = j;
    }
    if (static_cast<i64>(ro.size()) != m_ || static_cast<i64>(co.size()) != n_) {
      throw std::invalid_argument("transport: bad basis order length");
    }

    // Northwest-corner rule over the given orders: m+n-1 basic cells forming
    // a spanning tree (degenerate zero cells appear on ties).
    struct Cell {
      i32 u, v;  // source node, sink node
      double f;
    };
    std::vector<Cell> cells;
    cells.reserve(static_cast<std::size_t>(m_ + n_ - 1));
    i64 ia = 0, jb = 0;
    double ra = supply_[static_cast<std::size_t>(ro[0])];
    double rb = demand_[static_cast<std::size_t>(co[0])];
    while (true) {
      const double theta = std::min(ra, rb);
      cells.push_back(Cell{static_cast<i32>(ro[static_cast<std::size_t>(ia)]),
                           static_cast<i32>(m_ + co[static_cast<std::size_t>(jb)]),
                           theta});
      ra -= theta;
      rb -= theta;
      if (ia == m_ - 1 && jb == n_ - 1) break;
      if (ia == m_ - 1) {
        ++jb;
        rb = demand_[static_cast<std::size_t>(co[static_cast<std::size_t>(jb)])];
      } else if (jb == n_ - 1) {
        ++ia;
        ra = supply_[static_cast<std::size_t>(ro[static_cast<std::size_t>(ia)])];
      } else if (ra <= rb) {
        ++ia;
        ra = supply_[static_cast<std::size_t>(ro[static_cast<std::size_t>(ia)])];
      } else {
        ++jb;
        rb = demand_[static_cast<std::size_t>(co[static_cast<std::size_t>(jb)])];
      }
    }

    parent_.assign(static_cast<std::size_t>(nodes_), -1);
    first_child_.assign(static_cast<std::size_t>(nodes_), -1);
    next_sib_.assign(static_cast<std::size_t>(nodes_), -1);
    prev_sib_.assign(static_cast<std::size_t>(nodes_), -1);
    depth_.assign(static_cast<std::size_t>(nodes_), 0);
    pred_.assign(static_cast<std::size_t>(nodes_), -1);
    flow_.assign(static_cast<std::size_t>(nodes_), 0.0);
    pi_.assign(static_cast<std::size_t>(nodes_), 0.0);

    // Adjacency of the basic cells, then BFS from the root to orient the tree.
    std::vector<i32> head(static_cast<std::size_t>(nodes_), -1);
    std::vector<i32> next_edge(2 * cells.size(), -1);
    std::vector<i32> edge_to(2 * cells.size(), 0);
    std::vector<i32> edge_cell(2 * cells.size(), 0);
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const i32 u = cells[k].u, v = cells[k].v;
      const i32 e1 = static_cast<i32>(2 * k), e2 = static_cast<i32>(2 * k + 1);
      edge_to[static_cast<std::size_t>(e1)] = v;
      edge_cell[static_cast<std::size_t>(e1)] = static_cast<i32>(k);
      next_edge[static_cast<std::size_t>(e1)] = head[static_cast<std::size_t>(u)];
      head[static_cast<std::size_t>(u)] = e1;
      edge_to[static_cast<std::size_t>(e2)] = u;
      edge_cell[static_cast<std::size_t>(e2)] = static_cast<i32>(k);
      next_edge[static_cast<std::size_t>(e2)] = head[static_cast<std::size_t>(v)];
      head[static_cast<std::size_t>(v)] = e2;
    }

    root_ = cells.front().u;
    double cost_scale = 1.0;
    std::vector<i32> queue;
    queue.reserve(static_cast<std::size_t>(nodes_));
    std::vector<char> seen(static_cast<std::size_t>(nodes_), 0);
    queue.push_back(root_);
    seen[static_cast<std::size_t>(root_)] = 1;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const i32 u = queue[qi];
      for (i32 e = head[static_cast<std::size_t>(u)]; e >= 0;
           e = next_edge[static_cast<std::size_t>(e)]) {
        const i32 w = edge_to[static_cast<std::size_t>(e)];
        if (seen[static_cast<std::size_t>(w)]) continue;
        seen[static_cast<std::size_t>(w)] = 1;
        const Cell& cell = cells[static_cast<std::size_t>(
            edge_cell[static_cast<std::size_t>(e)])];
        const i64 arc = static_cast<i64>(cell.u) * n_ +
                        (static_cast<i64>(cell.v) - m_);
        const double c = arc_cost(arc);
        cost_scale = std::max(cost_scale, std::abs(c));
        attach(w, u);
        pred_[static_cast<std::size_t>(w)] = arc;
        flow_[static_cast<std::size_t>(w)] = cell.f;
        depth_[static_cast<std::size_t>(w)] =
            depth_[static_cast<std::size_t>(u)] + 1;
        pi_[static_cast<std::size_t>(w)] =
            (w >= m_) ? pi_[static_cast<std::size_t>(u)] + c
                      : pi_[static_cast<std::size_t>(u)] - c;
        queue.push_back(w);
      }
    }
    if (static_cast<i64>(queue.size()) != nodes_) {
      throw std::logic_error("transport: initial basis not spanning");
    }

    const i64 num_arcs = m_ * n_;
    block_ = opts_.block_size > 0
                 ? std::min(opts_.block_size, num_arcs)
                 : std::clamp<i64>(
                       static_cast<i64>(std::sqrt(static_cast<double>(num_arcs))),
                       std::min<i64>(256, num_arcs), 4096);
    eps_ = opts_.pricing_tol > 0 ? opts_.pricing_tol : 1e-13 * cost_scale;
    cursor_ = 0;
  }

  // Best (most negative reduced cost) arc within consecutive blocks of the
  // implicit arc range; returns -1 when a full wrap finds nothing below -eps.
  i64 price_block() {
    const i64 num_arcs = m_ * n_;
    const i64 blocks = (num_arcs + block_ - 1) / block_;
    for (i64 b = 0; b < blocks; ++b) {
      i64 a = cursor_;
      i64 i = a / n_, j = a % n_;
      double pi_i = pi_[static_cast<std::size_t>(i)];
      i64 best = -1;
      double best_rc = -eps_;
      const i64 len = std::min(block_, num_arcs);
      for (i64 k = 0; k < len; ++k) {
        const double rc = cost_(i, j) + pi_i - pi_[static_cast<std::size_t>(m_ + j)];
        if (rc < best_rc) {
          best_rc = rc;
          best = a;
        }
        ++a;
        ++j;
        if (j == n_) {
          j = 0;
          ++i;
          if (i == m_) {
            i = 0;
            a = 0;
          }
          pi_i = pi_[static_cast<std::size_t>(i)];
        }
      }
      cursor_ = a;
      if (best >= 0) return best;
    }
    return -1;
  }

  // Bland fallback: lowest arc id with negative reduced cost.
  i64 price_bland() const {
    for (i64 i = 0; i < m_; ++i) {
      const double pi_i = pi_[static_cast<std::size_t>(i)];
      for (i64 j = 0; j < n_; ++j) {
        const double rc =
            cost_(i, j) + pi_i - pi_[static_cast<std::size_t>(m_ + j)];
        if (rc < -eps_) return i * n_ + j;
      }
    }
    return -1;
  }

  void pivot_loop() {
    const i64 max_pivots =
        opts_.max_pivots > 0
            ? opts_.max_pivots
            : std::max<i64>(2'000'000, 200 * (m_ + n_));
    while (true) {
      const i64 enter = bland_ ? price_bland() : price_block();
      if (enter < 0) {
        if (!bland_) break;
        bland_ = false;  // Bland says optimal; confirm with block pricing
        if (price_block() < 0) break;
        continue;
      }
      if (++pivots_ > max_pivots) {
        throw std::runtime_error("transport: pivot limit exceeded");
      }
      pivot(enter);
    }
  }

  void pivot(i64 enter) {
    const i32 s = static_cast<i32>(enter / n_);
    const i32 t = static_cast<i32>(m_ + enter % n_);

    // Paths from both endpoints up to their common ancestor.
    path_s_.clear();
    path_t_.clear();
    {
      i32 a = s, b = t;
      i32 da = depth_[static_cast<std::size_t>(a)];
      i32 db = depth_[static_cast<std::size_t>(b)];
      while (da > db) {
        path_s_.push_back(a);
        a = parent_[static_cast<std::size_t>(a)];
        --da;
      }
      while (db > da) {
        path_t_.push_back(b);
        b = parent_[static_cast<std::size_t>(b)];
        --db;
      }
      while (a != b) {
        path_s_.push_back(a);
        a = parent_[static_cast<std::size_t>(a)];
        path_t_.push_back(b);
        b = parent_[static_cast<std::size_t>(b)];
      }
    }

    // Pushing theta along s->t: on the t-side walk (toward the apex) arcs
    // stored at a source node run against the walk and lose flow; on the
    // s-side it is the mirror image.
    const auto decreases = [this](i32 v, bool s_side) {
      const bool src = v < m_;
      return s_side ? src : !src;
    };

    double theta = std::numeric_limits<double>::infinity();
    for (i32 v : path_s_) {
      if (decreases(v, true)) {
        theta = std::min(theta, flow_[static_cast<std::size_t>(v)]);
      }
    }
    for (i32 v : path_t_) {
      if (decreases(v, false)) {
        theta = std::min(theta, flow_[static_cast<std::size_t>(v)]);
      }
    }
    if (!std::isfinite(theta)) {
      throw std::logic_error("transport: unbounded pivot cycle");
    }

    // Leaving arc: last blocking arc walking the cycle apex -> s -> t -> apex
    // (Cunningham). Under Bland fallback: first blocking arc, lowest arc id
    // on ties.
    i32 leave = -1;
    bool leave_on_s_side = false;
    if (!bland_) {
      for (auto it = path_s_.rbegin(); it != path_s_.rend(); ++it) {
        if (decreases(*it, true) &&
            flow_[static_cast<std::size_t>(*it)] <= theta) {
          leave = *it;
          leave_on_s_side = true;
        }
      }
      for (i32 v : path_t_) {
        if (decreases(v, false) && flow_[static_cast<std::size_t>(v)] <= theta) {
          leave = v;
          leave_on_s_side = false;
        }
      }
    } else {
      i64 best_arc = std::numeric_limits<i64>::max();
      for (i32 v : path_s_) {
        if (decreases(v, true) && flow_[static_cast<std::size_t>(v)] <= theta &&
            pred_[static_cast<std::size_t>(v)] < best_arc) {
          best_arc = pred_[static_cast<std::size_t>(v)];
          leave = v;
          leave_on_s_side = true;
        }
      }
      for (i32 v : path_t_) {
        if (decreases(v, false) && flow_[static_cast<std::size_t>(v)] <= theta &&
            pred_[static_cast<std::size_t>(v)] < best_arc) {
          best_arc = pred_[static_cast<std::size_t>(v)];
          leave = v;
          leave_on_s_side = false;
        }
      }
    }
    if (leave < 0) {
      throw std::logic_error("transport: no leaving arc");
    }

    // Apply the flow change.
    if (theta > 0.0) {
      for (i32 v : path_s_) {
        double& f = flow_[static_cast<std::size_t>(v)];
        f += decreases(v, true) ? -theta : theta;
        if (f < 0.0) f = 0.0;
      }
      for (i32 v : path_t_) {
        double& f = flow_[static_cast<std::size_t>(v)];
        f += decreases(v, false) ? -theta : theta;
        if (f < 0.0) f = 0.0;
      }
    }
    flow_[static_cast<std::size_t>(leave)] = 0.0;

    if (theta > 0.0) {
      degenerate_streak_ = 0;
    } else if (!bland_ && ++degenerate_streak_ >= kBlandTrigger) {
      bland_ = true;
    }

    // Re-root the cut-off subtree at the entering endpoint that lives in it,
    // reversing parent pointers along entry -> leave.
    const i32 entry = leave_on_s_side ? s : t;
    const i32 other = leave_on_s_side ? t : s;
    reroot_nodes_.clear();
    for (i32 v = entry;; v = parent_[static_cast<std::size_t>(v)]) {
      reroot_nodes_.push_back(v);
      if (v == leave) break;
    }
    saved_pred_.clear();
    saved_flow_.clear();
    for (i32 v : reroot_nodes_) {
      saved_pred_.push_back(pred_[static_cast<std::size_t>(v)]);
      saved_flow_.push_back(flow_[static_cast<std::size_t>(v)]);
    }
    for (i32 v : reroot_nodes_) detach(v);
    attach(entry, other);
    pred_[static_cast<std::size_t>(entry)] = enter;
    flow_[static_cast<std::size_t>(entry)] = theta;
    for (std::size_t l = 1; l < reroot_nodes_.size(); ++l) {
      const i32 v = reroot_nodes_[l];
      attach(v, reroot_nodes_[l - 1]);
      pred_[static_cast<std::size_t>(v)] = saved_pred_[l - 1];
      flow_[static_cast<std::size_t>(v)] = saved_flow_[l - 1];
    }
    refresh_subtree(entry);
  }

  // Recompute depth and potential below v from its (already valid) parent.
  void refresh_subtree(i32 v) {
    dfs_stack_.clear();
    dfs_stack_.push_back(v);
    while (!dfs_stack_.empty()) {
      const i32 u = dfs_stack_.back();
      dfs_stack_.pop_back();
      const i32 p = parent_[static_cast<std::size_t>(u)];
      const i64 arc = pred_[static_cast<std::size_t>(u)];
      const double c = arc_cost(arc);
      depth_[static_cast<std::size_t>(u)] = depth_[static_cast<std::size_t>(p)] + 1;
      pi_[static_cast<std::size_t>(u)] =
          (u >= m_) ? pi_[static_cast<std::size_t>(p)] + c
                    : pi_[static_cast<std::size_t>(p)] - c;
      for (i32 w = first_child_[static_cast<std::size_t>(u)]; w >= 0;
           w = next_sib_[static_cast<std::size_t>(w)]) {
        dfs_stack_.push_back(w);
      }
    }
  }

  // Re-derive all tree flows exactly from the marginals by leaf stripping,
  // wiping out any drift the pivot arithmetic accumulated.
  void recompute_flows_on_tree() {
    order_.clear();
    order_.reserve(static_cast<std::size_t>(nodes_));
    dfs_stack_.clear();
    dfs_stack_.push_back(root_);
    while (!dfs_stack_.empty()) {
      const i32 u = dfs_stack_.back();
      dfs_stack_.pop_back();
      order_.push_back(u);
      for (i32 w = first_child_[static_cast<std::size_t>(u)]; w >= 0;
           w = next_sib_[static_cast<std::size_t>(w)]) {
        dfs_stack_.push_back(w);
      }
    }
    std::vector<double> excess(static_cast<std::size_t>(nodes_));
    for (i64 v = 0; v < nodes_; ++v) {
      excess[static_cast<std::size_t>(v)] =
          v < m_ ? supply_[static_cast<std::size_t>(v)]
                 : -demand_[static_cast<std::size_t>(v - m_)];
    }
    for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
      const i32 v = *it;
      if (v == root_) continue;
      const i32 p = parent_[static_cast<std::size_t>(v)];
      double f;
      if (v < m_) {
        f = excess[static_cast<std::size_t>(v)];
        excess[static_cast<std::size_t>(p)] += f;
      } else {
        f = -excess[static_cast<std::size_t>(v)];
        excess[static_cast<std::size_t>(p)] -= f;
      }
      if (f < 0.0) {
        if (f < -1e-9) {
          throw std::logic_error("transport: negative flow on basis");
        }
        f = 0.0;
      }
      flow_[static_cast<std::size_t>(v)] = f;
    }
  }

  TransportResult assemble() const {
    TransportResult out;
    out.pivots = pivots_;
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(nodes_));
    for (i64 v = 0; v < nodes_; ++v) {
      if (v == root_) continue;
      const double f = flow_[static_cast<std::size_t>(v)];
      if (f <= 0.0) continue;
      const i64 arc = pred_[static_cast<std::size_t>(v)];
      terms.push_back(arc_cost(arc) * f);
      if (opts_.want_plan) {
        out.plan.push_back(TransportPlanEntry{arc / n_, arc % n_, f});
      }
    }
    out.cost = num::kahan_sum(terms);
    std::sort(out.plan.begin(), out.plan.end(),
              [](const TransportPlanEntry& a, const TransportPlanEntry& b) {
                return a.i != b.i ? a.i < b.i : a.j < b.j;
              });
    return out;
  }
};

}  // namespace detail

// Exact solution of the balanced transportation problem
//   min sum_ij cost(i,j) x_ij,  x >= 0, row sums = supply, col sums = demand.
// cost is any callable (i64 row, i64 col) -> double; it is evaluated on the
// fly so no m*n array is ever materialized.
template <class CostFn>
TransportResult solve_transport(std::span<const double> supply,
                                std::span<const double> demand, CostFn&& cost,
                                const TransportOptions& opts = {}) {
  detail::NetSimplex<std::remove_reference_t<CostFn>> solver(supply, demand,
                                                             cost, opts);
  return solver.run();
}

// Convenience overload for an explicit row-major cost matrix.
TransportResult solve_transport_matrix(std::span<const double> supply,
                                       std::span<const double> demand,
                                       std::span<const double> cost_row_major,
                                       const TransportOptions& opts = {});

}  // namespace wassval
