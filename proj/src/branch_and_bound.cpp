#include "pioia/branch_and_bound.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <queue>
#include <utility>

namespace pioia {

namespace {

struct BoundChange {
  int col;
  double lower;
  double upper;
};

struct Node {
  std::vector<BoundChange> changes;  // cumulative from the root
  double bound = -kInf;               // parent LP objective
  int depth = 0;
  long order = 0;
  std::shared_ptr<const DenseSimplex> warm;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.order > b.order;
  }
};

double gap_of(double incumbent, double bound) {
  if (!std::isfinite(incumbent)) return kInf;
  if (!std::isfinite(bound)) return kInf;
  const double diff = incumbent - bound;
  if (diff <= 1e-9 * std::max(1.0, std::abs(incumbent))) return 0.0;
  return diff / std::max(std::abs(incumbent), 1e-10);
}

}  // namespace

MipResult branch_and_bound(const LpProblem& lp,
                           const std::vector<int>& integer_cols,
                           const MipOptions& options) {
  MipResult result;
  if (options.incumbent) {
    result.x = *options.incumbent;
    result.objective = options.incumbent_objective;
  }

  DenseSimplex root(lp);
  LpStatus root_status = root.solve(options.deadline);
  result.lp_iterations += root.iterations();
  if (root_status == LpStatus::kInfeasible) {
    result.status = SolveStatus::kInfeasible;
    return result;
  }
  if (root_status == LpStatus::kUnbounded) {
    result.status = SolveStatus::kUnbounded;
    return result;
  }
  if (root_status == LpStatus::kTimeLimit) {
    result.status = SolveStatus::kTimeLimit;
    return result;
  }
  if (root_status != LpStatus::kOptimal) {
    result.status = SolveStatus::kNumericError;
    return result;
  }
  const std::size_t snapshot_size =
      static_cast<std::size_t>(root.num_rows()) *
      static_cast<std::size_t>(root.num_rows() + root.num_cols()) *
      sizeof(double);
  const std::size_t max_snapshots =
      snapshot_size == 0 ? 1000000 : options.snapshot_bytes / snapshot_size;
  std::size_t live_snapshots = 0;
  const auto root_copy = std::make_shared<const DenseSimplex>(root);

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long order = 0;

  auto open_bound = [&]() { return open.empty() ? kInf : open.top().bound; };
  auto prune_level = [&]() {
    if (!std::isfinite(result.objective)) return kInf;
    return result.objective - 1e-9 * std::max(1.0, std::abs(result.objective));
  };

  // `current` holds the simplex of the node being dived on.
  std::unique_ptr<DenseSimplex> current = std::make_unique<DenseSimplex>(root);
  Node node;
  node.bound = root.objective();
  bool have_node = true;
  bool solved = true;  // the root is already solved
  bool stopped = false;
  SolveStatus stop_status = SolveStatus::kOptimal;

  while (true) {
    if (!have_node) {
      while (!open.empty() && open.top().bound >= prune_level()) {
        if (open.top().warm) --live_snapshots;
        open.pop();
      }
      if (open.empty()) break;
      node = open.top();
      open.pop();
      if (node.warm) {
        --live_snapshots;
        current = std::make_unique<DenseSimplex>(*node.warm);
      } else {
        current = std::make_unique<DenseSimplex>(*root_copy);
      }
      node.warm.reset();
      have_node = true;
      solved = false;
    }
    if (std::chrono::steady_clock::now() > options.deadline) {
      stopped = true;
      stop_status = SolveStatus::kTimeLimit;
      open.push(node);
      break;
    }
    if (result.nodes >= options.node_limit) {
      stopped = true;
      stop_status = SolveStatus::kTimeLimit;
      open.push(node);
      break;
    }
    if (!solved) {
      for (const auto& ch : node.changes) {
        current->set_col_bounds(ch.col, ch.lower, ch.upper);
      }
      const long before = current->iterations();
      const LpStatus st = current->solve(options.deadline);
      result.lp_iterations += current->iterations() - before;
      if (st == LpStatus::kTimeLimit) {
        stopped = true;
        stop_status = SolveStatus::kTimeLimit;
        open.push(node);
        break;
      }
      if (st != LpStatus::kOptimal) {
        // Infeasible (or numerically unusable) subproblem: prune.
        ++result.nodes;
        have_node = false;
        continue;
      }
    }
    ++result.nodes;
    const double obj = current->objective();
    node.bound = std::max(node.bound, obj);
    if (obj >= prune_level()) {
      have_node = false;
      continue;
    }
    const std::vector<double> x = current->primal();
    int branch_col = -1;
    double best_frac = options.integrality_tolerance;
    for (int j : integer_cols) {
      const double f = x[j] - std::floor(x[j]);
      const double dist = std::min(f, 1.0 - f);
      if (dist > best_frac) {
        best_frac = dist;
        branch_col = j;
      }
    }
    if (branch_col < 0) {
      result.objective = obj;
      result.x = x;
      have_node = false;
    } else {
      const double v = x[branch_col];
      const double lo = current->col_lower(branch_col);
      const double hi = current->col_upper(branch_col);
      Node down = node;
      down.changes.push_back({branch_col, lo, std::floor(v)});
      down.depth = node.depth + 1;
      down.bound = obj;
      down.order = ++order;
      Node up = node;
      up.changes.push_back({branch_col, std::ceil(v), hi});
      up.depth = node.depth + 1;
      up.bound = obj;
      up.order = ++order;
      const bool go_up = v - std::floor(v) >= 0.5;
      Node& dive = go_up ? up : down;
      Node& queued = go_up ? down : up;
      if (live_snapshots < max_snapshots) {
        queued.warm = std::make_shared<const DenseSimplex>(*current);
        ++live_snapshots;
      }
      open.push(std::move(queued));
      const BoundChange ch = dive.changes.back();
      current->set_col_bounds(ch.col, ch.lower, ch.upper);
      node = std::move(dive);
      node.changes.back() = ch;
      have_node = true;
      // Only the new bound changed; solve on the next pass without
      // reapplying the full change list.
      const long before = current->iterations();
      const LpStatus st = current->solve(options.deadline);
      result.lp_iterations += current->iterations() - before;
      solved = true;
      if (st == LpStatus::kTimeLimit) {
        stopped = true;
        stop_status = SolveStatus::kTimeLimit;
        open.push(node);
        break;
      }
      if (st != LpStatus::kOptimal) {
        ++result.nodes;
        have_node = false;
      }
    }
    // Gap test.
    double lower = open_bound();
    if (have_node) lower = std::min(lower, node.bound);
    if (std::isfinite(result.objective)) {
      lower = std::min(lower, result.objective);
      if (gap_of(result.objective, lower) <= options.relative_gap &&
          (have_node || !open.empty())) {
        stopped = true;
        stop_status = SolveStatus::kGapReached;
        if (have_node) open.push(node);
        break;
      }
    }
  }

  if (stopped) {
    double lower = open_bound();
    if (std::isfinite(result.objective)) lower = std::min(lower, result.objective);
    result.bound = lower;
    if (stop_status == SolveStatus::kGapReached &&
        gap_of(result.objective, lower) == 0.0) {
      stop_status = SolveStatus::kOptimal;
    }
    result.status = stop_status;
    return result;
  }
  if (std::isfinite(result.objective)) {
    result.status = SolveStatus::kOptimal;
    result.bound = result.objective;
  } else {
    result.status = SolveStatus::kInfeasible;
  }
  return result;
}

}  // namespace pioia
