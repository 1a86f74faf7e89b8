#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

namespace cpd::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { Le, Ge, Eq };

struct Row {
  std::vector<std::pair<int, double>> terms;
  Sense sense = Sense::Le;
  double rhs = 0.0;
};

/// max (or min) c'x  s.t. rows, lower <= x <= upper.
struct Problem {
  bool maximize = true;
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Row> rows;

  int add_variable(double lo, double up, double cost);
  void add_row(std::vector<std::pair<int, double>> terms, Sense sense, double rhs);
  int variable_count() const { return static_cast<int>(objective.size()); }
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

struct Solution {
  Status status = Status::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
  std::int64_t iterations = 0;
  // Deterministic effort measure: sum over pivots of tableau size.
  double work = 0.0;
};

struct Options {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  std::int64_t max_iterations = 0;  // 0: automatic
  double work_limit = 0.0;          // 0: none; reached -> IterationLimit
};

/// Dense bounded-variable primal simplex (two phases, artificial start).
/// Intended for models up to a few thousand columns and a few hundred rows.
Solution solve(const Problem& problem, const Options& options = {});

/// Keeps the final tableau so that bound changes can be re-optimized with the
/// dual simplex, as branch-and-bound needs.
class Workspace {
 public:
  explicit Workspace(Problem problem, Options options = {});
  ~Workspace();
  Workspace(Workspace&&) noexcept;
  Workspace& operator=(Workspace&&) noexcept;

  Solution solve();
  void set_bounds(int variable, double lower, double upper);
  /// Dual simplex from the last basis; falls back to a fresh solve.
  Solution resolve();

  const Problem& problem() const;
  /// Cumulative effort, same unit as Solution::work.
  double work() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cpd::lp
