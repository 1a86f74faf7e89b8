#include "cpd/lp.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace cpd::lp {

int Problem::add_variable(double lo, double up, double cost) {
  objective.push_back(cost);
  lower.push_back(lo);
  upper.push_back(up);
  return static_cast<int>(objective.size()) - 1;
}

void Problem::add_row(std::vector<std::pair<int, double>> terms, Sense sense, double rhs) {
  rows.push_back({std::move(terms), sense, rhs});
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kRatioTie = 1e-12;
constexpr int kDegenerateLimit = 50;

class Simplex {
 public:
  Simplex(Problem p, const Options& o) : p_(std::move(p)), opt_(o) {
    n_ = p_.variable_count();
    m_ = static_cast<int>(p_.rows.size());
    for (const auto& row : p_.rows) {
      for (const auto& [j, v] : row.terms) {
        if (j < 0 || j >= n_) throw std::out_of_range("lp row references unknown variable");
        (void)v;
      }
    }
    setup();
  }

  Solution run() {
    Solution sol;
    if (artificial_count_ > 0) {
      std::vector<double> phase1(cols_, 0.0);
      for (int j = art_begin_; j < cols_; ++j) phase1[j] = -1.0;
      const Status s = optimize(phase1);
      if (s == Status::IterationLimit) return finish(sol, s);
      refresh_basics();
      double infeasibility = 0.0;
      for (int j = art_begin_; j < cols_; ++j) infeasibility += x_[j];
      double scale = 1.0;
      for (const auto& row : p_.rows) scale = std::max(scale, std::fabs(row.rhs));
      if (infeasibility > opt_.feasibility_tol * scale * 10) return finish(sol, Status::Infeasible);
      for (int j = art_begin_; j < cols_; ++j) {
        up_[j] = 0.0;
        x_[j] = 0.0;
      }
      refresh_basics();
    }
    std::vector<double> cost(cols_, 0.0);
    for (int j = 0; j < n_; ++j) cost[j] = p_.maximize ? p_.objective[j] : -p_.objective[j];
    cost_ = cost;
    const Status s = optimize(cost);
    if (s == Status::Optimal) {
      refresh_basics();
      dual_ready_ = true;
    }
    return finish(sol, s);
  }

  bool dual_ready() const { return dual_ready_; }
  bool over_work() const { return opt_.work_limit > 0.0 && work_ >= opt_.work_limit; }
  const Problem& problem() const { return p_; }

  // New bounds for structural j. A nonbasic variable moves to the bound its
  // reduced cost favours, which keeps the basis dual feasible.
  void set_bounds(int j, double lo, double up) {
    p_.lower[j] = lo;
    p_.upper[j] = up;
    lo_[j] = lo;
    up_[j] = up;
    if (row_of_[j] >= 0) return;
    double target;
    if (lo == up) {
      target = lo;
    } else if (d_[j] > opt_.optimality_tol && std::isfinite(up)) {
      target = up;
    } else if (d_[j] < -opt_.optimality_tol && std::isfinite(lo)) {
      target = lo;
    } else {
      target = std::clamp(x_[j], lo, up);
      if (!std::isfinite(target)) target = std::isfinite(lo) ? lo : (std::isfinite(up) ? up : 0.0);
      if (std::isfinite(lo) && std::isfinite(up)) target = (x_[j] - lo <= up - x_[j]) ? lo : up;
    }
    const double delta = target - x_[j];
    if (delta == 0.0) return;
    x_[j] = target;
    for (int i = 0; i < m_; ++i) {
      const double a = tab_[static_cast<std::size_t>(i) * cols_ + j];
      if (a != 0.0) x_[basis_[i]] -= a * delta;
    }
    work_ += m_;
  }

  // Dual simplex from the current (dual feasible) basis.
  Solution dual() {
    Solution sol;
    const std::int64_t limit =
        opt_.max_iterations > 0 ? opt_.max_iterations : 200 + 50 * static_cast<std::int64_t>(m_ + cols_);
    for (int j = 0; j < n_; ++j) {
      if (lo_[j] > up_[j]) return finish(sol, Status::Infeasible);
    }
    std::int64_t local = 0;
    std::vector<double> column(m_);
    while (true) {
      if (local++ > limit || over_work()) return finish(sol, Status::IterationLimit);
      int r = -1;
      double worst = 0.0;
      for (int i = 0; i < m_; ++i) {
        const int b = basis_[i];
        const double v = x_[b];
        const double tol_lo = opt_.feasibility_tol * std::max(1.0, std::fabs(lo_[b]));
        const double tol_up = opt_.feasibility_tol * std::max(1.0, std::fabs(up_[b]));
        double viol = 0.0;
        if (v < lo_[b] - tol_lo) viol = lo_[b] - v;
        else if (v > up_[b] + tol_up) viol = v - up_[b];
        if (viol > worst) {
          worst = viol;
          r = i;
        }
      }
      if (r < 0) {
        refresh_basics();
        // Primal polish for reduced cost drift.
        const Status s = optimize(cost_);
        if (s == Status::Optimal) refresh_basics();
        else dual_ready_ = false;
        return finish(sol, s);
      }
      const int out = basis_[r];
      const bool raise = x_[out] < lo_[out];
      const double target = raise ? lo_[out] : up_[out];
      const double* pr = &tab_[static_cast<std::size_t>(r) * cols_];
      int q = -1;
      double best = kInf;
      double best_alpha = 0.0;
      for (int j = 0; j < cols_; ++j) {
        if (row_of_[j] >= 0 || lo_[j] == up_[j]) continue;
        const double a = pr[j];
        if (std::fabs(a) <= kPivotTol) continue;
        const bool can_up = x_[j] < up_[j];
        const bool can_down = x_[j] > lo_[j];
        // x_out moves by -a per unit increase of x_j.
        const bool helps = raise ? ((a < 0 && can_up) || (a > 0 && can_down))
                                 : ((a > 0 && can_up) || (a < 0 && can_down));
        if (!helps) continue;
        const double ratio = std::fabs(d_[j]) / std::fabs(a);
        if (ratio < best - kRatioTie || (ratio <= best + kRatioTie && std::fabs(a) > std::fabs(best_alpha))) {
          best = ratio;
          q = j;
          best_alpha = a;
        }
      }
      if (q < 0) return finish(sol, Status::Infeasible);
      ++iterations_;
      for (int i = 0; i < m_; ++i) column[i] = tab_[static_cast<std::size_t>(i) * cols_ + q];
      const double step = -(target - x_[out]) / column[r];
      x_[q] += step;
      for (int i = 0; i < m_; ++i) {
        if (column[i] != 0.0) x_[basis_[i]] -= column[i] * step;
      }
      x_[out] = target;
      pivot(r, q, d_);
      basis_[r] = q;
      row_of_[q] = r;
      row_of_[out] = -1;
    }
  }

  double work() const { return work_; }

 private:
  double& t(int i, int j) { return tab_[static_cast<std::size_t>(i) * cols_ + j]; }

  void setup() {
    // Columns: structurals, one slack per row, then artificials.
    std::vector<double> residual(m_);
    x_.assign(n_ + m_, 0.0);
    lo_.assign(n_ + m_, 0.0);
    up_.assign(n_ + m_, 0.0);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = p_.lower[j];
      up_[j] = p_.upper[j];
      if (lo_[j] > up_[j]) infeasible_bounds_ = true;
      x_[j] = std::isfinite(lo_[j]) ? lo_[j] : (std::isfinite(up_[j]) ? up_[j] : 0.0);
    }
    std::vector<int> needs_artificial;
    for (int i = 0; i < m_; ++i) {
      const auto& row = p_.rows[i];
      double r = row.rhs;
      for (const auto& [j, v] : row.terms) r -= v * x_[j];
      residual[i] = r;
      const int s = n_ + i;
      switch (row.sense) {
        case Sense::Le: lo_[s] = 0.0; up_[s] = kInf; break;
        case Sense::Ge: lo_[s] = -kInf; up_[s] = 0.0; break;
        case Sense::Eq: lo_[s] = 0.0; up_[s] = 0.0; break;
      }
      const bool fits = r >= lo_[s] - opt_.feasibility_tol && r <= up_[s] + opt_.feasibility_tol;
      if (!fits) needs_artificial.push_back(i);
    }
    artificial_count_ = static_cast<int>(needs_artificial.size());
    art_begin_ = n_ + m_;
    cols_ = art_begin_ + artificial_count_;
    x_.resize(cols_, 0.0);
    lo_.resize(cols_, 0.0);
    up_.resize(cols_, kInf);
    sigma_.assign(m_, 1.0);
    art_of_row_.assign(m_, -1);
    for (int a = 0; a < artificial_count_; ++a) art_of_row_[needs_artificial[a]] = art_begin_ + a;

    tab_.assign(static_cast<std::size_t>(m_) * cols_, 0.0);
    basis_.assign(m_, -1);
    row_of_.assign(cols_, -1);
    for (int i = 0; i < m_; ++i) {
      const auto& row = p_.rows[i];
      for (const auto& [j, v] : row.terms) t(i, j) += v;
      t(i, n_ + i) = 1.0;
      const int s = n_ + i;
      if (art_of_row_[i] < 0) {
        basis_[i] = s;
        row_of_[s] = i;
        x_[s] = residual[i];
      } else {
        // Slack parks at its bound; the artificial absorbs the residual.
        x_[s] = 0.0;
        const double sigma = residual[i] >= 0 ? 1.0 : -1.0;
        sigma_[i] = sigma;
        const int a = art_of_row_[i];
        t(i, a) = sigma;
        if (sigma < 0) {
          for (int j = 0; j < cols_; ++j) t(i, j) = -t(i, j);
        }
        basis_[i] = a;
        row_of_[a] = i;
        x_[a] = std::fabs(residual[i]);
      }
    }
  }

  // x_B = B^-1 (b - N x_N); the slack block of the tableau is B^-1 diag(sigma).
  void refresh_basics() {
    std::vector<double> r(m_);
    for (int i = 0; i < m_; ++i) {
      const auto& row = p_.rows[i];
      double v = row.rhs;
      for (const auto& [j, c] : row.terms) {
        if (row_of_[j] < 0) v -= c * x_[j];
      }
      const int s = n_ + i;
      if (row_of_[s] < 0) v -= x_[s];
      const int a = art_of_row_[i];
      if (a >= 0 && row_of_[a] < 0) v -= sigma_[i] * x_[a];
      r[i] = v;
    }
    for (int i = 0; i < m_; ++i) {
      double v = 0.0;
      for (int k = 0; k < m_; ++k) v += t(i, n_ + k) * r[k];
      x_[basis_[i]] = v;
    }
  }

  Status optimize(const std::vector<double>& cost) {
    if (infeasible_bounds_) return Status::Infeasible;
    d_ = cost;
    std::vector<double>& d = d_;
    for (int i = 0; i < m_; ++i) {
      const double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &tab_[static_cast<std::size_t>(i) * cols_];
      for (int j = 0; j < cols_; ++j) d[j] -= cb * row[j];
    }
    for (int i = 0; i < m_; ++i) d[basis_[i]] = 0.0;

    const std::int64_t limit =
        opt_.max_iterations > 0 ? opt_.max_iterations : 200 + 50 * static_cast<std::int64_t>(m_ + cols_);
    int degenerate = 0;
    std::int64_t local = 0;
    std::vector<double> column(m_);
    while (true) {
      if (local++ > limit || over_work()) return Status::IterationLimit;
      const bool bland = degenerate > kDegenerateLimit;
      int q = -1;
      double best = 0.0;
      double dir = 0.0;
      for (int j = 0; j < cols_; ++j) {
        if (row_of_[j] >= 0 || lo_[j] == up_[j]) continue;
        const double dj = d[j];
        double sj = 0.0;
        if (dj > opt_.optimality_tol && x_[j] < up_[j]) sj = 1.0;
        else if (dj < -opt_.optimality_tol && x_[j] > lo_[j]) sj = -1.0;
        if (sj == 0.0) continue;
        if (bland) {
          q = j;
          dir = sj;
          break;
        }
        if (std::fabs(dj) > best) {
          best = std::fabs(dj);
          q = j;
          dir = sj;
        }
      }
      if (q < 0) return Status::Optimal;

      for (int i = 0; i < m_; ++i) column[i] = tab_[static_cast<std::size_t>(i) * cols_ + q];
      double theta = up_[q] - lo_[q];
      int leave = -1;
      double leave_alpha = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double alpha = column[i] * dir;
        if (std::fabs(alpha) <= kPivotTol) continue;
        const int b = basis_[i];
        double step;
        if (alpha > 0) {
          if (!std::isfinite(lo_[b])) continue;
          step = (x_[b] - lo_[b]) / alpha;
        } else {
          if (!std::isfinite(up_[b])) continue;
          step = (up_[b] - x_[b]) / -alpha;
        }
        step = std::max(step, 0.0);
        bool take = false;
        if (step < theta - kRatioTie) {
          take = true;
        } else if (step <= theta + kRatioTie && leave >= 0) {
          take = bland ? b < basis_[leave] : std::fabs(alpha) > std::fabs(leave_alpha);
        }
        if (take) {
          theta = step;
          leave = i;
          leave_alpha = alpha;
        }
      }
      if (!std::isfinite(theta)) return Status::Unbounded;

      ++iterations_;
      degenerate = theta <= kRatioTie ? degenerate + 1 : 0;
      if (theta > 0) {
        x_[q] += dir * theta;
        for (int i = 0; i < m_; ++i) {
          if (column[i] != 0.0) x_[basis_[i]] -= column[i] * dir * theta;
        }
      }
      if (leave < 0) {
        // Bound flip: snap to the exact bound.
        x_[q] = dir > 0 ? up_[q] : lo_[q];
        work_ += m_;
        continue;
      }
      const int out = basis_[leave];
      x_[out] = leave_alpha > 0 ? lo_[out] : up_[out];
      pivot(leave, q, d);
      basis_[leave] = q;
      row_of_[q] = leave;
      row_of_[out] = -1;
    }
  }

  void pivot(int r, int q, std::vector<double>& d) {
    double* pr = &tab_[static_cast<std::size_t>(r) * cols_];
    const double inv = 1.0 / pr[q];
    for (int j = 0; j < cols_; ++j) pr[j] *= inv;
    pr[q] = 1.0;
    // Only touch the nonzero pattern of the pivot row.
    nz_.clear();
    for (int j = 0; j < cols_; ++j) {
      if (pr[j] != 0.0) nz_.push_back(j);
    }
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* pi = &tab_[static_cast<std::size_t>(i) * cols_];
      const double f = pi[q];
      if (f == 0.0) continue;
      for (int j : nz_) pi[j] -= f * pr[j];
      pi[q] = 0.0;
    }
    const double f = d[q];
    if (f != 0.0) {
      for (int j : nz_) d[j] -= f * pr[j];
      d[q] = 0.0;
    }
    work_ += static_cast<double>(m_) * static_cast<double>(nz_.size()) + cols_;
  }

  Solution& finish(Solution& sol, Status status) {
    sol.status = status;
    sol.iterations = iterations_;
    sol.work = work_;
    sol.x.assign(x_.begin(), x_.begin() + n_);
    for (int j = 0; j < n_; ++j) {
      // Clamp drift just outside the bounds.
      if (std::isfinite(lo_[j])) sol.x[j] = std::max(sol.x[j], lo_[j]);
      if (std::isfinite(up_[j])) sol.x[j] = std::min(sol.x[j], up_[j]);
    }
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) obj += p_.objective[j] * sol.x[j];
    sol.objective = obj;
    return sol;
  }

  Problem p_;
  Options opt_;
  bool dual_ready_ = false;
  std::vector<double> d_, cost_;
  int n_ = 0;
  int m_ = 0;
  int cols_ = 0;
  int art_begin_ = 0;
  int artificial_count_ = 0;
  bool infeasible_bounds_ = false;
  std::vector<double> tab_;
  std::vector<double> x_, lo_, up_, sigma_;
  std::vector<int> basis_, row_of_, art_of_row_;
  std::vector<int> nz_;
  std::int64_t iterations_ = 0;
  double work_ = 0.0;
};

}  // namespace

void check(const Problem& problem) {
  if (problem.lower.size() != problem.objective.size() || problem.upper.size() != problem.objective.size())
    throw std::invalid_argument("lp problem bound vectors do not match the variable count");
}

Solution solve(const Problem& problem, const Options& options) {
  check(problem);
  Simplex simplex(problem, options);
  return simplex.run();
}

struct Workspace::Impl {
  Options options;
  std::unique_ptr<Simplex> simplex;
  double retired_work = 0.0;
};

Workspace::Workspace(Problem problem, Options options) : impl_(std::make_unique<Impl>()) {
  check(problem);
  impl_->options = options;
  impl_->simplex = std::make_unique<Simplex>(std::move(problem), options);
}

Workspace::~Workspace() = default;
Workspace::Workspace(Workspace&&) noexcept = default;
Workspace& Workspace::operator=(Workspace&&) noexcept = default;

Solution Workspace::solve() { return impl_->simplex->run(); }

void Workspace::set_bounds(int j, double lower, double upper) {
  if (j < 0 || j >= problem().variable_count()) throw std::out_of_range("unknown lp variable");
  impl_->simplex->set_bounds(j, lower, upper);
}

Solution Workspace::resolve() {
  auto& s = impl_->simplex;
  if (s->dual_ready()) {
    Solution sol = s->dual();
    if (sol.status != Status::IterationLimit || s->over_work()) return sol;
  }
  // No usable basis: start over from the current bounds.
  impl_->retired_work += s->work();
  Options options = impl_->options;
  if (options.work_limit > 0.0) {
    options.work_limit -= impl_->retired_work;
    if (options.work_limit <= 0.0) {
      Solution out;
      out.status = Status::IterationLimit;
      return out;
    }
  }
  Problem p = s->problem();
  s = std::make_unique<Simplex>(std::move(p), options);
  return s->run();
}

const Problem& Workspace::problem() const { return impl_->simplex->problem(); }
double Workspace::work() const { return impl_->retired_work + impl_->simplex->work(); }

}  // namespace cpd::lp
