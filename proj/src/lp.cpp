#include "ccopf/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ccopf/errors.hpp"

namespace ccopf {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarState { basic, at_lower, at_upper, free_zero };

// Columns are ordered structural (d), slack (k), artificial (one per row that
// starts infeasible). Slack i has column e_i; artificial for row i has column
// sign_i * e_i.
class BoundedSimplex {
 public:
  BoundedSimplex(const LinearProgram& lp, const SimplexOptions& opt) : lp_(lp), opt_(opt) {
    d_ = lp.variables();
    k_ = lp.constraints();
    max_iter_ = opt.max_iterations > 0 ? opt.max_iterations
                                       : static_cast<std::size_t>(std::max<Eigen::Index>(10000, 50 * (d_ + k_)));
    setup();
  }

  DispatchSolution run() {
    DispatchSolution sol;
    if (artificial_count() > 0) {
      Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(total());
      phase1.tail(artificial_count()).setOnes();
      const auto res = iterate(phase1);
      if (res == SolveStatus::unbounded) throw NumericalError("phase 1 reported an unbounded ray");
      refactor();
      const double infeasibility = x_.tail(artificial_count()).sum();
      const double scale = std::max(1.0, lp_.rhs.size() ? lp_.rhs.cwiseAbs().maxCoeff() : 0.0);
      if (infeasibility > 1e-8 * scale) {
        sol.status = SolveStatus::infeasible;
        sol.iterations = iterations_;
        return sol;
      }
      for (Eigen::Index a = d_ + k_; a < total(); ++a) hi_(a) = 0.0;
    }

    Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(total());
    phase2.head(d_) = lp_.cost;
    const auto res = iterate(phase2);
    sol.iterations = iterations_;
    if (res == SolveStatus::unbounded) {
      sol.status = SolveStatus::unbounded;
      return sol;
    }
    refactor();

    sol.status = SolveStatus::optimal;
    sol.x = x_.head(d_);
    sol.objective = lp_.cost.dot(sol.x) + lp_.cost_offset;
    const Eigen::VectorXd slack = lp_.rhs - lp_.rows * sol.x;
    const double scale = std::max(1.0, lp_.rhs.size() ? lp_.rhs.cwiseAbs().maxCoeff() : 0.0);
    if (k_ > 0 && slack.minCoeff() < -1e-7 * scale) {
      throw NumericalError("simplex terminated with a row violated beyond tolerance");
    }
    for (Eigen::Index i = 0; i < k_; ++i) {
      if (slack(i) <= opt_.feasibility_tol * scale) {
        sol.active_rows.push_back(lp_.row_ids.empty() ? i : lp_.row_ids[static_cast<std::size_t>(i)]);
      }
    }
    return sol;
  }

 private:
  Eigen::Index total() const { return d_ + k_ + artificial_count(); }
  Eigen::Index artificial_count() const { return static_cast<Eigen::Index>(art_row_.size()); }

  void setup() {
    if (lp_.rows.cols() != d_ || lp_.rhs.size() != k_ || lp_.lower.size() != d_ || lp_.upper.size() != d_) {
      throw ParameterError("linear program dimensions are inconsistent");
    }
    if (!lp_.row_ids.empty() && static_cast<Eigen::Index>(lp_.row_ids.size()) != k_) {
      throw ParameterError("row_ids must be empty or have one entry per row");
    }
    if (!lp_.cost.allFinite() || !lp_.rows.allFinite()) throw ParameterError("non-finite LP coefficient");

    Eigen::VectorXd xs(d_);
    std::vector<VarState> struct_state(static_cast<std::size_t>(d_));
    for (Eigen::Index j = 0; j < d_; ++j) {
      if (lp_.lower(j) > lp_.upper(j)) throw ParameterError("variable lower bound exceeds upper bound");
      if (std::isfinite(lp_.lower(j))) {
        xs(j) = lp_.lower(j);
        struct_state[static_cast<std::size_t>(j)] = VarState::at_lower;
      } else if (std::isfinite(lp_.upper(j))) {
        xs(j) = lp_.upper(j);
        struct_state[static_cast<std::size_t>(j)] = VarState::at_upper;
      } else {
        xs(j) = 0.0;
        struct_state[static_cast<std::size_t>(j)] = VarState::free_zero;
      }
    }
    const Eigen::VectorXd residual = lp_.rhs - lp_.rows * xs;
    for (Eigen::Index i = 0; i < k_; ++i) {
      if (residual(i) < 0.0) art_row_.push_back(i);
    }

    const Eigen::Index n = total();
    lo_ = Eigen::VectorXd::Zero(n);
    hi_ = Eigen::VectorXd::Constant(n, kInf);
    lo_.head(d_) = lp_.lower;
    hi_.head(d_) = lp_.upper;
    x_ = Eigen::VectorXd::Zero(n);
    x_.head(d_) = xs;
    state_.assign(static_cast<std::size_t>(n), VarState::at_lower);
    for (Eigen::Index j = 0; j < d_; ++j) state_[static_cast<std::size_t>(j)] = struct_state[static_cast<std::size_t>(j)];

    basis_.assign(static_cast<std::size_t>(k_), 0);
    art_sign_.assign(static_cast<std::size_t>(k_), 0.0);
    std::size_t a = 0;
    for (Eigen::Index i = 0; i < k_; ++i) {
      if (a < art_row_.size() && art_row_[a] == i) {
        const Eigen::Index col = d_ + k_ + static_cast<Eigen::Index>(a);
        art_sign_[static_cast<std::size_t>(i)] = -1.0;
        basis_[static_cast<std::size_t>(i)] = col;
        state_[static_cast<std::size_t>(col)] = VarState::basic;
        x_(col) = -residual(i);
        ++a;
      } else {
        const Eigen::Index col = d_ + i;
        basis_[static_cast<std::size_t>(i)] = col;
        state_[static_cast<std::size_t>(col)] = VarState::basic;
        x_(col) = residual(i);
      }
    }
    binv_ = Eigen::MatrixXd::Identity(k_, k_);
    for (Eigen::Index i = 0; i < k_; ++i) {
      if (art_sign_[static_cast<std::size_t>(i)] != 0.0) binv_(i, i) = -1.0;
    }
  }

  // Dense column of variable j.
  Eigen::VectorXd column(Eigen::Index j) const {
    if (j < d_) return lp_.rows.col(j);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(k_);
    if (j < d_ + k_) {
      e(j - d_) = 1.0;
    } else {
      const Eigen::Index row = art_row_[static_cast<std::size_t>(j - d_ - k_)];
      e(row) = art_sign_[static_cast<std::size_t>(row)];
    }
    return e;
  }

  double column_dot(Eigen::Index j, const Eigen::VectorXd& y) const {
    if (j < d_) return lp_.rows.col(j).dot(y);
    if (j < d_ + k_) return y(j - d_);
    const Eigen::Index row = art_row_[static_cast<std::size_t>(j - d_ - k_)];
    return art_sign_[static_cast<std::size_t>(row)] * y(row);
  }

  void refactor() {
    if (k_ == 0) return;
    Eigen::MatrixXd basis_matrix(k_, k_);
    for (Eigen::Index i = 0; i < k_; ++i) basis_matrix.col(i) = column(basis_[static_cast<std::size_t>(i)]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix);
    binv_ = lu.inverse();
    if (!binv_.allFinite()) throw NumericalError("simplex basis became singular");

    Eigen::VectorXd rhs = lp_.rhs;
    for (Eigen::Index j = 0; j < total(); ++j) {
      if (state_[static_cast<std::size_t>(j)] != VarState::basic && x_(j) != 0.0) rhs -= column(j) * x_(j);
    }
    const Eigen::VectorXd xb = binv_ * rhs;
    for (Eigen::Index i = 0; i < k_; ++i) x_(basis_[static_cast<std::size_t>(i)]) = xb(i);
  }

  SolveStatus iterate(const Eigen::VectorXd& cost) {
    bool bland = false;
    std::size_t degenerate_run = 0;
    std::size_t since_refactor = 0;
    Eigen::VectorXd cb(k_);

    while (true) {
      if (iterations_ >= max_iter_) throw NumericalError("simplex iteration limit reached");
      if (since_refactor >= opt_.refactor_interval) {
        refactor();
        since_refactor = 0;
      }

      for (Eigen::Index i = 0; i < k_; ++i) cb(i) = cost(basis_[static_cast<std::size_t>(i)]);
      const Eigen::VectorXd y = binv_.transpose() * cb;

      // Pricing.
      Eigen::Index entering = -1;
      double entering_dj = 0.0;
      double best = 0.0;
      for (Eigen::Index j = 0; j < total(); ++j) {
        const VarState st = state_[static_cast<std::size_t>(j)];
        if (st == VarState::basic || lo_(j) == hi_(j)) continue;
        const double dj = cost(j) - column_dot(j, y);
        const bool improves = (st == VarState::at_lower && dj < -opt_.optimality_tol) ||
                              (st == VarState::at_upper && dj > opt_.optimality_tol) ||
                              (st == VarState::free_zero && std::abs(dj) > opt_.optimality_tol);
        if (!improves) continue;
        if (bland) {
          entering = j;
          entering_dj = dj;
          break;
        }
        if (std::abs(dj) > best) {
          best = std::abs(dj);
          entering = j;
          entering_dj = dj;
        }
      }
      if (entering < 0) return SolveStatus::optimal;

      const double dir = entering_dj < 0.0 ? 1.0 : -1.0;
      const Eigen::VectorXd alpha = binv_ * column(entering);

      // Ratio test. Basic i moves by -theta * dir * alpha(i).
      double theta = hi_(entering) - lo_(entering);  // bound flip distance, may be inf
      Eigen::Index leave = -1;
      double leave_pivot = 0.0;
      bool leave_to_upper = false;
      for (Eigen::Index i = 0; i < k_; ++i) {
        const double rate = dir * alpha(i);
        if (std::abs(rate) <= opt_.pivot_tol) continue;
        const Eigen::Index b = basis_[static_cast<std::size_t>(i)];
        double step = kInf;
        bool to_upper = false;
        if (rate > 0.0 && std::isfinite(lo_(b))) {
          step = std::max(0.0, (x_(b) - lo_(b)) / rate);
        } else if (rate < 0.0 && std::isfinite(hi_(b))) {
          step = std::max(0.0, (hi_(b) - x_(b)) / -rate);
          to_upper = true;
        }
        if (!std::isfinite(step)) continue;
        bool take = step < theta - 1e-12;
        if (!take && leave >= 0 && step <= theta + 1e-12) {
          const Eigen::Index current = basis_[static_cast<std::size_t>(leave)];
          take = bland ? b < current : std::abs(alpha(i)) > std::abs(leave_pivot);
        }
        if (take) {
          theta = std::min(theta, step);
          leave = i;
          leave_pivot = alpha(i);
          leave_to_upper = to_upper;
        }
      }
      if (!std::isfinite(theta)) return SolveStatus::unbounded;

      ++iterations_;
      ++since_refactor;
      if (theta <= 1e-12) {
        if (++degenerate_run >= opt_.degenerate_limit) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }

      for (Eigen::Index i = 0; i < k_; ++i) x_(basis_[static_cast<std::size_t>(i)]) -= theta * dir * alpha(i);
      x_(entering) += dir * theta;

      if (leave < 0) {
        // Bound flip; the basis is unchanged.
        if (dir > 0.0) {
          x_(entering) = hi_(entering);
          state_[static_cast<std::size_t>(entering)] = VarState::at_upper;
        } else {
          x_(entering) = lo_(entering);
          state_[static_cast<std::size_t>(entering)] = VarState::at_lower;
        }
        continue;
      }

      const Eigen::Index leaving = basis_[static_cast<std::size_t>(leave)];
      x_(leaving) = leave_to_upper ? hi_(leaving) : lo_(leaving);
      state_[static_cast<std::size_t>(leaving)] = leave_to_upper ? VarState::at_upper : VarState::at_lower;
      basis_[static_cast<std::size_t>(leave)] = entering;
      state_[static_cast<std::size_t>(entering)] = VarState::basic;

      // Product-form update of the explicit inverse.
      const double pivot = alpha(leave);
      const Eigen::RowVectorXd pivot_row = binv_.row(leave) / pivot;
      for (Eigen::Index i = 0; i < k_; ++i) {
        if (i == leave || alpha(i) == 0.0) continue;
        binv_.row(i) -= alpha(i) * pivot_row;
      }
      binv_.row(leave) = pivot_row;
    }
  }

  const LinearProgram& lp_;
  const SimplexOptions& opt_;
  Eigen::Index d_ = 0;
  Eigen::Index k_ = 0;
  std::size_t max_iter_ = 0;
  std::size_t iterations_ = 0;

  std::vector<Eigen::Index> art_row_;
  std::vector<double> art_sign_;
  Eigen::VectorXd lo_;
  Eigen::VectorXd hi_;
  Eigen::VectorXd x_;
  std::vector<VarState> state_;
  std::vector<Eigen::Index> basis_;
  Eigen::MatrixXd binv_;
};

}  // namespace

DispatchSolution solve(const LinearProgram& lp, const SimplexOptions& options) {
  BoundedSimplex simplex(lp, options);
  return simplex.run();
}

}  // namespace ccopf
