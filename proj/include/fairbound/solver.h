/*
 * Copyright 2026 The Fairbound Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FAIRBOUND_SOLVER_H_
#define FAIRBOUND_SOLVER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fairbound/dataset.h"
#include "fairbound/fairness.h"
#include "fairbound/surrogate.h"

namespace fairbound {

// score(x) = weights . x + bias; prediction sign(score) with sign(0) = +1.
struct LinearModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  std::vector<std::string> feature_names;

  std::size_t dim() const { return static_cast<std::size_t>(weights.size()); }
  // Throws ContractError on a dimension mismatch.
  std::vector<double> Scores(const Eigen::MatrixXd& features) const;
};

struct Prediction {
  std::vector<double> scores;
  std::vector<int> labels;
};

Prediction Predict(const LinearModel& model, const Eigen::MatrixXd& features);
Prediction Predict(const LinearModel& model, const Dataset& data);

double Accuracy(std::span<const int> predictions, std::span<const int> labels);

// A differentiable function of the score vector. When `grad` is non-empty it
// has one slot per row and receives d value / d score.
using ScoreFunction =
    std::function<double(std::span<const double> scores, std::span<double> grad)>;

// value(scores) <= rhs.
struct ScoreConstraint {
  std::string name;
  ScoreFunction value;
  double rhs = 0.0;
};

enum class InitMode { kZeros, kSeededRandom };
std::string_view ToString(InitMode mode);

// Which eta weights the Formulation-1 constraints use. Group indicators give
// the per-group means mean_{s+} kappa(h) + mean_{s-} kappa(-h) - 1.
enum class ConstraintWeighting { kGroupIndicator, kEtaHat };
std::string_view ToString(ConstraintWeighting weighting);

struct SolverConfig {
  SurrogateKind phi = SurrogateKind::kLogistic;
  SurrogateKind kappa = SurrogateKind::kHinge;
  FairnessBudget budget;
  double l2_penalty = 1e-4;
  int max_outer_iters = 60;
  int max_inner_iters = 2000;
  double feasibility_tol = 1e-6;
  double objective_tol = 1e-8;
  double initial_penalty = 10.0;
  double penalty_growth = 10.0;
  double max_penalty = 1e8;
  InitMode init = InitMode::kZeros;
  std::uint64_t seed = 0;
  ConstraintWeighting f1_weighting = ConstraintWeighting::kGroupIndicator;

  // Throws ContractError on non-positive tolerances, growth <= 1, negative
  // l2 or non-positive iteration caps.
  void Validate() const;
  // Stable "key=value" lines; Digest() hashes them.
  std::string Describe() const;
  std::string Digest() const;
};

// Knobs of the generic constrained minimizer.
struct MinimizerOptions {
  double l2_penalty = 1e-4;
  int max_outer_iters = 60;
  int max_inner_iters = 2000;
  double feasibility_tol = 1e-6;
  double objective_tol = 1e-8;
  double initial_penalty = 10.0;
  double penalty_growth = 10.0;
  double max_penalty = 1e8;
  InitMode init = InitMode::kZeros;
  std::uint64_t seed = 0;

  static MinimizerOptions From(const SolverConfig& config);
};

enum class TrainStatus { kConverged, kInfeasible, kIterationLimit };
std::string_view ToString(TrainStatus status);

struct ConstraintReport {
  std::string name;
  double value = 0.0;
  double rhs = 0.0;
  double violation = 0.0;  // max(0, value - rhs)
  double multiplier = 0.0;
};

struct TrainResult {
  LinearModel model;
  TrainStatus status = TrainStatus::kConverged;
  // Objective without the l2 term, and with it.
  double objective = 0.0;
  double regularized_objective = 0.0;
  std::vector<ConstraintReport> constraints;
  // Primal feasibility, dual feasibility and complementary slackness all
  // hold within the feasibility tolerance.
  bool kkt_ok = true;
  // Gradient norm of the Lagrangian at the returned iterate.
  double stationarity = 0.0;
  int outer_iterations = 0;
  int inner_iterations = 0;
  double final_penalty = 0.0;

  double max_violation() const;
};

// Augmented Lagrangian of
//   min objective(X theta) + l2/2 |w|^2  s.t. g_j(X theta) <= rhs_j
// over theta = [w; b], with the multiplier/penalty state held fixed.
class AugmentedObjective {
 public:
  AugmentedObjective(const Eigen::MatrixXd& features, ScoreFunction objective,
                     std::vector<ScoreConstraint> constraints, double l2_penalty);

  std::size_t num_params() const { return dim_ + 1; }
  std::size_t num_constraints() const { return constraints_.size(); }

  void set_state(std::vector<double> multipliers, double penalty);
  const std::vector<double>& multipliers() const { return multipliers_; }
  double penalty() const { return penalty_; }

  // Value and gradient of
  //   f + l2/2 |w|^2 + (1/2 rho) sum[max(0, lambda + rho g)^2 - lambda^2]
  // where g = value - rhs.
  double Evaluate(const Eigen::VectorXd& theta, Eigen::VectorXd* grad) const;

  // Objective value without penalty terms (and without l2 when requested).
  double Objective(const Eigen::VectorXd& theta, bool with_l2) const;
  // g_j = value_j - rhs_j.
  std::vector<double> ConstraintGaps(const Eigen::VectorXd& theta) const;
  const std::vector<ScoreConstraint>& constraints() const { return constraints_; }

 private:
  void ScoresOf(const Eigen::VectorXd& theta, std::vector<double>* scores) const;
  void PullBack(const std::vector<double>& score_grad, const Eigen::VectorXd& theta,
                Eigen::VectorXd* grad) const;

  const Eigen::MatrixXd& features_;
  std::size_t dim_;
  ScoreFunction objective_;
  std::vector<ScoreConstraint> constraints_;
  double l2_;
  std::vector<double> multipliers_;
  double penalty_ = 10.0;
};

struct InnerResult {
  Eigen::VectorXd theta;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
};

// L-BFGS with Armijo backtracking; falls back to steepest descent when the
// quasi-Newton direction is not a descent direction. Stops on gradient norm
// <= tol, on stalled progress, or at the iteration cap. Throws StepSizeError
// if the objective becomes non-finite.
InnerResult MinimizeSmooth(
    const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>& f,
    Eigen::VectorXd theta, int max_iters, double tol);

// Generic constrained fit of a linear score model. The returned model carries
// `feature_names`. Infeasible runs return the iterate with the smallest
// violation seen.
TrainResult FitLinear(const Eigen::MatrixXd& features,
                      const std::vector<std::string>& feature_names,
                      const ScoreFunction& objective,
                      std::vector<ScoreConstraint> constraints,
                      const MinimizerOptions& options);

// Mean phi(y h) as a ScoreFunction.
ScoreFunction PhiLossObjective(std::span<const int> labels, SurrogateKind phi);

TrainResult TrainUnconstrained(const Dataset& data, const SolverConfig& config);

// Formulation 1 with surrogate-scale thresholds:
//   RD_kappa(h) <= c1_surrogate, -RD_delta(h) <= c2_surrogate.
// Risk-ratio budgets add the surrogate ratio constraint in both directions;
// equalized-odds / -opportunity budgets constrain the label-conditional
// surrogate risk differences.
TrainResult TrainFormulation1(const Dataset& data, const SolverConfig& config,
                              double c1_surrogate, double c2_surrogate);

// Surrogate constraints for Formulation 1 (exposed for tests and gradient
// checks). `eta`/`p` select the weighting.
std::vector<ScoreConstraint> RiskDifferenceConstraints(
    std::span<const double> eta, double p, SurrogateKind kappa,
    std::optional<double> upper_rhs, std::optional<double> lower_rhs);

struct Formulation2Result {
  TrainResult train;
  RefinedThresholds thresholds;
  BoundsReport bounds;
  // Weighted RD of the returned classifier.
  double weighted_rd = 0.0;
  // Bound widening allowed by the solver's feasibility tolerance.
  double upper_slack = 0.0;
  double lower_slack = 0.0;
  // Certified interval lies inside [-c2 - slack, c1 + slack].
  bool guarantee_holds = false;
  // Some side of the budget is beyond what any classifier can reach, or the
  // two surrogate constraints cannot hold together.
  bool unattainable = false;
};

// Formulation 2: true-scale budget (c1, c2) from config.budget, turned into
// surrogate thresholds by the psi transform, trained with eta-weighted
// constraints. Inactive sides are dropped. Requires eta on `data`.
Formulation2Result TrainFormulation2(const Dataset& data,
                                     const SolverConfig& config);

// (1/N) sum (s_i - p) h(x_i) with s_i in {0, 1}.
double ScoreCovariance(std::span<const double> scores,
                       std::span<const Group> sensitive);

// |covariance| <= cov_threshold; an infinite threshold trains unconstrained.
TrainResult TrainCovarianceBaseline(const Dataset& data,
                                    const SolverConfig& config,
                                    double cov_threshold);

}  // namespace fairbound

#endif  // FAIRBOUND_SOLVER_H_
