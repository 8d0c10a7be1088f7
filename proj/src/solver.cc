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

#include "fairbound/solver.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <utility>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "fairbound/error.h"
#include "fairbound/numeric.h"

namespace fairbound {

std::vector<double> LinearModel::Scores(const Eigen::MatrixXd& features) const {
  if (static_cast<std::size_t>(features.cols()) != dim()) {
    throw ContractError(fmt::format("model has {} weights but data has {} features",
                                    dim(), features.cols()));
  }
  std::vector<double> out(static_cast<std::size_t>(features.rows()));
  Eigen::Map<Eigen::VectorXd>(out.data(), features.rows()) =
      (features * weights).array() + bias;
  return out;
}

Prediction Predict(const LinearModel& model, const Eigen::MatrixXd& features) {
  Prediction p;
  p.scores = model.Scores(features);
  p.labels.reserve(p.scores.size());
  for (const double s : p.scores) p.labels.push_back(SignOf(s));
  return p;
}

Prediction Predict(const LinearModel& model, const Dataset& data) {
  return Predict(model, data.features());
}

double Accuracy(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size() || labels.empty()) {
    throw ContractError("accuracy: length mismatch or empty input");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += predictions[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

std::string_view ToString(InitMode mode) {
  return mode == InitMode::kZeros ? "zeros" : "seeded-random";
}

std::string_view ToString(ConstraintWeighting weighting) {
  return weighting == ConstraintWeighting::kGroupIndicator ? "group-indicator"
                                                           : "eta-hat";
}

std::string_view ToString(TrainStatus status) {
  switch (status) {
    case TrainStatus::kConverged:
      return "converged";
    case TrainStatus::kInfeasible:
      return "infeasible";
    case TrainStatus::kIterationLimit:
      return "iteration-limit";
  }
  return "unknown";
}

void SolverConfig::Validate() const {
  budget.Validate();
  if (!(l2_penalty >= 0.0)) throw ContractError("l2_penalty must be >= 0");
  if (!(feasibility_tol > 0.0) || !(objective_tol > 0.0)) {
    throw ContractError("tolerances must be positive");
  }
  if (!(penalty_growth > 1.0)) throw ContractError("penalty_growth must be > 1");
  if (!(initial_penalty > 0.0) || !(max_penalty >= initial_penalty)) {
    throw ContractError("penalty range is invalid");
  }
  if (max_outer_iters <= 0 || max_inner_iters <= 0) {
    throw ContractError("iteration caps must be positive");
  }
}

std::string SolverConfig::Describe() const {
  std::string s;
  auto line = [&s](std::string_view key, const auto& value) {
    s += fmt::format("{}={}\n", key, value);
  };
  line("phi", ToString(phi));
  line("kappa", ToString(kappa));
  line("notion", ToString(budget.notion));
  line("c1", budget.c1);
  line("c2", budget.c2);
  line("l2_penalty", l2_penalty);
  line("max_outer_iters", max_outer_iters);
  line("max_inner_iters", max_inner_iters);
  line("feasibility_tol", feasibility_tol);
  line("objective_tol", objective_tol);
  line("initial_penalty", initial_penalty);
  line("penalty_growth", penalty_growth);
  line("max_penalty", max_penalty);
  line("init", ToString(init));
  line("seed", seed);
  line("f1_weighting", ToString(f1_weighting));
  return s;
}

std::string SolverConfig::Digest() const {
  return fmt::format("{:016x}", Fnv1a64(Describe()));
}

MinimizerOptions MinimizerOptions::From(const SolverConfig& config) {
  config.Validate();
  MinimizerOptions o;
  o.l2_penalty = config.l2_penalty;
  o.max_outer_iters = config.max_outer_iters;
  o.max_inner_iters = config.max_inner_iters;
  o.feasibility_tol = config.feasibility_tol;
  o.objective_tol = config.objective_tol;
  o.initial_penalty = config.initial_penalty;
  o.penalty_growth = config.penalty_growth;
  o.max_penalty = config.max_penalty;
  o.init = config.init;
  o.seed = config.seed;
  return o;
}

double TrainResult::max_violation() const {
  double v = 0.0;
  for (const auto& c : constraints) v = std::max(v, c.violation);
  return v;
}

// ---------------------------------------------------------------------------
// AugmentedObjective

AugmentedObjective::AugmentedObjective(const Eigen::MatrixXd& features,
                                       ScoreFunction objective,
                                       std::vector<ScoreConstraint> constraints,
                                       double l2_penalty)
    : features_(features),
      dim_(static_cast<std::size_t>(features.cols())),
      objective_(std::move(objective)),
      constraints_(std::move(constraints)),
      l2_(l2_penalty),
      multipliers_(constraints_.size(), 0.0) {}

void AugmentedObjective::set_state(std::vector<double> multipliers,
                                   double penalty) {
  if (multipliers.size() != constraints_.size()) {
    throw ContractError("multiplier count does not match constraints");
  }
  multipliers_ = std::move(multipliers);
  penalty_ = penalty;
}

void AugmentedObjective::ScoresOf(const Eigen::VectorXd& theta,
                                  std::vector<double>* scores) const {
  scores->resize(static_cast<std::size_t>(features_.rows()));
  Eigen::Map<Eigen::VectorXd>(scores->data(), features_.rows()) =
      (features_ * theta.head(dim_)).array() + theta(dim_);
}

void AugmentedObjective::PullBack(const std::vector<double>& score_grad,
                                  const Eigen::VectorXd& theta,
                                  Eigen::VectorXd* grad) const {
  const Eigen::Map<const Eigen::VectorXd> g(score_grad.data(), features_.rows());
  grad->resize(static_cast<Eigen::Index>(dim_ + 1));
  grad->head(dim_) = features_.transpose() * g + l2_ * theta.head(dim_);
  (*grad)(dim_) = g.sum();
}

double AugmentedObjective::Evaluate(const Eigen::VectorXd& theta,
                                    Eigen::VectorXd* grad) const {
  std::vector<double> scores;
  ScoresOf(theta, &scores);
  const std::size_t n = scores.size();
  std::vector<double> total(grad ? n : 0, 0.0);
  double value = objective_(scores, total) +
                 0.5 * l2_ * theta.head(dim_).squaredNorm();
  std::vector<double> cg(grad ? n : 0);
  for (std::size_t j = 0; j < constraints_.size(); ++j) {
    const double g = constraints_[j].value(scores, cg) - constraints_[j].rhs;
    const double lam = multipliers_[j];
    const double shifted = std::max(0.0, lam + penalty_ * g);
    value += (shifted * shifted - lam * lam) / (2.0 * penalty_);
    if (grad && shifted > 0.0) {
      for (std::size_t i = 0; i < n; ++i) total[i] += shifted * cg[i];
    }
  }
  if (grad) PullBack(total, theta, grad);
  return value;
}

double AugmentedObjective::Objective(const Eigen::VectorXd& theta,
                                     bool with_l2) const {
  std::vector<double> scores;
  ScoresOf(theta, &scores);
  double v = objective_(scores, {});
  if (with_l2) v += 0.5 * l2_ * theta.head(dim_).squaredNorm();
  return v;
}

std::vector<double> AugmentedObjective::ConstraintGaps(
    const Eigen::VectorXd& theta) const {
  std::vector<double> scores;
  ScoresOf(theta, &scores);
  std::vector<double> gaps;
  gaps.reserve(constraints_.size());
  for (const auto& c : constraints_) gaps.push_back(c.value(scores, {}) - c.rhs);
  return gaps;
}

// ---------------------------------------------------------------------------
// L-BFGS

InnerResult MinimizeSmooth(
    const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>& f,
    Eigen::VectorXd theta, int max_iters, double tol) {
  constexpr std::size_t kMemory = 10;
  constexpr double kArmijo = 1e-4;
  constexpr int kStallLimit = 5;

  Eigen::VectorXd grad;
  double fx = f(theta, &grad);
  if (!std::isfinite(fx) || !grad.allFinite()) {
    throw StepSizeError("objective is not finite at the starting point");
  }
  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> memory;
  InnerResult out;
  int stall = 0;
  Eigen::VectorXd trial_grad;
  for (out.iterations = 0; out.iterations < max_iters; ++out.iterations) {
    const double gnorm = grad.norm();
    if (gnorm <= tol) break;

    // Two-loop recursion.
    Eigen::VectorXd d = -grad;
    std::vector<double> alphas(memory.size());
    for (std::size_t k = memory.size(); k-- > 0;) {
      const auto& [s, y] = memory[k];
      alphas[k] = s.dot(d) / y.dot(s);
      d -= alphas[k] * y;
    }
    if (!memory.empty()) {
      const auto& [s, y] = memory.back();
      d *= s.dot(y) / y.squaredNorm();
    }
    for (std::size_t k = 0; k < memory.size(); ++k) {
      const auto& [s, y] = memory[k];
      const double beta = y.dot(d) / y.dot(s);
      d += (alphas[k] - beta) * s;
    }

    bool accepted = false;
    double step = 1.0;
    double fnew = fx;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      double slope = grad.dot(d);
      if (attempt == 1 || !(slope < 0.0)) {
        memory.clear();
        d = -grad;
        slope = -gnorm * gnorm;
      }
      step = memory.empty() ? std::min(1.0, 1.0 / gnorm) : 1.0;
      while (step > 1e-20) {
        fnew = f(theta + step * d, &trial_grad);
        if (std::isfinite(fnew) && fnew <= fx + kArmijo * step * slope) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted && memory.empty()) break;
    }
    if (!accepted) break;

    const Eigen::VectorXd s = step * d;
    const Eigen::VectorXd y = trial_grad - grad;
    theta += s;
    if (!trial_grad.allFinite()) {
      throw StepSizeError("gradient became non-finite during line search");
    }
    grad = trial_grad;
    if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
      memory.emplace_back(s, y);
      if (memory.size() > kMemory) memory.pop_front();
    }
    const double decrease = fx - fnew;
    fx = fnew;
    stall = decrease <= 1e-15 * std::max(1.0, std::abs(fx)) ? stall + 1 : 0;
    if (stall >= kStallLimit) {
      ++out.iterations;
      break;
    }
  }
  out.theta = std::move(theta);
  out.value = fx;
  out.grad_norm = grad.norm();
  return out;
}

// ---------------------------------------------------------------------------
// Augmented Lagrangian driver

namespace {

Eigen::VectorXd InitialTheta(std::size_t params, const MinimizerOptions& o) {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(params));
  if (o.init == InitMode::kSeededRandom) {
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> normal(0.0, 0.1);
    for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = normal(rng);
  }
  return theta;
}

LinearModel ModelFromTheta(const Eigen::VectorXd& theta,
                           const std::vector<std::string>& names) {
  LinearModel m;
  const Eigen::Index d = theta.size() - 1;
  m.weights = theta.head(d);
  m.bias = theta(d);
  m.feature_names = names;
  return m;
}

double MaxPositive(const std::vector<double>& gaps) {
  double v = 0.0;
  for (const double g : gaps) v = std::max(v, g);
  return v;
}

double Complementarity(const std::vector<double>& gaps,
                       const std::vector<double>& multipliers, double penalty) {
  double c = 0.0;
  for (std::size_t j = 0; j < gaps.size(); ++j) {
    c = std::max(c, std::abs(std::min(-gaps[j], multipliers[j] / penalty)));
  }
  return c;
}

}  // namespace

TrainResult FitLinear(const Eigen::MatrixXd& features,
                      const std::vector<std::string>& feature_names,
                      const ScoreFunction& objective,
                      std::vector<ScoreConstraint> constraints,
                      const MinimizerOptions& options) {
  if (features.rows() < 2) throw ContractError("training needs at least 2 rows");
  AugmentedObjective aug(features, objective, std::move(constraints),
                         options.l2_penalty);
  const std::size_t m = aug.num_constraints();
  auto evaluate = [&aug](const Eigen::VectorXd& t, Eigen::VectorXd* g) {
    return aug.Evaluate(t, g);
  };

  TrainResult result;
  Eigen::VectorXd theta = InitialTheta(aug.num_params(), options);
  std::vector<double> lambda(m, 0.0);
  double rho = options.initial_penalty;
  double prev_violation = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_theta = theta;
  std::vector<double> best_lambda = lambda;
  double best_violation = std::numeric_limits<double>::infinity();
  int no_progress = 0;
  bool done = false;
  double grad_norm = 0.0;
  result.status = TrainStatus::kIterationLimit;

  for (int outer = 1; outer <= options.max_outer_iters && !done; ++outer) {
    aug.set_state(lambda, rho);
    InnerResult inner =
        MinimizeSmooth(evaluate, theta, options.max_inner_iters, options.objective_tol);
    theta = inner.theta;
    grad_norm = inner.grad_norm;
    result.inner_iterations += inner.iterations;
    result.outer_iterations = outer;

    if (m == 0) {
      result.status = inner.iterations < options.max_inner_iters
                          ? TrainStatus::kConverged
                          : TrainStatus::kIterationLimit;
      break;
    }

    const std::vector<double> gaps = aug.ConstraintGaps(theta);
    const double violation = MaxPositive(gaps);
    for (std::size_t j = 0; j < m; ++j) {
      lambda[j] = std::max(0.0, lambda[j] + rho * gaps[j]);
    }
    if (violation < best_violation) {
      best_violation = violation;
      best_theta = theta;
      best_lambda = lambda;
    }
    const double comp = Complementarity(gaps, lambda, rho);
    spdlog::debug("outer {}: rho={:g} violation={:.3e} comp={:.3e} inner={}",
                  outer, rho, violation, comp, inner.iterations);
    if (violation <= options.feasibility_tol && comp <= options.feasibility_tol) {
      result.status = TrainStatus::kConverged;
      done = true;
      break;
    }

    if (rho >= options.max_penalty) {
      no_progress = violation > options.feasibility_tol &&
                            violation >= (1.0 - 1e-3) * prev_violation
                        ? no_progress + 1
                        : 0;
      if (no_progress >= 3) {
        result.status = TrainStatus::kInfeasible;
        theta = best_theta;
        lambda = best_lambda;
        done = true;
        break;
      }
    }
    if (violation > 0.25 * prev_violation) {
      rho = std::min(rho * options.penalty_growth, options.max_penalty);
    }
    prev_violation = violation;
  }

  aug.set_state(lambda, rho);
  result.model = ModelFromTheta(theta, feature_names);
  result.objective = aug.Objective(theta, false);
  result.regularized_objective = aug.Objective(theta, true);
  result.final_penalty = rho;
  result.stationarity = grad_norm;

  const std::vector<double> gaps = aug.ConstraintGaps(theta);
  result.kkt_ok = MaxPositive(gaps) <= options.feasibility_tol &&
                  Complementarity(gaps, lambda, rho) <= options.feasibility_tol;
  for (std::size_t j = 0; j < m; ++j) {
    const ScoreConstraint& c = aug.constraints()[j];
    result.constraints.push_back({c.name, gaps[j] + c.rhs, c.rhs,
                                  std::max(0.0, gaps[j]), lambda[j]});
  }
  return result;
}

// ---------------------------------------------------------------------------
// Training entry points

ScoreFunction PhiLossObjective(std::span<const int> labels, SurrogateKind phi) {
  return [y = std::vector<int>(labels.begin(), labels.end()), loss = Surrogate(phi)](
             std::span<const double> scores, std::span<double> grad) {
    const double inv_n = 1.0 / static_cast<double>(scores.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const double m = y[i] * scores[i];
      sum += loss.Loss(m);
      if (!grad.empty()) grad[i] = inv_n * y[i] * loss.LossDerivative(m);
    }
    return sum * inv_n;
  };
}

TrainResult TrainUnconstrained(const Dataset& data, const SolverConfig& config) {
  return FitLinear(data.features(), data.feature_names(),
                   PhiLossObjective(data.labels(), config.phi), {},
                   MinimizerOptions::From(config));
}

std::vector<ScoreConstraint> RiskDifferenceConstraints(
    std::span<const double> eta, double p, SurrogateKind kind,
    std::optional<double> upper_rhs, std::optional<double> lower_rhs) {
  std::vector<double> e(eta.begin(), eta.end());
  const Surrogate kappa(kind);
  std::vector<ScoreConstraint> out;
  if (upper_rhs) {
    out.push_back({"rd_kappa_upper",
                   [e, p, kappa](std::span<const double> s, std::span<double> g) {
                     return SurrogateRiskDifference(s, e, p, kappa, RdSide::kKappa, g);
                   },
                   *upper_rhs});
  }
  if (lower_rhs) {
    out.push_back({"rd_delta_lower",
                   [e, p, kappa](std::span<const double> s, std::span<double> g) {
                     const double v =
                         SurrogateRiskDifference(s, e, p, kappa, RdSide::kDelta, g);
                     for (double& x : g) x = -x;
                     return -v;
                   },
                   *lower_rhs});
  }
  return out;
}

namespace {

std::vector<ScoreConstraint> ConditionalConstraints(
    const Dataset& data, std::span<const double> eta, SurrogateKind kind,
    std::span<const int> label_values, double c1, double c2) {
  std::vector<ScoreConstraint> out;
  const std::vector<int> labels(data.labels().begin(), data.labels().end());
  const std::vector<double> e(eta.begin(), eta.end());
  const Surrogate kappa(kind);
  for (const int y : label_values) {
    out.push_back({fmt::format("cond_rd_kappa_upper[y={}]", y),
                   [labels, e, kappa, y](std::span<const double> s,
                                         std::span<double> g) {
                     return ConditionalSurrogateRiskDifference(s, labels, e, y, kappa,
                                                               RdSide::kKappa, g);
                   },
                   c1});
    out.push_back({fmt::format("cond_rd_delta_lower[y={}]", y),
                   [labels, e, kappa, y](std::span<const double> s,
                                         std::span<double> g) {
                     const double v = ConditionalSurrogateRiskDifference(
                         s, labels, e, y, kappa, RdSide::kDelta, g);
                     for (double& x : g) x = -x;
                     return -v;
                   },
                   c2});
  }
  return out;
}

}  // namespace

TrainResult TrainFormulation1(const Dataset& data, const SolverConfig& config,
                              double c1_surrogate, double c2_surrogate) {
  config.budget.Validate();
  std::vector<double> eta;
  double p = data.group_rate();
  if (config.f1_weighting == ConstraintWeighting::kEtaHat) {
    const auto e = data.eta_hat();
    eta.assign(e.begin(), e.end());
  } else {
    eta = data.GroupIndicator();
  }

  std::vector<ScoreConstraint> constraints;
  switch (config.budget.notion) {
    case FairnessNotion::kRiskDifference:
      constraints = RiskDifferenceConstraints(eta, p, config.kappa, c1_surrogate,
                                              c2_surrogate);
      break;
    case FairnessNotion::kRiskRatio: {
      const double tau = config.budget.c1;
      const Surrogate kappa(config.kappa);
      for (const bool mirrored : {false, true}) {
        constraints.push_back(
            {mirrored ? "rr_kappa_mirrored" : "rr_kappa",
             [eta, p, tau, kappa, mirrored](std::span<const double> s,
                                            std::span<double> g) {
               return RiskRatioConstraintValue(s, eta, p, tau, kappa, mirrored, g);
             },
             mirrored ? c2_surrogate : c1_surrogate});
      }
      break;
    }
    case FairnessNotion::kEqualizedOdds: {
      const int ys[] = {-1, 1};
      constraints = ConditionalConstraints(data, eta, config.kappa, ys,
                                           c1_surrogate, c2_surrogate);
      break;
    }
    case FairnessNotion::kEqualizedOpportunity: {
      const int ys[] = {1};
      constraints = ConditionalConstraints(data, eta, config.kappa, ys,
                                           c1_surrogate, c2_surrogate);
      break;
    }
  }
  return FitLinear(data.features(), data.feature_names(),
                   PhiLossObjective(data.labels(), config.phi),
                   std::move(constraints), MinimizerOptions::From(config));
}

Formulation2Result TrainFormulation2(const Dataset& data,
                                     const SolverConfig& config) {
  if (config.budget.notion != FairnessNotion::kRiskDifference) {
    throw ContractError("formulation 2 certifies risk-difference budgets only");
  }
  config.budget.Validate();
  const std::span<const double> eta = data.eta_hat();
  const double p = data.group_rate();
  const double c1 = config.budget.c1;
  const double c2 = config.budget.c2;

  Formulation2Result out;
  out.thresholds = ComputeRefinedThresholds(eta, p, config.kappa, c1, c2);
  const RefinedThresholds& t = out.thresholds;
  out.unattainable =
      t.upper_unattainable || t.lower_unattainable || t.jointly_unattainable;
  if (t.upper_clamped || t.lower_clamped) {
    spdlog::warn("psi argument clamped into its domain");
  }
  if (t.upper_unattainable || t.lower_unattainable) {
    spdlog::warn("budget [-{}, {}] lies outside [RD-, RD+] = [{}, {}]", c2, c1,
                 t.extremes.rd_minus, t.extremes.rd_plus);
  }
  if (t.jointly_unattainable) {
    spdlog::warn("surrogate thresholds {} + {} cannot both hold for any classifier",
                 t.upper_rhs, t.lower_rhs);
  }

  std::optional<double> upper;
  std::optional<double> lower;
  if (t.upper_active) upper = t.upper_rhs;
  if (t.lower_active) lower = t.lower_rhs;
  out.train = FitLinear(data.features(), data.feature_names(),
                        PhiLossObjective(data.labels(), config.phi),
                        RiskDifferenceConstraints(eta, p, config.kappa, upper, lower),
                        MinimizerOptions::From(config));

  const BoundsCalculator calc(eta, p, config.kappa);
  const std::vector<double> scores = out.train.model.Scores(data.features());
  out.bounds = calc.Evaluate(scores);
  out.weighted_rd = RiskDifferenceWeighted(scores, eta, p);

  const double tol = config.feasibility_tol;
  const ExtremeClassifiers& ex = calc.extremes();
  if (t.upper_active && !t.upper_unattainable) {
    const double target = t.upper_rhs - *ex.rd_kappa_min + tol;
    out.upper_slack =
        std::max(0.0, calc.psi_kappa().Inverse(target).mu - (c1 - ex.rd_minus));
  }
  if (t.lower_active && !t.lower_unattainable) {
    const double target = -t.lower_rhs + *ex.rd_delta_max + tol;
    out.lower_slack =
        std::max(0.0, calc.psi_delta().Inverse(target).mu - (c2 + ex.rd_plus));
  }
  constexpr double kRounding = 1e-12;
  out.guarantee_holds =
      out.train.status == TrainStatus::kConverged &&
      out.bounds.certified_upper() <= c1 + out.upper_slack + kRounding &&
      out.bounds.certified_lower() >= -c2 - out.lower_slack - kRounding;
  return out;
}

double ScoreCovariance(std::span<const double> scores,
                       std::span<const Group> sensitive) {
  if (scores.size() != sensitive.size() || scores.empty()) {
    throw ContractError("covariance: length mismatch or empty input");
  }
  double p = 0.0;
  for (const Group g : sensitive) p += g == Group::kPlus;
  p /= static_cast<double>(sensitive.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    sum += ((sensitive[i] == Group::kPlus ? 1.0 : 0.0) - p) * scores[i];
  }
  return sum / static_cast<double>(scores.size());
}

TrainResult TrainCovarianceBaseline(const Dataset& data,
                                    const SolverConfig& config,
                                    double cov_threshold) {
  if (!(cov_threshold >= 0.0)) {
    throw ContractError("covariance threshold must be >= 0");
  }
  if (std::isinf(cov_threshold)) return TrainUnconstrained(data, config);

  const double n = static_cast<double>(data.size());
  std::vector<double> centered = data.GroupIndicator();
  for (double& c : centered) c = (c - data.group_rate()) / n;
  auto make = [centered](double sign) {
    return [centered, sign](std::span<const double> s, std::span<double> g) {
      double v = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) v += centered[i] * s[i];
      if (!g.empty()) {
        for (std::size_t i = 0; i < s.size(); ++i) g[i] = sign * centered[i];
      }
      return sign * v;
    };
  };
  std::vector<ScoreConstraint> constraints = {
      {"covariance_upper", make(1.0), cov_threshold},
      {"covariance_lower", make(-1.0), cov_threshold}};
  return FitLinear(data.features(), data.feature_names(),
                   PhiLossObjective(data.labels(), config.phi),
                   std::move(constraints), MinimizerOptions::From(config));
}

}  // namespace fairbound
