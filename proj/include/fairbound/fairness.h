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

#ifndef FAIRBOUND_FAIRNESS_H_
#define FAIRBOUND_FAIRNESS_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairbound/dataset.h"
#include "fairbound/surrogate.h"

namespace fairbound {

enum class FairnessNotion {
  kRiskDifference,
  kRiskRatio,
  kEqualizedOdds,
  kEqualizedOpportunity
};
std::string_view ToString(FairnessNotion notion);

// Fairness budget -c2 <= RD <= c1 (tau gives c1 = c2 = tau). For the
// risk-ratio notion c1 holds the ratio threshold tau.
struct FairnessBudget {
  double c1 = 0.05;
  double c2 = 0.05;
  FairnessNotion notion = FairnessNotion::kRiskDifference;

  static FairnessBudget Symmetric(double tau) { return {tau, tau}; }
  static FairnessBudget Asymmetric(double c1, double c2) { return {c1, c2}; }

  // c1, c2 in [0, 2] (risk difference notions) or tau > 0 (risk ratio).
  // Throws ContractError.
  void Validate() const;
};

// mean(pred = +1 | s+) - mean(pred = +1 | s-). Throws DegenerateGroupError
// when a group is absent and ContractError on length mismatch.
double RiskDifference(std::span<const int> predictions,
                      std::span<const Group> sensitive);

// (1/N) sum[(eta/p) 1{h >= 0} + ((1 - eta)/(1 - p)) 1{h < 0}] - 1.
double RiskDifferenceWeighted(std::span<const double> scores,
                              std::span<const double> eta, double p);

enum class RdSide { kKappa, kDelta };

// (1/N) sum[(eta/p) s(h) + ((1 - eta)/(1 - p)) s(-h)] - 1 with s = kappa or
// delta. With group-indicator eta this is mean_{s+} s(h) + mean_{s-} s(-h) - 1.
// When `grad` is non-empty it receives d value / d score_i.
double SurrogateRiskDifference(std::span<const double> scores,
                               std::span<const double> eta, double p,
                               const Surrogate& kappa, RdSide side,
                               std::span<double> grad = {});

struct ExtremeClassifiers {
  std::vector<int> f_max;  // +1 iff eta >= p
  std::vector<int> f_min;  // -f_max
  double rd_plus = 0.0;
  double rd_minus = 0.0;
  // Mean H-_kappa and H+_delta, filled when a surrogate is supplied.
  std::optional<double> rd_kappa_min;
  std::optional<double> rd_delta_max;
  // Some H value was only approached at the alpha bracket.
  bool truncated = false;
};

ExtremeClassifiers ComputeExtremes(std::span<const double> eta, double p,
                                   const Surrogate* kappa = nullptr);

struct CriterionDecision {
  bool pass = false;
  double rd_plus = 0.0;
  double rd_minus = 0.0;
  double tau_upper = 0.0;
  double tau_lower = 0.0;
  // tau_upper - rd_plus and rd_minus + tau_lower; both >= 0 iff PASS.
  double upper_margin = 0.0;
  double lower_margin = 0.0;
};

// Constraint-free criterion: every classifier on this data satisfies
// -c2 <= RD <= c1 iff RD+ <= c1 and RD- >= -c2. Needs eta; throws
// ContractError for a non risk-difference budget.
CriterionDecision ConstraintFreeCheck(const Dataset& data,
                                      const FairnessBudget& budget);

struct BoundsReport {
  SurrogateKind kappa = SurrogateKind::kHinge;
  double rd_minus = 0.0;
  double rd_plus = 0.0;
  double rd_kappa_min = 0.0;
  double rd_delta_max = 0.0;
  double rd_kappa_of_h = 0.0;
  double rd_delta_of_h = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  bool upper_vacuous = false;
  bool lower_vacuous = false;
  // psi^-1 received a (numerically) negative argument that was clamped.
  bool upper_clamped = false;
  bool lower_clamped = false;

  // Bounds intersected with [RD-, RD+], which every classifier satisfies.
  double certified_upper() const;
  double certified_lower() const;
};

// Corollary bounds for the classifier sign(h):
//   RD <= RD- + psi^-1(RD_kappa(h) - RD-_kappa)
//   RD >= RD+ - psi^-1(RD+_delta - RD_delta(h))
// with every quantity weighted by `eta` so the inequalities are exact on the
// empirical measure. Uses the symmetric psi branch.
//
// The extremes and psi transforms depend only on (eta, p, kappa), so a
// calculator built once can bound many score vectors.
class BoundsCalculator {
 public:
  BoundsCalculator(std::span<const double> eta, double p, SurrogateKind kappa);

  BoundsReport Evaluate(std::span<const double> scores) const;

  const ExtremeClassifiers& extremes() const { return extremes_; }
  const PsiTransform& psi_kappa() const { return psi_kappa_; }
  const PsiTransform& psi_delta() const { return psi_delta_; }

 private:
  std::vector<double> eta_;
  double p_;
  Surrogate kappa_;
  ExtremeClassifiers extremes_;
  PsiTransform psi_kappa_;
  PsiTransform psi_delta_;
};

BoundsReport ComputeBounds(std::span<const double> scores,
                           std::span<const double> eta, double p,
                           SurrogateKind kappa);
BoundsReport RdBounds(std::span<const double> scores, const Dataset& data,
                      SurrogateKind kappa);

// Right-hand sides that turn a true-scale budget into surrogate constraints
//   RD_kappa(h)  <= psi(c1 - RD-) + RD-_kappa
//   -RD_delta(h) <= psi(c2 + RD+) - RD+_delta
// A side is inactive when the extremes already imply it (c1 >= RD+, or
// -c2 <= RD-), and unattainable when no classifier can meet it.
struct RefinedThresholds {
  double c1 = 0.0;
  double c2 = 0.0;
  double upper_rhs = 0.0;
  double lower_rhs = 0.0;
  bool upper_active = true;
  bool lower_active = true;
  bool upper_unattainable = false;  // c1 < RD-
  bool lower_unattainable = false;  // -c2 > RD+
  bool upper_clamped = false;       // psi argument moved into its domain
  bool lower_clamped = false;
  // Both sides active and upper_rhs + lower_rhs < 2 (2 kappa(0) - 1). Every
  // score function has RD_kappa(h) - RD_delta(h) >= 2 (2 kappa(0) - 1) by
  // convexity, so no classifier of any kind meets both constraints.
  bool jointly_unattainable = false;
  ExtremeClassifiers extremes;
};

RefinedThresholds ComputeRefinedThresholds(std::span<const double> eta,
                                           double p, SurrogateKind kappa,
                                           double c1, double c2);

// ---------------------------------------------------------------------------
// Other notions

// mean(pred = +1 | s+) / mean(pred = +1 | s-); +infinity when the
// denominator is zero (including 0/0), with a logged warning.
double RiskRatio(std::span<const int> predictions,
                 std::span<const Group> sensitive);

// Convex surrogate of the risk-ratio constraint RR <= tau:
//   (1/N) sum[(eta/p) kappa(h) + tau ((1 - eta)/(1 - p)) kappa(-h)] - tau
// Non-positive means satisfied. `mirrored` swaps the groups (eta -> 1 - eta,
// p -> 1 - p), which bounds the reverse ratio by the same tau.
double RiskRatioConstraintValue(std::span<const double> scores,
                                std::span<const double> eta, double p,
                                double tau, const Surrogate& kappa,
                                bool mirrored = false,
                                std::span<double> grad = {});

struct EqualizedOddsGaps {
  // Positive-rate gap s+ minus s- among rows with the given true label;
  // empty when a (label, group) cell is empty.
  std::optional<double> negative_label;
  std::optional<double> positive_label;
};

EqualizedOddsGaps EqualizedOdds(std::span<const int> predictions,
                                std::span<const int> labels,
                                std::span<const Group> sensitive);
std::optional<double> EqualOpportunity(std::span<const int> predictions,
                                       std::span<const int> labels,
                                       std::span<const Group> sensitive);

// Surrogate risk difference restricted to rows with label `y`, using the
// conditional rate p_y = mean(eta over those rows). `eta` is
// P(S = s+ | x, y) per row (group indicators give exact conditional means).
// Gradient entries of other rows are zero.
double ConditionalSurrogateRiskDifference(std::span<const double> scores,
                                          std::span<const int> labels,
                                          std::span<const double> eta, int y,
                                          const Surrogate& kappa, RdSide side,
                                          std::span<double> grad = {});

}  // namespace fairbound

#endif  // FAIRBOUND_FAIRNESS_H_
