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

#include "fairbound/fairness.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "fairbound/error.h"
#include "fairbound/numeric.h"

namespace fairbound {
namespace {

void CheckSameLength(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ContractError(fmt::format("{}: length mismatch ({} vs {})", what, a, b));
  }
}

struct GroupRates {
  double plus = 0.0;
  double minus = 0.0;
  std::size_t n_plus = 0;
  std::size_t n_minus = 0;
};

GroupRates PositiveRates(std::span<const int> predictions,
                         std::span<const Group> sensitive) {
  CheckSameLength(predictions.size(), sensitive.size(), "positive rates");
  GroupRates r;
  std::size_t pos_plus = 0;
  std::size_t pos_minus = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const bool positive = predictions[i] > 0;
    if (sensitive[i] == Group::kPlus) {
      ++r.n_plus;
      pos_plus += positive;
    } else {
      ++r.n_minus;
      pos_minus += positive;
    }
  }
  if (r.n_plus == 0 || r.n_minus == 0) {
    throw DegenerateGroupError("both sensitive groups must be present");
  }
  r.plus = static_cast<double>(pos_plus) / static_cast<double>(r.n_plus);
  r.minus = static_cast<double>(pos_minus) / static_cast<double>(r.n_minus);
  return r;
}

}  // namespace

std::string_view ToString(FairnessNotion notion) {
  switch (notion) {
    case FairnessNotion::kRiskDifference:
      return "risk-difference";
    case FairnessNotion::kRiskRatio:
      return "risk-ratio";
    case FairnessNotion::kEqualizedOdds:
      return "equalized-odds";
    case FairnessNotion::kEqualizedOpportunity:
      return "equalized-opportunity";
  }
  return "unknown";
}

void FairnessBudget::Validate() const {
  if (notion == FairnessNotion::kRiskRatio) {
    if (!(c1 > 0.0)) throw ContractError("risk-ratio threshold must be > 0");
    return;
  }
  for (const double c : {c1, c2}) {
    if (!(c >= 0.0 && c <= 2.0)) {
      throw ContractError(fmt::format("budget {} outside [0, 2]", c));
    }
  }
}

double RiskDifference(std::span<const int> predictions,
                      std::span<const Group> sensitive) {
  const GroupRates r = PositiveRates(predictions, sensitive);
  return r.plus - r.minus;
}

double RiskDifferenceWeighted(std::span<const double> scores,
                              std::span<const double> eta, double p) {
  CheckSameLength(scores.size(), eta.size(), "RiskDifferenceWeighted");
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    sum += SignOf(scores[i]) > 0 ? eta[i] / p : (1.0 - eta[i]) / (1.0 - p);
  }
  return sum / static_cast<double>(scores.size()) - 1.0;
}

double SurrogateRiskDifference(std::span<const double> scores,
                               std::span<const double> eta, double p,
                               const Surrogate& kappa, RdSide side,
                               std::span<double> grad) {
  CheckSameLength(scores.size(), eta.size(), "SurrogateRiskDifference");
  const bool want_grad = !grad.empty();
  if (want_grad) CheckSameLength(scores.size(), grad.size(), "gradient");
  const double inv_n = 1.0 / static_cast<double>(scores.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double a = eta[i] / p;
    const double b = (1.0 - eta[i]) / (1.0 - p);
    const double h = scores[i];
    if (side == RdSide::kKappa) {
      sum += a * kappa.Value(h) + b * kappa.Value(-h);
      if (want_grad) {
        grad[i] = inv_n * (a * kappa.Derivative(h) - b * kappa.Derivative(-h));
      }
    } else {
      sum += a * kappa.Delta(h) + b * kappa.Delta(-h);
      if (want_grad) {
        grad[i] = inv_n *
                  (a * kappa.DeltaDerivative(h) - b * kappa.DeltaDerivative(-h));
      }
    }
  }
  return sum * inv_n - 1.0;
}

ExtremeClassifiers ComputeExtremes(std::span<const double> eta, double p,
                                   const Surrogate* kappa) {
  ExtremeClassifiers out;
  out.f_max.resize(eta.size());
  out.f_min.resize(eta.size());
  double plus = 0.0;
  double minus = 0.0;
  double kappa_min = 0.0;
  double delta_max = 0.0;
  // eta often takes few distinct values; the surrogate extremes are searches.
  std::map<double, std::pair<ConditionalExtreme, ConditionalExtreme>> cache;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    out.f_max[i] = eta[i] >= p ? 1 : -1;
    out.f_min[i] = -out.f_max[i];
    plus += HPlusIndicator(eta[i], p);
    minus += HMinusIndicator(eta[i], p);
    if (kappa) {
      auto it = cache.find(eta[i]);
      if (it == cache.end()) {
        it = cache
                 .emplace(eta[i], std::pair{HMinusSearch(eta[i], p, *kappa),
                                            HPlusDeltaSearch(eta[i], p, *kappa)})
                 .first;
      }
      kappa_min += it->second.first.value;
      delta_max += it->second.second.value;
      out.truncated |= it->second.first.truncated || it->second.second.truncated;
    }
  }
  const double n = static_cast<double>(eta.size());
  out.rd_plus = plus / n;
  out.rd_minus = minus / n;
  if (kappa) {
    out.rd_kappa_min = kappa_min / n;
    out.rd_delta_max = delta_max / n;
  }
  return out;
}

CriterionDecision ConstraintFreeCheck(const Dataset& data,
                                      const FairnessBudget& budget) {
  if (budget.notion != FairnessNotion::kRiskDifference) {
    throw ContractError("the constraint-free check applies to risk difference");
  }
  budget.Validate();
  const ExtremeClassifiers ex = ComputeExtremes(data.eta_hat(), data.group_rate());
  CriterionDecision d;
  d.rd_plus = ex.rd_plus;
  d.rd_minus = ex.rd_minus;
  d.tau_upper = budget.c1;
  d.tau_lower = budget.c2;
  d.upper_margin = budget.c1 - ex.rd_plus;
  d.lower_margin = ex.rd_minus + budget.c2;
  d.pass = ex.rd_plus <= budget.c1 && ex.rd_minus >= -budget.c2;
  return d;
}

double BoundsReport::certified_upper() const {
  return std::min(upper_bound, rd_plus);
}

double BoundsReport::certified_lower() const {
  return std::max(lower_bound, rd_minus);
}

BoundsCalculator::BoundsCalculator(std::span<const double> eta, double p,
                                   SurrogateKind kappa)
    : eta_(eta.begin(), eta.end()),
      p_(p),
      kappa_(kappa),
      extremes_(ComputeExtremes(eta, p, &kappa_)),
      psi_kappa_(PsiTransform::Create(kappa, p, PsiBranch::kSymmetric,
                                      PsiSide::kKappa)),
      psi_delta_(PsiTransform::Create(kappa, p, PsiBranch::kSymmetric,
                                      PsiSide::kDelta)) {}

BoundsReport BoundsCalculator::Evaluate(std::span<const double> scores) const {
  BoundsReport r;
  r.kappa = kappa_.kind();
  r.rd_minus = extremes_.rd_minus;
  r.rd_plus = extremes_.rd_plus;
  r.rd_kappa_min = *extremes_.rd_kappa_min;
  r.rd_delta_max = *extremes_.rd_delta_max;
  r.rd_kappa_of_h =
      SurrogateRiskDifference(scores, eta_, p_, kappa_, RdSide::kKappa);
  r.rd_delta_of_h =
      SurrogateRiskDifference(scores, eta_, p_, kappa_, RdSide::kDelta);

  const PsiInverseValue up = psi_kappa_.Inverse(r.rd_kappa_of_h - r.rd_kappa_min);
  r.upper_bound = r.rd_minus + up.mu;
  r.upper_vacuous = up.saturated;
  r.upper_clamped = up.clamped_negative;

  const PsiInverseValue lo = psi_delta_.Inverse(r.rd_delta_max - r.rd_delta_of_h);
  r.lower_bound = r.rd_plus - lo.mu;
  r.lower_vacuous = lo.saturated;
  r.lower_clamped = lo.clamped_negative;
  return r;
}

BoundsReport ComputeBounds(std::span<const double> scores,
                           std::span<const double> eta, double p,
                           SurrogateKind kappa) {
  return BoundsCalculator(eta, p, kappa).Evaluate(scores);
}

BoundsReport RdBounds(std::span<const double> scores, const Dataset& data,
                      SurrogateKind kappa) {
  CheckSameLength(scores.size(), data.size(), "RdBounds");
  return ComputeBounds(scores, data.eta_hat(), data.group_rate(), kappa);
}

RefinedThresholds ComputeRefinedThresholds(std::span<const double> eta,
                                           double p, SurrogateKind kind,
                                           double c1, double c2) {
  const Surrogate kappa(kind);
  RefinedThresholds t;
  t.c1 = c1;
  t.c2 = c2;
  t.extremes = ComputeExtremes(eta, p, &kappa);
  const ExtremeClassifiers& ex = t.extremes;
  const PsiTransform psi_k =
      PsiTransform::Create(kind, p, PsiBranch::kSymmetric, PsiSide::kKappa);
  const PsiTransform psi_d =
      PsiTransform::Create(kind, p, PsiBranch::kSymmetric, PsiSide::kDelta);

  t.upper_unattainable = c1 < ex.rd_minus;
  t.lower_unattainable = -c2 > ex.rd_plus;
  t.upper_active = c1 < ex.rd_plus;
  t.lower_active = -c2 > ex.rd_minus;

  const PsiValue up = psi_k.Evaluate(c1 - ex.rd_minus);
  t.upper_rhs = up.value + *ex.rd_kappa_min;
  t.upper_clamped = up.clamped;
  const PsiValue lo = psi_d.Evaluate(c2 + ex.rd_plus);
  t.lower_rhs = lo.value - *ex.rd_delta_max;
  t.lower_clamped = lo.clamped;
  if (t.upper_active && t.lower_active) {
    const double floor = 2.0 * (2.0 * kappa.Value(0.0) - 1.0);
    t.jointly_unattainable = t.upper_rhs + t.lower_rhs < floor;
  }
  return t;
}

double RiskRatio(std::span<const int> predictions,
                 std::span<const Group> sensitive) {
  const GroupRates r = PositiveRates(predictions, sensitive);
  if (r.minus == 0.0) {
    spdlog::warn("risk ratio: no positive predictions in s-; reporting +inf");
    return std::numeric_limits<double>::infinity();
  }
  return r.plus / r.minus;
}

double RiskRatioConstraintValue(std::span<const double> scores,
                                std::span<const double> eta, double p,
                                double tau, const Surrogate& kappa,
                                bool mirrored, std::span<double> grad) {
  CheckSameLength(scores.size(), eta.size(), "RiskRatioConstraintValue");
  const bool want_grad = !grad.empty();
  if (want_grad) CheckSameLength(scores.size(), grad.size(), "gradient");
  const double inv_n = 1.0 / static_cast<double>(scores.size());
  const double rate = mirrored ? 1.0 - p : p;
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double e = mirrored ? 1.0 - eta[i] : eta[i];
    const double a = e / rate;
    const double b = tau * (1.0 - e) / (1.0 - rate);
    const double h = scores[i];
    sum += a * kappa.Value(h) + b * kappa.Value(-h);
    if (want_grad) {
      grad[i] = inv_n * (a * kappa.Derivative(h) - b * kappa.Derivative(-h));
    }
  }
  return sum * inv_n - tau;
}

EqualizedOddsGaps EqualizedOdds(std::span<const int> predictions,
                                std::span<const int> labels,
                                std::span<const Group> sensitive) {
  CheckSameLength(predictions.size(), labels.size(), "EqualizedOdds");
  CheckSameLength(predictions.size(), sensitive.size(), "EqualizedOdds");
  // [label index][group] -> (positives, count)
  std::size_t pos[2][2] = {{0, 0}, {0, 0}};
  std::size_t cnt[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const int y = labels[i] > 0 ? 1 : 0;
    const int s = sensitive[i] == Group::kPlus ? 1 : 0;
    ++cnt[y][s];
    pos[y][s] += predictions[i] > 0;
  }
  auto gap = [&](int y) -> std::optional<double> {
    if (cnt[y][0] == 0 || cnt[y][1] == 0) return std::nullopt;
    return static_cast<double>(pos[y][1]) / static_cast<double>(cnt[y][1]) -
           static_cast<double>(pos[y][0]) / static_cast<double>(cnt[y][0]);
  };
  return {gap(0), gap(1)};
}

std::optional<double> EqualOpportunity(std::span<const int> predictions,
                                       std::span<const int> labels,
                                       std::span<const Group> sensitive) {
  return EqualizedOdds(predictions, labels, sensitive).positive_label;
}

double ConditionalSurrogateRiskDifference(std::span<const double> scores,
                                          std::span<const int> labels,
                                          std::span<const double> eta, int y,
                                          const Surrogate& kappa, RdSide side,
                                          std::span<double> grad) {
  CheckSameLength(scores.size(), labels.size(), "conditional surrogate RD");
  CheckSameLength(scores.size(), eta.size(), "conditional surrogate RD");
  std::vector<std::size_t> rows;
  double eta_sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == y) {
      rows.push_back(i);
      eta_sum += eta[i];
    }
  }
  if (rows.empty()) {
    throw DegenerateGroupError(fmt::format("no rows with label {}", y));
  }
  const double p_y = eta_sum / static_cast<double>(rows.size());
  if (!(p_y > 0.0 && p_y < 1.0)) {
    throw DegenerateGroupError(
        fmt::format("label {} rows contain only one sensitive group", y));
  }
  std::vector<double> sub_scores;
  std::vector<double> sub_eta;
  for (const std::size_t i : rows) {
    sub_scores.push_back(scores[i]);
    sub_eta.push_back(eta[i]);
  }
  std::vector<double> sub_grad(grad.empty() ? 0 : rows.size());
  const double value =
      SurrogateRiskDifference(sub_scores, sub_eta, p_y, kappa, side, sub_grad);
  if (!grad.empty()) {
    CheckSameLength(scores.size(), grad.size(), "gradient");
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t k = 0; k < rows.size(); ++k) grad[rows[k]] = sub_grad[k];
  }
  return value;
}

}  // namespace fairbound
