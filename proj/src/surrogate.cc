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

#include "fairbound/surrogate.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "fairbound/error.h"
#include "fairbound/numeric.h"

namespace fairbound {
namespace {

struct Weights {
  double a;  // eta / p
  double b;  // (1 - eta) / (1 - p)
};

Weights WeightsFor(double eta, double p) {
  return {eta / p, (1.0 - eta) / (1.0 - p)};
}

double KappaObjective(const Surrogate& kappa, Weights w, double alpha) {
  return w.a * kappa.Value(alpha) + w.b * kappa.Value(-alpha) - 1.0;
}

double DeltaObjective(const Surrogate& kappa, Weights w, double alpha) {
  return w.a * kappa.Delta(alpha) + w.b * kappa.Delta(-alpha) - 1.0;
}

void CheckGroupRate(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ContractError(fmt::format("group rate p={} outside (0, 1)", p));
  }
}

}  // namespace

std::string_view ToString(SurrogateKind kind) {
  switch (kind) {
    case SurrogateKind::kHinge:
      return "hinge";
    case SurrogateKind::kSquare:
      return "square";
    case SurrogateKind::kLogistic:
      return "logistic";
    case SurrogateKind::kExponential:
      return "exponential";
  }
  return "unknown";
}

SurrogateKind ParseSurrogateKind(std::string_view name) {
  if (name == "hinge") return SurrogateKind::kHinge;
  if (name == "square") return SurrogateKind::kSquare;
  if (name == "logistic") return SurrogateKind::kLogistic;
  if (name == "exponential") return SurrogateKind::kExponential;
  throw SchemaError(fmt::format(
      "unknown surrogate '{}' (expected hinge|square|logistic|exponential)",
      name));
}

double Surrogate::Value(double alpha) const {
  switch (kind_) {
    case SurrogateKind::kHinge:
      return std::max(alpha + 1.0, 0.0);
    case SurrogateKind::kSquare:
      return (alpha + 1.0) * (alpha + 1.0);
    case SurrogateKind::kLogistic:
      // log(1 + e^a) without overflow.
      return alpha > 0.0 ? alpha + std::log1p(std::exp(-alpha))
                         : std::log1p(std::exp(alpha));
    case SurrogateKind::kExponential:
      return std::exp(alpha);
  }
  return 0.0;
}

double Surrogate::Derivative(double alpha) const {
  switch (kind_) {
    case SurrogateKind::kHinge:
      return alpha >= -1.0 ? 1.0 : 0.0;
    case SurrogateKind::kSquare:
      return 2.0 * (alpha + 1.0);
    case SurrogateKind::kLogistic:
      return alpha >= 0.0 ? 1.0 / (1.0 + std::exp(-alpha))
                          : std::exp(alpha) / (1.0 + std::exp(alpha));
    case SurrogateKind::kExponential:
      return std::exp(alpha);
  }
  return 0.0;
}

double PhiLoss(std::span<const double> scores, std::span<const int> labels,
               const Surrogate& phi) {
  if (scores.size() != labels.size()) {
    throw ContractError(fmt::format("PhiLoss: {} scores but {} labels",
                                    scores.size(), labels.size()));
  }
  if (scores.empty()) return 0.0;
  double sum = 0.0;
  for (size_t i = 0; i < scores.size(); ++i) {
    sum += phi.Loss(labels[i] * scores[i]);
  }
  return sum / static_cast<double>(scores.size());
}

ConditionalExtreme HMinusSearch(double eta, double p, const Surrogate& kappa) {
  CheckGroupRate(p);
  const Weights w = WeightsFor(eta, p);
  if (kappa.kind() == SurrogateKind::kHinge) {
    // a * max(a+1, 0) + b * max(1-a, 0) is linear on [-1, 1] and grows
    // outside, so the minimum is at an end point.
    return {2.0 * std::min(w.a, w.b) - 1.0, w.a <= w.b ? 1.0 : -1.0, false};
  }
  const ScalarMinimum m = GoldenSectionMinimize(
      [&](double alpha) { return KappaObjective(kappa, w, alpha); },
      -kAlphaBracket, kAlphaBracket, kAlphaTolerance);
  return {m.value, m.argmin, m.at_bracket_edge};
}

double HMinus(double eta, double p, const Surrogate& kappa) {
  return HMinusSearch(eta, p, kappa).value;
}

double HCirc(double eta, double p, const Surrogate& kappa) {
  CheckGroupRate(p);
  const Weights w = WeightsFor(eta, p);
  return (w.a + w.b) * kappa.Value(0.0) - 1.0;
}

double HCircNumeric(double eta, double p, const Surrogate& kappa) {
  CheckGroupRate(p);
  const Weights w = WeightsFor(eta, p);
  double lo = -kAlphaBracket;
  double hi = kAlphaBracket;
  if (eta > p) lo = 0.0;
  if (eta < p) hi = 0.0;
  return GoldenSectionMinimize(
             [&](double alpha) { return KappaObjective(kappa, w, alpha); }, lo,
             hi, kAlphaTolerance)
      .value;
}

ConditionalExtreme HPlusDeltaSearch(double eta, double p,
                                    const Surrogate& kappa) {
  CheckGroupRate(p);
  const Weights w = WeightsFor(eta, p);
  if (kappa.kind() == SurrogateKind::kHinge) {
    // a * min(a, 1) + b * min(-a, 1) is linear on [-1, 1] and falls outside.
    const double value = w.a + w.b - 1.0 - 2.0 * std::min(w.a, w.b);
    return {value, w.a >= w.b ? 1.0 : -1.0, false};
  }
  const ScalarMinimum m = GoldenSectionMinimize(
      [&](double alpha) { return -DeltaObjective(kappa, w, alpha); },
      -kAlphaBracket, kAlphaBracket, kAlphaTolerance);
  return {-m.value, m.argmin, m.at_bracket_edge};
}

double HPlusDelta(double eta, double p, const Surrogate& kappa) {
  return HPlusDeltaSearch(eta, p, kappa).value;
}

double HCircDelta(double eta, double p, const Surrogate& kappa) {
  CheckGroupRate(p);
  const Weights w = WeightsFor(eta, p);
  return (w.a + w.b) * kappa.Delta(0.0) - 1.0;
}

double HCircDeltaNumeric(double eta, double p, const Surrogate& kappa) {
  CheckGroupRate(p);
  const Weights w = WeightsFor(eta, p);
  double lo = -kAlphaBracket;
  double hi = kAlphaBracket;
  if (eta > p) hi = 0.0;
  if (eta < p) lo = 0.0;
  return -GoldenSectionMinimize(
              [&](double alpha) { return -DeltaObjective(kappa, w, alpha); },
              lo, hi, kAlphaTolerance)
              .value;
}

double HMinusIndicator(double eta, double p) {
  const Weights w = WeightsFor(eta, p);
  return std::min(w.a, w.b) - 1.0;
}

double HPlusIndicator(double eta, double p) {
  const Weights w = WeightsFor(eta, p);
  return std::max(w.a, w.b) - 1.0;
}

std::optional<double> PsiClosedForm(SurrogateKind kind, double q, double mu) {
  switch (kind) {
    case SurrogateKind::kHinge:
      return mu;
    case SurrogateKind::kSquare:
      return mu * mu / (2.0 + (1.0 - 2.0 * q) * mu);
    case SurrogateKind::kExponential: {
      const double d = std::sqrt((1.0 - q) * mu + 1.0) -
                       std::sqrt(std::max(0.0, 1.0 - q * mu));
      return d * d;
    }
    case SurrogateKind::kLogistic:
      return std::nullopt;
  }
  return std::nullopt;
}

PsiTransform::PsiTransform(Surrogate surrogate, double p, PsiBranch branch,
                           PsiSide side)
    : surrogate_(surrogate), p_(p), branch_(branch), side_(side) {
  domain_max_ = branch == PsiBranch::kAboveGroupRate
                    ? 1.0 / p
                    : 1.0 / std::min(p, 1.0 - p);
}

PsiTransform PsiTransform::Create(SurrogateKind kind, double p,
                                  PsiBranch branch, PsiSide side) {
  CheckGroupRate(p);
  PsiTransform t(Surrogate(kind), p, branch, side);
  constexpr int kGrid = 100;
  double previous = 0.0;
  for (int k = 1; k <= kGrid; ++k) {
    const double mu = t.domain_max_ * k / kGrid;
    const double value = t.EvaluateNumeric(mu);
    if (!(value > previous)) {
      throw MethodError(fmt::format(
          "psi transform for {} at p={} is not strictly increasing near "
          "mu={} ({} after {}); it cannot be inverted",
          ToString(kind), p, mu, value, previous));
    }
    previous = value;
  }
  return t;
}

bool PsiTransform::has_closed_form() const {
  return surrogate_.kind() != SurrogateKind::kLogistic;
}

double PsiTransform::NumericBranch(double mu, bool above) const {
  const double shift = p_ * (1.0 - p_) * mu;
  const double eta = std::clamp(above ? p_ + shift : p_ - shift, 0.0, 1.0);
  if (side_ == PsiSide::kKappa) {
    return HCirc(eta, p_, surrogate_) - HMinus(eta, p_, surrogate_);
  }
  return HPlusDelta(eta, p_, surrogate_) - HCircDelta(eta, p_, surrogate_);
}

double PsiTransform::ClampMu(double mu, bool* clamped) const {
  *clamped = false;
  if (mu < 0.0) {
    *clamped = true;
    return 0.0;
  }
  if (mu > domain_max_) {
    *clamped = true;
    return domain_max_;
  }
  return mu;
}

double PsiTransform::EvaluateNumeric(double mu) const {
  bool clamped = false;
  mu = ClampMu(mu, &clamped);
  if (mu == 0.0) return 0.0;
  if (branch_ == PsiBranch::kAboveGroupRate) return NumericBranch(mu, true);
  // Each branch only covers eta inside [0, 1].
  constexpr double kEdge = 1e-12;
  double best = std::numeric_limits<double>::infinity();
  if (mu <= 1.0 / p_ + kEdge) best = std::min(best, NumericBranch(mu, true));
  if (mu <= 1.0 / (1.0 - p_) + kEdge) {
    best = std::min(best, NumericBranch(mu, false));
  }
  return best;
}

std::optional<double> PsiTransform::EvaluateClosedForm(double mu) const {
  bool clamped = false;
  mu = ClampMu(mu, &clamped);
  const double q =
      branch_ == PsiBranch::kAboveGroupRate ? p_ : std::min(p_, 1.0 - p_);
  return PsiClosedForm(surrogate_.kind(), q, mu);
}

PsiValue PsiTransform::Evaluate(double mu) const {
  PsiValue out;
  const double inside = ClampMu(mu, &out.clamped);
  if (auto closed = EvaluateClosedForm(inside)) {
    out.value = *closed;
  } else {
    out.value = EvaluateNumeric(inside);
  }
  return out;
}

PsiInverseValue PsiTransform::Inverse(double target) const {
  PsiInverseValue out;
  if (target <= 0.0) {
    out.clamped_negative = target < 0.0;
    out.mu = 0.0;
    return out;
  }
  const double top = Evaluate(domain_max_).value;
  if (target >= top) {
    out.saturated = target > top;
    out.mu = domain_max_;
    return out;
  }
  const double q =
      branch_ == PsiBranch::kAboveGroupRate ? p_ : std::min(p_, 1.0 - p_);
  switch (surrogate_.kind()) {
    case SurrogateKind::kHinge:
      out.mu = target;
      return out;
    case SurrogateKind::kSquare: {
      // mu^2 = t (2 + (1 - 2q) mu)
      const double c = target * (1.0 - 2.0 * q);
      out.mu = 0.5 * (c + std::sqrt(c * c + 8.0 * target));
      return out;
    }
    default:
      break;
  }
  // Bisect down to adjacent doubles; psi can be steep near domain_max.
  out.mu = BisectIncreasing(
      [&](double mu) { return Evaluate(mu).value - target; }, 0.0,
      domain_max_, 0.0);
  return out;
}

}  // namespace fairbound
