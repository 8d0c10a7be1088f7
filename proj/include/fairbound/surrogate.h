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

#ifndef FAIRBOUND_SURROGATE_H_
#define FAIRBOUND_SURROGATE_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace fairbound {

enum class SurrogateKind { kHinge, kSquare, kLogistic, kExponential };

std::string_view ToString(SurrogateKind kind);
// Accepts "hinge", "square", "logistic", "exponential". Throws SchemaError.
SurrogateKind ParseSurrogateKind(std::string_view name);

// A convex surrogate for the step function, parameterized so that one object
// serves three roles:
//
//   kappa(a) = Value(a)            convex constraint surrogate
//   delta(a) = 1 - kappa(-a)       concave constraint surrogate
//   phi(m)   = kappa(-m)           margin-form classification loss
//
// With these conventions hinge gives kappa = max(a + 1, 0), delta =
// min(a, 1), phi = max(0, 1 - m); square gives (a + 1)^2, 1 - (1 - a)^2,
// (1 - m)^2; exponential gives exp(a), 1 - exp(-a), exp(-m); logistic gives
// log(1 + e^a) and the usual natural-log logistic loss.
//
// At the hinge kink the right derivative is used.
class Surrogate {
 public:
  explicit Surrogate(SurrogateKind kind) : kind_(kind) {}

  SurrogateKind kind() const { return kind_; }
  std::string_view name() const { return ToString(kind_); }

  double Value(double alpha) const;
  double Derivative(double alpha) const;

  double Delta(double alpha) const { return 1.0 - Value(-alpha); }
  double DeltaDerivative(double alpha) const { return Derivative(-alpha); }

  double Loss(double margin) const { return Value(-margin); }
  double LossDerivative(double margin) const { return -Derivative(-margin); }

 private:
  SurrogateKind kind_;
};

// Mean margin loss (1/N) sum phi(y_i * score_i). Throws ContractError on a
// length mismatch.
double PhiLoss(std::span<const double> scores, std::span<const int> labels,
               const Surrogate& phi);

// ---------------------------------------------------------------------------
// Conditional risk-difference extremes. With a = eta / p and
// b = (1 - eta) / (1 - p) the generic conditional kappa-risk difference is
//   C(alpha) = a * kappa(alpha) + b * kappa(-alpha) - 1.
// ---------------------------------------------------------------------------

// Bracket [-A, A] and tolerance of the golden-section searches.
inline constexpr double kAlphaBracket = 30.0;
inline constexpr double kAlphaTolerance = 1e-8;

struct ConditionalExtreme {
  double value = 0.0;
  double alpha = 0.0;
  // The optimum was truncated at the alpha bracket (the extreme is only
  // approached as |alpha| -> infinity).
  bool truncated = false;
};

// min over alpha of C(alpha). Analytic for hinge: 2 * min(a, b) - 1.
ConditionalExtreme HMinusSearch(double eta, double p, const Surrogate& kappa);
double HMinus(double eta, double p, const Surrogate& kappa);

// min of C(alpha) restricted to alpha * (eta - p) >= 0. The minimum sits at
// alpha = 0, giving (a + b) * kappa(0) - 1.
double HCirc(double eta, double p, const Surrogate& kappa);
// Same quantity by restricted golden-section search, for cross-checks.
double HCircNumeric(double eta, double p, const Surrogate& kappa);

// max over alpha of a * delta(alpha) + b * delta(-alpha) - 1.
ConditionalExtreme HPlusDeltaSearch(double eta, double p,
                                    const Surrogate& kappa);
double HPlusDelta(double eta, double p, const Surrogate& kappa);

// max of the delta objective restricted to alpha * (eta - p) <= 0, the
// half-line on which f_max disagrees with sign(alpha). Equals
// (a + b) * delta(0) - 1.
double HCircDelta(double eta, double p, const Surrogate& kappa);
double HCircDeltaNumeric(double eta, double p, const Surrogate& kappa);

// Step-function extremes under the sign(0) = +1 convention.
double HMinusIndicator(double eta, double p);  // min(a, b) - 1
double HPlusIndicator(double eta, double p);   // max(a, b) - 1

// ---------------------------------------------------------------------------
// psi transform
// ---------------------------------------------------------------------------

enum class PsiSide { kKappa, kDelta };

// Which eta substitution the transform uses.
//   kAboveGroupRate: eta = p(1-p)mu + p only, mu in (0, 1/p].
//   kSymmetric:      pointwise minimum of the above-p branch and the
//                    below-p branch eta = p - p(1-p)mu, on
//                    (0, 1/min(p, 1-p)]. This is the form that keeps the
//                    risk-difference bounds valid for every p.
enum class PsiBranch { kAboveGroupRate, kSymmetric };

struct PsiValue {
  double value = 0.0;
  bool clamped = false;  // mu was moved into the domain
};

struct PsiInverseValue {
  double mu = 0.0;
  bool saturated = false;         // target above psi(domain_max); bound vacuous
  bool clamped_negative = false;  // target < 0 was treated as 0
};

class PsiTransform {
 public:
  // Throws MethodError when the transform is not strictly increasing and
  // positive on a grid over its domain (the invertibility precondition), and
  // ContractError when p is outside (0, 1).
  static PsiTransform Create(SurrogateKind kind, double p,
                             PsiBranch branch = PsiBranch::kSymmetric,
                             PsiSide side = PsiSide::kKappa);

  SurrogateKind kind() const { return surrogate_.kind(); }
  double group_rate() const { return p_; }
  PsiBranch branch() const { return branch_; }
  PsiSide side() const { return side_; }
  double domain_max() const { return domain_max_; }
  bool has_closed_form() const;

  PsiValue Evaluate(double mu) const;
  double operator()(double mu) const { return Evaluate(mu).value; }

  // Always the H-difference route, ignoring any closed form.
  double EvaluateNumeric(double mu) const;
  std::optional<double> EvaluateClosedForm(double mu) const;

  // psi(Inverse(t).mu) == t within 1e-8 for t in [0, psi(domain_max)].
  PsiInverseValue Inverse(double target) const;

 private:
  PsiTransform(Surrogate surrogate, double p, PsiBranch branch, PsiSide side);

  double NumericBranch(double mu, bool above) const;
  double ClampMu(double mu, bool* clamped) const;

  Surrogate surrogate_;
  double p_;
  PsiBranch branch_;
  PsiSide side_;
  double domain_max_;
};

// Table closed forms evaluated with rate parameter q (the above-p branch uses
// q = p, the below-p branch q = 1 - p). Empty for logistic.
std::optional<double> PsiClosedForm(SurrogateKind kind, double q, double mu);

}  // namespace fairbound

#endif  // FAIRBOUND_SURROGATE_H_
