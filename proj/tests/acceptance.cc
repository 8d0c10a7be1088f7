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

// Acceptance runner. Prints one PASS/FAIL line per criterion; tolerances and
// runtime limits are fixed here.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "cli/commands.h"
#include "fairbound/eta.h"
#include "fairbound/fairness.h"
#include "fairbound/logging.h"
#include "fairbound/solver.h"
#include "fairbound/synthetic.h"
#include "test_util.h"

namespace fairbound {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;
  std::vector<std::string> notes;

  void Require(bool ok, std::string what) {
    pass = pass && ok;
    details.push_back(fmt::format("{}{}", ok ? "" : "FAILED: ", what));
  }
};

struct Criterion {
  int id;
  const char* title;
  double limit_seconds;
  std::function<Outcome()> run;
};

// Biased synthetic family shared by criteria 5 and 6.
Dataset BiasedFamily() {
  BiasedSyntheticOptions o;
  o.rows = 2000;
  o.correlation = 0.6;
  o.seed = 1;
  return EstimateEta(MakeBiasedSynthetic(o), {});
}

double WeightedRd(const LinearModel& m, const Dataset& d) {
  return RiskDifferenceWeighted(Predict(m, d).scores, d.eta_hat(), d.group_rate());
}

// ---------------------------------------------------------------------------

Outcome StudentsFixture() {
  Outcome out;
  out.Require(StudentsTable().rows.size() == 200, "students table has 200 rows");
  const Dataset d = EstimateEta(StudentsDataset(), {});
  const double expected[4] = {0.0, 0.03, -0.03, 0.0};
  double worst = 0.0;
  for (int rule = 0; rule < 4; ++rule) {
    // rule bit 0: accept High, bit 1: accept Low.
    std::vector<int> f(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      const bool high = d.features()(static_cast<Eigen::Index>(i), 0) > 0.5;
      f[i] = ((high && (rule & 1)) || (!high && (rule & 2))) ? 1 : -1;
    }
    const int order[4] = {0, 1, 2, 3};  // none, High, Low, all
    worst = std::max(worst,
                     std::abs(RiskDifference(f, d.sensitive()) - expected[order[rule]]));
  }
  out.Require(worst <= 1e-12,
              fmt::format("GPA-threshold RDs {{0, 0.03, -0.03, 0}} max error {:.3g} "
                          "(tol 1e-12)",
                          worst));
  const bool pass05 = ConstraintFreeCheck(d, FairnessBudget::Symmetric(0.05)).pass;
  const bool pass01 = ConstraintFreeCheck(d, FairnessBudget::Symmetric(0.01)).pass;
  out.Require(pass05, "constraint-free check PASS at tau=0.05");
  out.Require(!pass01, "constraint-free check FAIL at tau=0.01");
  return out;
}

Outcome ExtremesBruteForce() {
  Outcome out;
  std::mt19937_64 rng(20260101);
  std::size_t violations = 0;
  std::size_t classifiers = 0;
  double attain_error = 0.0;
  EtaEstimator exact;
  exact.clip = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int cells = 1 + static_cast<int>(rng() % 16);
    const int rows = 2 + static_cast<int>(rng() % 399);
    const Dataset d = EstimateEta(testing::RandomCellDataset(rng, cells, rows), exact);
    const ExtremeClassifiers ex = ComputeExtremes(d.eta_hat(), d.group_rate());
    // Per-cell contribution to P(f=1|s+) - P(f=1|s-).
    std::vector<double> w(static_cast<std::size_t>(cells), 0.0);
    const double n_plus = static_cast<double>(d.count(Group::kPlus));
    const double n_minus = static_cast<double>(d.count(Group::kMinus));
    for (std::size_t i = 0; i < d.size(); ++i) {
      w[static_cast<std::size_t>(testing::CellOf(d, i))] +=
          d.sensitive()[i] == Group::kPlus ? 1.0 / n_plus : -1.0 / n_minus;
    }
    const std::size_t masks = std::size_t{1} << cells;
    std::vector<double> rd(masks, 0.0);
    double best = 0.0, worst = 0.0;
    for (std::size_t m = 1; m < masks; ++m) {
      rd[m] = rd[m & (m - 1)] + w[static_cast<std::size_t>(std::countr_zero(m))];
      best = std::max(best, rd[m]);
      worst = std::min(worst, rd[m]);
    }
    for (std::size_t m = 0; m < masks; ++m) {
      violations += rd[m] > ex.rd_plus + 1e-12 || rd[m] < ex.rd_minus - 1e-12;
    }
    classifiers += masks;
    attain_error = std::max({attain_error, std::abs(best - ex.rd_plus),
                             std::abs(worst - ex.rd_minus),
                             std::abs(RiskDifference(ex.f_max, d.sensitive()) - ex.rd_plus),
                             std::abs(RiskDifference(ex.f_min, d.sensitive()) - ex.rd_minus)});
  }
  out.Require(violations == 0,
              fmt::format("{} violations over {} enumerated classifiers on 200 datasets "
                          "(slack 1e-12)",
                          violations, classifiers));
  out.Require(attain_error <= 1e-12,
              fmt::format("f_max/f_min attain RD+/RD-, max error {:.3g} (tol 1e-12)",
                          attain_error));
  return out;
}

Outcome PsiCorrectness() {
  Outcome out;
  struct Row {
    SurrogateKind kind;
    const char* form_text;
    std::function<double(double, double)> form;
  };
  const std::vector<Row> rows = {
      {SurrogateKind::kHinge, "mu", [](double, double mu) { return mu; }},
      {SurrogateKind::kSquare, "mu^2", [](double, double mu) { return mu * mu; }},
      {SurrogateKind::kExponential, "(sqrt((1-p)mu+1)-sqrt(1-p mu))^2",
       [](double p, double mu) {
         const double v = std::sqrt((1 - p) * mu + 1) - std::sqrt(std::max(0.0, 1 - p * mu));
         return v * v;
       }},
  };
  for (const Row& row : rows) {
    const Surrogate s(row.kind);
    double kappa_err = 0.0, delta_err = 0.0, inverse_err = 0.0;
    for (const double p : {0.2, 0.5, 0.8}) {
      const PsiTransform psi =
          PsiTransform::Create(row.kind, p, PsiBranch::kAboveGroupRate);
      for (int i = 1; i <= 100; ++i) {
        const double mu = (1.0 / p) * i / 100.0;
        const double eta = std::min(1.0, p + p * (1 - p) * mu);
        const double kappa_gap =
            testing::OracleHCirc(s, eta, p) - testing::OracleHMinus(s, eta, p);
        const double delta_gap =
            testing::OracleHPlusDelta(s, eta, p) - testing::OracleHCircDelta(s, eta, p);
        kappa_err = std::max(kappa_err, std::abs(kappa_gap - row.form(p, mu)));
        delta_err = std::max(delta_err, std::abs(delta_gap - row.form(p, mu)));
        const double y = psi(mu);
        inverse_err = std::max(inverse_err, std::abs(psi(psi.Inverse(y).mu) - y));
      }
    }
    const std::string name(ToString(row.kind));
    out.Require(kappa_err <= 1e-6,
                fmt::format("{}: numeric H_circ-H_minus vs closed form '{}' max error {:.3g} "
                            "(tol 1e-6)",
                            name, row.form_text, kappa_err));
    out.Require(delta_err <= 1e-6,
                fmt::format("{}: numeric H+_delta-H_circ_delta vs closed form max error {:.3g} "
                            "(tol 1e-6)",
                            name, delta_err));
    out.Require(inverse_err <= 1e-8,
                fmt::format("{}: psi(psi^-1(y)) - y max error {:.3g} (tol 1e-8)", name,
                            inverse_err));
  }
  {
    const double p = 0.5, mu = 1.0;
    const Surrogate sq(SurrogateKind::kSquare);
    const double gap = testing::OracleHCirc(sq, p + p * (1 - p) * mu, p) -
                       testing::OracleHMinus(sq, p + p * (1 - p) * mu, p);
    out.notes.push_back(fmt::format(
        "square at p=0.5, mu=1: numeric gap {:.6f}, mu^2 = 1, "
        "mu^2/(2+(1-2p)mu) = {:.6f}",
        gap, mu * mu / (2 + (1 - 2 * p) * mu)));
  }
  return out;
}

Outcome BoundValidity() {
  Outcome out;
  std::mt19937_64 rng(4242);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const SurrogateKind kinds[] = {SurrogateKind::kHinge, SurrogateKind::kSquare,
                                 SurrogateKind::kLogistic, SurrogateKind::kExponential};
  std::size_t checks = 0, violations = 0;
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    Dataset raw = [&] {
      if (t % 2 == 0) {
        RandomDiscreteOptions o;
        o.seed = rng();
        return MakeRandomDiscrete(o);
      }
      BiasedSyntheticOptions o;
      o.rows = 300;
      o.group_rate = 0.2 + 0.6 * unit(rng);
      o.correlation = 0.9 * unit(rng);
      o.seed = rng();
      return MakeBiasedSynthetic(o);
    }();
    const Dataset d = EstimateEta(raw, {});
    for (const SurrogateKind k : kinds) {
      const BoundsCalculator calc(d.eta_hat(), d.group_rate(), k);
      for (int m = 0; m < 1000; ++m) {
        const double scale = std::pow(10.0, 2.0 * unit(rng) - 1.0);
        Eigen::VectorXd w(static_cast<Eigen::Index>(d.dim()));
        for (Eigen::Index j = 0; j < w.size(); ++j) w(j) = scale * n01(rng);
        const double b = scale * n01(rng);
        std::vector<double> scores(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
          scores[i] = d.features().row(static_cast<Eigen::Index>(i)).dot(w) + b;
        }
        const BoundsReport r = calc.Evaluate(scores);
        const double rd = RiskDifferenceWeighted(scores, d.eta_hat(), d.group_rate());
        const double excess = std::max(r.lower_bound - rd, rd - r.upper_bound);
        worst = std::max(worst, excess);
        violations += excess > 1e-9;
        ++checks;
      }
    }
  }
  out.Require(violations == 0,
              fmt::format("{} of {} (dataset, model, surrogate) checks outside "
                          "[lower, upper]; worst excess {:.3g} (slack 1e-9)",
                          violations, checks, worst));
  return out;
}

struct SweepPoint {
  double budget = 0.0;
  TrainStatus status = TrainStatus::kConverged;
  double loss = 0.0;
  double weighted_rd = 0.0;
  bool unattainable = false;
};

std::vector<SweepPoint> F2Sweep(const Dataset& d) {
  std::vector<SweepPoint> out;
  for (const double c : {0.2, 0.1, 0.05, 0.02}) {
    SolverConfig config;
    config.phi = SurrogateKind::kLogistic;
    config.kappa = SurrogateKind::kHinge;
    config.budget = FairnessBudget::Symmetric(c);
    const Formulation2Result r = TrainFormulation2(d, config);
    out.push_back({c, r.train.status, r.train.objective, r.weighted_rd, r.unattainable});
  }
  return out;
}

Outcome GuaranteeChain() {
  Outcome out;
  const Dataset d = BiasedFamily();
  const ExtremeClassifiers ex = ComputeExtremes(d.eta_hat(), d.group_rate());
  out.notes.push_back(fmt::format("family: n={}, p={:.4g}, RD+={:.4g}, RD-={:.4g}",
                                  d.size(), d.group_rate(), ex.rd_plus, ex.rd_minus));
  const std::vector<SweepPoint> sweep = F2Sweep(d);
  double previous_loss = -1.0;
  bool monotone = true;
  int converged = 0;
  for (const SweepPoint& s : sweep) {
    const bool ok = s.status == TrainStatus::kConverged &&
                    std::abs(s.weighted_rd) <= s.budget + 1e-4;
    out.Require(ok, fmt::format("c={}: status {}, weighted RD {:.6f}, loss {:.6f}{}",
                                s.budget, ToString(s.status), s.weighted_rd, s.loss,
                                s.unattainable ? ", budget certified unattainable" : ""));
    if (s.status != TrainStatus::kConverged) continue;
    ++converged;
    if (previous_loss >= 0.0 && s.loss < previous_loss - 1e-6) monotone = false;
    previous_loss = s.loss;
  }
  out.Require(monotone, fmt::format("empirical loss non-decreasing over {} converged runs as "
                                    "the budget tightens (slack 1e-6)",
                                    converged));
  return out;
}

Outcome CovarianceComparison() {
  Outcome out;
  const Dataset d = BiasedFamily();
  const SolverConfig base;
  const TrainResult plain = TrainUnconstrained(d, base);
  const double free_cov =
      std::abs(ScoreCovariance(Predict(plain.model, d).scores, d.sensitive()));
  // Baseline curve: (|achieved weighted RD|, loss).
  std::vector<std::pair<double, double>> curve;
  for (int k = 10; k >= 0; --k) {
    const TrainResult r = TrainCovarianceBaseline(d, base, free_cov * k / 10.0);
    if (r.status != TrainStatus::kConverged) continue;
    curve.emplace_back(std::abs(WeightedRd(r.model, d)), r.objective);
  }
  std::sort(curve.begin(), curve.end());
  out.notes.push_back(fmt::format("baseline: {} converged runs, |RD| range [{:.4f}, {:.4f}]",
                                  curve.size(), curve.empty() ? 0.0 : curve.front().first,
                                  curve.empty() ? 0.0 : curve.back().first));
  auto baseline_at = [&](double rd) -> std::optional<double> {
    if (curve.empty() || rd < curve.front().first || rd > curve.back().first) {
      return std::nullopt;
    }
    for (std::size_t i = 1; i < curve.size(); ++i) {
      if (rd <= curve[i].first) {
        const auto [x0, y0] = curve[i - 1];
        const auto [x1, y1] = curve[i];
        return x1 == x0 ? std::min(y0, y1) : y0 + (y1 - y0) * (rd - x0) / (x1 - x0);
      }
    }
    return curve.back().second;
  };
  std::size_t compared = 0;
  for (const SweepPoint& s : F2Sweep(d)) {
    const double rd = std::abs(s.weighted_rd);
    const auto ref = baseline_at(rd);
    const std::string where =
        fmt::format("c={}: f2 status {}, |RD| {:.4f}, loss {:.6f}", s.budget,
                    ToString(s.status), rd, s.loss);
    if (s.status != TrainStatus::kConverged) {
      out.notes.push_back(fmt::format(
          "{} (not a converged f2 model; baseline at this RD {})", where,
          ref ? fmt::format("{:.6f}", *ref) : std::string("n/a")));
      continue;
    }
    if (!ref) {
      out.notes.push_back(where + " (outside the baseline RD range)");
      continue;
    }
    ++compared;
    out.Require(s.loss <= *ref + 1e-3,
                fmt::format("{} vs baseline {:.6f} (tol 1e-3)", where, *ref));
  }
  out.Require(compared > 0, fmt::format("{} converged f2 runs matched against the "
                                        "baseline curve",
                                        compared));
  return out;
}

std::map<std::string, std::string> ParseKv(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return kv;
}

Outcome AdultSmoke() {
  Outcome out;
  const fs::path adult = FAIRBOUND_ADULT_DIR;
  const fs::path work = fs::temp_directory_path() / "fairbound_acceptance_adult";
  fs::remove_all(work);
  auto cli = [](std::vector<std::string> args, std::string* text) {
    std::ostringstream o, e;
    const int code = cli::RunCli(args, o, e);
    *text = o.str() + e.str();
    return code;
  };
  std::string text;
  const int ingest = cli({"ingest", "--adult", (adult / "adult.data").string(), "--adult",
                          (adult / "adult.test").string(), "--out", work.string()},
                         &text);
  const auto manifest = ParseKv(text);
  out.Require(ingest == 0, fmt::format("ingest exit {} (n={}, skipped {})", ingest,
                                       manifest.count("n") ? manifest.at("n") : "?",
                                       manifest.count("skipped_missing")
                                           ? manifest.at("skipped_missing")
                                           : "?"));

  const int check = cli({"check", "--dataset", work.string(), "--tau", "0.05"}, &text);
  auto ck = ParseKv(text);
  const double rd_plus = ck.count("rd_plus") ? std::stod(ck.at("rd_plus")) : 0.0;
  out.Require(check == 1 && ck["verdict"] == "FAIL",
              "constraint-free check FAILs at tau=0.05");
  out.Require(rd_plus > 0.5, fmt::format("rd_plus {:.4f} > 0.5", rd_plus));

  const int sweep = cli({"sweep", "--dataset", work.string(), "--formulations", "plain",
                         "--folds", "5", "--seed", "1"},
                        &text);
  out.Require(sweep == 0, "5-fold unconstrained training ran");
  std::istringstream csv(text);
  std::string line;
  std::getline(csv, line);
  int folds = 0;
  bool contained = true;
  double min_acc = 1.0, max_acc = 0.0;
  while (std::getline(csv, line)) {
    if (line.rfind("1,plain", 0) != 0) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    // train_rd, train_rd_weighted, rd_minus, rd_plus
    const double rd = std::stod(f[8]), rdw = std::stod(f[9]);
    const double lo = std::stod(f[16]), hi = std::stod(f[17]);
    contained = contained && f[5] == "converged" && rd >= lo && rd <= hi && rdw >= lo &&
                rdw <= hi;
    min_acc = std::min(min_acc, std::stod(f[11]));
    max_acc = std::max(max_acc, std::stod(f[11]));
    ++folds;
  }
  out.Require(folds == 5 && contained,
              fmt::format("{} folds converged with trained-model RD inside [RD-, RD+]",
                          folds));
  out.notes.push_back(
      fmt::format("test accuracy range [{:.4f}, {:.4f}]", min_acc, max_acc));

  const int eval = cli({"eval", "--dataset", work.string(), "--predictions",
                        (adult / "lr_predictions.txt").string()},
                       &text);
  auto ev = ParseKv(text);
  out.Require(eval == 0 && ev["containment.rd"] == "PASS" &&
                  ev["containment.weighted_rd"] == "PASS",
              fmt::format("external predictions RD {} inside [{}, {}]", ev["metrics.rd"],
                          ev["rd_minus"], ev["rd_plus"]));
  fs::remove_all(work);
  return out;
}

Outcome SolverNumerics() {
  Outcome out;
  BiasedSyntheticOptions o;
  o.rows = 400;
  o.correlation = 0.5;
  const Dataset d = EstimateEta(MakeBiasedSynthetic(o), {});

  std::mt19937_64 rng(88);
  std::normal_distribution<double> n01;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const SurrogateKind kappa =
        t % 2 ? SurrogateKind::kLogistic : SurrogateKind::kExponential;
    AugmentedObjective f(d.features(), PhiLossObjective(d.labels(), SurrogateKind::kLogistic),
                         RiskDifferenceConstraints(d.eta_hat(), d.group_rate(), kappa,
                                                   0.2, 0.2),
                         1e-3);
    f.set_state({std::abs(n01(rng)), std::abs(n01(rng))}, 100.0);
    Eigen::VectorXd theta(static_cast<Eigen::Index>(f.num_params()));
    for (Eigen::Index j = 0; j < theta.size(); ++j) theta(j) = 0.5 * n01(rng);
    Eigen::VectorXd grad;
    f.Evaluate(theta, &grad);
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
      Eigen::VectorXd up = theta, dn = theta;
      const double h = 1e-6 * std::max(1.0, std::abs(theta(j)));
      up(j) += h;
      dn(j) -= h;
      const double fd = (f.Evaluate(up, nullptr) - f.Evaluate(dn, nullptr)) / (2 * h);
      worst = std::max(worst, std::abs(grad(j) - fd) / std::max(1.0, std::abs(fd)));
    }
  }
  out.Require(worst <= 1e-4,
              fmt::format("gradient vs central difference at 100 points: max relative "
                          "error {:.3g} (tol 1e-4)",
                          worst));

  std::vector<TrainResult> constrained;
  double init_gap = 0.0;
  const TrainResult plain = TrainUnconstrained(d, {});
  const double free_cov =
      std::abs(ScoreCovariance(Predict(plain.model, d).scores, d.sensitive()));
  const Surrogate hinge(SurrogateKind::kHinge);
  const double free_kappa = SurrogateRiskDifference(
      Predict(plain.model, d).scores, d.GroupIndicator(), d.group_rate(), hinge,
      RdSide::kKappa);
  for (const std::uint64_t seed : {1u, 2u, 3u}) {
    SolverConfig zeros, random;
    random.init = InitMode::kSeededRandom;
    random.seed = seed;
    auto gap = [](const TrainResult& a, const TrainResult& b) {
      return std::abs(a.objective - b.objective) /
             std::max(1e-12, std::abs(a.objective));
    };
    init_gap = std::max(init_gap,
                        gap(TrainUnconstrained(d, zeros), TrainUnconstrained(d, random)));
    const TrainResult fz = TrainFormulation1(d, zeros, free_kappa - 0.3, 10.0);
    const TrainResult fr = TrainFormulation1(d, random, free_kappa - 0.3, 10.0);
    init_gap = std::max(init_gap, gap(fz, fr));
    const TrainResult cz = TrainCovarianceBaseline(d, zeros, 0.5 * free_cov);
    const TrainResult cr = TrainCovarianceBaseline(d, random, 0.5 * free_cov);
    init_gap = std::max(init_gap, gap(cz, cr));
    for (const TrainResult* r : {&fz, &fr, &cz, &cr}) constrained.push_back(*r);
  }
  {
    SolverConfig c;
    c.kappa = SurrogateKind::kLogistic;
    const ExtremeClassifiers ex = ComputeExtremes(d.eta_hat(), d.group_rate());
    c.budget = FairnessBudget::Asymmetric(0.5 * ex.rd_plus, 2.0);
    constrained.push_back(TrainFormulation2(d, c).train);
  }
  out.Require(init_gap <= 1e-4,
              fmt::format("zero vs seeded-random init objective max relative gap {:.3g} "
                          "(tol 1e-4)",
                          init_gap));
  std::size_t converged = 0, kkt = 0;
  double stationarity = 0.0;
  for (const TrainResult& r : constrained) {
    if (r.status != TrainStatus::kConverged || r.constraints.empty()) continue;
    ++converged;
    kkt += r.kkt_ok;
    stationarity = std::max(stationarity, r.stationarity);
  }
  out.Require(converged > 0 && kkt == converged,
              fmt::format("KKT holds at {} of {} converged constrained runs ({} runs "
                          "total, max stationarity {:.3g})",
                          kkt, converged, constrained.size(), stationarity));
  return out;
}

const std::vector<Criterion>& Criteria() {
  static const std::vector<Criterion> all = {
      {1, "students fixture", 1.0, StudentsFixture},
      {2, "extreme-classifier brute force", 30.0, ExtremesBruteForce},
      {3, "psi closed forms", 10.0, PsiCorrectness},
      {4, "risk-difference bound validity", 120.0, BoundValidity},
      {5, "certified budget chain", 300.0, GuaranteeChain},
      {6, "f2 vs covariance baseline", 300.0, CovarianceComparison},
      {7, "adult end-to-end", 180.0, AdultSmoke},
      {8, "solver numerics", 60.0, SolverNumerics},
  };
  return all;
}

bool RunOne(const Criterion& c, bool verbose) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o.Require(false, fmt::format("exception: {}", e.what()));
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs <= c.limit_seconds;
  const bool pass = o.pass && in_time;
  std::vector<std::string> failed;
  for (const std::string& d : o.details) {
    if (d.rfind("FAILED: ", 0) == 0) failed.push_back(d.substr(8));
  }
  std::string summary =
      failed.empty() ? (o.details.empty() ? "" : o.details.front())
                     : fmt::format("{}", fmt::join(failed, "; "));
  std::cout << fmt::format("criterion {} {}: {} | {} | {:.2f} s (limit {:g} s)\n", c.id,
                           c.title, pass ? "PASS" : "FAIL", summary, secs,
                           c.limit_seconds);
  if (verbose || !pass) {
    for (const std::string& d : o.details) std::cout << "    " << d << "\n";
    for (const std::string& n : o.notes) std::cout << "    note: " << n << "\n";
  }
  return pass;
}

}  // namespace
}  // namespace fairbound

int main(int argc, char** argv) {
  fairbound::InitLoggingFromEnv();
  CLI::App app{"Acceptance criteria"};
  int only = 0;
  bool verbose = false;
  app.add_option("--criterion", only, "Run one criterion (1-8)")->check(CLI::Range(1, 8));
  app.add_flag("--verbose", verbose, "Print every check");
  CLI11_PARSE(app, argc, argv);
  bool all_pass = true;
  for (const auto& c : fairbound::Criteria()) {
    if (only != 0 && c.id != only) continue;
    all_pass = fairbound::RunOne(c, verbose) && all_pass;
  }
  return all_pass ? 0 : 1;
}
