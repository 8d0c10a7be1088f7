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

#include "cli/commands.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "fairbound/dataset.h"
#include "fairbound/error.h"
#include "fairbound/eta.h"
#include "fairbound/fairness.h"
#include "fairbound/model_io.h"
#include "fairbound/numeric.h"
#include "fairbound/report.h"
#include "fairbound/solver.h"
#include "fairbound/synthetic.h"

namespace fairbound::cli {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kManifestFormat = "fairbound-manifest 1";
constexpr std::string_view kSweepVersion = "1";
constexpr std::string_view kLabelColumn = "__label";
constexpr std::string_view kSensitiveColumn = "__sensitive";
constexpr std::string_view kRawEtaColumn = "__raw_eta";
constexpr std::string_view kEtaColumn = "__eta_hat";

class UsageError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Data sources

struct SourceOptions {
  std::vector<std::string> adult;
  std::string dataset;
  std::string schema;
  std::string fixture;
  std::size_t fixture_rows = 2000;
  double fixture_correlation = 0.6;
  std::uint64_t fixture_seed = 1;
  bool adult_binarize = false;
  std::string adult_positive_group = "Male";
};

struct EtaOptions {
  std::string spec;  // "", "freq", "model", "column:NAME"
  double smoothing = 0.0;
  double clip = 1e-4;
  double regularization = 1e-3;
};

struct LoadedData {
  Dataset data;
  std::string source;
  // FNV-1a of the manifest text describing the loaded rows.
  std::string digest;
  std::vector<std::string> warnings;
};

void AddSourceOptions(CLI::App* app, SourceOptions* o) {
  app->add_option("--adult", o->adult, "UCI Adult file (repeatable)");
  app->add_option("--dataset", o->dataset,
                  "CSV file (with --schema) or a directory written by ingest");
  app->add_option("--schema", o->schema, "Column mapping for --dataset CSV");
  app->add_option("--fixture", o->fixture, "Built-in data: students | biased")
      ->check(CLI::IsMember({"students", "biased"}));
  app->add_option("--fixture-rows", o->fixture_rows, "Rows of the biased fixture");
  app->add_option("--fixture-correlation", o->fixture_correlation,
                  "Feature/sensitive correlation of the biased fixture");
  app->add_option("--fixture-seed", o->fixture_seed, "Seed of the biased fixture");
  app->add_flag("--adult-binarize", o->adult_binarize,
                "Bin Adult numeric attributes at their medians");
  app->add_option("--adult-positive-group", o->adult_positive_group,
                  "Adult sex value mapped to s+");
}

void AddEtaOptions(CLI::App* app, EtaOptions* o) {
  app->add_option("--eta", o->spec, "eta estimator: freq | model | column:NAME");
  app->add_option("--eta-smoothing", o->smoothing, "Group-frequency pseudo-count");
  app->add_option("--eta-clip", o->clip, "Clip eta to [clip, 1 - clip]");
  app->add_option("--eta-l2", o->regularization, "L2 strength of the eta model");
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError(fmt::format("cannot open {}", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::optional<std::string> EtaColumnName(const EtaOptions& eta) {
  if (eta.spec.rfind("column:", 0) == 0) return eta.spec.substr(7);
  return std::nullopt;
}

Report ManifestReport(const Dataset& d, const std::string& source) {
  Report m;
  m.Set("format", std::string(kManifestFormat));
  m.Set("source", source);
  m.Set("rows_read", d.stats().rows_read);
  m.Set("rows_kept", d.size());
  m.Set("skipped_malformed", d.stats().skipped_malformed);
  m.Set("skipped_missing", d.stats().skipped_missing);
  m.Set("n", d.size());
  m.Set("d", d.dim());
  m.Set("n_plus", d.count(Group::kPlus));
  m.Set("p", d.group_rate());
  std::size_t positives = 0;
  for (const int y : d.labels()) positives += y > 0;
  m.Set("positive_label_rate",
        static_cast<double>(positives) / static_cast<double>(d.size()));
  m.Set("eta_method", std::string(ToString(d.eta_method())));
  if (d.has_eta()) {
    const ExtremeClassifiers ex = ComputeExtremes(d.eta_hat(), d.group_rate());
    m.Set("rd_plus", ex.rd_plus);
    m.Set("rd_minus", ex.rd_minus);
  }
  return m;
}

std::string Digest(const std::string& text) {
  return fmt::format("{:016x}", Fnv1a64(text));
}

double ParseCell(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw SchemaError(fmt::format("bad {} value '{}'", what, s));
  }
}

// Reads a directory written by `ingest`.
Dataset LoadIngested(const fs::path& dir) {
  IngestStats stats;
  const RawTable table = ReadCsvTable(dir / "dataset.csv", true, &stats);
  if (stats.skipped_malformed > 0) {
    throw SchemaError(fmt::format("{} malformed rows in {}", stats.skipped_malformed,
                                  (dir / "dataset.csv").string()));
  }
  std::vector<std::size_t> feature_cols;
  std::optional<std::size_t> label_col, sens_col, raw_eta_col, eta_col;
  std::vector<std::string> names;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    const std::string& h = table.header[j];
    if (h == kLabelColumn) {
      label_col = j;
    } else if (h == kSensitiveColumn) {
      sens_col = j;
    } else if (h == kRawEtaColumn) {
      raw_eta_col = j;
    } else if (h == kEtaColumn) {
      eta_col = j;
    } else {
      feature_cols.push_back(j);
      names.push_back(h);
    }
  }
  if (!label_col || !sens_col) {
    throw SchemaError("ingested dataset lacks label/sensitive columns");
  }
  const std::size_t n = table.rows.size();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n),
                    static_cast<Eigen::Index>(feature_cols.size()));
  std::vector<int> labels(n);
  std::vector<Group> sensitive(n);
  std::vector<double> raw_eta, eta;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = table.rows[i];
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          ParseCell(row[feature_cols[k]], names[k]);
    }
    labels[i] = ParseCell(row[*label_col], "label") > 0 ? 1 : -1;
    sensitive[i] = ParseCell(row[*sens_col], "sensitive") > 0 ? Group::kPlus
                                                              : Group::kMinus;
    if (raw_eta_col) raw_eta.push_back(ParseCell(row[*raw_eta_col], "raw eta"));
    if (eta_col) eta.push_back(ParseCell(row[*eta_col], "eta"));
  }
  Dataset d(std::move(x), std::move(labels), std::move(sensitive), names);
  if (fs::exists(dir / "encoding.txt")) {
    IngestStats s = stats;
    s.rows_kept = n;
    d = d.WithEncoder(Encoder::Deserialize(ReadFile(dir / "encoding.txt")), s);
  }
  if (raw_eta_col) d = d.WithRawEtaColumn(std::move(raw_eta));
  if (eta_col) {
    EtaMethod method = EtaMethod::kUserSupplied;
    const std::string manifest = ReadFile(dir / "manifest.txt");
    if (manifest.find("eta_method = group-frequency") != std::string::npos) {
      method = EtaMethod::kGroupFrequency;
    } else if (manifest.find("eta_method = probabilistic-model") != std::string::npos) {
      method = EtaMethod::kProbabilisticModel;
    }
    d = d.WithEta(std::move(eta), method);
  }
  return d;
}

LoadedData LoadSource(const SourceOptions& o, const EtaOptions& eta) {
  const int chosen = static_cast<int>(!o.adult.empty()) +
                     static_cast<int>(!o.dataset.empty()) +
                     static_cast<int>(!o.fixture.empty());
  if (chosen != 1) {
    throw UsageError("give exactly one of --adult, --dataset or --fixture");
  }
  LoadedData out{Dataset(Eigen::MatrixXd::Zero(2, 1), {1, -1},
                         {Group::kPlus, Group::kMinus}, {"x"}),
                 "", "", {}};
  if (!o.adult.empty()) {
    std::vector<fs::path> paths(o.adult.begin(), o.adult.end());
    AdultOptions ao;
    ao.binarize = o.adult_binarize;
    ao.positive_group = o.adult_positive_group;
    out.data = LoadAdult(paths, ao);
    out.source = fmt::format("adult:{}{}", fmt::join(o.adult, "+"),
                             o.adult_binarize ? ":binarized" : "");
  } else if (!o.fixture.empty()) {
    if (o.fixture == "students") {
      out.data = StudentsDataset();
      out.source = "fixture:students";
    } else {
      BiasedSyntheticOptions bo;
      bo.rows = o.fixture_rows;
      bo.correlation = o.fixture_correlation;
      bo.seed = o.fixture_seed;
      out.data = MakeBiasedSynthetic(bo);
      out.source = fmt::format("fixture:biased:rows={}:correlation={}:seed={}",
                               o.fixture_rows, o.fixture_correlation,
                               o.fixture_seed);
    }
  } else if (fs::is_directory(o.dataset)) {
    if (!fs::exists(fs::path(o.dataset) / "dataset.csv")) {
      throw IngestError(fmt::format("{} has no dataset.csv", o.dataset));
    }
    out.data = LoadIngested(o.dataset);
    out.source = fmt::format("ingested:{}", o.dataset);
  } else {
    if (o.schema.empty()) throw UsageError("--dataset CSV needs --schema");
    if (!fs::exists(o.dataset)) {
      throw IngestError(fmt::format("no such file: {}", o.dataset));
    }
    CsvSchema schema = LoadSchemaFile(o.schema);
    if (const auto col = EtaColumnName(eta)) schema.eta_col = *col;
    out.data = LoadCsv(o.dataset, schema);
    out.source = fmt::format("csv:{}", o.dataset);
  }
  const IngestStats& s = out.data.stats();
  if (s.skipped_malformed + s.skipped_missing > 0) {
    out.warnings.push_back(fmt::format("skipped {} malformed and {} incomplete rows",
                                       s.skipped_malformed, s.skipped_missing));
  }
  out.digest = Digest(ManifestReport(out.data, out.source).ToText());
  return out;
}

EtaEstimator MakeEstimator(const Dataset& data, const EtaOptions& o) {
  EtaEstimator e;
  e.smoothing = o.smoothing;
  e.clip = o.clip;
  e.regularization = o.regularization;
  if (o.spec.empty()) {
    e.method = HasDiscreteFeatures(data, e.max_levels_per_feature)
                   ? EtaMethod::kGroupFrequency
                   : EtaMethod::kProbabilisticModel;
  } else if (o.spec == "freq") {
    e.method = EtaMethod::kGroupFrequency;
  } else if (o.spec == "model") {
    e.method = EtaMethod::kProbabilisticModel;
  } else if (EtaColumnName(o)) {
    e.method = EtaMethod::kUserSupplied;
  } else {
    throw UsageError(fmt::format("unknown --eta '{}'", o.spec));
  }
  return e;
}

// Keeps eta carried by an ingested dataset unless --eta asks for another
// estimate.
Dataset WithEta(const Dataset& data, const EtaOptions& o) {
  if (data.has_eta() && o.spec.empty()) return data;
  try {
    return EstimateEta(data, MakeEstimator(data, o));
  } catch (const MethodError& e) {
    throw MethodError(fmt::format(
        "{}. Choose an estimator with --eta model (continuous features) or "
        "--eta column:NAME (user-supplied)",
        e.what()));
  }
}

// ---------------------------------------------------------------------------
// Reports

void AddBudget(Report* r, const FairnessBudget& b) {
  r->Set("budget.notion", std::string(ToString(b.notion)));
  r->Set("budget.c1", b.c1);
  r->Set("budget.c2", b.c2);
}

void AddConfig(Report* r, const SolverConfig& config) {
  std::istringstream lines(config.Describe());
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    r->Set("config." + line.substr(0, eq), line.substr(eq + 1));
  }
  r->Set("config.digest", config.Digest());
}

void AddBounds(Report* r, const BoundsReport& b, std::vector<std::string>* warnings) {
  r->Set("bounds.kappa", std::string(ToString(b.kappa)));
  r->Set("bounds.rd_minus", b.rd_minus);
  r->Set("bounds.rd_plus", b.rd_plus);
  r->Set("bounds.rd_kappa_min", b.rd_kappa_min);
  r->Set("bounds.rd_delta_max", b.rd_delta_max);
  r->Set("bounds.rd_kappa_of_h", b.rd_kappa_of_h);
  r->Set("bounds.rd_delta_of_h", b.rd_delta_of_h);
  r->Set("bounds.lower", b.lower_bound);
  r->Set("bounds.upper", b.upper_bound);
  r->Set("bounds.certified_lower", b.certified_lower());
  r->Set("bounds.certified_upper", b.certified_upper());
  r->Set("bounds.upper_vacuous", b.upper_vacuous);
  r->Set("bounds.lower_vacuous", b.lower_vacuous);
  if (b.upper_vacuous || b.lower_vacuous) {
    warnings->push_back("a bound saturated the psi domain and is vacuous");
  }
  if (b.upper_clamped || b.lower_clamped) {
    warnings->push_back("a negative psi^-1 argument was clamped to 0");
  }
}

struct Metrics {
  double accuracy = 0.0;
  double phi_loss = std::numeric_limits<double>::quiet_NaN();
  double rd = 0.0;
  double rd_weighted = std::numeric_limits<double>::quiet_NaN();
};

// Metrics of predictions (and, when available, scores) on `data`.
Metrics AddMetrics(Report* r, const Dataset& data, std::span<const int> predictions,
                   std::span<const double> scores, SurrogateKind phi) {
  Metrics m;
  m.accuracy = Accuracy(predictions, data.labels());
  m.rd = RiskDifference(predictions, data.sensitive());
  r->Set("metrics.n", data.size());
  r->Set("metrics.accuracy", m.accuracy);
  r->Set("metrics.zero_one_loss", 1.0 - m.accuracy);
  if (!scores.empty()) {
    m.phi_loss = PhiLoss(scores, data.labels(), Surrogate(phi));
    r->Set("metrics.phi", std::string(ToString(phi)));
    r->Set("metrics.phi_loss", m.phi_loss);
  }
  r->Set("metrics.rd", m.rd);
  if (data.has_eta()) {
    std::vector<double> pseudo(predictions.size());
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      pseudo[i] = predictions[i] > 0 ? 1.0 : -1.0;
    }
    m.rd_weighted = RiskDifferenceWeighted(pseudo, data.eta_hat(), data.group_rate());
    r->Set("metrics.rd_weighted", m.rd_weighted);
  }
  r->Set("metrics.rr", RiskRatio(predictions, data.sensitive()));
  const EqualizedOddsGaps eo = EqualizedOdds(predictions, data.labels(), data.sensitive());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r->Set("metrics.eo_gap_negative", eo.negative_label.value_or(nan));
  r->Set("metrics.eo_gap_positive", eo.positive_label.value_or(nan));
  r->Set("metrics.eop_gap", eo.positive_label.value_or(nan));
  return m;
}

void AddWarnings(Report* r, const std::vector<std::string>& warnings) {
  r->Set("warnings", warnings.empty() ? std::string("none")
                                      : fmt::format("{}", fmt::join(warnings, "; ")));
}

void EmitReport(const Report& report, const std::string& path, std::ostream& out) {
  out << report.ToText();
  if (!path.empty()) {
    fs::path text_path(path);
    fs::path json_path = text_path;
    json_path.replace_extension(".json");
    if (json_path == text_path) json_path += ".json";
    AtomicWrite(text_path, report.ToText());
    AtomicWrite(json_path, report.ToJson());
  }
}

std::string CommandEcho(const std::vector<std::string>& args) {
  return fmt::format("fairbound {}", fmt::join(args, " "));
}

// ---------------------------------------------------------------------------
// Commands

struct CommonOutput {
  std::string report_path;
};

int RunIngest(const SourceOptions& src, const EtaOptions& eta_opts,
              const std::string& out_dir, std::ostream& out) {
  LoadedData loaded = LoadSource(src, eta_opts);
  Dataset d = loaded.data;
  if (!eta_opts.spec.empty()) d = WithEta(d, eta_opts);

  const fs::path dir(out_dir);
  std::string csv;
  std::vector<std::string> header = d.feature_names();
  header.emplace_back(kLabelColumn);
  header.emplace_back(kSensitiveColumn);
  if (d.raw_eta_column()) header.emplace_back(kRawEtaColumn);
  if (d.has_eta()) header.emplace_back(kEtaColumn);
  for (std::size_t j = 0; j < header.size(); ++j) {
    csv += (j ? "," : "") + CsvField(header[j]);
  }
  csv += "\n";
  const Eigen::MatrixXd& x = d.features();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      csv += fmt::format("{:.17g},", x(ii, j));
    }
    csv += fmt::format("{},{}", d.labels()[i], d.sensitive()[i] == Group::kPlus ? 1 : 0);
    if (d.raw_eta_column()) csv += fmt::format(",{:.17g}", (*d.raw_eta_column())[i]);
    if (d.has_eta()) csv += fmt::format(",{:.17g}", d.eta_hat()[i]);
    csv += "\n";
  }
  const Report manifest = ManifestReport(d, loaded.source);
  AtomicWrite(dir / "dataset.csv", csv);
  if (d.encoder()) AtomicWrite(dir / "encoding.txt", d.encoder()->Serialize());
  AtomicWrite(dir / "manifest.txt", manifest.ToText());
  out << manifest.ToText();
  return kExitOk;
}

FairnessBudget BudgetFromFlags(const std::optional<double>& tau,
                               const std::optional<double>& c1,
                               const std::optional<double>& c2) {
  if (tau && (c1 || c2)) throw UsageError("use either --tau or --c1/--c2");
  if (tau) return FairnessBudget::Symmetric(*tau);
  if (c1 && c2) return FairnessBudget::Asymmetric(*c1, *c2);
  if (c1 || c2) throw UsageError("--c1 and --c2 must be given together");
  throw UsageError("a budget is required (--tau or --c1/--c2)");
}

int RunCheck(const SourceOptions& src, const EtaOptions& eta_opts,
             const FairnessBudget& budget, const std::string& report_path,
             const std::vector<std::string>& args, std::ostream& out) {
  LoadedData loaded = LoadSource(src, eta_opts);
  const Dataset d = WithEta(loaded.data, eta_opts);
  const CriterionDecision c = ConstraintFreeCheck(d, budget);
  Report r;
  r.Set("command", CommandEcho(args));
  r.Set("dataset_digest", loaded.digest);
  r.Set("eta_method", std::string(ToString(d.eta_method())));
  r.Set("verdict", c.pass ? "PASS" : "FAIL");
  r.Set("rd_plus", c.rd_plus);
  r.Set("rd_minus", c.rd_minus);
  r.Set("tau_upper", c.tau_upper);
  r.Set("tau_lower", c.tau_lower);
  r.Set("upper_margin", c.upper_margin);
  r.Set("lower_margin", c.lower_margin);
  AddWarnings(&r, loaded.warnings);
  EmitReport(r, report_path, out);
  return c.pass ? kExitOk : kExitCheckFailed;
}

struct TrainFlags {
  std::string formulation = "plain";
  std::optional<double> tau, c1, c2, cov;
  std::string notion = "rd";
  std::string phi = "logistic";
  std::string kappa = "hinge";
  std::uint64_t seed = 0;
  std::string init = "zeros";
  double l2 = 1e-4;
  int max_outer = 60;
  int max_inner = 2000;
  std::string weighting = "group";
  std::string model_out = "model.txt";
};

SolverConfig ConfigFromFlags(const TrainFlags& f) {
  SolverConfig c;
  c.phi = ParseSurrogateKind(f.phi);
  c.kappa = ParseSurrogateKind(f.kappa);
  c.seed = f.seed;
  c.init = f.init == "random" ? InitMode::kSeededRandom : InitMode::kZeros;
  c.l2_penalty = f.l2;
  c.max_outer_iters = f.max_outer;
  c.max_inner_iters = f.max_inner;
  c.f1_weighting = f.weighting == "eta" ? ConstraintWeighting::kEtaHat
                                        : ConstraintWeighting::kGroupIndicator;
  c.Validate();
  return c;
}

FairnessNotion ParseNotion(const std::string& s) {
  if (s == "rd") return FairnessNotion::kRiskDifference;
  if (s == "rr") return FairnessNotion::kRiskRatio;
  if (s == "eo") return FairnessNotion::kEqualizedOdds;
  if (s == "eop") return FairnessNotion::kEqualizedOpportunity;
  throw UsageError(fmt::format("unknown --notion '{}'", s));
}

void AddTrainResult(Report* r, const TrainResult& t) {
  r->Set("train.status", std::string(ToString(t.status)));
  r->Set("train.objective", t.objective);
  r->Set("train.regularized_objective", t.regularized_objective);
  r->Set("train.kkt_ok", t.kkt_ok);
  r->Set("train.stationarity", t.stationarity);
  r->Set("train.outer_iterations", t.outer_iterations);
  r->Set("train.inner_iterations", t.inner_iterations);
  r->Set("train.final_penalty", t.final_penalty);
  for (const ConstraintReport& c : t.constraints) {
    const std::string k = "constraint." + c.name;
    r->Set(k + ".value", c.value);
    r->Set(k + ".rhs", c.rhs);
    r->Set(k + ".violation", c.violation);
    r->Set(k + ".multiplier", c.multiplier);
  }
}

int RunTrain(const SourceOptions& src, const EtaOptions& eta_opts,
             const TrainFlags& f, const std::string& report_path,
             const std::vector<std::string>& args, std::ostream& out) {
  const bool has_budget = f.tau || f.c1 || f.c2;
  if (f.formulation == "plain" && (has_budget || f.cov)) {
    throw UsageError("--formulation plain takes no budget flags");
  }
  if (f.formulation == "covariance" && (has_budget || !f.cov)) {
    throw UsageError("--formulation covariance takes --cov and no --tau/--c1/--c2");
  }
  if ((f.formulation == "f1" || f.formulation == "f2") && f.cov) {
    throw UsageError("--cov applies to --formulation covariance only");
  }
  if (f.notion != "rd" && f.formulation != "f1") {
    throw UsageError("--notion other than rd requires --formulation f1");
  }

  const auto start = std::chrono::steady_clock::now();
  LoadedData loaded = LoadSource(src, eta_opts);
  SolverConfig config = ConfigFromFlags(f);
  std::vector<std::string> warnings = loaded.warnings;
  Report r;
  r.Set("command", CommandEcho(args));
  r.Set("dataset_digest", loaded.digest);
  r.Set("formulation", f.formulation);

  Dataset d = loaded.data;
  TrainResult result;
  std::optional<Formulation2Result> f2;
  bool needs_eta = f.formulation == "f2" || f.weighting == "eta";
  if (f.formulation == "plain") {
    result = TrainUnconstrained(d, config);
  } else if (f.formulation == "covariance") {
    config.budget = FairnessBudget::Symmetric(0.0);
    r.Set("cov_threshold", *f.cov);
    result = TrainCovarianceBaseline(d, config, *f.cov);
  } else if (f.formulation == "f1" || f.formulation == "f2") {
    if (f.formulation == "f1" && f.notion == "rr") {
      if (!f.tau || f.c1 || f.c2) throw UsageError("--notion rr takes --tau only");
      config.budget = {*f.tau, *f.tau, FairnessNotion::kRiskRatio};
    } else {
      config.budget = BudgetFromFlags(f.tau, f.c1, f.c2);
      config.budget.notion = ParseNotion(f.notion);
    }
    if (needs_eta) d = WithEta(d, eta_opts);
    if (f.formulation == "f1") {
      const double rhs1 = config.budget.notion == FairnessNotion::kRiskRatio
                              ? 0.0
                              : config.budget.c1;
      const double rhs2 = config.budget.notion == FairnessNotion::kRiskRatio
                              ? 0.0
                              : config.budget.c2;
      result = TrainFormulation1(d, config, rhs1, rhs2);
    } else {
      f2 = TrainFormulation2(d, config);
      result = f2->train;
    }
  } else {
    throw UsageError(fmt::format("unknown --formulation '{}'", f.formulation));
  }
  if (f.formulation == "f1" || f.formulation == "f2") AddBudget(&r, config.budget);
  AddConfig(&r, config);
  AddTrainResult(&r, result);

  // Metrics always use eta when it can be estimated, for the weighted RD.
  if (!d.has_eta()) {
    try {
      d = WithEta(d, eta_opts);
    } catch (const MethodError& e) {
      warnings.push_back(fmt::format("eta unavailable: {}", e.what()));
    }
  }
  r.Set("eta_method", std::string(ToString(d.eta_method())));
  const Prediction pred = Predict(result.model, d);
  AddMetrics(&r, d, pred.labels, pred.scores, config.phi);
  if (f2) {
    const RefinedThresholds& t = f2->thresholds;
    r.Set("f2.upper_active", t.upper_active);
    r.Set("f2.lower_active", t.lower_active);
    r.Set("f2.upper_rhs", t.upper_rhs);
    r.Set("f2.lower_rhs", t.lower_rhs);
    r.Set("f2.upper_unattainable", t.upper_unattainable);
    r.Set("f2.lower_unattainable", t.lower_unattainable);
    r.Set("f2.jointly_unattainable", t.jointly_unattainable);
    r.Set("f2.weighted_rd", f2->weighted_rd);
    r.Set("f2.upper_slack", f2->upper_slack);
    r.Set("f2.lower_slack", f2->lower_slack);
    r.Set("f2.guarantee_holds", f2->guarantee_holds);
    if (t.upper_clamped || t.lower_clamped) {
      warnings.push_back("psi argument clamped into its domain");
    }
    if (f2->unattainable) {
      warnings.push_back("the budget cannot be met by any classifier on this data");
    }
    AddBounds(&r, f2->bounds, &warnings);
  } else if (d.has_eta()) {
    AddBounds(&r, ComputeBounds(pred.scores, d.eta_hat(), d.group_rate(),
                                config.kappa),
              &warnings);
  }

  ModelRecord record;
  record.model = result.model;
  record.formulation = f.formulation;
  record.phi = config.phi;
  record.kappa = config.kappa;
  record.c1 = config.budget.c1;
  record.c2 = config.budget.c2;
  record.config_digest = config.Digest();
  SaveModel(f.model_out, record);
  r.Set("model_file", f.model_out);
  AddWarnings(&r, warnings);
  r.Set("timing.seconds",
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  EmitReport(r, report_path, out);

  const bool ok = result.status == TrainStatus::kConverged &&
                  (!f2 || f2->guarantee_holds);
  return ok ? kExitOk : kExitInfeasible;
}

std::vector<int> ReadPredictions(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestError(fmt::format("cannot open {}", path.string()));
  std::vector<int> preds;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    line.erase(0, line.find_first_not_of(" \t\r"));
    line.erase(line.find_last_not_of(" \t\r") + 1);
    if (line.empty()) continue;
    int v = 0;
    if (line == "1" || line == "+1") {
      v = 1;
    } else if (line == "-1" || line == "0") {
      v = -1;
    } else if (first) {
      first = false;
      continue;  // header
    } else {
      throw SchemaError(fmt::format("bad prediction '{}' in {}", line, path.string()));
    }
    first = false;
    preds.push_back(v);
  }
  return preds;
}

// Model weights reordered to `names`; model features absent from the data
// are dropped with a warning.
LinearModel AlignModel(const LinearModel& model, const std::vector<std::string>& names,
                       std::vector<std::string>* warnings) {
  if (model.feature_names == names) return model;
  LinearModel out;
  out.bias = model.bias;
  out.feature_names = names;
  out.weights = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(names.size()));
  std::size_t missing = 0;
  for (std::size_t j = 0; j < model.feature_names.size(); ++j) {
    const auto it = std::find(names.begin(), names.end(), model.feature_names[j]);
    if (it == names.end()) {
      ++missing;
      continue;
    }
    out.weights(it - names.begin()) = model.weights(static_cast<Eigen::Index>(j));
  }
  if (missing > 0) {
    warnings->push_back(fmt::format("{} model features absent from the data", missing));
  }
  return out;
}

int RunEval(const SourceOptions& src, const EtaOptions& eta_opts,
            const std::string& model_path, const std::string& predictions_path,
            const std::string& kappa_name, const std::string& report_path,
            const std::vector<std::string>& args, std::ostream& out) {
  if (model_path.empty() == predictions_path.empty()) {
    throw UsageError("give exactly one of --model or --predictions");
  }
  LoadedData loaded = LoadSource(src, eta_opts);
  const Dataset d = WithEta(loaded.data, eta_opts);
  std::vector<std::string> warnings = loaded.warnings;
  Report r;
  r.Set("command", CommandEcho(args));
  r.Set("dataset_digest", loaded.digest);
  r.Set("eta_method", std::string(ToString(d.eta_method())));

  std::vector<int> labels;
  std::vector<double> scores;
  SurrogateKind phi = SurrogateKind::kLogistic;
  SurrogateKind kappa = ParseSurrogateKind(kappa_name);
  if (!model_path.empty()) {
    const ModelRecord record = LoadModel(model_path);
    phi = record.phi;
    const LinearModel model = AlignModel(record.model, d.feature_names(), &warnings);
    const Prediction p = Predict(model, d);
    labels = p.labels;
    scores = p.scores;
    r.Set("source", "model:" + model_path);
  } else {
    labels = ReadPredictions(predictions_path);
    if (labels.size() != d.size()) {
      throw ContractError(fmt::format("{} predictions for {} rows", labels.size(),
                                      d.size()));
    }
    r.Set("source", "predictions:" + predictions_path);
  }
  const Metrics m = AddMetrics(&r, d, labels, scores, phi);
  const ExtremeClassifiers ex = ComputeExtremes(d.eta_hat(), d.group_rate());
  r.Set("rd_minus", ex.rd_minus);
  r.Set("rd_plus", ex.rd_plus);
  constexpr double kSlack = 1e-12;
  const bool weighted_inside =
      m.rd_weighted >= ex.rd_minus - kSlack && m.rd_weighted <= ex.rd_plus + kSlack;
  const bool count_inside = m.rd >= ex.rd_minus - kSlack && m.rd <= ex.rd_plus + kSlack;
  r.Set("containment.weighted_rd", weighted_inside ? "PASS" : "FAIL");
  r.Set("containment.rd", count_inside ? "PASS" : "FAIL");
  if (!scores.empty()) AddBounds(&r, ComputeBounds(scores, d.eta_hat(), d.group_rate(), kappa), &warnings);
  AddWarnings(&r, warnings);
  EmitReport(r, report_path, out);
  return weighted_inside && count_inside ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------
// Sweep

struct SweepJob {
  std::string formulation;
  double budget = 0.0;  // c1 = c2 for f1/f2, multiplier m for covariance
  int fold = 0;
};

struct SweepRow {
  SweepJob job;
  double cov_threshold = std::numeric_limits<double>::quiet_NaN();
  std::string status = "error";
  double train_phi_loss = std::numeric_limits<double>::quiet_NaN();
  double train_accuracy = std::numeric_limits<double>::quiet_NaN();
  double train_rd = std::numeric_limits<double>::quiet_NaN();
  double train_rd_weighted = std::numeric_limits<double>::quiet_NaN();
  double test_phi_loss = std::numeric_limits<double>::quiet_NaN();
  double test_accuracy = std::numeric_limits<double>::quiet_NaN();
  double test_rd = std::numeric_limits<double>::quiet_NaN();
  double test_rd_weighted = std::numeric_limits<double>::quiet_NaN();
  double lower_bound = std::numeric_limits<double>::quiet_NaN();
  double upper_bound = std::numeric_limits<double>::quiet_NaN();
  double rd_minus = std::numeric_limits<double>::quiet_NaN();
  double rd_plus = std::numeric_limits<double>::quiet_NaN();
  std::string guarantee = "na";
  std::string error;
};

constexpr const char* kSweepHeader =
    "version,formulation,budget,fold,cov_threshold,status,train_phi_loss,"
    "train_accuracy,train_rd,train_rd_weighted,test_phi_loss,test_accuracy,"
    "test_rd,test_rd_weighted,lower_bound,upper_bound,rd_minus,rd_plus,"
    "guarantee,error";

std::string FormatRow(const SweepRow& r) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                     kSweepVersion, r.job.formulation, FormatReal(r.job.budget),
                     r.job.fold, FormatReal(r.cov_threshold), r.status,
                     FormatReal(r.train_phi_loss), FormatReal(r.train_accuracy),
                     FormatReal(r.train_rd), FormatReal(r.train_rd_weighted),
                     FormatReal(r.test_phi_loss), FormatReal(r.test_accuracy),
                     FormatReal(r.test_rd), FormatReal(r.test_rd_weighted),
                     FormatReal(r.lower_bound), FormatReal(r.upper_bound),
                     FormatReal(r.rd_minus), FormatReal(r.rd_plus), r.guarantee,
                     CsvField(r.error));
}

struct FoldData {
  Dataset train;
  Dataset test;
  double unconstrained_cov = 0.0;
};

SweepRow RunSweepJob(const SweepJob& job, const FoldData& fold,
                     const SolverConfig& base) {
  SweepRow row;
  row.job = job;
  try {
    SolverConfig config = base;
    TrainResult result;
    std::optional<Formulation2Result> f2;
    if (job.formulation == "plain") {
      result = TrainUnconstrained(fold.train, config);
    } else if (job.formulation == "f1") {
      config.budget = FairnessBudget::Symmetric(job.budget);
      result = TrainFormulation1(fold.train, config, job.budget, job.budget);
    } else if (job.formulation == "f2") {
      config.budget = FairnessBudget::Symmetric(job.budget);
      f2 = TrainFormulation2(fold.train, config);
      result = f2->train;
      row.guarantee = f2->guarantee_holds ? "yes" : "no";
    } else {
      row.cov_threshold = job.budget * fold.unconstrained_cov;
      result = TrainCovarianceBaseline(fold.train, config, row.cov_threshold);
    }
    row.status = std::string(ToString(result.status));
    const Surrogate phi(config.phi);
    auto fill = [&](const Dataset& d, double* loss, double* acc, double* rd,
                    double* rdw) {
      const Prediction p = Predict(result.model, d);
      *loss = PhiLoss(p.scores, d.labels(), phi);
      *acc = Accuracy(p.labels, d.labels());
      *rd = RiskDifference(p.labels, d.sensitive());
      *rdw = RiskDifferenceWeighted(p.scores, d.eta_hat(), d.group_rate());
    };
    fill(fold.train, &row.train_phi_loss, &row.train_accuracy, &row.train_rd,
         &row.train_rd_weighted);
    fill(fold.test, &row.test_phi_loss, &row.test_accuracy, &row.test_rd,
         &row.test_rd_weighted);
    const BoundsReport b =
        f2 ? f2->bounds
           : ComputeBounds(Predict(result.model, fold.train).scores,
                           fold.train.eta_hat(), fold.train.group_rate(), config.kappa);
    row.lower_bound = b.certified_lower();
    row.upper_bound = b.certified_upper();
    row.rd_minus = b.rd_minus;
    row.rd_plus = b.rd_plus;
  } catch (const std::exception& e) {
    row.status = "error";
    row.error = e.what();
  }
  return row;
}

std::vector<double> ParseGrid(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(ParseCell(item, flag));
  }
  return out;
}

int RunSweep(const SourceOptions& src, const EtaOptions& eta_opts,
             const TrainFlags& f, const std::string& grid_text,
             const std::string& formulations_text, const std::string& cov_grid_text,
             int folds, int jobs, const std::string& out_path, std::ostream& out) {
  const std::vector<double> grid = ParseGrid(grid_text, "--grid");
  const std::vector<double> cov_grid = ParseGrid(cov_grid_text, "--cov-grid");
  std::vector<std::string> formulations;
  {
    std::stringstream ss(formulations_text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      if (item != "plain" && item != "f1" && item != "f2" && item != "covariance") {
        throw UsageError(fmt::format("unknown formulation '{}'", item));
      }
      formulations.push_back(item);
    }
  }
  if (formulations.empty()) throw UsageError("--formulations is empty");
  const bool needs_grid = std::any_of(formulations.begin(), formulations.end(),
                                      [](const std::string& s) {
                                        return s == "f1" || s == "f2";
                                      });
  if (needs_grid && grid.empty()) throw UsageError("--grid is empty");
  const bool needs_cov = std::find(formulations.begin(), formulations.end(),
                                   "covariance") != formulations.end();
  if (needs_cov && cov_grid.empty()) throw UsageError("--cov-grid is empty");
  if (folds < 1) throw UsageError("--folds must be >= 1");
  if (jobs < 1) throw UsageError("--jobs must be >= 1");

  LoadedData loaded = LoadSource(src, eta_opts);
  const SolverConfig base = ConfigFromFlags(f);

  std::vector<FoldData> fold_data;
  if (folds == 1) {
    const Dataset d = WithEta(loaded.data, eta_opts);
    fold_data.push_back({d, d, 0.0});
  } else {
    for (auto& [train, test] : Split(loaded.data, folds, f.seed)) {
      fold_data.push_back({WithEta(train, eta_opts), WithEta(test, eta_opts), 0.0});
    }
  }
  if (needs_cov) {
    for (FoldData& fd : fold_data) {
      const TrainResult plain = TrainUnconstrained(fd.train, base);
      fd.unconstrained_cov = std::abs(
          ScoreCovariance(Predict(plain.model, fd.train).scores, fd.train.sensitive()));
    }
  }

  std::vector<SweepJob> job_list;
  for (const std::string& form : formulations) {
    std::vector<double> values = {0.0};
    if (form == "f1" || form == "f2") values = grid;
    if (form == "covariance") values = cov_grid;
    for (const double v : values) {
      for (int k = 0; k < static_cast<int>(fold_data.size()); ++k) {
        job_list.push_back({form, v, k});
      }
    }
  }

  std::vector<SweepRow> rows(job_list.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < job_list.size(); i = next++) {
      rows[i] = RunSweepJob(job_list[i], fold_data[job_list[i].fold], base);
    }
  };
  std::vector<std::thread> threads;
  const int n_threads = std::min<int>(jobs, static_cast<int>(job_list.size()));
  for (int t = 1; t < n_threads; ++t) threads.emplace_back(worker);
  worker();
  for (std::thread& t : threads) t.join();

  std::string csv = std::string(kSweepHeader) + "\n";
  for (const SweepRow& r : rows) csv += FormatRow(r) + "\n";
  if (out_path.empty()) {
    out << csv;
  } else {
    AtomicWrite(out_path, csv);
    out << fmt::format("wrote {} rows to {}\n", rows.size(), out_path);
  }
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Fairness-aware linear classification with certified risk-difference bounds",
               "fairbound"};
  app.require_subcommand(1);

  SourceOptions src;
  EtaOptions eta;
  TrainFlags tf;
  std::string out_dir, report_path, model_path, predictions_path;
  std::string eval_kappa = "hinge";
  std::optional<double> tau, c1, c2;
  std::string grid, formulations = "f2", cov_grid;
  int folds = 1;
  int jobs = 1;
  std::string sweep_out;

  CLI::App* ingest = app.add_subcommand("ingest", "Load, encode and store a dataset");
  AddSourceOptions(ingest, &src);
  AddEtaOptions(ingest, &eta);
  ingest->add_option("--out", out_dir, "Output directory")->required();

  CLI::App* check = app.add_subcommand("check", "Constraint-free fairness criterion");
  AddSourceOptions(check, &src);
  AddEtaOptions(check, &eta);
  check->add_option("--tau", tau, "Symmetric budget");
  check->add_option("--c1", c1, "Upper budget");
  check->add_option("--c2", c2, "Lower budget");
  check->add_option("--report", report_path, "Write text and JSON report");

  auto add_train_flags = [&tf](CLI::App* cmd) {
    cmd->add_option("--phi", tf.phi, "Loss surrogate")
        ->check(CLI::IsMember({"hinge", "square", "logistic", "exponential"}));
    cmd->add_option("--kappa", tf.kappa, "Constraint surrogate")
        ->check(CLI::IsMember({"hinge", "square", "logistic", "exponential"}));
    cmd->add_option("--seed", tf.seed, "Seed for init and fold splits");
    cmd->add_option("--init", tf.init, "Initial parameters")
        ->check(CLI::IsMember({"zeros", "random"}));
    cmd->add_option("--l2", tf.l2, "L2 penalty on the weights");
    cmd->add_option("--max-outer", tf.max_outer, "Augmented Lagrangian iterations");
    cmd->add_option("--max-inner", tf.max_inner, "Inner L-BFGS iterations");
    cmd->add_option("--f1-weighting", tf.weighting,
                    "Formulation 1 constraint weights: group | eta")
        ->check(CLI::IsMember({"group", "eta"}));
  };

  CLI::App* train = app.add_subcommand("train", "Train a linear classifier");
  AddSourceOptions(train, &src);
  AddEtaOptions(train, &eta);
  add_train_flags(train);
  train->add_option("--formulation", tf.formulation, "plain | f1 | f2 | covariance")
      ->check(CLI::IsMember({"plain", "f1", "f2", "covariance"}));
  train->add_option("--tau", tf.tau, "Symmetric budget");
  train->add_option("--c1", tf.c1, "Upper budget (surrogate scale for f1)");
  train->add_option("--c2", tf.c2, "Lower budget (surrogate scale for f1)");
  train->add_option("--cov", tf.cov, "Covariance threshold (covariance baseline)");
  train->add_option("--notion", tf.notion, "f1 fairness notion: rd | rr | eo | eop")
      ->check(CLI::IsMember({"rd", "rr", "eo", "eop"}));
  train->add_option("--out", tf.model_out, "Model file");
  train->add_option("--report", report_path, "Write text and JSON report");

  CLI::App* eval = app.add_subcommand("eval", "Evaluate a model or predictions");
  AddSourceOptions(eval, &src);
  AddEtaOptions(eval, &eta);
  eval->add_option("--model", model_path, "Model file written by train");
  eval->add_option("--predictions", predictions_path,
                   "One prediction (+1/-1 or 1/0) per row");
  eval->add_option("--kappa", eval_kappa, "Surrogate for the bound certificate")
      ->check(CLI::IsMember({"hinge", "square", "logistic", "exponential"}));
  eval->add_option("--report", report_path, "Write text and JSON report");

  CLI::App* sweep = app.add_subcommand("sweep", "Budget sweep to CSV");
  AddSourceOptions(sweep, &src);
  AddEtaOptions(sweep, &eta);
  add_train_flags(sweep);
  sweep->add_option("--grid", grid, "Comma-separated symmetric budgets for f1/f2");
  sweep->add_option("--formulations", formulations,
                    "Comma-separated: plain,f1,f2,covariance");
  sweep->add_option("--cov-grid", cov_grid,
                    "Covariance multipliers of the unconstrained model's covariance");
  sweep->add_option("--folds", folds, "Cross-validation folds (1 = train on all)");
  sweep->add_option("--jobs", jobs, "Concurrent runs");
  sweep->add_option("--out", sweep_out, "CSV output file (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitError;
  }

  try {
    if (ingest->parsed()) return RunIngest(src, eta, out_dir, out);
    if (check->parsed()) {
      return RunCheck(src, eta, BudgetFromFlags(tau, c1, c2), report_path, args, out);
    }
    if (train->parsed()) return RunTrain(src, eta, tf, report_path, args, out);
    if (eval->parsed()) {
      return RunEval(src, eta, model_path, predictions_path, eval_kappa, report_path,
                     args, out);
    }
    if (sweep->parsed()) {
      return RunSweep(src, eta, tf, grid, formulations, cov_grid, folds, jobs,
                      sweep_out, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace fairbound::cli
