#include "cmc/sim.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cmc/error.hpp"
#include "cmc/glm.hpp"

namespace cmc {

using nlohmann::json;

ModelId SimConfig::true_model() const {
  ModelId m;
  for (int j = 0; j < p; ++j) {
    if (beta_true[j + 1] != 0.0) m.mask |= (1u << j);
  }
  return m;
}

void SimConfig::validate() const {
  if (p < 1 || p > 25) throw UsageError("sim config: p must be in [1, 25]");
  if (static_cast<int>(beta_true.size()) != p + 1) {
    throw UsageError("sim config: beta_true must have length p+1");
  }
  if (n_grid.empty()) throw UsageError("sim config: empty n grid");
  for (int n : n_grid) {
    if (n <= p + 1) throw UsageError("sim config: every n must exceed p+1");
  }
  if (!(std::fabs(rho) < 1.0)) throw UsageError("sim config: |rho| must be < 1");
  if (replications < 1) throw UsageError("sim config: replications must be >= 1");
  if (criteria.empty()) throw UsageError("sim config: no criteria listed");
  if (family == Family::gaussian && !(sigma > 0.0)) {
    throw UsageError("sim config: gaussian sigma must be positive");
  }
}

SimConfig SimConfig::from_json(const json& j) {
  SimConfig c;
  c.family = family_from_name(j.at("family").get<std::string>());
  c.n_grid = j.at("n_grid").get<std::vector<int>>();
  c.p = j.at("p").get<int>();
  c.beta_true = j.at("beta_true").get<std::vector<double>>();
  c.rho = j.value("rho", 0.0);
  c.sigma = j.value("sigma", 1.0);
  c.replications = j.value("replications", 100);
  c.seed = j.value("seed", std::uint64_t{0});
  for (const auto& s : j.at("criteria")) {
    c.criteria.push_back(parse_mode(s.get<std::string>()));
  }
  c.max_size = j.value("max_size", -1);
  c.threads = j.value("threads", 0);
  c.validate();
  return c;
}

json SimConfig::to_json() const {
  json j;
  j["family"] = family_name(family);
  j["n_grid"] = n_grid;
  j["p"] = p;
  j["beta_true"] = beta_true;
  j["rho"] = rho;
  j["sigma"] = sigma;
  j["replications"] = replications;
  j["seed"] = seed;
  json crits = json::array();
  for (const auto& m : criteria) {
    crits.push_back(m.criterion == Criterion::cmc
                        ? "cmc:" + m.alpha->describe()
                        : criterion_name(m.criterion));
  }
  j["criteria"] = crits;
  j["max_size"] = max_size;
  return j;
}

Eigen::MatrixXd gen_design(int n, int p, double rho, RngStream& stream) {
  if (!(std::fabs(rho) < 1.0)) throw UsageError("gen_design: |rho| must be < 1");
  Eigen::MatrixXd X(n, p + 1);
  double carry = std::sqrt(1.0 - rho * rho);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    double prev = stream.standard_normal();
    X(i, 1) = prev;
    for (int j = 2; j <= p; ++j) {
      prev = rho * prev + carry * stream.standard_normal();
      X(i, j) = prev;
    }
  }
  return X;
}

Eigen::VectorXd gen_response(const Eigen::MatrixXd& X,
                             const std::vector<double>& beta_true,
                             Family family, double sigma, RngStream& stream,
                             int* clamp_count) {
  if (static_cast<int>(beta_true.size()) != X.cols()) {
    throw UsageError("gen_response: beta_true length mismatch");
  }
  Eigen::VectorXd beta =
      Eigen::Map<const Eigen::VectorXd>(beta_true.data(), beta_true.size());
  Eigen::VectorXd eta = X * beta;
  const int n = static_cast<int>(X.rows());
  Eigen::VectorXd y(n);
  int clamps = 0;
  for (int i = 0; i < n; ++i) {
    switch (family) {
      case Family::gaussian:
        y[i] = eta[i] + sigma * stream.standard_normal();
        break;
      case Family::binomial: {
        double e = eta[i];
        if (e > 30.0 || e < -30.0) {
          e = std::clamp(e, -30.0, 30.0);
          ++clamps;
        }
        y[i] = stream.bernoulli(1.0 / (1.0 + std::exp(-e)));
        break;
      }
      case Family::poisson: {
        double e = eta[i];
        if (e > 30.0 || e < -30.0) {
          e = std::clamp(e, -30.0, 30.0);
          ++clamps;
        }
        y[i] = static_cast<double>(stream.poisson(std::exp(e)));
        break;
      }
    }
  }
  if (clamp_count) *clamp_count += clamps;
  return y;
}

namespace {

struct TrialRecord {
  bool failed = false;
  int clamps = 0;
  int capture = 0;  // all M*_j with j >= p* contain the true support
  struct PerCriterion {
    int exact = 0;
    double fa = 0.0;
    double fi = 0.0;
    double mis = 0.0;
    int size = 0;
    int coverage = -1;  // -1 means not applicable
  };
  std::vector<PerCriterion> per_criterion;
};

TrialRecord run_one_trial(const SimConfig& cfg, int n, RngStream stream) {
  TrialRecord rec;
  const ModelId truth = cfg.true_model();
  const int p_star = truth.size();

  Eigen::MatrixXd X = gen_design(n, cfg.p, cfg.rho, stream);
  Eigen::VectorXd y =
      gen_response(X, cfg.beta_true, cfg.family, cfg.sigma, stream, &rec.clamps);

  std::vector<std::string> names{"(Intercept)"};
  for (int j = 1; j <= cfg.p; ++j) names.push_back("x" + std::to_string(j));
  Dataset data(std::move(y), std::move(X), cfg.family, std::move(names));

  SearchBudget budget;
  budget.max_size = cfg.max_size;
  budget.threads = 1;  // parallelism lives at the replication level
  bool any_cmc = false;
  for (const auto& m : cfg.criteria) any_cmc |= m.criterion == Criterion::cmc;
  if (any_cmc) budget.max_size = -1;

  MLSet set = ml_set(data, budget);
  const FitResult& full_fit = set.entries.back().fit;

  rec.capture = 1;
  for (int j = p_star; j <= set.max_size(); ++j) {
    if (!truth.is_subset_of(set.entries[j].model)) {
      rec.capture = 0;
      break;
    }
  }

  // Likelihood ratio of the true model's fit, for region coverage.
  double lambda_truth = 0.0;
  if (any_cmc) {
    FitResult truth_fit = fit_submodel(data, truth);
    lambda_truth = lambda_of(truth_fit, full_fit);
  }

  for (const auto& mode : cfg.criteria) {
    SelectionResult sel =
        mode.criterion == Criterion::cmc
            ? cmc_select_from(data, set, *mode.alpha)
            : ic_select_from(data, set, mode.criterion);
    TrialRecord::PerCriterion pc;
    pc.size = sel.selected.size();
    pc.exact = sel.selected == truth ? 1 : 0;
    int false_active = std::popcount(sel.selected.mask & ~truth.mask);
    int false_inactive = std::popcount(truth.mask & ~sel.selected.mask);
    pc.fa = cfg.p == p_star ? 0.0
                            : static_cast<double>(false_active) / (cfg.p - p_star);
    pc.fi = p_star == 0 ? 0.0 : static_cast<double>(false_inactive) / p_star;
    pc.mis = static_cast<double>(false_active + false_inactive) / cfg.p;
    if (mode.criterion == Criterion::cmc) {
      pc.coverage = lambda_truth <= sel.threshold->value ? 1 : 0;
    }
    rec.per_criterion.push_back(pc);
  }
  return rec;
}

}  // namespace

TrialMetrics run_trials(const SimConfig& config) {
  config.validate();
  TrialMetrics metrics;
  metrics.config = config;

  RngStream master(config.seed);
  const int R = config.replications;

  for (std::size_t ni = 0; ni < config.n_grid.size(); ++ni) {
    const int n = config.n_grid[ni];
    std::vector<TrialRecord> records(R);
    parallel_for_indexed(R, config.threads, [&](int rep) {
      std::uint64_t trial_index =
          static_cast<std::uint64_t>(ni) * static_cast<std::uint64_t>(R) + rep;
      try {
        records[rep] = run_one_trial(config, n, master.substream(trial_index));
      } catch (const Error&) {
        records[rep].failed = true;
        records[rep].per_criterion.resize(config.criteria.size());
      }
    });

    int failures = 0;
    for (const auto& r : records) failures += r.failed ? 1 : 0;
    if (failures > std::max(1, R / 100)) {
      throw NumericError("simulation aborted: " + std::to_string(failures) +
                         " of " + std::to_string(R) + " trials failed at n=" +
                         std::to_string(n));
    }
    const int ok = R - failures;
    if (ok == 0) throw NumericError("simulation: all trials failed");

    for (std::size_t ci = 0; ci < config.criteria.size(); ++ci) {
      const CompareMode& mode = config.criteria[ci];
      CellMetrics cell;
      cell.n = n;
      cell.criterion = criterion_name(mode.criterion);
      cell.alpha_mode =
          mode.criterion == Criterion::cmc ? mode.alpha->describe() : "";
      cell.failures = failures;
      long exact = 0, coverage = 0, capture = 0;
      double fa = 0.0, fi = 0.0, mis = 0.0, size_sum = 0.0;
      bool has_coverage = mode.criterion == Criterion::cmc;
      for (const auto& r : records) {
        if (r.failed) continue;
        cell.clamp_events += r.clamps;
        const auto& pc = r.per_criterion[ci];
        exact += pc.exact;
        fa += pc.fa;
        fi += pc.fi;
        mis += pc.mis;
        size_sum += pc.size;
        capture += r.capture;
        if (has_coverage) coverage += pc.coverage;
      }
      cell.exact_match_rate = static_cast<double>(exact) / ok;
      cell.false_active_rate = fa / ok;
      cell.false_inactive_rate = fi / ok;
      cell.misclassification_rate = mis / ok;
      cell.mean_size = size_sum / ok;
      cell.capture_rate = static_cast<double>(capture) / ok;
      if (has_coverage) cell.coverage_freq = static_cast<double>(coverage) / ok;
      metrics.cells.push_back(cell);
    }
  }
  return metrics;
}

json TrialMetrics::to_json() const {
  json j;
  j["config"] = config.to_json();
  json cells_json = json::array();
  for (const auto& c : cells) {
    json cj;
    cj["family"] = family_name(config.family);
    cj["n"] = c.n;
    cj["rho"] = config.rho;
    cj["criterion"] = c.criterion;
    cj["alpha_mode"] = c.alpha_mode;
    cj["exact_match_rate"] = c.exact_match_rate;
    cj["false_active_rate"] = c.false_active_rate;
    cj["false_inactive_rate"] = c.false_inactive_rate;
    // (#false actives + #false inactives)/p per trial, averaged.
    cj["misclassification_rate"] = c.misclassification_rate;
    if (c.coverage_freq) {
      cj["coverage_freq"] = *c.coverage_freq;
    } else {
      cj["coverage_freq"] = nullptr;
    }
    cj["capture_rate"] = c.capture_rate;
    cj["mean_size"] = c.mean_size;
    cj["failures"] = c.failures;
    cj["clamp_events"] = c.clamp_events;
    cells_json.push_back(cj);
  }
  j["cells"] = cells_json;
  return j;
}

TrialMetrics TrialMetrics::from_json(const json& j) {
  TrialMetrics m;
  m.config = SimConfig::from_json(j.at("config"));
  for (const auto& cj : j.at("cells")) {
    CellMetrics c;
    c.n = cj.at("n").get<int>();
    c.criterion = cj.at("criterion").get<std::string>();
    c.alpha_mode = cj.at("alpha_mode").get<std::string>();
    c.exact_match_rate = cj.at("exact_match_rate").get<double>();
    c.false_active_rate = cj.at("false_active_rate").get<double>();
    c.false_inactive_rate = cj.at("false_inactive_rate").get<double>();
    c.misclassification_rate = cj.value("misclassification_rate", 0.0);
    if (!cj.at("coverage_freq").is_null()) {
      c.coverage_freq = cj.at("coverage_freq").get<double>();
    }
    c.capture_rate = cj.at("capture_rate").get<double>();
    c.mean_size = cj.at("mean_size").get<double>();
    c.failures = cj.at("failures").get<int>();
    c.clamp_events = cj.at("clamp_events").get<int>();
    m.cells.push_back(c);
  }
  return m;
}

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

std::string TrialMetrics::to_csv() const {
  std::ostringstream os;
  os << "family,n,rho,criterion,alpha_mode,exact_match_rate,false_active_rate,"
        "false_inactive_rate,coverage_freq,capture_rate,mean_size,failures\n";
  for (const auto& c : cells) {
    os << family_name(config.family) << ',' << c.n << ','
       << fmt_double(config.rho) << ',' << c.criterion << ',' << c.alpha_mode
       << ',' << fmt_double(c.exact_match_rate) << ','
       << fmt_double(c.false_active_rate) << ','
       << fmt_double(c.false_inactive_rate) << ','
       << (c.coverage_freq ? fmt_double(*c.coverage_freq) : std::string())
       << ',' << fmt_double(c.capture_rate) << ',' << fmt_double(c.mean_size)
       << ',' << c.failures << '\n';
  }
  return os.str();
}

void emit_report(const TrialMetrics& metrics, const std::string& format,
                 const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path);
  if (format == "csv") {
    out << metrics.to_csv();
  } else if (format == "json") {
    out << metrics.to_json().dump(2) << '\n';
  } else {
    throw UsageError("report format must be csv or json");
  }
  if (!out.good()) throw IoError("failed writing report to " + path);
}

}  // namespace cmc
