#include "cmc/selection.hpp"

#include <cmath>
#include <sstream>

#include "cmc/error.hpp"
#include "cmc/stats.hpp"

namespace cmc {

AlphaMode AlphaMode::Fixed(double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw UsageError("fixed alpha must be in (0, 1)");
  }
  AlphaMode m;
  m.kind = Kind::fixed;
  m.alpha = alpha;
  return m;
}

AlphaMode AlphaMode::Schedule(double gamma) {
  if (!(gamma > 0.0) || !(gamma < 1.0)) {
    throw UsageError("schedule gamma must be in (0, 1)");
  }
  AlphaMode m;
  m.kind = Kind::schedule;
  m.gamma = gamma;
  return m;
}

std::string AlphaMode::describe() const {
  std::ostringstream os;
  if (kind == Kind::fixed) {
    os << "alpha=" << alpha;
  } else {
    os << "gamma=" << gamma;
  }
  return os.str();
}

Threshold make_threshold(const AlphaMode& mode, int n, int p) {
  if (n <= p + 1) throw UsageError("make_threshold: need n > p + 1");
  Threshold t;
  t.df = p + 1;
  if (mode.kind == AlphaMode::Kind::fixed) {
    t.value = chi2_quantile(1.0 - mode.alpha, t.df);
    t.alpha_effective = mode.alpha;
  } else {
    t.value = std::pow(static_cast<double>(n), mode.gamma);
    t.alpha_effective = 1.0 - chi2_cdf(t.value, t.df);
  }
  return t;
}

double lambda_of(const FitResult& fit_j, const FitResult& fit_full) {
  if (fit_j.dataset_tag != fit_full.dataset_tag) {
    throw UsageError("lambda_of: fits come from different datasets");
  }
  double lambda = -2.0 * (fit_j.loglik - fit_full.loglik);
  if (lambda == 0.0) return 0.0;  // normalize -0 from the exact-tie case
  if (lambda < 0.0) {
    if (lambda < -1e-8) {
      throw NumericError(
          "internal inconsistency: submodel likelihood exceeds the full "
          "model's (lambda = " +
          std::to_string(lambda) + ")");
    }
    lambda = 0.0;
  }
  return lambda;
}

std::string criterion_name(Criterion c) {
  switch (c) {
    case Criterion::cmc: return "cmc";
    case Criterion::aic: return "aic";
    case Criterion::bic: return "bic";
    case Criterion::hq: return "hq";
  }
  return "?";
}

SelectionResult cmc_select_from(const Dataset& data, const MLSet& set,
                                const AlphaMode& mode) {
  if (set.max_size() != data.p()) {
    throw UsageError("cmc_select requires the ML set to reach the full model");
  }
  Threshold t = make_threshold(mode, data.n(), data.p());
  const FitResult& full_fit = set.entries.back().fit;

  SelectionResult res;
  res.criterion = Criterion::cmc;
  res.threshold = t;
  res.alpha_mode = mode;
  res.warnings = set.warnings;

  int selected = -1;
  for (int j = 0; j <= set.max_size(); ++j) {
    SelectionResult::SizeRow row;
    row.size = j;
    row.model = set.entries[j].model;
    row.lambda = lambda_of(set.entries[j].fit, full_fit);
    row.in_region = row.lambda <= t.value;
    if (row.in_region && selected < 0) selected = j;
    res.lambda_by_size.push_back(row);
  }
  // j = p has lambda = 0, so a selection always exists.
  res.selected = set.entries[selected].model;
  res.fit = set.entries[selected].fit;
  return res;
}

SelectionResult cmc_select(const Dataset& data, const AlphaMode& mode,
                           const SearchBudget& budget) {
  SearchBudget full = budget;
  full.max_size = -1;  // the full model anchors the likelihood ratio
  return cmc_select_from(data, ml_set(data, full), mode);
}

namespace {

double ic_penalty(Criterion c, int n_params, int n) {
  switch (c) {
    case Criterion::aic:
      return 2.0 * n_params;
    case Criterion::bic:
      return n_params * std::log(static_cast<double>(n));
    case Criterion::hq:
      if (n <= 2) throw UsageError("Hannan-Quinn requires n > e");
      return 2.0 * n_params * std::log(std::log(static_cast<double>(n)));
    default:
      throw UsageError("not an information criterion");
  }
}

}  // namespace

SelectionResult ic_select_from(const Dataset& data, const MLSet& set,
                               Criterion criterion) {
  if (criterion == Criterion::cmc) {
    throw UsageError("ic_select: use cmc_select for the cmc criterion");
  }
  const FitResult& top_fit = set.entries.back().fit;

  SelectionResult res;
  res.criterion = criterion;
  res.warnings = set.warnings;

  int best = 0;
  double best_score = 0.0;
  for (int j = 0; j <= set.max_size(); ++j) {
    const auto& e = set.entries[j];
    SelectionResult::SizeRow row;
    row.size = j;
    row.model = e.model;
    row.lambda = lambda_of(e.fit, top_fit);
    row.score = -2.0 * e.fit.loglik + ic_penalty(criterion, j + 1, data.n());
    if (j == 0 || *row.score < best_score - 1e-12) {
      best = j;
      best_score = *row.score;
    }
    res.lambda_by_size.push_back(row);
  }
  res.selected = set.entries[best].model;
  res.fit = set.entries[best].fit;
  return res;
}

SelectionResult ic_select(const Dataset& data, Criterion criterion,
                          const SearchBudget& budget) {
  return ic_select_from(data, ml_set(data, budget), criterion);
}

std::string CompareMode::label() const {
  if (criterion == Criterion::cmc) {
    return "cmc(" + (alpha ? alpha->describe() : std::string("?")) + ")";
  }
  return criterion_name(criterion);
}

CompareMode parse_mode(const std::string& text) {
  CompareMode m;
  if (text == "aic" || text == "bic" || text == "hq") {
    m.criterion = text == "aic" ? Criterion::aic
                : text == "bic" ? Criterion::bic
                                : Criterion::hq;
    return m;
  }
  if (text.rfind("cmc", 0) == 0) {
    m.criterion = Criterion::cmc;
    if (text == "cmc") {
      m.alpha = AlphaMode::Schedule(0.5);
      return m;
    }
    if (text.size() > 4 && text[3] == ':') {
      std::string body = text.substr(4);
      auto eq = body.find('=');
      if (eq != std::string::npos) {
        std::string key = body.substr(0, eq);
        double v = std::stod(body.substr(eq + 1));
        if (key == "alpha") {
          m.alpha = AlphaMode::Fixed(v);
          return m;
        }
        if (key == "gamma") {
          m.alpha = AlphaMode::Schedule(v);
          return m;
        }
      }
    }
  }
  throw UsageError("unrecognized criterion spec: '" + text +
                   "' (expected aic, bic, hq, cmc, cmc:alpha=A, or "
                   "cmc:gamma=G)");
}

ComparisonReport compare(const Dataset& data,
                         const std::vector<CompareMode>& modes,
                         const SearchBudget& budget) {
  if (modes.empty()) throw UsageError("compare: need at least one mode");
  bool any_cmc = false;
  for (const auto& m : modes) any_cmc |= m.criterion == Criterion::cmc;

  SearchBudget b = budget;
  if (any_cmc) b.max_size = -1;
  ComparisonReport report;
  report.set = ml_set(data, b);
  for (const auto& m : modes) {
    SelectionResult r = m.criterion == Criterion::cmc
                            ? cmc_select_from(data, report.set, *m.alpha)
                            : ic_select_from(data, report.set, m.criterion);
    report.rows.emplace_back(m, std::move(r));
  }
  return report;
}

}  // namespace cmc
