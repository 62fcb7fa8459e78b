// cmc: model selection for linear and generalized linear regression via
// the constrained minimum criterion, with AIC/BIC/HQ baselines and a
// Monte-Carlo simulation driver.

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cmc/error.hpp"
#include "cmc/io.hpp"
#include "cmc/selection.hpp"
#include "cmc/sim.hpp"

using nlohmann::json;

namespace {

struct CommonOpts {
  std::string input;
  std::string response;
  std::vector<std::string> predictors;
  std::string family = "gaussian";
  double alpha = -1.0;
  double gamma = -1.0;
  int max_size = -1;
  std::vector<std::string> criteria;
  std::uint64_t seed = 0;
  std::string format = "table";
  std::string output;
};

void add_data_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--input", o.input, "input CSV file")->required();
  cmd->add_option("--response", o.response, "response column name")->required();
  cmd->add_option("--predictors", o.predictors,
                  "predictor columns (default: all other columns)")
      ->delimiter(',');
  cmd->add_option("--family", o.family, "gaussian|binomial|poisson")
      ->check(CLI::IsMember({"gaussian", "binomial", "poisson"}));
}

void add_output_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"json", "csv", "table"}));
  cmd->add_option("--output", o.output, "write result to file instead of stdout");
}

cmc::AlphaMode resolve_alpha_mode(const CommonOpts& o) {
  if (o.alpha >= 0.0 && o.gamma >= 0.0) {
    throw cmc::UsageError("supply exactly one of --alpha and --gamma");
  }
  if (o.alpha >= 0.0) return cmc::AlphaMode::Fixed(o.alpha);
  return cmc::AlphaMode::Schedule(o.gamma >= 0.0 ? o.gamma : 0.5);
}

cmc::Dataset load_dataset(const CommonOpts& o) {
  return cmc::ingest_csv(o.input, o.response, o.predictors,
                         cmc::family_from_name(o.family));
}

void emit(const CommonOpts& o, const std::string& text) {
  if (o.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(o.output);
  if (!out) throw cmc::IoError("cannot open output file: " + o.output);
  out << text;
  if (!out.good()) throw cmc::IoError("failed writing to " + o.output);
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::vector<std::string> model_names(const cmc::Dataset& data,
                                     cmc::ModelId model) {
  std::vector<std::string> out;
  for (int j : model.predictors()) out.push_back(data.predictor_name(j));
  return out;
}

json fit_to_json(const cmc::Dataset& data, const cmc::FitResult& fit) {
  json coef = json::object();
  for (int c = 0; c <= data.p(); ++c) coef[data.names()[c]] = fit.beta[c];
  json j;
  j["model"] = model_names(data, fit.model);
  j["size"] = fit.model.size();
  j["coefficients"] = coef;
  j["loglik"] = fit.loglik;
  j["deviance"] = fit.deviance;
  if (data.family() == cmc::Family::gaussian) j["rss"] = fit.rss;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  return j;
}

json selection_to_json(const cmc::Dataset& data,
                       const cmc::SelectionResult& res) {
  json j;
  j["criterion"] = cmc::criterion_name(res.criterion);
  if (res.alpha_mode) j["alpha_mode"] = res.alpha_mode->describe();
  j["selected"] = model_names(data, res.selected);
  j["size"] = res.selected.size();
  j["fit"] = fit_to_json(data, res.fit);
  if (res.threshold) {
    j["threshold"] = {{"value", res.threshold->value},
                      {"alpha_effective", res.threshold->alpha_effective},
                      {"df", res.threshold->df}};
  }
  json table = json::array();
  for (const auto& row : res.lambda_by_size) {
    json r;
    r["size"] = row.size;
    r["model"] = model_names(data, row.model);
    r["lambda"] = row.lambda;
    if (res.criterion == cmc::Criterion::cmc) r["in_region"] = row.in_region;
    if (row.score) r["score"] = *row.score;
    table.push_back(r);
  }
  j["by_size"] = table;
  return j;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (const auto& s : parts) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

std::string selection_to_csv(const cmc::Dataset& data,
                             const cmc::SelectionResult& res) {
  std::ostringstream os;
  os.precision(12);
  os << "size,model,lambda,";
  os << (res.criterion == cmc::Criterion::cmc ? "in_region" : "score");
  os << ",selected\n";
  for (const auto& row : res.lambda_by_size) {
    os << row.size << ',' << join(model_names(data, row.model), " ") << ','
       << row.lambda << ',';
    if (res.criterion == cmc::Criterion::cmc) {
      os << (row.in_region ? 1 : 0);
    } else {
      os << *row.score;
    }
    os << ',' << (row.model == res.selected ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string selection_to_table(const cmc::Dataset& data,
                               const cmc::SelectionResult& res) {
  std::ostringstream os;
  os.precision(6);
  os << "criterion: " << cmc::criterion_name(res.criterion);
  if (res.alpha_mode) os << " (" << res.alpha_mode->describe() << ")";
  os << "\n";
  if (res.threshold) {
    os << "threshold: " << res.threshold->value
       << "  alpha_effective: " << res.threshold->alpha_effective
       << "  df: " << res.threshold->df << "\n";
  }
  os << "selected (" << res.selected.size() << " predictors): "
     << (res.selected.size() ? join(model_names(data, res.selected), ", ")
                             : "(intercept only)")
     << "\n\ncoefficients:\n";
  for (int c = 0; c <= data.p(); ++c) {
    if (c > 0 && !res.selected.contains(c - 1)) continue;
    os << "  " << std::left << std::setw(14) << data.names()[c]
       << res.fit.beta[c] << "\n";
  }
  os << "\nper-size table:\n";
  os << "  size  lambda        "
     << (res.criterion == cmc::Criterion::cmc ? "in_region" : "score")
     << "  model\n";
  for (const auto& row : res.lambda_by_size) {
    os << "  " << std::left << std::setw(6) << row.size << std::setw(14)
       << row.lambda;
    if (res.criterion == cmc::Criterion::cmc) {
      os << std::setw(11) << (row.in_region ? "yes" : "no");
    } else {
      os << std::setw(11) << *row.score;
    }
    os << join(model_names(data, row.model), " ")
       << (row.model == res.selected ? "   <- selected" : "") << "\n";
  }
  return os.str();
}

std::string render_selection(const CommonOpts& o, const cmc::Dataset& data,
                             const cmc::SelectionResult& res) {
  if (o.format == "json") return selection_to_json(data, res).dump(2) + "\n";
  if (o.format == "csv") return selection_to_csv(data, res);
  return selection_to_table(data, res);
}

int cmd_select(const CommonOpts& o) {
  cmc::Dataset data = load_dataset(o);
  cmc::SelectionResult res = cmc::cmc_select(data, resolve_alpha_mode(o));
  print_warnings(res.warnings);
  emit(o, render_selection(o, data, res));
  return 0;
}

int cmd_fit(const CommonOpts& o, const std::vector<std::string>& model_cols) {
  cmc::Dataset data = load_dataset(o);
  cmc::ModelId model = cmc::ModelId::full(data.p());
  if (!model_cols.empty()) {
    model = cmc::ModelId::empty();
    for (const auto& name : model_cols) {
      bool found = false;
      for (int j = 0; j < data.p(); ++j) {
        if (data.predictor_name(j) == name) {
          model.mask |= (1u << j);
          found = true;
        }
      }
      if (!found) throw cmc::DataError("unknown predictor: " + name);
    }
  }
  cmc::FitResult fit = cmc::fit_submodel(data, model);
  print_warnings(fit.warnings);
  if (o.format == "json") {
    emit(o, fit_to_json(data, fit).dump(2) + "\n");
  } else {
    std::ostringstream os;
    os.precision(10);
    os << "model: "
       << (model.size() ? join(model_names(data, model), ", ")
                        : "(intercept only)")
       << "\nloglik: " << fit.loglik << "\nconverged: "
       << (fit.converged ? "yes" : "no") << "\ncoefficients:\n";
    for (int c = 0; c <= data.p(); ++c) {
      if (c > 0 && !model.contains(c - 1)) continue;
      os << "  " << std::left << std::setw(14) << data.names()[c]
         << fit.beta[c] << "\n";
    }
    emit(o, os.str());
  }
  return 0;
}

int cmd_mlset(const CommonOpts& o) {
  cmc::Dataset data = load_dataset(o);
  cmc::SearchBudget budget;
  budget.max_size = o.max_size;
  cmc::MLSet set = cmc::ml_set(data, budget);
  print_warnings(set.warnings);
  if (o.format == "json") {
    json rows = json::array();
    for (const auto& e : set.entries) {
      json r = fit_to_json(data, e.fit);
      rows.push_back(r);
    }
    emit(o, json{{"ml_set", rows}}.dump(2) + "\n");
  } else if (o.format == "csv") {
    std::ostringstream os;
    os.precision(12);
    os << "size,model,loglik,converged\n";
    for (const auto& e : set.entries) {
      os << e.model.size() << ',' << join(model_names(data, e.model), " ")
         << ',' << e.fit.loglik << ',' << (e.fit.converged ? 1 : 0) << '\n';
    }
    emit(o, os.str());
  } else {
    std::ostringstream os;
    os.precision(8);
    os << "  size  loglik          model\n";
    for (const auto& e : set.entries) {
      os << "  " << std::left << std::setw(6) << e.model.size()
         << std::setw(16) << e.fit.loglik
         << (e.model.size() ? join(model_names(data, e.model), " ")
                            : "(intercept only)")
         << "\n";
    }
    emit(o, os.str());
  }
  return 0;
}

int cmd_compare(const CommonOpts& o) {
  cmc::Dataset data = load_dataset(o);
  std::vector<std::string> specs = o.criteria;
  if (specs.empty()) {
    specs = {"cmc:gamma=0.5", "cmc:alpha=0.1", "cmc:alpha=0.5",
             "cmc:alpha=0.9", "aic", "bic"};
  }
  std::vector<cmc::CompareMode> modes;
  for (const auto& s : specs) modes.push_back(cmc::parse_mode(s));
  cmc::ComparisonReport report = cmc::compare(data, modes);
  print_warnings(report.set.warnings);

  if (o.format == "json") {
    json rows = json::array();
    for (const auto& [mode, res] : report.rows) {
      json r = selection_to_json(data, res);
      r["label"] = mode.label();
      rows.push_back(r);
    }
    emit(o, json{{"comparison", rows}}.dump(2) + "\n");
  } else if (o.format == "csv") {
    std::ostringstream os;
    os.precision(12);
    os << "label,selected,size,loglik,lambda,score\n";
    for (const auto& [mode, res] : report.rows) {
      const auto& row = res.lambda_by_size[res.selected.size()];
      os << mode.label() << ',' << join(model_names(data, res.selected), " ")
         << ',' << res.selected.size() << ',' << res.fit.loglik << ','
         << row.lambda << ',' << (row.score ? std::to_string(*row.score) : "")
         << '\n';
    }
    emit(o, os.str());
  } else {
    std::ostringstream os;
    os.precision(6);
    os << "  criterion        size  loglik        model\n";
    for (const auto& [mode, res] : report.rows) {
      os << "  " << std::left << std::setw(17) << mode.label() << std::setw(6)
         << res.selected.size() << std::setw(14) << res.fit.loglik
         << (res.selected.size() ? join(model_names(data, res.selected), " ")
                                 : "(intercept only)")
         << "\n";
    }
    emit(o, os.str());
  }
  return 0;
}

int cmd_simulate(const CommonOpts& o, const std::string& config_path,
                 bool seed_given) {
  std::ifstream in(config_path);
  if (!in) throw cmc::IoError("cannot open config file: " + config_path);
  json cfg_json;
  try {
    in >> cfg_json;
  } catch (const json::exception& e) {
    throw cmc::DataError(std::string("invalid simulation config: ") + e.what());
  }
  cmc::SimConfig cfg = cmc::SimConfig::from_json(cfg_json);
  if (seed_given) cfg.seed = o.seed;
  cmc::TrialMetrics metrics = cmc::run_trials(cfg);
  std::string fmt = o.format == "table" ? "csv" : o.format;
  if (o.output.empty()) {
    std::cout << (fmt == "json" ? metrics.to_json().dump(2) + "\n"
                                : metrics.to_csv());
  } else {
    cmc::emit_report(metrics, fmt, o.output);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse model selection via the constrained minimum criterion"};
  app.require_subcommand(1);

  CommonOpts o;
  std::vector<std::string> fit_model;
  std::string sim_config;

  auto* select = app.add_subcommand("select", "run CMC selection");
  add_data_flags(select, o);
  select->add_option("--alpha", o.alpha, "fixed confidence parameter in (0,1)");
  select->add_option("--gamma", o.gamma,
                     "schedule exponent in (0,1); threshold is n^gamma");
  add_output_flags(select, o);

  auto* fit = app.add_subcommand("fit", "fit one submodel (default: full)");
  add_data_flags(fit, o);
  fit->add_option("--model", fit_model, "predictor names to include")
      ->delimiter(',');
  add_output_flags(fit, o);

  auto* mlset = app.add_subcommand("mlset", "per-size maximum likelihood set");
  add_data_flags(mlset, o);
  mlset->add_option("--max-size", o.max_size, "largest model size to search");
  add_output_flags(mlset, o);

  auto* cmp = app.add_subcommand("compare", "compare selection criteria");
  add_data_flags(cmp, o);
  cmp->add_option("--criterion", o.criteria,
                  "criteria (aic, bic, hq, cmc:alpha=A, cmc:gamma=G)")
      ->delimiter(',');
  add_output_flags(cmp, o);

  auto* sim = app.add_subcommand("simulate", "run a Monte-Carlo study");
  sim->add_option("--config", sim_config, "JSON simulation config")->required();
  auto* seed_opt = sim->add_option("--seed", o.seed, "override config seed");
  add_output_flags(sim, o);

  try {
    app.parse(argc, argv);
    if (*select) return cmd_select(o);
    if (*fit) return cmd_fit(o, fit_model);
    if (*mlset) return cmd_mlset(o);
    if (*cmp) return cmd_compare(o);
    if (*sim) return cmd_simulate(o, sim_config, seed_opt->count() > 0);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  } catch (const cmc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
