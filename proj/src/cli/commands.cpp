#include "bk/cli/commands.hpp"

#include "bk/cli/data_io.hpp"
#include "bk/cli/paper_examples.hpp"
#include "bk/conjugate.hpp"
#include "bk/credible.hpp"
#include "bk/hypothesis.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace bk::cli {

namespace {

enum class DataKind { Binomial, Poisson, Normal, Uniform };

std::vector<std::string> hyper_names(ConjugateKind k) {
  switch (k) {
  case ConjugateKind::BetaBinomial:
  case ConjugateKind::ParetoUniform:
    return {"a", "b"};
  case ConjugateKind::GammaPoisson:
    return {"shape", "rate"};
  case ConjugateKind::NormalKnownVar:
    return {"mean", "variance"};
  }
  return {};
}

DataSummary summarize(DataKind k, const std::vector<double>& ys) {
  switch (k) {
  case DataKind::Binomial:
    return summarize_bernoulli(ys);
  case DataKind::Poisson:
    return summarize_counts(ys);
  case DataKind::Normal:
    return summarize_normal(ys);
  case DataKind::Uniform:
    return summarize_uniform(ys);
  }
  throw ConfigError("unknown data kind");
}

json summary_json(const DataSummary& d) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BinomialData>) return {{"n", s.n}, {"y", s.y}};
        if constexpr (std::is_same_v<T, PoissonData>) return {{"n", s.n}, {"total", s.total}};
        if constexpr (std::is_same_v<T, NormalData>) return {{"n", s.n}, {"mean", s.mean()}, {"ss", s.ss}};
        if constexpr (std::is_same_v<T, UniformData>) return {{"n", s.n}, {"max", s.max}};
      },
      d);
}

json interval_json(const CredibleSet& s) {
  json arr = json::array();
  for (const auto& iv : s.intervals) arr.push_back(json::array({iv.lower, iv.upper}));
  return arr;
}

std::string level_tag(double level) {
  std::ostringstream os;
  os << level;
  return os.str();
}

void require_two(const std::vector<double>& prior, const std::string& family) {
  if (prior.size() != 2) throw ConfigError(family + " needs --prior with two hyperparameters");
}

// ---- compare config ----

double param(const json& params, const char* key, const std::string& model) {
  if (!params.contains(key) || !params.at(key).is_number()) {
    throw ConfigError("model '" + model + "': missing numeric parameter '" + key + "'");
  }
  return params.at(key).get<double>();
}

double param_or(const json& params, const char* key, double fallback, const std::string& model) {
  return params.contains(key) ? param(params, key, model) : fallback;
}

DataKind family_kind(const std::string& family) {
  if (family == "beta-binomial" || family == "binomial-point") return DataKind::Binomial;
  if (family == "gamma-poisson" || family == "poisson-point") return DataKind::Poisson;
  if (family == "normal" || family == "normal-point") return DataKind::Normal;
  if (family == "pareto-uniform") return DataKind::Uniform;
  throw ConfigError("unknown model family: " + family);
}

ModelSpec build_model(const json& m, double prior) {
  const std::string name = m.at("name").get<std::string>();
  const std::string family = m.at("family").get<std::string>();
  const json params = m.value("params", json::object());
  if (family == "beta-binomial") {
    return ModelSpec::conjugate(name, ConjugateModel::beta_binomial(param(params, "a", name), param(params, "b", name)), prior);
  }
  if (family == "gamma-poisson") {
    return ModelSpec::conjugate(name, ConjugateModel::gamma_poisson(param(params, "a", name), param(params, "b", name)), prior);
  }
  if (family == "pareto-uniform") {
    return ModelSpec::conjugate(name, ConjugateModel::pareto_uniform(param(params, "a", name), param(params, "b", name)), prior);
  }
  if (family == "normal") {
    return ModelSpec::conjugate(name,
                                ConjugateModel::normal_known_var(param(params, "mu", name), param(params, "tau2", name),
                                                                 param_or(params, "sigma2", 1.0, name)),
                                prior);
  }
  if (family == "binomial-point") return ModelSpec::binomial_point(name, param(params, "theta", name), prior);
  if (family == "poisson-point") return ModelSpec::poisson_point(name, param(params, "rate", name), prior);
  if (family == "normal-point") {
    return ModelSpec::normal_point(name, param(params, "mean", name), prior, param_or(params, "sigma2", 1.0, name));
  }
  throw ConfigError("unknown model family: " + family);
}

std::int64_t count(const json& s, const char* key) {
  if (!s.contains(key) || !s.at(key).is_number_integer()) {
    throw ConfigError(std::string("summary needs integer '") + key + "'");
  }
  return s.at(key).get<std::int64_t>();
}

double real(const json& s, const char* key, std::optional<double> fallback = std::nullopt) {
  if (!s.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(std::string("summary needs '") + key + "'");
  }
  if (!s.at(key).is_number()) throw ConfigError(std::string("summary field '") + key + "' is not a number");
  return s.at(key).get<double>();
}

DataSummary summary_from_json(DataKind k, const json& s) {
  if (!s.is_object()) throw ConfigError("summary must be an object");
  switch (k) {
  case DataKind::Binomial:
    return BinomialData{count(s, "n"), count(s, "y")};
  case DataKind::Poisson:
    return PoissonData{count(s, "n"), count(s, "total")};
  case DataKind::Normal:
    return NormalData::from_mean(count(s, "n"), real(s, "mean"), real(s, "ss", 0.0));
  case DataKind::Uniform:
    return UniformData{count(s, "n"), real(s, "max")};
  }
  throw ConfigError("unknown data kind");
}

void emit(const std::vector<Report>& reports, const RunConfig& config, std::ostream& out) {
  const std::string text = render(reports, config.format);
  if (config.out) {
    std::ofstream f(*config.out, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + *config.out);
    f << text;
  } else {
    out << text;
  }
}

} // namespace

Report cmd_infer(const InferOptions& o, const RunConfig& config, std::vector<std::string>* warnings) {
  auto warn = [&](const std::string& w) {
    if (warnings) warnings->push_back(w);
  };
  for (double l : o.levels) {
    if (!(l > 0.0 && l < 1.0)) throw ConfigError("--level must lie in (0, 1)");
  }
  ConjugateModel prior = ConjugateModel::beta_binomial(1.0, 1.0);
  DataKind kind = DataKind::Binomial;
  if (o.family == "beta-binomial") {
    require_two(o.prior, o.family);
    prior = ConjugateModel::beta_binomial(o.prior[0], o.prior[1]);
  } else if (o.family == "gamma-poisson") {
    require_two(o.prior, o.family);
    prior = ConjugateModel::gamma_poisson(o.prior[0], o.prior[1]);
    kind = DataKind::Poisson;
  } else if (o.family == "normal") {
    if (o.flat) {
      if (!o.prior.empty()) throw ConfigError("--flat and --prior are exclusive");
      prior = ConjugateModel::normal_flat(o.sigma2);
    } else {
      require_two(o.prior, o.family);
      prior = ConjugateModel::normal_known_var(o.prior[0], o.prior[1], o.sigma2);
    }
    kind = DataKind::Normal;
  } else if (o.family == "pareto-uniform") {
    require_two(o.prior, o.family);
    prior = ConjugateModel::pareto_uniform(o.prior[0], o.prior[1]);
    kind = DataKind::Uniform;
  } else {
    throw ConfigError("unknown family: " + o.family);
  }
  if (o.flat && o.family != "normal") throw ConfigError("--flat applies to the normal family only");

  DataSummary data;
  json inputs = {{"family", o.family}};
  if (o.trials || o.successes) {
    if (kind != DataKind::Binomial) throw DataMismatch("--trials/--successes apply to beta-binomial only");
    if (!o.trials || !o.successes) throw ConfigError("--trials and --successes go together");
    if (!o.data_path.empty()) throw ConfigError("give either a data file or --trials/--successes");
    data = BinomialData{*o.trials, *o.successes};
  } else {
    if (o.data_path.empty()) throw ConfigError("--data is required");
    const auto ys = read_observations(o.data_path);
    inputs["data"] = o.data_path;
    if (ys.empty()) warn("data file is empty; the posterior equals the prior");
    data = summarize(kind, ys);
  }
  inputs["prior"] = o.flat ? json("flat") : json(o.prior);
  if (kind == DataKind::Normal) inputs["sigma2"] = o.sigma2;
  inputs["summary"] = summary_json(data);
  inputs["levels"] = o.levels;

  const ConjugateModel post = prior.update(data);
  Report r;
  r.command = "infer " + o.family;
  r.seed = config.seed;
  r.inputs = std::move(inputs);
  const auto names = hyper_names(post.kind());
  const auto h = post.hyperparameters();
  for (std::size_t i = 0; i < h.size(); ++i) r.add("posterior_" + names[i], h[i]);

  std::optional<Distribution> dist;
  try {
    dist = post.distribution();
  } catch (const ImproperPrior&) {
    warn("flat prior without data: the posterior is improper, only hyperparameters are reported");
    return r;
  }
  r.add("posterior", dist->describe());
  try {
    r.add("mean", dist->mean());
  } catch (const MomentUndefined& e) {
    r.add("mean", "undefined", std::string(e.what()));
  }
  r.add("median", dist->median());
  r.add("mode", dist->mode());
  for (double level : o.levels) {
    const auto tag = level_tag(level);
    r.add("hpd_" + tag, interval_json(hpd(*dist, 1.0 - level)));
    r.add("equal_tailed_" + tag, interval_json(equal_tailed(*dist, 1.0 - level)));
  }
  return r;
}

Report cmd_compare(const std::string& config_text, const std::string& data_path, const RunConfig& config) {
  json cfg;
  try {
    cfg = json::parse(config_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid config JSON: ") + e.what());
  }
  if (!cfg.is_object() || !cfg.contains("models") || !cfg.at("models").is_array()) {
    throw ConfigError("config needs a \"models\" array");
  }
  const json& models = cfg.at("models");
  if (models.size() < 2) throw ConfigError("config needs at least two models");

  std::optional<DataKind> kind;
  std::size_t with_prior = 0;
  for (const auto& m : models) {
    if (!m.is_object() || !m.contains("name") || !m.at("name").is_string() || !m.contains("family") ||
        !m.at("family").is_string()) {
      throw ConfigError("each model needs string \"name\" and \"family\"");
    }
    const DataKind k = family_kind(m.at("family").get<std::string>());
    if (kind && *kind != k) throw ConfigError("models must share one data type");
    kind = k;
    if (m.contains("prior_probability")) ++with_prior;
  }
  if (with_prior != 0 && with_prior != models.size()) {
    throw ConfigError("give prior_probability for every model or for none");
  }

  std::vector<ModelSpec> specs;
  try {
    for (const auto& m : models) {
      double p = 1.0 / static_cast<double>(models.size());
      if (with_prior) {
        if (!m.at("prior_probability").is_number()) throw ConfigError("prior_probability must be a number");
        p = m.at("prior_probability").get<double>();
      }
      specs.push_back(build_model(m, p));
    }
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }

  DataSummary data;
  json inputs = json::object();
  if (!data_path.empty()) {
    if (cfg.contains("summary")) throw ConfigError("give either a data file or a config summary");
    data = summarize(*kind, read_observations(data_path));
    inputs["data"] = data_path;
  } else if (cfg.contains("summary")) {
    data = summary_from_json(*kind, cfg.at("summary"));
  } else {
    throw ConfigError("no data: pass --data or put a \"summary\" in the config");
  }
  inputs["summary"] = summary_json(data);
  json model_inputs = json::array();
  for (const auto& m : models) {
    model_inputs.push_back({{"name", m.at("name")}, {"family", m.at("family")}, {"params", m.value("params", json::object())}});
  }
  inputs["models"] = model_inputs;

  ComparisonReport cr;
  try {
    cr = compare(specs, data);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  Report r;
  r.command = "compare";
  r.seed = config.seed;
  r.inputs = std::move(inputs);
  double total = 0.0;
  for (const auto& m : cr.models) {
    r.add("log_marginal[" + m.name + "]", m.log_marginal);
    r.add("prior_probability[" + m.name + "]", m.prior_probability);
    r.add("posterior_probability[" + m.name + "]", m.posterior_probability);
    total += m.posterior_probability;
  }
  r.add("posterior_probability_sum", total);
  for (std::size_t l = 0; l < cr.models.size(); ++l) {
    for (std::size_t k = l + 1; k < cr.models.size(); ++k) {
      const std::string pair = cr.models[l].name + ":" + cr.models[k].name;
      r.add("log10_bayes_factor[" + pair + "]", cr.log10_bayes_factor(l, k));
      r.add("posterior_odds[" + pair + "]", std::exp(cr.log_posterior_odds(l, k)));
      r.add("label[" + pair + "]", std::string(to_string(cr.label(l, k))));
    }
  }
  r.add("best", cr.models[cr.best].name);
  return r;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian inference kernel: worked examples, conjugate inference, model comparison",
               "bayes-kernel"};
  app.require_subcommand(1);

  RunConfig config;
  std::optional<std::uint64_t> seed;
  std::string format = "json";
  std::string out_path;
  bool no_timestamp = false;
  std::vector<std::string> tol;
  app.add_option("--seed", seed, "random seed (falls back to BK_SEED)");
  app.add_option("--reps", config.reps, "Monte Carlo replicates")->check(CLI::PositiveNumber);
  app.add_option("--format", format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--out", out_path, "write the report to this path");
  app.add_flag("--no-timestamp", no_timestamp, "omit the timestamp field");
  app.add_option("--tol", tol, "tolerance override name=value (repeatable)");
  app.set_version_flag("--version", std::string("bayes-kernel ") + kVersion);

  auto* paper = app.add_subcommand("paper", "reproduce a worked example (or 'all')")->fallthrough();
  std::string example;
  PaperOptions popt;
  paper->add_option("example", example, "example id or 'all'")->required();
  paper->add_option("--n", popt.hpd_n, "hpd-beta: number of trials")->check(CLI::NonNegativeNumber);
  paper->add_option("--tail", popt.hpd_tail, "hpd-beta: tail mass")->check(CLI::Range(0.0, 1.0));

  auto* infer = app.add_subcommand("infer", "conjugate posterior summary for a data file")->fallthrough();
  InferOptions iopt;
  std::vector<double> levels;
  std::int64_t trials = -1;
  std::int64_t successes = -1;
  infer->add_option("--family", iopt.family, "beta-binomial, gamma-poisson, normal, pareto-uniform")->required();
  infer->add_option("--prior", iopt.prior, "two hyperparameters")->delimiter(',')->expected(2);
  infer->add_flag("--flat", iopt.flat, "flat prior on the normal mean");
  infer->add_option("--sigma2", iopt.sigma2, "known data variance (normal)")->check(CLI::PositiveNumber);
  infer->add_option("--data", iopt.data_path, "CSV or JSON observations");
  infer->add_option("--trials", trials, "beta-binomial: number of trials");
  infer->add_option("--successes", successes, "beta-binomial: number of successes");
  infer->add_option("--level", levels, "credible level (repeatable)");

  auto* cmp = app.add_subcommand("compare", "posterior model probabilities")->fallthrough();
  std::string config_path;
  std::string data_path;
  cmp->add_option("config", config_path, "model config JSON")->required();
  cmp->add_option("--data", data_path, "CSV or JSON observations");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << "bayes-kernel " << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  try {
    if (seed) {
      config.seed = *seed;
    } else if (const char* env = std::getenv("BK_SEED")) {
      try {
        std::size_t used = 0;
        config.seed = std::stoull(env, &used);
        if (used != std::string(env).size()) throw std::invalid_argument(env);
      } catch (const std::exception&) {
        throw ConfigError(std::string("BK_SEED is not an unsigned integer: ") + env);
      }
    }
    config.format = parse_format(format);
    if (!out_path.empty()) config.out = out_path;
    config.timestamp = !no_timestamp;
    for (const auto& t : tol) {
      const auto eq = t.find('=');
      if (eq == std::string::npos || eq == 0) throw ConfigError("--tol expects name=value: " + t);
      try {
        config.tolerances[t.substr(0, eq)] = std::stod(t.substr(eq + 1));
      } catch (const std::exception&) {
        throw ConfigError("--tol value is not a number: " + t);
      }
    }

    std::vector<Report> reports;
    std::vector<std::string> warnings;
    if (*paper) {
      try {
        reports = run_paper(example, config, popt);
      } catch (const UnknownExample& e) {
        err << "error: " << e.what() << "\nknown examples:";
        for (const auto& id : paper_example_ids()) err << " " << id;
        err << " all\n";
        return kExitUnknownExample;
      }
    } else if (*infer) {
      if (trials >= 0) iopt.trials = trials;
      if (successes >= 0) iopt.successes = successes;
      if (!levels.empty()) iopt.levels = levels;
      reports.push_back(cmd_infer(iopt, config, &warnings));
    } else {
      std::string text;
      try {
        text = read_file(config_path);
      } catch (const ParseError& e) {
        throw ConfigError(e.what());
      }
      reports.push_back(cmd_compare(text, data_path, config));
    }
    for (const auto& w : warnings) err << "warning: " << w << "\n";
    if (config.timestamp) {
      const auto ts = utc_timestamp();
      for (auto& r : reports) r.timestamp = ts;
    }
    emit(reports, config, out);
    bool pass = true;
    for (const auto& r : reports) pass = pass && r.all_pass();
    if (!pass) {
      err << "expectation failures:\n" << diff_table(reports);
      return kExitExpectationFailed;
    }
    return kExitOk;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParseError;
  } catch (const DataMismatch& e) {
    err << "error: " << e.what() << "\n";
    return kExitModelMismatch;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

} // namespace bk::cli
