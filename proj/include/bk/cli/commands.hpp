#pragma once

#include "bk/cli/report.hpp"
#include "bk/errors.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace bk::cli {

//! Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitExpectationFailed = 1,
  kExitUnknownExample = 2,
  kExitParseError = 3,
  kExitModelMismatch = 4,
  kExitConfigError = 5,
};

//! Invalid comparison config or command-line arguments.
class ConfigError : public Error {
public:
  using Error::Error;
};

struct InferOptions {
  std::string family;
  std::vector<double> prior; //!< two hyperparameters; family defaults when empty
  bool flat = false;         //!< flat prior on the normal mean
  double sigma2 = 1.0;
  std::string data_path;
  std::optional<std::int64_t> trials;
  std::optional<std::int64_t> successes;
  std::vector<double> levels = {0.95};
};

//! Posterior summary for user data. Throws ParseError, DataMismatch, ConfigError.
Report cmd_infer(const InferOptions& options, const RunConfig& config,
                 std::vector<std::string>* warnings = nullptr);

//! Model comparison from a JSON config:
//!   {"models": [{"name", "family", "params": {...}, "prior_probability"}, ...],
//!    "summary": {...}}  (optional when a data file is given)
//! Families: beta-binomial {a, b}, binomial-point {theta}, gamma-poisson {a, b},
//! poisson-point {rate}, normal {mu, tau2, sigma2}, normal-point {mean, sigma2},
//! pareto-uniform {a, b}. Summaries: {"n", "y"}, {"n", "total"}, {"n", "mean", "ss"},
//! {"n", "max"} by family. Throws ConfigError, ParseError, DataMismatch.
Report cmd_compare(const std::string& config_text, const std::string& data_path,
                   const RunConfig& config);

//! Full front end: argv without the program name. Writes the report to `out` (or --out) and
//! diagnostics to `err`; returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace bk::cli
