#pragma once

#include "bk/cli/report.hpp"
#include "bk/errors.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bk::cli {

class UnknownExample : public Error {
public:
  using Error::Error;
};

struct PaperOptions {
  std::int64_t hpd_n = 10;
  double hpd_tail = 0.05;
};

//! Example ids in their fixed order ("all" excluded).
const std::vector<std::string>& paper_example_ids();

//! Runs one worked example; each example draws from its own substream of the run seed, so a
//! result does not depend on which other examples ran. Throws UnknownExample.
Report run_paper_example(const std::string& id, const RunConfig& config,
                         const PaperOptions& options = {});

//! `id` may be "all".
std::vector<Report> run_paper(const std::string& id, const RunConfig& config,
                              const PaperOptions& options = {});

} // namespace bk::cli
