#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "prodprice/problem.hpp"

namespace prodprice {

/// Oracle grid settings read from the [oracle] section.
struct OracleSettings {
  double x_max = 0.5;
  std::size_t nx = 512;
  double dt = 0.002;
  double tol = 1e-10;
  std::size_t max_sweeps = 100000;
};

/// Demand and cost coefficients when the config is the linear-demand, cubic-cost,
/// unbounded-production family with closed-form references.
struct ClosedFormFamily {
  double a;
  double b;
  double k;
};

struct ProblemConfig {
  ProblemSpec spec;
  OracleSettings oracle;
  std::optional<ClosedFormFamily> closed_form;
};

/// Parses `key = value` lines under [problem], [revenue], [cost], [sets] and
/// [oracle]. `overrides` are `section.key=value` strings applied on top.
/// Unknown sections or keys, missing required keys and malformed numbers throw
/// ConfigError.
ProblemConfig parse_config(std::istream& in, const std::vector<std::string>& overrides = {});
ProblemConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// One-paragraph description of the schema for error messages.
const char* config_schema();

}  // namespace prodprice
