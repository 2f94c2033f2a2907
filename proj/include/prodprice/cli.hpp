#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace prodprice {

struct RunConfig {
  std::string command;  ///< solve | value | strategy | simulate | oracle | compare
  std::filesystem::path config_path;
  std::filesystem::path out_dir = ".";
  std::vector<std::string> overrides;  ///< section.key=value
  std::optional<double> eps;
  std::optional<double> x0;
  std::optional<double> horizon;
  std::optional<double> dt;
  std::optional<std::size_t> grid_n;
  std::string tail = "auto";  ///< auto | static | relaxed | cyclic
};

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;      ///< config or model-assumption errors
inline constexpr int kExitNumerical = 3;  ///< numerical failures

/// Runs one command, writing artifacts under out_dir and diagnostics to `err`.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv and calls run().
int cli_main(int argc, char** argv);

}  // namespace prodprice
