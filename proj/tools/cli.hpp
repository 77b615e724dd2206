#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "polarcone/stress.hpp"

namespace polarcone::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kSolverFailed = 2,
  kInputError = 3,
};

struct RunConfig {
  std::string command;
  std::string input;
  std::string output = "-";
  std::string result;
  std::string csv;
  std::uint64_t seed = 7;
  SolverOptions solver;
  bool no_identity_row = false;

  // simulate
  double t_max = 1.0;
  int steps = 10;
  std::vector<double> times;

  // certify, gen-instance --sticky
  std::optional<double> time;

  // gauge
  std::size_t count = 20;
  bool fast = false;
  std::string v_path;

  // gen-instance
  std::string sticky;
  std::size_t cells = 32;
};

std::string version_string();

/// Executes one command. Payload goes to `out` when the output path is "-";
/// diagnostics are written to `err` as single key=value lines.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv into a config and runs it.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace polarcone::cli
