#pragma once

// Subcommand bodies of the sdpack tool, kept out of main() so tests can run
// them in-process.

#include <string>
#include <vector>

#include "json.hpp"
#include "sdpack/error.hpp"
#include "sdpack/solve.hpp"

namespace sdpack::cli {

using json = nlohmann::json;

enum ExitCode : int { kOk = 0, kInput = 2, kUnbounded = 3, kInfeasible = 4, kNumerical = 5 };

enum class Format { Json, Text };

struct Config {
  SolveOptions opts;  // main() seeds this from default_options()
  bool oracle = false;       // solve: also run the dense solver and diff
  bool with_value = false;   // gap-bound: solve for the optimum as well
  bool tol_given = false;    // verify: --tol replaces the 1e-6 default
};

struct Outcome {
  int code = kOk;
  json report;
};

int exit_code(ErrorCode code);

Outcome analyze(const std::string& path, const Config& cfg);
Outcome reduce(const std::string& path, const Config& cfg);
Outcome solve(const std::string& path, const Config& cfg);
Outcome design(const std::string& path, const Config& cfg);
Outcome verify(const std::string& problem_path, const std::string& solution_path, const Config& cfg);
Outcome gap_bound(const std::string& path, const Config& cfg);

// Runs one command per input, up to `jobs` at a time. A single input gives
// its report unchanged; several give an array of {file, exit_code, report}
// and the largest exit code.
template <class F>
Outcome batch(const std::vector<std::string>& paths, int jobs, F&& one);

std::string render(const json& report, Format format);

}  // namespace sdpack::cli

#include "batch_impl.hpp"
