#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "commands.hpp"

using sdpack::cli::Config;
using sdpack::cli::Format;
using sdpack::cli::Outcome;

int main(int argc, char** argv) {
  CLI::App app{"Semidefinite packing problems: certificates, reduction, low-rank solves and design"};
  app.require_subcommand(1);

  Config cfg;
  try {
    cfg.opts = sdpack::default_options();
  } catch (const sdpack::Error& e) {
    std::cerr << e.what() << "\n";
    return sdpack::cli::kInput;
  }
  std::string route = "auto";
  std::string report = "json";
  std::string output;
  int jobs = 1;
  std::vector<std::string> inputs;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--report", report, "Report format")
        ->check(CLI::IsMember({"json", "text"}));
    sub->add_option("-o,--output", output, "Write the report here instead of stdout");
  };
  auto solver = [&](CLI::App* sub) {
    sub->add_option("--tol", cfg.opts.tol, "Duality-gap target (default 1e-8 or SDPACK_TOL)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--max-iter", cfg.opts.max_iter, "Interior-point iteration limit")->check(CLI::PositiveNumber);
    sub->add_option("--route", route, "Solve route")->check(CLI::IsMember({"auto", "socp", "eps-path", "bm"}));
  };
  auto batchable = [&](CLI::App* sub) {
    sub->add_option("inputs", inputs, "Problem files")->required()->check(CLI::ExistingFile);
    sub->add_option("-j,--jobs", jobs, "Files processed concurrently")->check(CLI::PositiveNumber);
  };

  std::map<std::string, CLI::App*> subs;
  subs["analyze"] = app.add_subcommand("analyze", "Feasibility and boundedness certificates, rank bounds");
  subs["reduce"] = app.add_subcommand("reduce", "Restrict to the strictly feasible face; emit problem and lift");
  subs["solve"] = app.add_subcommand("solve", "Low-rank solve of a packing, design or combined problem");
  subs["design"] = app.add_subcommand("design", "Optimal experimental design and recovered weights");
  subs["gap-bound"] = app.add_subcommand("gap-bound", "Rank-one gap factor and rank bound");
  CLI::App* verify = app.add_subcommand("verify", "KKT residuals of a candidate solution");

  for (auto& [name, sub] : subs) {
    common(sub);
    batchable(sub);
  }
  for (const char* name : {"solve", "design", "gap-bound"}) solver(subs[name]);
  subs["solve"]->add_flag("--oracle", cfg.oracle, "Also run the dense solver and report the difference");
  subs["gap-bound"]->add_flag("--value", cfg.with_value, "Solve for the optimum and the rank-one lower bound");

  std::string problem_path, solution_path;
  common(verify);
  verify->add_option("problem", problem_path, "Problem file")->required()->check(CLI::ExistingFile);
  verify->add_option("solution", solution_path, "Solution file")->required()->check(CLI::ExistingFile);
  verify->add_option("--tol", cfg.opts.tol, "Relative KKT tolerance (default 1e-6)")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return sdpack::cli::kInput;
  }

  Outcome out;
  try {
    cfg.opts.route = sdpack::parse_route(route);
    cfg.tol_given = verify->count("--tol") > 0;
    cfg.opts.validate();
  } catch (const sdpack::Error& e) {
    std::cerr << e.what() << "\n";
    return sdpack::cli::kInput;
  }

  if (verify->parsed()) {
    out = sdpack::cli::verify(problem_path, solution_path, cfg);
  } else {
    for (auto& [name, sub] : subs) {
      if (!sub->parsed()) continue;
      auto run = [&, cmd = name](const std::string& path) {
        if (cmd == "analyze") return sdpack::cli::analyze(path, cfg);
        if (cmd == "reduce") return sdpack::cli::reduce(path, cfg);
        if (cmd == "solve") return sdpack::cli::solve(path, cfg);
        if (cmd == "design") return sdpack::cli::design(path, cfg);
        return sdpack::cli::gap_bound(path, cfg);
      };
      out = sdpack::cli::batch(inputs, jobs, run);
    }
  }

  const std::string text = sdpack::cli::render(out.report, report == "text" ? Format::Text : Format::Json);
  if (output.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(output);
    if (!f) {
      std::cerr << "cannot write " << output << "\n";
      return sdpack::cli::kInput;
    }
    f << text;
  }
  return out.code;
}
