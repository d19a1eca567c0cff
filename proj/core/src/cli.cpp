#include "qradon/cli.hpp"

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qradon/errors.hpp"
#include "qradon/verify.hpp"

namespace qradon {

namespace {

std::vector<int> parse_index_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    std::size_t used = 0;
    const int v = std::stoi(token, &used);
    if (used != token.size()) throw ParseFailure("bad element index: " + token);
    out.push_back(v);
  }
  if (out.empty()) throw ParseFailure("empty element index list");
  return out;
}

int list_cases() {
  std::cout << std::left << std::setw(18) << "case" << "description\n";
  std::cout << std::string(78, '-') << "\n";
  for (const auto& id : CaseContext::registry())
    std::cout << std::left << std::setw(18) << id << CaseContext::describe(id) << "\n";
  return 0;
}

int usage_error(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return 2;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Numerical verification of integral identities between coset spaces"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list-cases", "List the registered verification cases");

  auto* verify = app.add_subcommand("verify", "Run verification checks on a case");
  std::string case_id;
  std::string check = "all";
  double tol = 1e-6;
  int quad_order = 64;
  std::uint64_t seed = 0;
  int n_testfns = 10;
  std::string report_path;
  std::string group_file;
  std::string subgroup_h;
  std::string subgroup_l;
  std::string rho_choice = "canonical";
  verify->add_option("--case", case_id, "Case id (see list-cases); names the chain when --group-file is used");
  verify->add_option("--check", check, "Check id or 'all'")->capture_default_str();
  verify->add_option("--tol", tol, "Relative tolerance for quadrature-backed checks")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  verify->add_option("--quad-order", quad_order, "Nodes per axis of the tensor quadrature rules")
      ->check(CLI::Range(2, 1024))
      ->capture_default_str();
  verify->add_option("--seed", seed, "Seed of the random test-function battery")->capture_default_str();
  verify->add_option("--n-testfns", n_testfns, "Random test functions per battery")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  verify->add_option("--report", report_path, "Write the JSON report to this path");
  verify->add_option("--group-file", group_file,
                     "Multiplication-table file defining a custom finite group "
                     "(first line n, then n rows of n 0-based indices)");
  verify->add_option("--subgroup-h", subgroup_h,
                     "Comma-separated element indices of the custom subgroup H");
  verify->add_option("--subgroup-l", subgroup_l,
                     "Comma-separated element indices of the custom subgroup L");
  verify->add_option("--rho", rho_choice, "Debug override of the weight function")
      ->check(CLI::IsMember({"canonical", "one"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (list->parsed()) return list_cases();

  CheckOptions opts;
  opts.tol = tol;
  opts.seed = seed;
  opts.n_testfns = n_testfns;
  opts.rho = rho_choice == "one" ? RhoChoice::one : RhoChoice::canonical;

  std::unique_ptr<CaseContext> ctx;
  try {
    if (!group_file.empty()) {
      if (subgroup_h.empty() || subgroup_l.empty())
        return usage_error("--group-file requires --subgroup-h and --subgroup-l");
      const std::string id = case_id.empty() ? "custom" : case_id;
      auto big = FiniteGroup::from_file(group_file, id);
      auto chain = std::make_shared<FiniteChain>(id, big, parse_index_list(subgroup_h),
                                                 parse_index_list(subgroup_l));
      ctx = std::make_unique<CaseContext>(chain, quad_order);
    } else {
      if (case_id.empty()) return usage_error("--case is required");
      ctx = std::make_unique<CaseContext>(case_id, quad_order);
    }
  } catch (const Error& e) {
    return usage_error(e.what());
  } catch (const std::invalid_argument&) {
    return usage_error("bad element index list");
  }

  VerificationReport report;
  if (check == "all") {
    report = run_suite(*ctx, opts);
  } else {
    report.seed = opts.seed;
    report.quad_order = ctx->quad_order();
    CheckResult result;
    try {
      result = run_check(*ctx, check, opts);
    } catch (const UnknownCheck& e) {
      return usage_error(e.what());
    } catch (const HypothesisViolated& e) {
      result = skip_result(*ctx, check, opts, e.what());
    }
    report.all_pass = result.pass;
    report.results.push_back(std::move(result));
  }

  std::cout << render_table(report);
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) return usage_error("cannot open report path: " + report_path);
    out << report_to_json(report).dump(2) << "\n";
  }
  return report.all_pass ? 0 : 1;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.push_back("qradon");
  for (const auto& a : args) storage.push_back(a);
  std::vector<char*> argv;
  argv.reserve(storage.size());
  for (auto& s : storage) argv.push_back(s.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace qradon
