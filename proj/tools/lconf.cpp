#include "lconf/lconf.h"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kTimeout = 1, kInputError = 2, kSolverFailure = 3 };

struct Options {
  std::string input;
  double timeout = 5;
  long long steps = 5;
  long long joinSteps = 100;
  bool assumeTerminating = false;
  std::string criteria;
  std::string solver;
  bool sequential = false;
  bool noPsi = false;
  std::string bench;
  std::string format = "text";
};

struct OptionsHandle {
  lconf_options* p = lconf_options_new();
  ~OptionsHandle() { lconf_options_free(p); }
};

struct SystemHandle {
  lconf_system* p = nullptr;
  ~SystemHandle() { lconf_system_free(p); }
};

struct ResultHandle {
  lconf_result* p = nullptr;
  ~ResultHandle() { lconf_result_free(p); }
};

std::string take(char* s) {
  std::string out = s ? s : "";
  lconf_string_free(s);
  return out;
}

int exitFor(lconf_status s) {
  if (s == LCONF_ERR_SOLVER) return kSolverFailure;
  return kInputError;
}

bool configure(const Options& o, lconf_options* opts) {
  auto ok = [](lconf_status s) {
    if (s != LCONF_OK) std::cerr << "lconf: " << lconf_last_error() << "\n";
    return s == LCONF_OK;
  };
  long long ms = static_cast<long long>(o.timeout * 1000.0);
  if (ms <= 0) ms = 1;
  if (!ok(lconf_options_set_timeout_ms(opts, ms))) return false;
  if (!ok(lconf_options_set_step_bound(opts, o.steps))) return false;
  if (!ok(lconf_options_set_join_bound(opts, o.joinSteps))) return false;
  if (!ok(lconf_options_set_assume_terminating(opts, o.assumeTerminating))) return false;
  if (!o.criteria.empty() && !ok(lconf_options_set_criteria(opts, o.criteria.c_str()))) return false;
  if (!o.solver.empty() && !ok(lconf_options_set_solver(opts, o.solver.c_str()))) return false;
  if (!ok(lconf_options_set_sequential(opts, o.sequential))) return false;
  return ok(lconf_options_set_psi(opts, !o.noPsi));
}

int runOne(const Options& o, lconf_options* opts) {
  SystemHandle sys;
  lconf_status s = lconf_system_load_file(o.input.c_str(), &sys.p);
  if (s != LCONF_OK) {
    std::cerr << o.input << ": " << lconf_last_error() << "\n";
    return exitFor(s);
  }
  char* report = nullptr;
  int hasErrors = 0;
  s = lconf_system_validate(sys.p, nullptr, &report, &hasErrors);
  if (s != LCONF_OK) {
    std::cerr << o.input << ": " << lconf_last_error() << "\n";
    return exitFor(s);
  }
  std::string diags = take(report);
  if (!diags.empty()) std::cerr << diags;
  if (hasErrors) return kInputError;

  ResultHandle res;
  s = lconf_analyze(sys.p, opts, &res.p);
  if (s != LCONF_OK) {
    std::cerr << o.input << ": " << lconf_last_error() << "\n";
    return exitFor(s);
  }
  char* text = nullptr;
  lconf_result_report(res.p, o.format == "kv" ? LCONF_FORMAT_KV : LCONF_FORMAT_TEXT, &text);
  std::cout << take(text);
  return lconf_result_verdict(res.p) == LCONF_TIMEOUT ? kTimeout : kOk;
}

int runBench(const Options& o, lconf_options* opts) {
  std::error_code ec;
  if (!fs::is_directory(o.bench, ec)) {
    std::cerr << "lconf: not a directory: " << o.bench << "\n";
    return kInputError;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(o.bench)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::map<std::string, int> verdicts;
  std::map<std::string, int> methods;
  double total = 0;
  bool kv = o.format == "kv";
  for (const fs::path& file : files) {
    std::string name = file.filename().string();
    std::string verdict;
    std::string method;
    std::string error;
    auto start = std::chrono::steady_clock::now();
    SystemHandle sys;
    ResultHandle res;
    lconf_status s = lconf_system_load_file(file.c_str(), &sys.p);
    if (s == LCONF_OK) s = lconf_analyze(sys.p, opts, &res.p);
    if (s != LCONF_OK) {
      verdict = "ERROR";
      error = lconf_last_error();
    } else {
      verdict = lconf_result_verdict_name(res.p);
      method = lconf_result_method(res.p);
    }
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    total += ms;
    ++verdicts[verdict];
    if (!method.empty()) ++methods[method];
    if (kv) {
      std::cout << "file=" << name << " verdict=" << verdict;
      if (!method.empty()) std::cout << " method=" << method;
      std::cout << " time_ms=" << std::fixed << std::setprecision(2) << ms;
      if (!error.empty()) std::cout << " error=" << error;
      std::cout << "\n";
    } else {
      std::cout << std::left << std::setw(28) << name << std::setw(9) << verdict << std::setw(26)
                << (method.empty() ? "-" : method) << std::right << std::fixed << std::setprecision(2)
                << std::setw(10) << ms << " ms";
      if (!error.empty()) std::cout << "  " << error;
      std::cout << "\n";
    }
  }
  if (kv) {
    std::cout << "files=" << files.size() << "\n";
    for (const auto& [v, n] : verdicts) std::cout << "verdict." << v << "=" << n << "\n";
    for (const auto& [m, n] : methods) std::cout << "method." << m << "=" << n << "\n";
    std::cout << "total_ms=" << std::fixed << std::setprecision(2) << total << "\n";
  } else {
    std::cout << "files: " << files.size() << "\n";
    for (const auto& [v, n] : verdicts) std::cout << "  " << v << ": " << n << "\n";
    for (const auto& [m, n] : methods) std::cout << "  " << m << ": " << n << "\n";
    std::cout << "total: " << std::fixed << std::setprecision(2) << total << " ms\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Confluence analysis for logically constrained rewrite systems"};
  app.add_option("input", o.input, "System file");
  app.add_option("--timeout", o.timeout, "Global timeout in seconds")->check(CLI::PositiveNumber);
  app.add_option("--steps", o.steps, "Step bound for closing searches")->check(CLI::PositiveNumber);
  app.add_option("--join-steps", o.joinSteps, "Step bound for joining sequences")->check(CLI::PositiveNumber);
  app.add_flag("--assume-terminating", o.assumeTerminating, "Also try joinability of all critical pairs");
  app.add_option("--criteria", o.criteria, "Comma-separated subset of o,wo,sc,pc,apc,j");
  app.add_option("--solver", o.solver, "SMT solver executable");
  app.add_flag("--sequential", o.sequential, "Try criteria one after another in fixed order");
  app.add_flag("--no-psi", o.noPsi, "Drop the extra-variable equations from critical pairs");
  app.add_option("--bench", o.bench, "Analyze every file in a directory");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "kv"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }
  if (o.input.empty() == o.bench.empty()) {
    std::cerr << "lconf: give either an input file or --bench DIR\n" << app.help();
    return kInputError;
  }
  OptionsHandle opts;
  if (!opts.p || !configure(o, opts.p)) return kInputError;
  return o.bench.empty() ? runOne(o, opts.p) : runBench(o, opts.p);
}
