#include "lconf/lconf.h"

#include "lconf/confluence.hpp"
#include "lconf/error.hpp"
#include "lconf/frontend.hpp"

#include <cstring>
#include <memory>
#include <new>
#include <sstream>
#include <string>

using namespace lconf;

struct lconf_system {
  std::shared_ptr<const Lctrs> sys;
  std::string solver;
};

struct lconf_options {
  AnalysisConfig config;
  std::optional<std::string> solver;
};

struct lconf_result {
  std::shared_ptr<const Lctrs> sys;
  SolverConfig solver;
  Verdict verdict;
  std::vector<std::string> cps;
};

namespace {

thread_local std::string lastError;

lconf_status fail(lconf_status s, std::string message) {
  lastError = std::move(message);
  return s;
}

lconf_status statusOf(ErrorKind k) {
  switch (k) {
    case ErrorKind::Io: return LCONF_ERR_IO;
    case ErrorKind::Syntax:
    case ErrorKind::MalformedLiteral: return LCONF_ERR_SYNTAX;
    case ErrorKind::SortConflict:
    case ErrorKind::SortMismatch:
    case ErrorKind::ArityMismatch: return LCONF_ERR_SORT;
    case ErrorKind::SolverFailure: return LCONF_ERR_SOLVER;
    case ErrorKind::InvalidArgument: return LCONF_ERR_INVALID_ARGUMENT;
    default: return LCONF_ERR_INVALID_SYSTEM;
  }
}

template <typename F>
lconf_status guarded(F&& f) {
  try {
    f();
    return LCONF_OK;
  } catch (const Error& e) {
    return fail(statusOf(e.kind()), std::string(toString(e.kind())) + ": " + e.what());
  } catch (const std::bad_alloc&) {
    return fail(LCONF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(LCONF_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(LCONF_ERR_INTERNAL, "unknown failure");
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

lconf_status loadWith(lconf_system** out, const std::function<Lctrs()>& load) {
  if (!out) return fail(LCONF_ERR_INVALID_ARGUMENT, "out is NULL");
  *out = nullptr;
  return guarded([&] {
    auto sys = std::make_shared<const Lctrs>(load());
    auto* h = new lconf_system{sys, sys->solver.value_or("")};
    *out = h;
  });
}

SolverConfig solverFor(const lconf_system* sys, const lconf_options* opts) {
  SolverConfig c = opts ? opts->config.solver : SolverConfig{};
  if (opts && opts->solver) {
    c.executable = *opts->solver;
  } else if (!sys->solver.empty()) {
    c.executable = sys->solver;
  }
  return c;
}

}  // namespace

extern "C" {

const char* lconf_last_error(void) { return lastError.c_str(); }

const char* lconf_status_name(lconf_status status) {
  switch (status) {
    case LCONF_OK: return "ok";
    case LCONF_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case LCONF_ERR_IO: return "io-error";
    case LCONF_ERR_SYNTAX: return "syntax-error";
    case LCONF_ERR_SORT: return "sort-error";
    case LCONF_ERR_INVALID_SYSTEM: return "invalid-system";
    case LCONF_ERR_SOLVER: return "solver-failure";
    case LCONF_ERR_INTERNAL: return "internal-error";
  }
  return "unknown";
}

const char* lconf_version(void) { return "0.1.0"; }

void lconf_string_free(char* s) { std::free(s); }

lconf_status lconf_system_load_file(const char* path, lconf_system** out) {
  if (!path) return fail(LCONF_ERR_INVALID_ARGUMENT, "path is NULL");
  return loadWith(out, [&] { return loadSystemFile(path); });
}

lconf_status lconf_system_load_string(const char* text, lconf_system** out) {
  if (!text) return fail(LCONF_ERR_INVALID_ARGUMENT, "text is NULL");
  return loadWith(out, [&] { return loadSystem(text); });
}

void lconf_system_free(lconf_system* sys) { delete sys; }

size_t lconf_system_rule_count(const lconf_system* sys) { return sys ? sys->sys->rules.size() : 0; }

const char* lconf_system_solver(const lconf_system* sys) { return sys ? sys->solver.c_str() : ""; }

lconf_status lconf_system_print(const lconf_system* sys, char** out) {
  if (!sys || !out) return fail(LCONF_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] { *out = dup(print(*sys->sys)); });
}

lconf_status lconf_system_validate(const lconf_system* sys, const char* solver, char** report, int* has_errors) {
  if (!sys || !report || !has_errors) return fail(LCONF_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    std::optional<Solver> smt;
    if (solver) {
      SolverConfig c;
      c.executable = solver;
      c.logic = sys->sys->theory.logic;
      smt.emplace(c);
    }
    auto diags = validate(*sys->sys, smt ? &*smt : nullptr);
    std::ostringstream os;
    for (const Diagnostic& d : diags) os << d.toString() << "\n";
    *report = dup(os.str());
    *has_errors = hasErrors(diags) ? 1 : 0;
  });
}

lconf_options* lconf_options_new(void) { return new (std::nothrow) lconf_options{}; }

void lconf_options_free(lconf_options* opts) { delete opts; }

lconf_status lconf_options_set_timeout_ms(lconf_options* opts, long long ms) {
  if (!opts || ms <= 0) return fail(LCONF_ERR_INVALID_ARGUMENT, "timeout must be positive");
  opts->config.timeout = std::chrono::milliseconds(ms);
  return LCONF_OK;
}

lconf_status lconf_options_set_step_bound(lconf_options* opts, long long n) {
  if (!opts || n <= 0) return fail(LCONF_ERR_INVALID_ARGUMENT, "step bound must be positive");
  opts->config.check.stepBound = static_cast<std::size_t>(n);
  return LCONF_OK;
}

lconf_status lconf_options_set_join_bound(lconf_options* opts, long long n) {
  if (!opts || n <= 0) return fail(LCONF_ERR_INVALID_ARGUMENT, "join bound must be positive");
  opts->config.check.joinBound = static_cast<std::size_t>(n);
  return LCONF_OK;
}

lconf_status lconf_options_set_assume_terminating(lconf_options* opts, int on) {
  if (!opts) return fail(LCONF_ERR_INVALID_ARGUMENT, "opts is NULL");
  opts->config.assumeTerminating = on != 0;
  return LCONF_OK;
}

lconf_status lconf_options_set_criteria(lconf_options* opts, const char* keys) {
  if (!opts || !keys) return fail(LCONF_ERR_INVALID_ARGUMENT, "NULL argument");
  std::vector<Method> methods;
  std::stringstream ss(keys);
  std::string key;
  while (std::getline(ss, key, ',')) {
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    if (key.empty()) continue;
    auto m = methodFromKey(key);
    if (!m) return fail(LCONF_ERR_INVALID_ARGUMENT, "unknown criterion '" + key + "' (expected o, wo, sc, pc, apc, j)");
    methods.push_back(*m);
  }
  if (methods.empty()) return fail(LCONF_ERR_INVALID_ARGUMENT, "no criterion selected");
  opts->config.criteria = methods;
  return LCONF_OK;
}

lconf_status lconf_options_set_solver(lconf_options* opts, const char* path) {
  if (!opts || !path || !*path) return fail(LCONF_ERR_INVALID_ARGUMENT, "solver path is empty");
  opts->solver = path;
  return LCONF_OK;
}

lconf_status lconf_options_set_sequential(lconf_options* opts, int on) {
  if (!opts) return fail(LCONF_ERR_INVALID_ARGUMENT, "opts is NULL");
  opts->config.sequential = on != 0;
  return LCONF_OK;
}

lconf_status lconf_options_set_psi(lconf_options* opts, int on) {
  if (!opts) return fail(LCONF_ERR_INVALID_ARGUMENT, "opts is NULL");
  opts->config.withPsi = on != 0;
  return LCONF_OK;
}

lconf_status lconf_analyze(const lconf_system* sys, const lconf_options* opts, lconf_result** out) {
  if (!sys || !out) return fail(LCONF_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = nullptr;
  return guarded([&] {
    auto diags = validate(*sys->sys);
    if (hasErrors(diags)) {
      std::string msg;
      for (const Diagnostic& d : diags) {
        if (d.severity == Diagnostic::Severity::Error) msg += (msg.empty() ? "" : "; ") + d.toString();
      }
      throw Error(ErrorKind::MalformedConstraint, msg);
    }
    AnalysisConfig config = opts ? opts->config : AnalysisConfig{};
    config.solver = solverFor(sys, opts);
    auto res = std::make_unique<lconf_result>();
    res->sys = sys->sys;
    res->solver = config.solver;
    res->solver.logic = sys->sys->theory.logic;
    res->verdict = analyze(*sys->sys, config);
    for (const CriticalPair& cp : res->verdict.cps) res->cps.push_back(cp.equation.toString());
    *out = res.release();
  });
}

void lconf_result_free(lconf_result* res) { delete res; }

lconf_verdict lconf_result_verdict(const lconf_result* res) {
  if (!res) return LCONF_MAYBE;
  switch (res->verdict.outcome) {
    case Outcome::Yes: return LCONF_YES;
    case Outcome::Maybe: return LCONF_MAYBE;
    case Outcome::Timeout: return LCONF_TIMEOUT;
  }
  return LCONF_MAYBE;
}

const char* lconf_result_verdict_name(const lconf_result* res) {
  return res ? toString(res->verdict.outcome) : "";
}

const char* lconf_result_method(const lconf_result* res) {
  return res && res->verdict.method ? methodName(*res->verdict.method) : "";
}

const char* lconf_result_method_key(const lconf_result* res) {
  return res && res->verdict.method ? methodKey(*res->verdict.method) : "";
}

size_t lconf_result_cp_count(const lconf_result* res) { return res ? res->cps.size() : 0; }

const char* lconf_result_cp(const lconf_result* res, size_t i) {
  return res && i < res->cps.size() ? res->cps[i].c_str() : nullptr;
}

size_t lconf_result_reason_count(const lconf_result* res) { return res ? res->verdict.reasons.size() : 0; }

const char* lconf_result_reason(const lconf_result* res, size_t i) {
  return res && i < res->verdict.reasons.size() ? res->verdict.reasons[i].c_str() : nullptr;
}

double lconf_result_elapsed_ms(const lconf_result* res) { return res ? res->verdict.elapsedMs : 0.0; }

lconf_status lconf_result_report(const lconf_result* res, lconf_format format, char** out) {
  if (!res || !out) return fail(LCONF_ERR_INVALID_ARGUMENT, "NULL argument");
  if (format != LCONF_FORMAT_TEXT && format != LCONF_FORMAT_KV) return fail(LCONF_ERR_INVALID_ARGUMENT, "unknown format");
  return guarded([&] { *out = dup(format == LCONF_FORMAT_TEXT ? formatText(res->verdict) : formatKv(res->verdict)); });
}

lconf_status lconf_result_replay(const lconf_result* res, int* ok, char** problems) {
  if (!res || !ok) return fail(LCONF_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    Solver solver(res->solver);
    auto found = replayProof(*res->sys, res->verdict.cps, res->verdict.proof, solver);
    *ok = found.empty() ? 1 : 0;
    if (problems) {
      std::string text;
      for (const std::string& p : found) text += p + "\n";
      *problems = dup(text);
    }
  });
}

}  // extern "C"
