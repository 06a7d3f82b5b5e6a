#include "lconf/smt.hpp"

#include "lconf/error.hpp"
#include "lconf/theory.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <mutex>
#include <set>
#include <sstream>

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace lconf {

const char* toString(SmtResult r) {
  switch (r) {
    case SmtResult::Sat: return "sat";
    case SmtResult::Unsat: return "unsat";
    case SmtResult::Unknown: return "unknown";
  }
  return "unknown";
}

const char* toString(Validity v) {
  switch (v) {
    case Validity::Valid: return "valid";
    case Validity::NotValid: return "not-valid";
    case Validity::Unknown: return "unknown";
  }
  return "unknown";
}

std::vector<std::string> SolverConfig::effectiveArguments() const {
  if (!arguments.empty()) return arguments;
  std::string base = executable.substr(executable.find_last_of('/') + 1);
  if (base.find("z3") != std::string::npos) return {"-in", "-smt2"};
  if (base.find("cvc") != std::string::npos) return {"--lang=smt2", "-q"};
  return {};
}

namespace {

const std::set<std::string>& reservedWords() {
  static const std::set<std::string> kWords = {
      "and",       "or",      "not",          "=>",     "=",       "distinct", "ite",     "true",
      "false",     "let",     "forall",       "exists", "match",   "par",      "as",      "assert",
      "abs",       "div",     "mod",          "to_real", "to_int", "is_int",   "xor",     "_",
      "!",         "BINARY",  "DECIMAL",      "HEXADECIMAL",       "NUMERAL",  "STRING",  "Int",
      "Real",      "Bool",    "check-sat",    "declare-const",     "declare-fun", "set-logic", "exit"};
  return kWords;
}

bool isSimpleSymbolChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || std::strchr("~!@$%^&*_-+=<>.?/", c) != nullptr;
}

std::string smtName(const Variable& x) {
  const std::string& n = x.name;
  if (reservedWords().count(n)) return "v!" + n;
  bool simple = !n.empty() && !std::isdigit(static_cast<unsigned char>(n.front()));
  for (char c : n) simple = simple && isSimpleSymbolChar(c);
  if (simple) return n;
  return "|" + n + "|";
}

std::string bigint(const BigInt& i, const char* suffix) {
  if (i < 0) return "(- " + BigInt(-i).str() + suffix + ")";
  return i.str() + suffix;
}

void emit(const Term& t, std::ostream& os) {
  if (t.isVariable()) {
    os << smtName(t.variable());
    return;
  }
  const Symbol& f = t.symbol();
  if (f.isValue()) {
    const Value& v = *f.value;
    if (v.isBool()) {
      os << (v.asBool() ? "true" : "false");
    } else if (v.isInt()) {
      os << bigint(v.asInt(), "");
    } else {
      BigInt num = boost::multiprecision::numerator(v.asReal());
      BigInt den = boost::multiprecision::denominator(v.asReal());
      if (den == 1) {
        os << bigint(num, ".0");
      } else if (num < 0) {
        os << "(- (/ " << BigInt(-num).str() << ".0 " << den.str() << ".0))";
      } else {
        os << "(/ " << num.str() << ".0 " << den.str() << ".0)";
      }
    }
    return;
  }
  if (!f.op) {
    throw Error(ErrorKind::MalformedConstraint, "term symbol '" + f.name + "' in a constraint");
  }
  const char* head = "";
  switch (*f.op) {
    case TheoryOp::Not: head = "not"; break;
    case TheoryOp::And: head = "and"; break;
    case TheoryOp::Or: head = "or"; break;
    case TheoryOp::Implies: head = "=>"; break;
    case TheoryOp::Neg: head = "-"; break;
    case TheoryOp::Add: head = "+"; break;
    case TheoryOp::Sub: head = "-"; break;
    case TheoryOp::Mul: head = "*"; break;
    case TheoryOp::Le: head = "<="; break;
    case TheoryOp::Ge: head = ">="; break;
    case TheoryOp::Lt: head = "<"; break;
    case TheoryOp::Gt: head = ">"; break;
    case TheoryOp::Eq: head = "="; break;
  }
  os << '(' << head;
  for (const Term& a : t.args()) {
    os << ' ';
    emit(a, os);
  }
  os << ')';
}

void ignoreSigpipeOnce() {
  static std::once_flag once;
  std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

struct Pipe {
  int fd[2] = {-1, -1};
  Pipe() {
    if (::pipe2(fd, O_CLOEXEC) != 0) {
      throw Error(ErrorKind::SolverFailure, std::string("pipe: ") + std::strerror(errno));
    }
  }
  ~Pipe() { closeAll(); }
  void close(int i) {
    if (fd[i] >= 0) ::close(fd[i]);
    fd[i] = -1;
  }
  void closeAll() {
    close(0);
    close(1);
  }
  Pipe(const Pipe&) = delete;
  Pipe& operator=(const Pipe&) = delete;
};

}  // namespace

std::string toSmtLib(const Term& t) {
  std::ostringstream os;
  emit(t, os);
  return os.str();
}

bool isNonlinear(const Term& t) {
  if (t.isVariable()) return false;
  if (t.symbol().op == TheoryOp::Mul && !t.arg(0).isGround() && !t.arg(1).isGround()) return true;
  for (const Term& a : t.args()) {
    if (isNonlinear(a)) return true;
  }
  return false;
}

std::string serialize(const Term& phi, std::string_view logic) {
  if (phi.sort() != Sort::Bool()) {
    throw Error(ErrorKind::MalformedConstraint, "constraint " + phi.toString() + " is not of sort Bool");
  }
  if (!phi.isLogical()) {
    throw Error(ErrorKind::MalformedConstraint, "constraint " + phi.toString() + " is not a logical term");
  }
  std::ostringstream os;
  os << "(set-logic " << logic << ')';
  for (const Variable& x : varsInOrder(phi)) {
    if (!x.sort.isTheorySort()) {
      throw Error(ErrorKind::MalformedConstraint,
                  "variable " + x.name + " of sort " + x.sort.name + " in a constraint");
    }
    os << "(declare-const " << smtName(x) << ' ' << x.sort.name << ')';
  }
  os << "(assert ";
  emit(phi, os);
  os << ")(check-sat)\n";
  return os.str();
}

Solver::Solver(SolverConfig config, std::stop_token stop) : config_(std::move(config)), stop_(std::move(stop)) {
  if (config_.perQueryTimeout.count() <= 0) {
    throw Error(ErrorKind::InvalidArgument, "solver timeout must be positive");
  }
}

SmtResult Solver::checkSat(const Term& phi) {
  ++stats_.queries;
  if (stop_.stop_requested()) throw Cancelled{};
  if (isTrueLiteral(phi)) return SmtResult::Sat;
  if (isFalseLiteral(phi)) return SmtResult::Unsat;
  if (phi.isGround()) return evalGround(phi).asBool() ? SmtResult::Sat : SmtResult::Unsat;

  std::string logic = config_.logic;
  // A linear logic rejects products of unknowns; widen per query.
  if (isNonlinear(phi)) {
    if (logic == "QF_LIA") logic = "QF_NIA";
    if (logic == "QF_LRA") logic = "QF_NRA";
  }
  std::string script = serialize(phi, logic);
  if (auto it = cache_.find(script); it != cache_.end()) {
    ++stats_.cacheHits;
    return it->second;
  }
  SmtResult r = run(script);
  if (r == SmtResult::Unknown) ++stats_.unknowns;
  cache_.emplace(std::move(script), r);
  return r;
}

Validity Solver::isValid(const Term& phi) {
  switch (checkSat(mkNot(phi))) {
    case SmtResult::Unsat: return Validity::Valid;
    case SmtResult::Sat: return Validity::NotValid;
    case SmtResult::Unknown: return Validity::Unknown;
  }
  return Validity::Unknown;
}

SmtResult Solver::run(const std::string& script) {
  ignoreSigpipeOnce();
  ++stats_.processRuns;
  Pipe in;
  Pipe out;

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in.fd[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out.fd[1], STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out.fd[1], STDERR_FILENO);

  std::vector<std::string> args = config_.effectiveArguments();
  std::vector<char*> argv;
  argv.push_back(const_cast<char*>(config_.executable.c_str()));
  for (std::string& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  pid_t pid = -1;
  int rc = posix_spawnp(&pid, config_.executable.c_str(), &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    throw Error(ErrorKind::SolverFailure,
                "cannot start SMT solver '" + config_.executable + "': " + std::strerror(rc));
  }
  in.close(0);
  out.close(1);

  auto reap = [&](bool kill) {
    if (kill) ::kill(pid, SIGKILL);
    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    return status;
  };

  std::size_t written = 0;
  while (written < script.size()) {
    ssize_t n = ::write(in.fd[1], script.data() + written, script.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      break;  // the solver exited early; its reply (if any) tells why
    }
    written += static_cast<std::size_t>(n);
  }
  in.close(1);

  std::string reply;
  auto deadline = std::chrono::steady_clock::now() + config_.perQueryTimeout;
  char buf[4096];
  bool timedOut = false;
  for (;;) {
    if (stop_.stop_requested()) {
      reap(true);
      throw Cancelled{};
    }
    auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      timedOut = true;
      break;
    }
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
    pollfd pfd{out.fd[0], POLLIN, 0};
    int pr = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(left, 25)));
    if (pr < 0 && errno != EINTR) break;
    if (pr <= 0) continue;
    ssize_t n = ::read(out.fd[0], buf, sizeof buf);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    reply.append(buf, static_cast<std::size_t>(n));
  }
  int status = reap(timedOut);
  if (timedOut) return SmtResult::Unknown;

  std::istringstream is(reply);
  std::string token;
  is >> token;
  if (token == "sat") return SmtResult::Sat;
  if (token == "unsat") return SmtResult::Unsat;
  if (token == "unknown" || token == "timeout") return SmtResult::Unknown;
  if (WIFEXITED(status) && WEXITSTATUS(status) == 127) {
    throw Error(ErrorKind::SolverFailure, "cannot start SMT solver '" + config_.executable + "'");
  }
  std::string firstLine = reply.substr(0, reply.find('\n'));
  throw Error(ErrorKind::SolverFailure,
              "unexpected reply from '" + config_.executable + "': " + (firstLine.empty() ? "<none>" : firstLine));
}

}  // namespace lconf
