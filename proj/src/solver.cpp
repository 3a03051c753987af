#include "cyclo/solver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cyclo/error.hpp"
#include "cyclo/sat_solver.hpp"

namespace cyclo {

SolverConfig SolverConfig::from_env() {
  SolverConfig cfg;
  if (const char* path = std::getenv("CYCLO_SOLVER"); path && *path) cfg.external = path;
  if (const char* t = std::getenv("CYCLO_SOLVER_TIMEOUT"); t && *t) {
    char* end = nullptr;
    double v = std::strtod(t, &end);
    if (end != t && v > 0) cfg.external_timeout_seconds = v;
  }
  return cfg;
}

SolverVerdict parse_solver_output(const std::string& text, int var_count) {
  std::istringstream in(text);
  std::string line;
  std::optional<Verdict> status;
  SolverVerdict out;
  out.model.assign(static_cast<std::size_t>(var_count) + 1, 0);
  while (std::getline(in, line)) {
    if (line.rfind("s ", 0) == 0) {
      if (line.find("UNSATISFIABLE") != std::string::npos)
        status = Verdict::Unsat;
      else if (line.find("SATISFIABLE") != std::string::npos)
        status = Verdict::Sat;
      else
        throw Error(ErrorCode::BackendFailure, "solver answered '" + line + "'");
    } else if (line.rfind("v ", 0) == 0) {
      std::istringstream vs(line.substr(2));
      long lit = 0;
      while (vs >> lit) {
        long v = lit < 0 ? -lit : lit;
        if (v > 0 && v <= var_count) out.model[static_cast<std::size_t>(v)] = lit > 0;
      }
    }
  }
  if (!status) throw Error(ErrorCode::BackendFailure, "solver output has no status line");
  out.status = *status;
  if (out.status != Verdict::Sat) out.model.clear();
  return out;
}

namespace {

// Runs `command file`, returns stdout. The command is split on whitespace so
// it may carry fixed arguments. Throws BackendFailure on spawn failure,
// timeout, or abnormal termination.
std::string run_external(const std::string& command, const std::string& file, double timeout) {
  std::vector<std::string> words;
  {
    std::istringstream in(command);
    for (std::string w; in >> w;) words.push_back(w);
  }
  if (words.empty()) throw Error(ErrorCode::BackendFailure, "empty solver command");
  words.push_back(file);
  std::vector<char*> args;
  for (auto& w : words) args.push_back(w.data());
  args.push_back(nullptr);
  const std::string& exe = words.front();
  int pipefd[2];
  if (pipe(pipefd) != 0) throw Error(ErrorCode::BackendFailure, "pipe() failed");
  pid_t pid = fork();
  if (pid < 0) throw Error(ErrorCode::BackendFailure, "fork() failed");
  if (pid == 0) {
    dup2(pipefd[1], STDOUT_FILENO);
    int devnull = open("/dev/null", O_WRONLY);
    if (devnull >= 0) dup2(devnull, STDERR_FILENO);
    close(pipefd[0]);
    close(pipefd[1]);
    execv(exe.c_str(), args.data());
    _exit(127);
  }
  close(pipefd[1]);
  std::string output;
  auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout);
  char buf[4096];
  bool timed_out = false;
  while (true) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline -
                                                                       std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      timed_out = true;
      break;
    }
    pollfd p{pipefd[0], POLLIN, 0};
    int r = poll(&p, 1, static_cast<int>(std::min<long long>(left.count(), 1000)));
    if (r < 0 && errno == EINTR) continue;
    if (r < 0) break;
    if (r == 0) continue;
    ssize_t got = read(pipefd[0], buf, sizeof buf);
    if (got <= 0) break;
    output.append(buf, static_cast<std::size_t>(got));
  }
  close(pipefd[0]);
  if (timed_out) kill(pid, SIGKILL);
  int status = 0;
  waitpid(pid, &status, 0);
  if (timed_out)
    throw Error(ErrorCode::BackendFailure, "external solver exceeded " + std::to_string(timeout) + " s");
  if (!WIFEXITED(status))
    throw Error(ErrorCode::BackendFailure, "external solver terminated abnormally");
  int code = WEXITSTATUS(status);
  if (code == 127) throw Error(ErrorCode::BackendFailure, "cannot execute '" + exe + "'");
  // 10/20 are the conventional SAT/UNSAT exit codes; 0 is accepted too.
  if (code != 0 && code != 10 && code != 20)
    throw Error(ErrorCode::BackendFailure, "external solver exited with code " + std::to_string(code));
  return output;
}

class TempFile {
 public:
  TempFile() {
    const char* dir = std::getenv("TMPDIR");
    path_ = std::string(dir && *dir ? dir : "/tmp") + "/cyclo-XXXXXX.cnf";
    int fd = mkstemps(path_.data(), 4);
    if (fd < 0) throw Error(ErrorCode::BackendFailure, "cannot create temporary CNF file");
    close(fd);
  }
  ~TempFile() { std::remove(path_.c_str()); }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace

struct SolverSession::Impl {
  explicit Impl(std::uint64_t seed) : cdcl(seed) {}
  CdclSolver cdcl;
};

SolverSession::SolverSession(SolverConfig cfg) : cfg_(std::move(cfg)) {
  if (!external()) impl_ = std::make_unique<Impl>(cfg_.seed);
}

SolverSession::~SolverSession() = default;

int SolverSession::new_var() {
  ++vars_;
  if (impl_) impl_->cdcl.new_var();
  return vars_;
}

void SolverSession::add_clause(std::span<const int> lits) {
  if (lits.empty()) throw Error(ErrorCode::InvalidFormula, "empty clause");
  for (int l : lits)
    if (l == 0 || std::abs(l) > vars_)
      throw Error(ErrorCode::InvalidFormula, "literal " + std::to_string(l) + " out of range");
  flat_.insert(flat_.end(), lits.begin(), lits.end());
  flat_.push_back(0);
  ++clause_count_;
  if (impl_) impl_->cdcl.add_clause(lits);
}

void SolverSession::set_deadline(std::optional<std::chrono::steady_clock::time_point> deadline) {
  if (impl_) impl_->cdcl.set_deadline(deadline);
}

SolverVerdict SolverSession::solve(std::span<const int> assumptions) {
  SolverVerdict v;
  if (impl_) {
    auto st = impl_->cdcl.solve(assumptions);
    if (st == SolveStatus::Unknown) {
      v.status = Verdict::Timeout;
      return v;
    }
    v.status = st == SolveStatus::Sat ? Verdict::Sat : Verdict::Unsat;
    if (v.sat()) v.model = impl_->cdcl.model();
  } else {
    TempFile tmp;
    {
      std::ofstream out(tmp.path());
      out << "p cnf " << vars_ << ' ' << clause_count_ + assumptions.size() << '\n';
      for (int l : flat_) out << l << (l == 0 ? '\n' : ' ');
      for (int a : assumptions) out << a << " 0\n";
      if (!out) throw Error(ErrorCode::BackendFailure, "cannot write " + tmp.path());
    }
    v = parse_solver_output(run_external(cfg_.external, tmp.path(), cfg_.external_timeout_seconds),
                            vars_);
  }
  if (!v.sat()) return v;

  // Model re-check: catches solver or integration bugs before they poison a run.
  bool clause_ok = false;
  for (int l : flat_) {
    if (l == 0) {
      if (!clause_ok) throw Error(ErrorCode::BackendFailure, "model violates a clause");
      clause_ok = false;
      continue;
    }
    if (!clause_ok && v.value(l)) clause_ok = true;
  }
  for (int a : assumptions)
    if (!v.value(a)) throw Error(ErrorCode::BackendFailure, "model violates an assumption");
  return v;
}

SolverVerdict solve(const CnfFormula& f, std::span<const int> assumptions, const SolverConfig& cfg) {
  SolverSession s(cfg);
  for (int i = 0; i < f.var_count(); ++i) s.new_var();
  for (const auto& c : f.clauses()) s.add_clause(c);
  return s.solve(assumptions);
}

}  // namespace cyclo
