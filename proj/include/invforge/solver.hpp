#ifndef INVFORGE_SOLVER_HPP
#define INVFORGE_SOLVER_HPP

// External SMT solver driver.  Each Solver owns one subprocess, spoken to
// incrementally over stdin/stdout ((reset) between scripts); a shared
// verdict cache memoizes answers by script text; a wall-clock backstop
// kills and respawns a solver that outlives its budget.
//
// Protocol errors — a binary that cannot be launched, exits without
// answering, or prints something other than sat/unsat/unknown — surface as
// SolverError, never as a verdict.

#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>

#include <invforge/error.hpp>

namespace invforge {

enum class VerdictKind { Valid, Invalid, Unknown };

struct Verdict {
  VerdictKind kind = VerdictKind::Unknown;
  std::string detail;  // "timeout" | "incompleteness" for Unknown
};

inline const char* verdict_name(VerdictKind k) {
  switch (k) {
    case VerdictKind::Valid: return "valid";
    case VerdictKind::Invalid: return "invalid";
    default: return "unknown";
  }
}

// Thread-safe script → verdict memo.
class VerdictCache {
 public:
  bool lookup(const std::string& script, Verdict* out) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = map_.find(script);
    if (it == map_.end()) return false;
    *out = it->second;
    return true;
  }
  void store(const std::string& script, const Verdict& v) {
    std::lock_guard<std::mutex> lock(mu_);
    map_.emplace(script, v);
  }
  size_t size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return map_.size();
  }

 private:
  mutable std::mutex mu_;
  std::unordered_map<std::string, Verdict> map_;
};

namespace detail {

inline void ignore_sigpipe_once() {
  static std::once_flag flag;
  std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

}  // namespace detail

class SolverProcess {
 public:
  SolverProcess(std::string path, std::chrono::milliseconds budget)
      : path_(std::move(path)), budget_(budget) {}

  SolverProcess(const SolverProcess&) = delete;
  SolverProcess& operator=(const SolverProcess&) = delete;

  ~SolverProcess() { shutdown(); }

  // Sends one script (a fresh context via (reset) when reusing the process)
  // and reads one sat/unsat/unknown answer.
  Verdict query(const std::string& script) {
    if (pid_ < 0) spawn();
    std::string payload = first_ ? script : "(reset)\n" + script;
    first_ = false;
    send(payload);
    const auto deadline =
        std::chrono::steady_clock::now() + budget_ + std::chrono::milliseconds(5000);
    for (;;) {
      std::string line;
      switch (read_line(deadline, &line)) {
        case ReadResult::Timeout:
          shutdown();
          return {VerdictKind::Unknown, "timeout"};
        case ReadResult::Eof: {
          int status = reap();
          if (WIFEXITED(status) && WEXITSTATUS(status) == 127)
            throw SolverError("failed to launch solver: " + path_);
          throw SolverError("solver exited without answering: " + path_);
        }
        case ReadResult::Line:
          break;
      }
      while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
        line.pop_back();
      if (line.empty()) continue;
      if (line == "sat") return {VerdictKind::Invalid, ""};
      if (line == "unsat") return {VerdictKind::Valid, ""};
      if (line == "unknown") return {VerdictKind::Unknown, "incompleteness"};
      shutdown();
      throw SolverError("unexpected solver output: " + line);
    }
  }

 private:
  enum class ReadResult { Line, Timeout, Eof };

  void spawn() {
    detail::ignore_sigpipe_once();
    int to_child[2], from_child[2];
    if (::pipe(to_child) != 0 || ::pipe(from_child) != 0)
      throw SolverError("failed to create solver pipes");
    pid_t pid = ::fork();
    if (pid < 0) throw SolverError("failed to fork solver process");
    if (pid == 0) {
      // Own process group, so a kill reaches helpers the solver forks.
      ::setpgid(0, 0);
      ::dup2(to_child[0], 0);
      ::dup2(from_child[1], 1);
      ::close(to_child[0]);
      ::close(to_child[1]);
      ::close(from_child[0]);
      ::close(from_child[1]);
      std::string ms = std::to_string(budget_.count());
      ::setenv("INVFORGE_BUDGET_MS", ms.c_str(), 1);
      ::execl(path_.c_str(), path_.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    ::setpgid(pid, pid);  // mirror the child's setpgid; closes the kill race
    pid_ = pid;
    in_fd_ = to_child[1];
    out_fd_ = from_child[0];
    buf_.clear();
    first_ = true;
  }

  void send(const std::string& data) {
    size_t off = 0;
    while (off < data.size()) {
      ssize_t n = ::write(in_fd_, data.data() + off, data.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        int err = errno;
        shutdown();
        throw SolverError(std::string("failed to write to solver: ") +
                          std::strerror(err));
      }
      off += static_cast<size_t>(n);
    }
  }

  ReadResult read_line(std::chrono::steady_clock::time_point deadline,
                       std::string* line) {
    for (;;) {
      size_t nl = buf_.find('\n');
      if (nl != std::string::npos) {
        *line = buf_.substr(0, nl);
        buf_.erase(0, nl + 1);
        return ReadResult::Line;
      }
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) return ReadResult::Timeout;
      struct pollfd pfd{out_fd_, POLLIN, 0};
      int pr = ::poll(&pfd, 1, static_cast<int>(left.count()));
      if (pr < 0) {
        if (errno == EINTR) continue;
        throw SolverError("failed to poll solver output");
      }
      if (pr == 0) return ReadResult::Timeout;
      char chunk[4096];
      ssize_t n = ::read(out_fd_, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw SolverError("failed to read solver output");
      }
      if (n == 0) return ReadResult::Eof;
      buf_.append(chunk, static_cast<size_t>(n));
    }
  }

  // Closes the pipes and waits for the child after a kill; returns the exit
  // status (0 when no child was running).
  int reap() {
    if (pid_ < 0) return 0;
    ::close(in_fd_);
    ::close(out_fd_);
    in_fd_ = out_fd_ = -1;
    ::kill(-pid_, SIGKILL);  // whole process group, including forked helpers
    ::kill(pid_, SIGKILL);
    int status = 0;
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
    return status;
  }

  void shutdown() { reap(); }

  std::string path_;
  std::chrono::milliseconds budget_;
  pid_t pid_ = -1;
  int in_fd_ = -1;
  int out_fd_ = -1;
  std::string buf_;
  bool first_ = true;
};

// Cache-fronted solver handle; one per worker thread.
class Solver {
 public:
  Solver(std::string path, std::chrono::milliseconds budget,
         VerdictCache* cache = nullptr)
      : proc_(std::move(path), budget), cache_(cache) {}

  Verdict check_script(const std::string& script) {
    Verdict v;
    if (cache_ && cache_->lookup(script, &v)) return v;
    v = proc_.query(script);
    if (cache_) cache_->store(script, v);
    return v;
  }

 private:
  SolverProcess proc_;
  VerdictCache* cache_;
};

}  // namespace invforge

#endif  // INVFORGE_SOLVER_HPP
