#pragma once

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <thread>

#include "dsc/core/process_model.hpp"
#include "dsc/core/types.hpp"
#include "dsc/io/number_format.hpp"

namespace dsc::bridge {

struct CommandSpec {
  std::string command;  // run through /bin/sh -c
  std::size_t constraints = 1;
  double timeout_seconds = 60.0;
};

/// ProcessModel backed by a long-running subprocess. Each evaluation writes
/// one line `d_1 ... d_n theta_1 ... theta_p` to its stdin and reads one line
/// `g_1 ... g_m` from its stdout. Evaluations are serialized.
class ExternalModel final : public ProcessModelBase {
 public:
  explicit ExternalModel(CommandSpec spec) : spec_(std::move(spec)) {
    if (spec_.command.empty()) throw std::invalid_argument("external model: command must not be empty");
    if (spec_.constraints == 0) throw std::invalid_argument("external model: constraint count must be >= 1");
    if (!(spec_.timeout_seconds > 0.0)) throw std::invalid_argument("external model: timeout must be > 0");
    ::signal(SIGPIPE, SIG_IGN);
    start();
  }

  ExternalModel(const ExternalModel&) = delete;
  ExternalModel& operator=(const ExternalModel&) = delete;

  ~ExternalModel() override { stop(); }

  std::size_t constraint_count() const override { return spec_.constraints; }

  Vector evaluate(std::span<const double> d, std::span<const double> theta) const override {
    std::lock_guard lock(mutex_);
    const auto where = [&] { return " at d=" + format_point(d) + ", theta=" + format_point(theta); };
    if (pid_ <= 0) throw ModelError("external model process is not running" + where());

    std::string request;
    for (double v : d) request += io::format_double(v) + ' ';
    for (double v : theta) request += io::format_double(v) + ' ';
    request.back() = '\n';
    if (!write_all(request)) {
      reap();
      throw ModelError("external model process exited" + exit_description() + where());
    }

    std::string line;
    switch (read_line(line)) {
      case ReadStatus::ok: break;
      case ReadStatus::timeout:
        kill_child();
        throw ModelError("external model timed out after " + io::format_double(spec_.timeout_seconds) + " s" + where());
      case ReadStatus::eof:
        reap();
        throw ModelError("external model process exited" + exit_description() + where());
    }

    Vector g;
    std::string_view rest = line;
    while (true) {
      rest = io::trim(rest);
      if (rest.empty()) break;
      const auto end = rest.find_first_of(" \t");
      const auto token = rest.substr(0, end);
      const auto value = io::parse_double(token);
      if (!value) throw ModelError("external model returned non-numeric value '" + std::string(token) + "'" + where());
      g.push_back(*value);
      if (end == std::string_view::npos) break;
      rest.remove_prefix(end);
    }
    if (g.size() != spec_.constraints) {
      throw ModelError("external model returned " + std::to_string(g.size()) + " values, expected " +
                       std::to_string(spec_.constraints) + where());
    }
    return g;
  }

 private:
  enum class ReadStatus { ok, timeout, eof };

  void start() {
    int to_child[2];
    int from_child[2];
    if (::pipe(to_child) != 0) throw ModelError(std::string("external model: pipe failed: ") + std::strerror(errno));
    if (::pipe(from_child) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw ModelError(std::string("external model: pipe failed: ") + std::strerror(errno));
    }
    const pid_t pid = ::fork();
    if (pid < 0) throw ModelError(std::string("external model: fork failed: ") + std::strerror(errno));
    if (pid == 0) {
      ::setpgid(0, 0);  // own group, so a timeout kills the shell's children too
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::close(to_child[0]);
      ::close(to_child[1]);
      ::close(from_child[0]);
      ::close(from_child[1]);
      ::execl("/bin/sh", "sh", "-c", spec_.command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::setpgid(pid, pid);
    ::close(to_child[0]);
    ::close(from_child[1]);
    ::fcntl(to_child[1], F_SETFD, FD_CLOEXEC);
    ::fcntl(from_child[0], F_SETFD, FD_CLOEXEC);
    pid_ = pid;
    write_fd_ = to_child[1];
    read_fd_ = from_child[0];
  }

  bool write_all(std::string_view data) const {
    while (!data.empty()) {
      const ssize_t n = ::write(write_fd_, data.data(), data.size());
      if (n < 0) {
        if (errno == EINTR) continue;
        return false;
      }
      data.remove_prefix(static_cast<std::size_t>(n));
    }
    return true;
  }

  ReadStatus read_line(std::string& line) const {
    using clock = std::chrono::steady_clock;
    const auto deadline = clock::now() + std::chrono::duration_cast<clock::duration>(
                                             std::chrono::duration<double>(spec_.timeout_seconds));
    while (true) {
      const auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return ReadStatus::ok;
      }
      const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now()).count();
      if (remaining <= 0) return ReadStatus::timeout;
      pollfd pfd{read_fd_, POLLIN, 0};
      const int rc = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(remaining, 1 << 30)));
      if (rc < 0) {
        if (errno == EINTR) continue;
        return ReadStatus::eof;
      }
      if (rc == 0) return ReadStatus::timeout;
      char chunk[4096];
      const ssize_t n = ::read(read_fd_, chunk, sizeof(chunk));
      if (n < 0) {
        if (errno == EINTR) continue;
        return ReadStatus::eof;
      }
      if (n == 0) return ReadStatus::eof;
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  std::string exit_description() const {
    if (WIFEXITED(status_)) return " with status " + std::to_string(WEXITSTATUS(status_));
    if (WIFSIGNALED(status_)) return " on signal " + std::to_string(WTERMSIG(status_));
    return "";
  }

  void close_fds() const {
    if (write_fd_ >= 0) ::close(write_fd_);
    if (read_fd_ >= 0) ::close(read_fd_);
    write_fd_ = read_fd_ = -1;
  }

  void reap() const {
    close_fds();
    if (pid_ > 0) {
      while (::waitpid(pid_, &status_, 0) < 0 && errno == EINTR) {
      }
      pid_ = -1;
    }
  }

  void kill_child() const {
    if (pid_ > 0) ::kill(-pid_, SIGKILL);
    reap();
  }

  void stop() {
    std::lock_guard lock(mutex_);
    if (pid_ <= 0) return;
    close_fds();  // EOF on stdin asks the model to exit
    for (int i = 0; i < 100; ++i) {
      const pid_t r = ::waitpid(pid_, &status_, WNOHANG);
      if (r == pid_) {
        pid_ = -1;
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    kill_child();
  }

  CommandSpec spec_;
  mutable std::mutex mutex_;
  mutable pid_t pid_ = -1;
  mutable int write_fd_ = -1;
  mutable int read_fd_ = -1;
  mutable int status_ = 0;
  mutable std::string buffer_;
};

}  // namespace dsc::bridge
