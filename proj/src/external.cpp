#include "nodata/external.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include <json.hpp>

#include "nodata/errors.hpp"

namespace nodata {

ExternalProcess::ExternalProcess(const std::string& command) {
  int in_pipe[2];   // parent -> child
  int out_pipe[2];  // child -> parent
  if (pipe(in_pipe) != 0) throw Error("pipe() failed: " + std::string(strerror(errno)));
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw Error("pipe() failed: " + std::string(strerror(errno)));
  }

  const pid_t pid = fork();
  if (pid < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) close(fd);
    throw Error("fork() failed: " + std::string(strerror(errno)));
  }
  if (pid == 0) {
    // Own process group so teardown can signal the whole command tree; the
    // shell does not forward signals to its children.
    setpgid(0, 0);
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) close(fd);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);
  close(in_pipe[0]);
  close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  signal(SIGPIPE, SIG_IGN);
}

ExternalProcess::~ExternalProcess() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  if (pid_ > 0) {
    kill(-pid_, SIGTERM);
    int status = 0;
    bool reaped = false;
    for (int i = 0; i < 50 && !reaped; ++i) {
      reaped = waitpid(pid_, &status, WNOHANG) == pid_;
      if (!reaped) usleep(10000);
    }
    if (!reaped) {
      kill(-pid_, SIGKILL);
      waitpid(pid_, &status, 0);
    }
    kill(-pid_, SIGKILL);  // sweep any stragglers in the group
  }
}

std::optional<std::string> ExternalProcess::round_trip(const std::string& line,
                                                       std::chrono::milliseconds timeout) {
  std::lock_guard lock(mu_);
  if (pid_ <= 0 || to_child_ < 0 || from_child_ < 0) return std::nullopt;

  std::string msg = line;
  msg.push_back('\n');
  std::size_t written = 0;
  while (written < msg.size()) {
    const ssize_t n = write(to_child_, msg.data() + written, msg.size() - written);
    if (n <= 0) return std::nullopt;
    written += static_cast<std::size_t>(n);
  }

  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    if (const std::size_t nl = pending_.find('\n'); nl != std::string::npos) {
      std::string out = pending_.substr(0, nl);
      pending_.erase(0, nl + 1);
      return out;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) return std::nullopt;

    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready <= 0) return std::nullopt;

    char buf[4096];
    const ssize_t n = read(from_child_, buf, sizeof(buf));
    if (n <= 0) return std::nullopt;  // EOF: the child died or closed stdout
    pending_.append(buf, static_cast<std::size_t>(n));
  }
}

namespace {

std::optional<nlohmann::json> request(ExternalProcess& proc, const nlohmann::json& req,
                                      std::chrono::milliseconds timeout) {
  const std::optional<std::string> line = proc.round_trip(req.dump(), timeout);
  if (!line) return std::nullopt;
  nlohmann::json resp = nlohmann::json::parse(*line, nullptr, /*allow_exceptions=*/false);
  if (resp.is_discarded() || !resp.is_object() || resp.contains("error")) return std::nullopt;
  return resp;
}

std::optional<int> extract_label(const nlohmann::json& resp) {
  if (!resp.contains("label") || !resp.at("label").is_number_integer()) return std::nullopt;
  const int label = resp.at("label").get<int>();
  if (label != 0 && label != 1) return std::nullopt;
  return label;
}

}  // namespace

EvaluatorProfile external_profile(const std::string& command, ExternalOptions options) {
  auto proc = std::make_shared<ExternalProcess>(command);
  const auto timeout = options.timeout;

  auto labeller = [proc, timeout](const BitString& x, Rng&) -> std::optional<int> {
    const auto resp = request(*proc, {{"op", "label"}, {"x", x.str()}}, timeout);
    if (!resp) return std::nullopt;
    return extract_label(*resp);
  };
  auto generator = [proc, timeout](const BitString& x,
                                   RoundContext&) -> std::optional<Commitment> {
    const auto resp = request(*proc, {{"op", "generate"}, {"x", x.str()}}, timeout);
    if (!resp) return std::nullopt;
    const std::optional<int> label = extract_label(*resp);
    if (!label || !resp->contains("x_prime") || !resp->at("x_prime").is_string()) {
      return std::nullopt;
    }
    try {
      return Commitment{BitString::parse(resp->at("x_prime").get<std::string>()), *label};
    } catch (const FormatError&) {
      return std::nullopt;
    }
  };
  return EvaluatorProfile("external:" + command, "", std::move(labeller), std::move(generator));
}

}  // namespace nodata
