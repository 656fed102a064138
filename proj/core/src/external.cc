// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "chansel/external.h"

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstring>
#include <mutex>
#include <thread>

#include "chansel/error.h"
#include "json.hpp"

extern char** environ;

namespace chansel {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

int exit_code_of(int status) {
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  if (WIFSIGNALED(status)) return 128 + WTERMSIG(status);
  return -1;
}

std::string shorten(const std::string& line) {
  constexpr std::size_t kMax = 200;
  return line.size() <= kMax ? line : line.substr(0, kMax) + "...";
}

}  // namespace

std::vector<std::string> shell_command(const std::string& command_line) {
  return {"/bin/sh", "-c", command_line};
}

ProtocolSession::ProtocolSession(const std::vector<std::string>& argv,
                                 double timeout_s) {
  if (argv.empty()) {
    throw Error(ErrorCode::kConfigInvalid, "empty evaluator command");
  }
  ignore_sigpipe();

  int in_pipe[2];   // parent writes -> child stdin
  int out_pipe[2];  // child stdout -> parent reads
  if (pipe2(in_pipe, O_CLOEXEC) != 0) {
    throw Error(ErrorCode::kIoError, std::strerror(errno));
  }
  if (pipe2(out_pipe, O_CLOEXEC) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw Error(ErrorCode::kIoError, std::strerror(errno));
  }

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);

  std::vector<char*> cargv;
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);

  pid_t pid = -1;
  const int rc = posix_spawnp(&pid, cargv[0], &actions, nullptr, cargv.data(),
                              environ);
  posix_spawn_file_actions_destroy(&actions);
  close(in_pipe[0]);
  close(out_pipe[1]);
  if (rc != 0) {
    close(in_pipe[1]);
    close(out_pipe[0]);
    throw Error(ErrorCode::kProcessExited,
                "cannot start " + argv[0] + ": " + std::strerror(rc));
  }
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];

  const std::string hello_line = read_line(timeout_s);
  const json hello = json::parse(hello_line, nullptr, false);
  if (hello.is_discarded() || !hello.is_object() ||
      hello.value("protocol", std::string()) != kProtocolName ||
      !hello.contains("version") || !hello["version"].is_number_integer() ||
      hello["version"].get<int>() != kProtocolVersion ||
      !hello.contains("name") || !hello["name"].is_string()) {
    fail(ErrorCode::kProtocolMalformed, "bad hello: " + shorten(hello_line));
  }
  name_ = hello["name"].get<std::string>();
}

ProtocolSession::~ProtocolSession() {
  if (alive()) shutdown(1.0);
}

void ProtocolSession::teardown() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    kill(pid_, SIGKILL);
    int status = 0;
    while (waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
    }
    pid_ = -1;
  }
}

void ProtocolSession::fail(ErrorCode code, const std::string& message) {
  teardown();
  throw Error(code, message);
}

void ProtocolSession::send_line(const std::string& line) {
  std::string data = line + "\n";
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = write(to_child_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      int status = 0;
      const pid_t done = waitpid(pid_, &status, WNOHANG);
      const int code = done == pid_ ? exit_code_of(status) : -1;
      if (done == pid_) pid_ = -1;
      fail(ErrorCode::kProcessExited,
           "evaluator closed its input (exit code " + std::to_string(code) + ")");
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string ProtocolSession::read_line(double timeout_s) {
  const auto deadline =
      Clock::now() + std::chrono::duration_cast<Clock::duration>(
                         std::chrono::duration<double>(timeout_s));
  while (true) {
    const std::size_t nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - Clock::now());
    if (remaining.count() <= 0) {
      fail(ErrorCode::kProtocolTimeout, "no reply within " +
                                            std::to_string(timeout_s) + " s");
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      fail(ErrorCode::kIoError, std::strerror(errno));
    }
    if (ready == 0) continue;
    char chunk[4096];
    const ssize_t n = read(from_child_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      fail(ErrorCode::kIoError, std::strerror(errno));
    }
    if (n == 0) {
      int status = 0;
      pid_t done;
      while ((done = waitpid(pid_, &status, 0)) < 0 && errno == EINTR) {
      }
      const int code = done == pid_ ? exit_code_of(status) : -1;
      pid_ = -1;
      fail(ErrorCode::kProcessExited,
           "evaluator exited with code " + std::to_string(code));
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

EvalResult ProtocolSession::evaluate(const std::filesystem::path& dataset,
                                     const ChannelSubset& subset,
                                     std::uint64_t seed, double timeout_s) {
  if (!alive()) {
    throw Error(ErrorCode::kProcessExited, "session is closed");
  }
  const std::uint64_t id = next_id_++;
  const json request{{"id", id},
                     {"op", "evaluate"},
                     {"dataset", dataset.string()},
                     {"channels", subset.indices()},
                     {"seed", seed}};
  send_line(request.dump());

  const std::string line = read_line(timeout_s);
  const json reply = json::parse(line, nullptr, false);
  if (reply.is_discarded() || !reply.is_object()) {
    fail(ErrorCode::kProtocolMalformed, "not a record: " + shorten(line));
  }
  if (!reply.contains("id") || !reply["id"].is_number_unsigned() ||
      reply["id"].get<std::uint64_t>() != id) {
    fail(ErrorCode::kProtocolMalformed,
         "expected reply id " + std::to_string(id) + ": " + shorten(line));
  }
  if (!reply.contains("ok") || !reply["ok"].is_boolean()) {
    fail(ErrorCode::kProtocolMalformed, "reply lacks ok: " + shorten(line));
  }
  if (!reply["ok"].get<bool>()) {
    throw Error(ErrorCode::kEvaluatorError,
                reply.value("error", std::string("unspecified evaluator error")));
  }
  if (!reply.contains("accuracy") || !reply["accuracy"].is_number()) {
    fail(ErrorCode::kProtocolMalformed, "reply lacks accuracy: " + shorten(line));
  }
  const double accuracy = reply["accuracy"].get<double>();
  if (!(accuracy >= 0.0 && accuracy <= 1.0)) {
    throw Error(ErrorCode::kAccuracyOutOfRange,
                "accuracy " + reply["accuracy"].dump() + " outside [0, 1]");
  }
  EvalResult r(subset);
  r.accuracy = accuracy;
  r.evaluator_id = "external/" + name_;
  r.seed = seed;
  return r;
}

int ProtocolSession::shutdown(double grace_s) {
  if (!alive()) return -1;
  try {
    send_line(json{{"op", "shutdown"}}.dump());
  } catch (const Error&) {
    return -1;
  }
  close(to_child_);
  to_child_ = -1;
  const auto deadline =
      Clock::now() + std::chrono::duration_cast<Clock::duration>(
                         std::chrono::duration<double>(grace_s));
  int status = 0;
  while (Clock::now() < deadline) {
    const pid_t done = waitpid(pid_, &status, WNOHANG);
    if (done == pid_) {
      pid_ = -1;
      close(from_child_);
      from_child_ = -1;
      return exit_code_of(status);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  teardown();
  return -1;
}

EvalResult evaluate_external(ProtocolSession& session,
                             const std::filesystem::path& dataset,
                             const ChannelSubset& subset, std::uint64_t seed,
                             double timeout_s) {
  return session.evaluate(dataset, subset, seed, timeout_s);
}

// ExternalEvaluator

ExternalEvaluator::ExternalEvaluator(std::vector<std::string> argv,
                                     std::filesystem::path dataset,
                                     int pool_size, double timeout_s)
    : argv_(std::move(argv)),
      dataset_(std::filesystem::absolute(dataset)),
      pool_size_(std::max(1, pool_size)),
      timeout_s_(timeout_s) {
  auto first = std::make_unique<ProtocolSession>(argv_, timeout_s_);
  id_ = "external/" + first->name() + "/";
  for (std::size_t i = 0; i < argv_.size(); ++i) {
    if (i) id_ += ' ';
    id_ += argv_[i];
  }
  live_ = 1;
  started_ = 1;
  idle_.push_back(std::move(first));
}

ExternalEvaluator::~ExternalEvaluator() {
  std::lock_guard lock(mu_);
  idle_.clear();
}

int ExternalEvaluator::sessions_started() const {
  std::lock_guard lock(mu_);
  return started_;
}

std::unique_ptr<ProtocolSession> ExternalEvaluator::acquire() {
  {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return !idle_.empty() || live_ < pool_size_; });
    if (!idle_.empty()) {
      auto s = std::move(idle_.back());
      idle_.pop_back();
      return s;
    }
    ++live_;
    ++started_;
  }
  try {
    return std::make_unique<ProtocolSession>(argv_, timeout_s_);
  } catch (...) {
    {
      std::lock_guard lock(mu_);
      --live_;
    }
    cv_.notify_one();
    throw;
  }
}

void ExternalEvaluator::release(std::unique_ptr<ProtocolSession> session) {
  {
    std::lock_guard lock(mu_);
    if (session->alive()) {
      idle_.push_back(std::move(session));
    } else {
      --live_;
    }
  }
  cv_.notify_one();
}

EvalResult ExternalEvaluator::evaluate(const ChannelSubset& subset,
                                       std::uint64_t seed) {
  const auto start = Clock::now();
  auto session = acquire();
  try {
    EvalResult r = session->evaluate(dataset_, subset, seed, timeout_s_);
    release(std::move(session));
    r.evaluator_id = id_;
    r.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         Clock::now() - start)
                         .count();
    return r;
  } catch (...) {
    release(std::move(session));
    throw;
  }
}

}  // namespace chansel
