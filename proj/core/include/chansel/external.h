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

// Client side of the chansel-eval protocol: newline-delimited JSON records
// over a child process's stdin/stdout (stderr is inherited for logs).
//
//   child  -> {"protocol":"chansel-eval","version":1,"name":"..."}
//   parent -> {"id":7,"op":"evaluate","dataset":"/abs/x.ets",
//              "channels":[0,2],"seed":1}
//   child  -> {"id":7,"ok":true,"accuracy":0.84}      (extra fields ignored)
//          |  {"id":7,"ok":false,"error":"..."}
//   parent -> {"op":"shutdown"}                       child exits 0
//
// A line that is not a record, or a reply with the wrong id, is a protocol
// error: the session is torn down and the child reaped.

#ifndef CHANSEL_EXTERNAL_H_
#define CHANSEL_EXTERNAL_H_

#include <sys/types.h>

#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "chansel/error.h"
#include "chansel/evaluator.h"

namespace chansel {

inline constexpr const char* kProtocolName = "chansel-eval";
inline constexpr int kProtocolVersion = 1;

// Command line for /bin/sh -c.
std::vector<std::string> shell_command(const std::string& command_line);

// One running evaluator process. Serves one request at a time.
class ProtocolSession {
 public:
  // Spawns argv[0] with argv and waits for the hello record. Throws
  // kProtocolTimeout, kProtocolMalformed or kProcessExited.
  ProtocolSession(const std::vector<std::string>& argv, double timeout_s);
  ~ProtocolSession();

  ProtocolSession(const ProtocolSession&) = delete;
  ProtocolSession& operator=(const ProtocolSession&) = delete;

  const std::string& name() const { return name_; }
  bool alive() const { return pid_ > 0; }

  // Sends one evaluate request and waits for its reply.
  EvalResult evaluate(const std::filesystem::path& dataset,
                      const ChannelSubset& subset, std::uint64_t seed,
                      double timeout_s);

  // Polite shutdown: request, then wait up to `grace_s` before killing.
  // Returns the exit status (or -1 when killed).
  int shutdown(double grace_s = 2.0);

 private:
  void send_line(const std::string& line);
  std::string read_line(double timeout_s);
  [[noreturn]] void fail(ErrorCode code, const std::string& message);
  void teardown();

  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::uint64_t next_id_ = 1;
  std::string name_;
};

EvalResult evaluate_external(ProtocolSession& session,
                             const std::filesystem::path& dataset,
                             const ChannelSubset& subset, std::uint64_t seed,
                             double timeout_s);

// Pool of up to `pool_size` sessions running the same command. Broken
// sessions are dropped and replaced on demand.
class ExternalEvaluator : public SubsetEvaluator {
 public:
  ExternalEvaluator(std::vector<std::string> argv,
                    std::filesystem::path dataset, int pool_size,
                    double timeout_s);
  ~ExternalEvaluator() override;

  std::string id() const override { return id_; }
  EvalResult evaluate(const ChannelSubset& subset, std::uint64_t seed) override;

  int sessions_started() const;

 private:
  std::unique_ptr<ProtocolSession> acquire();
  void release(std::unique_ptr<ProtocolSession> session);

  std::vector<std::string> argv_;
  std::filesystem::path dataset_;
  int pool_size_;
  double timeout_s_;
  std::string id_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::vector<std::unique_ptr<ProtocolSession>> idle_;
  int live_ = 0;
  int started_ = 0;
};

}  // namespace chansel

#endif  // CHANSEL_EXTERNAL_H_
