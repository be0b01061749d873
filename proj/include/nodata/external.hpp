#pragma once

#include <chrono>
#include <mutex>
#include <optional>
#include <string>

#include "nodata/evaluator.hpp"

namespace nodata {

struct ExternalOptions {
  std::chrono::milliseconds timeout{30000};
};

/// A child process speaking newline-delimited JSON over stdin/stdout. One
/// request in flight at a time; parallel sessions serialize on the mutex, so
/// stubs must answer each request as a pure function of the request.
class ExternalProcess {
 public:
  explicit ExternalProcess(const std::string& command);
  ~ExternalProcess();

  ExternalProcess(const ExternalProcess&) = delete;
  ExternalProcess& operator=(const ExternalProcess&) = delete;

  /// Writes one line and reads one line. nullopt on timeout, EOF, or a dead
  /// process.
  std::optional<std::string> round_trip(const std::string& line,
                                        std::chrono::milliseconds timeout);

 private:
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string pending_;
  std::mutex mu_;
};

/// Wraps an external command as an evaluator. Requests:
///   {"op":"label","x":"<bits>"}    -> {"label":0|1}
///   {"op":"generate","x":"<bits>"} -> {"x_prime":"<bits>","label":0|1}
/// Any {"error":...} response, malformed reply, timeout, or dead process is
/// surfaced as an adapter failure (a failed round / failed datapoint).
EvaluatorProfile external_profile(const std::string& command, ExternalOptions options = {});

}  // namespace nodata
