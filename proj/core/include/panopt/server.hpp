#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "panopt/alm.hpp"
#include "panopt/report.hpp"

namespace panopt {

struct ServerConfig {
  std::string bind_ip = "127.0.0.1";
  std::uint16_t port = 8333;
  /// Longest accepted request line; longer lines get an error response and
  /// are discarded up to the next newline.
  std::size_t max_request_bytes = 1 << 20;
  /// Idle limit per connection; zero disables it.
  std::chrono::duration<double> read_timeout{0};

  void validate() const;  // throws std::invalid_argument
};

/// Protocol error codes (stable constants).
namespace protocol_errors {
inline constexpr int kMalformedJson = 1000;
inline constexpr int kWrongParameterLength = 1600;
inline constexpr int kSolverFailure = 2000;
inline constexpr int kUnsupportedKey = 3003;
}  // namespace protocol_errors

/// Newline-delimited JSON service over TCP exposing one configured solver.
///
/// Each request line holds one object with a single key:
///   {"Ping": 1}          -> {"Pong": 1}
///   {"Kill": 1}          -> {"Pong": 1}, then the server shuts down
///   {"Run": {...}}       -> {"Solution": {...}} or {"Error": {...}}
/// Every other input produces {"Error": {"code": c, "message": m}} — the
/// connection is never dropped in response to bad input.
///
/// Run requests serialize through the single solver (concurrent connections
/// queue); Ping and Kill are answered immediately even while a Run is in
/// flight. Warm starting: explicit request fields win, then the last
/// converged solution and multipliers, then zeros; the penalty always
/// restarts at the configured c0 unless the request overrides it.
class OptimizerServer {
 public:
  OptimizerServer(AlmSolver solver, ServerConfig config);
  ~OptimizerServer();

  OptimizerServer(const OptimizerServer&) = delete;
  OptimizerServer& operator=(const OptimizerServer&) = delete;

  /// Binds and listens; throws std::runtime_error when the address is busy.
  void start();
  /// Accept loop; returns once Kill is acknowledged or request_stop is called.
  void run();
  /// start() + run().
  void serve();
  /// Thread-safe shutdown without a protocol message.
  void request_stop();

  [[nodiscard]] std::uint16_t port() const { return bound_port_; }

  /// Response for one request line; exposed for in-process tests.
  std::string handle_line(const std::string& line);

 private:
  void handle_connection(int fd);

  AlmSolver solver_;
  ServerConfig config_;
  std::mutex solver_mutex_;
  std::optional<SolverReport> last_converged_;
  int listen_fd_ = -1;
  std::uint16_t bound_port_ = 0;
  std::atomic<bool> stop_{false};
  std::mutex workers_mutex_;
  std::vector<std::thread> workers_;
};

/// Builds the solver and serves it until a Kill request arrives.
void serve(ProblemDefinition problem, SolverConfig solver_config,
           ServerConfig server_config);

}  // namespace panopt
