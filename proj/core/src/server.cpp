#include "panopt/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include <json.hpp>

namespace panopt {

using nlohmann::json;

void ServerConfig::validate() const {
  if (port < 1) throw std::invalid_argument("ServerConfig: port must lie in [1, 65535]");
  if (max_request_bytes < 4096)
    throw std::invalid_argument("ServerConfig: max_request_bytes must be >= 4096");
  if (read_timeout.count() < 0)
    throw std::invalid_argument("ServerConfig: read_timeout must be >= 0");
}

namespace {

std::string error_response(int code, const std::string& message) {
  json j;
  j["Error"] = {{"code", code}, {"message", message}};
  return j.dump();
}

const std::string kPong = json{{"Pong", 1}}.dump();

bool numeric_array(const json& j) {
  if (!j.is_array()) return false;
  for (const auto& v : j)
    if (!v.is_number()) return false;
  return true;
}

Vector to_vector(const json& j) {
  Vector v(static_cast<Index>(j.size()));
  Index i = 0;
  for (const auto& x : j) v[i++] = x.get<double>();
  return v;
}

json to_array(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

void send_all(int fd, const std::string& payload) {
  std::size_t sent = 0;
  while (sent < payload.size()) {
    const ssize_t k =
        ::send(fd, payload.data() + sent, payload.size() - sent, MSG_NOSIGNAL);
    if (k <= 0) {
      if (k < 0 && errno == EINTR) continue;
      return;  // peer went away; nothing left to do
    }
    sent += static_cast<std::size_t>(k);
  }
}

}  // namespace

OptimizerServer::OptimizerServer(AlmSolver solver, ServerConfig config)
    : solver_(std::move(solver)), config_(std::move(config)) {
  config_.validate();
}

OptimizerServer::~OptimizerServer() {
  request_stop();
  std::vector<std::thread> to_join;
  {
    std::lock_guard lock(workers_mutex_);
    to_join.swap(workers_);
  }
  for (auto& w : to_join)
    if (w.joinable()) w.join();
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void OptimizerServer::start() {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw std::runtime_error("server: socket() failed");
  int yes = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(config_.port);
  if (::inet_pton(AF_INET, config_.bind_ip.c_str(), &addr.sin_addr) != 1)
    throw std::runtime_error("server: invalid bind address " + config_.bind_ip);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0)
    throw std::runtime_error("server: cannot bind " + config_.bind_ip + ":" +
                             std::to_string(config_.port) + " (" + std::strerror(errno) +
                             ")");
  if (::listen(listen_fd_, 16) != 0) throw std::runtime_error("server: listen() failed");

  sockaddr_in bound{};
  socklen_t len = sizeof bound;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  bound_port_ = ntohs(bound.sin_port);
}

void OptimizerServer::run() {
  if (listen_fd_ < 0) throw std::logic_error("server: run() before start()");
  while (!stop_) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (stop_ || (errno != EINTR && errno != ECONNABORTED)) break;
      continue;
    }
    timeval poll_quantum{0, 250 * 1000};
    ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &poll_quantum, sizeof poll_quantum);
    std::lock_guard lock(workers_mutex_);
    workers_.emplace_back(&OptimizerServer::handle_connection, this, fd);
  }
  std::vector<std::thread> to_join;
  {
    std::lock_guard lock(workers_mutex_);
    to_join.swap(workers_);
  }
  for (auto& w : to_join)
    if (w.joinable()) w.join();
}

void OptimizerServer::serve() {
  start();
  run();
}

void OptimizerServer::request_stop() {
  stop_ = true;
  if (listen_fd_ >= 0) ::shutdown(listen_fd_, SHUT_RDWR);
}

void OptimizerServer::handle_connection(int fd) {
  std::string line;
  line.reserve(4096);
  char chunk[4096];
  bool oversize = false;
  auto last_activity = std::chrono::steady_clock::now();

  while (!stop_) {
    const ssize_t k = ::recv(fd, chunk, sizeof chunk, 0);
    if (k == 0) break;
    if (k < 0) {
      if (errno == EAGAIN || errno == EWOULDBLOCK) {
        if (config_.read_timeout.count() > 0 &&
            std::chrono::steady_clock::now() - last_activity >
                std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                    config_.read_timeout))
          break;
        continue;
      }
      if (errno == EINTR) continue;
      break;
    }
    last_activity = std::chrono::steady_clock::now();
    for (ssize_t i = 0; i < k; ++i) {
      const char ch = chunk[i];
      if (oversize) {
        if (ch == '\n') oversize = false;
        continue;
      }
      if (ch == '\n') {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        send_all(fd, handle_line(line) + "\n");
        line.clear();
        if (stop_) break;
      } else {
        line.push_back(ch);
        if (line.size() > config_.max_request_bytes) {
          send_all(fd, error_response(protocol_errors::kMalformedJson,
                                      "request line exceeds max_request_bytes") +
                           "\n");
          line.clear();
          oversize = true;
        }
      }
    }
  }
  ::close(fd);
}

std::string OptimizerServer::handle_line(const std::string& line) {
  const json request = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (request.is_discarded())
    return error_response(protocol_errors::kMalformedJson, "malformed JSON");
  if (!request.is_object() || request.size() != 1)
    return error_response(protocol_errors::kMalformedJson,
                          "expected an object with exactly one top-level key");

  const auto& key = request.begin().key();
  if (key == "Ping") return kPong;
  if (key == "Kill") {
    request_stop();
    return kPong;
  }
  if (key != "Run")
    return error_response(protocol_errors::kUnsupportedKey, "unsupported key: " + key);

  const json& body = request.begin().value();
  if (!body.is_object())
    return error_response(protocol_errors::kMalformedJson, "Run payload must be an object");

  const auto& problem = solver_.problem();

  if (!body.contains("parameter"))
    return error_response(protocol_errors::kWrongParameterLength,
                          "parameter of length " + std::to_string(problem.n_p) +
                              " is required");
  const json& parameter = body.at("parameter");
  if (!numeric_array(parameter))
    return error_response(protocol_errors::kMalformedJson,
                          "parameter must be an array of numbers");
  if (static_cast<Index>(parameter.size()) != problem.n_p)
    return error_response(protocol_errors::kWrongParameterLength,
                          "parameter has length " + std::to_string(parameter.size()) +
                              ", expected " + std::to_string(problem.n_p));

  std::optional<Vector> u0, y0;
  std::optional<double> c0;
  if (body.contains("initial_guess")) {
    const json& guess = body.at("initial_guess");
    if (!numeric_array(guess))
      return error_response(protocol_errors::kMalformedJson,
                            "initial_guess must be an array of numbers");
    if (static_cast<Index>(guess.size()) != problem.n)
      return error_response(protocol_errors::kWrongParameterLength,
                            "initial_guess has length " + std::to_string(guess.size()) +
                                ", expected " + std::to_string(problem.n));
    u0 = to_vector(guess);
  }
  if (body.contains("initial_y")) {
    const json& y = body.at("initial_y");
    if (!numeric_array(y))
      return error_response(protocol_errors::kMalformedJson,
                            "initial_y must be an array of numbers");
    if (static_cast<Index>(y.size()) != problem.n1)
      return error_response(protocol_errors::kWrongParameterLength,
                            "initial_y has length " + std::to_string(y.size()) +
                                ", expected " + std::to_string(problem.n1));
    y0 = to_vector(y);
  }
  if (body.contains("initial_penalty")) {
    const json& c = body.at("initial_penalty");
    if (!c.is_number() || !(c.get<double>() > 0))
      return error_response(protocol_errors::kMalformedJson,
                            "initial_penalty must be a positive number");
    c0 = c.get<double>();
  }

  const Vector p = to_vector(parameter);

  std::lock_guard lock(solver_mutex_);
  if (!u0) u0 = last_converged_ ? last_converged_->solution : Vector::Zero(problem.n);
  if (!y0)
    y0 = last_converged_ ? last_converged_->lagrange_multipliers
                         : Vector::Zero(problem.n1);
  if (!c0) c0 = solver_.config().c0;

  SolverReport report;
  try {
    report = solver_.solve(p, std::move(u0), std::move(y0), c0);
  } catch (const std::exception& e) {
    return error_response(protocol_errors::kSolverFailure,
                          std::string("solver failure: ") + e.what());
  }

  if (report.exit_status == ExitStatus::OracleFailure)
    return error_response(protocol_errors::kSolverFailure,
                          "solver failure: status OracleFailure");
  const bool finite = std::isfinite(report.cost) && std::isfinite(report.last_fpr_norm) &&
                      report.solution.allFinite() &&
                      report.lagrange_multipliers.allFinite();
  if (!finite)
    return error_response(protocol_errors::kSolverFailure,
                          "solver failure: non-finite result (status " +
                              std::string(to_string(report.exit_status)) + ")");

  if (report.exit_status == ExitStatus::Converged) last_converged_ = report;

  json solution;
  solution["exit_status"] = std::string(to_string(report.exit_status));
  solution["num_outer_iterations"] = report.num_outer_iterations;
  solution["num_inner_iterations"] = report.num_inner_iterations;
  solution["last_problem_norm_fpr"] = report.last_fpr_norm;
  solution["delta_y_norm"] = report.delta_y_norm;
  solution["f2_norm"] = report.f2_norm;
  solution["penalty"] = report.penalty;
  solution["cost"] = report.cost;
  solution["solve_time_ms"] = report.solve_time.count() * 1e3;
  solution["solution"] = to_array(report.solution);
  solution["lagrange_multipliers"] = to_array(report.lagrange_multipliers);
  return json{{"Solution", solution}}.dump();
}

void serve(ProblemDefinition problem, SolverConfig solver_config,
           ServerConfig server_config) {
  OptimizerServer server(AlmSolver(std::move(problem), std::move(solver_config)),
                         std::move(server_config));
  server.serve();
}

}  // namespace panopt
