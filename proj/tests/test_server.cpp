#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "panopt/bench/rosenbrock.hpp"
#include "panopt/server.hpp"

using namespace panopt;
using nlohmann::json;

namespace {

/// Blocking line-oriented client for the NDJSON protocol.
class LineClient {
 public:
  explicit LineClient(std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    REQUIRE(fd_ >= 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
    REQUIRE(::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
    timeval timeout{30, 0};
    ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &timeout, sizeof timeout);
  }
  ~LineClient() {
    if (fd_ >= 0) ::close(fd_);
  }

  void send_line(const std::string& line) {
    const std::string framed = line + "\n";
    std::size_t sent = 0;
    while (sent < framed.size()) {
      const ssize_t k = ::send(fd_, framed.data() + sent, framed.size() - sent, 0);
      REQUIRE(k > 0);
      sent += static_cast<std::size_t>(k);
    }
  }

  std::string read_line() {
    std::string line;
    char ch;
    while (true) {
      const ssize_t k = ::recv(fd_, &ch, 1, 0);
      REQUIRE_MESSAGE(k == 1, "server reply timed out or connection closed");
      if (ch == '\n') return line;
      line.push_back(ch);
    }
  }

  json round_trip(const json& request) {
    send_line(request.dump());
    return json::parse(read_line());
  }

 private:
  int fd_ = -1;
};

struct ServerFixture {
  ServerFixture() {
    auto problem = bench::make_rosenbrock_problem(bench::ConstraintEncoding::Alm);
    AlmSolver solver(std::move(problem), bench::rosenbrock_config());
    // Walk a port range to dodge collisions with parallel test runs.
    for (std::uint16_t port = 18433; port < 18533; ++port) {
      ServerConfig cfg;
      cfg.port = port;
      server = std::make_unique<OptimizerServer>(AlmSolver(solver), cfg);
      try {
        server->start();
        break;
      } catch (const std::runtime_error&) {
        server.reset();
      }
    }
    REQUIRE(server);
    runner = std::thread([this] { server->run(); });
  }

  ~ServerFixture() {
    if (server) server->request_stop();
    if (runner.joinable()) runner.join();
  }

  std::unique_ptr<OptimizerServer> server;
  std::thread runner;
};

json run_request() {
  return json{{"Run", {{"parameter", {1.0, 50.0, 1.5}}}}};
}

}  // namespace

TEST_CASE("protocol round trips") {
  ServerFixture fixture;
  LineClient client(fixture.server->port());

  SUBCASE("ping answers pong") {
    const json reply = client.round_trip(json{{"Ping", 1}});
    CHECK(reply == json{{"Pong", 1}});
  }

  SUBCASE("run solves the reference parameter") {
    const json reply = client.round_trip(run_request());
    REQUIRE(reply.contains("Solution"));
    const json& solution = reply["Solution"];
    CHECK(solution["exit_status"] == "Converged");
    CHECK(solution["num_outer_iterations"].get<int>() <= 10);
    CHECK(solution["solution"].size() == 5);
    CHECK(solution["lagrange_multipliers"].size() == 2);
    CHECK(solution["f2_norm"].get<double>() <= 1e-4);
  }

  SUBCASE("wrong parameter length is a 1600 error") {
    const json reply = client.round_trip(json{{"Run", {{"parameter", {1.0}}}}});
    REQUIRE(reply.contains("Error"));
    CHECK(reply["Error"]["code"] == 1600);
  }

  SUBCASE("missing parameter is a 1600 error") {
    const json reply = client.round_trip(json{{"Run", json::object()}});
    REQUIRE(reply.contains("Error"));
    CHECK(reply["Error"]["code"] == 1600);
  }

  SUBCASE("unsupported key is a 3003 error") {
    const json reply = client.round_trip(json{{"Jog", 1}});
    REQUIRE(reply.contains("Error"));
    CHECK(reply["Error"]["code"] == 3003);
  }

  SUBCASE("malformed json is a 1000 error") {
    client.send_line("{not json");
    const json reply = json::parse(client.read_line());
    REQUIRE(reply.contains("Error"));
    CHECK(reply["Error"]["code"] == 1000);
  }

  SUBCASE("two top-level keys are a 1000 error") {
    client.send_line(R"({"Ping": 1, "Kill": 1})");
    const json reply = json::parse(client.read_line());
    REQUIRE(reply.contains("Error"));
    CHECK(reply["Error"]["code"] == 1000);
  }

  SUBCASE("responses preserve request order on one connection") {
    client.send_line(json{{"Ping", 1}}.dump());
    client.send_line(run_request().dump());
    client.send_line(json{{"Ping", 1}}.dump());
    CHECK(json::parse(client.read_line()).contains("Pong"));
    CHECK(json::parse(client.read_line()).contains("Solution"));
    CHECK(json::parse(client.read_line()).contains("Pong"));
  }
}

TEST_CASE("warm starting across runs") {
  ServerFixture fixture;
  LineClient client(fixture.server->port());

  const json first = client.round_trip(run_request());
  REQUIRE(first.contains("Solution"));
  const int first_inner = first["Solution"]["num_inner_iterations"].get<int>();

  SUBCASE("a repeated run reuses the previous solution") {
    const json second = client.round_trip(run_request());
    REQUIRE(second.contains("Solution"));
    CHECK(second["Solution"]["exit_status"] == "Converged");
    CHECK(second["Solution"]["num_inner_iterations"].get<int>() <= first_inner);
  }

  SUBCASE("feeding the solution back as the initial guess also converges fast") {
    json request = run_request();
    request["Run"]["initial_guess"] = first["Solution"]["solution"];
    const json second = client.round_trip(request);
    REQUIRE(second.contains("Solution"));
    CHECK(second["Solution"]["exit_status"] == "Converged");
    CHECK(second["Solution"]["num_inner_iterations"].get<int>() <= first_inner);
  }

  SUBCASE("an explicit initial penalty is honored") {
    json request = run_request();
    request["Run"]["initial_penalty"] = 1e5;
    const json reply = client.round_trip(request);
    REQUIRE(reply.contains("Solution"));
    CHECK(reply["Solution"]["penalty"].get<double>() >= 1e5);
  }

  SUBCASE("a non-positive initial penalty is malformed") {
    json request = run_request();
    request["Run"]["initial_penalty"] = -3.0;
    const json reply = client.round_trip(request);
    REQUIRE(reply.contains("Error"));
    CHECK(reply["Error"]["code"] == 1000);
  }

  SUBCASE("explicit initial values must have the declared lengths") {
    json request = run_request();
    request["Run"]["initial_guess"] = {1.0, 2.0};
    const json reply = client.round_trip(request);
    REQUIRE(reply.contains("Error"));
    CHECK(reply["Error"]["code"] == 1600);

    json request2 = run_request();
    request2["Run"]["initial_y"] = {0.0, 0.0, 0.0};
    const json reply2 = client.round_trip(request2);
    REQUIRE(reply2.contains("Error"));
    CHECK(reply2["Error"]["code"] == 1600);
  }
}

TEST_CASE("fuzzed lines never crash the handler") {
  auto problem = bench::make_rosenbrock_problem(bench::ConstraintEncoding::Alm);
  OptimizerServer server(AlmSolver(std::move(problem), bench::rosenbrock_config()),
                         ServerConfig{});

  std::mt19937_64 rng(71);
  std::uniform_int_distribution<int> length(0, 160);
  std::uniform_int_distribution<int> byte(1, 255);  // newline-free garbage
  const std::string fragments[] = {
      "{", "}", "[", "]", "\"Run\"", "\"Ping\"", "parameter", ":", ",",
      "1e309", "NaN", "null", "true", R"({"Run":)", R"("Kill")", "-",
  };

  for (int rep = 0; rep < 10000; ++rep) {
    std::string line;
    if (rep % 3 == 0) {
      const int n = length(rng);
      for (int i = 0; i < n; ++i) {
        char ch = static_cast<char>(byte(rng));
        if (ch == '\n') ch = ' ';
        line.push_back(ch);
      }
    } else {
      const int n = 1 + length(rng) % 12;
      for (int i = 0; i < n; ++i)
        line += fragments[static_cast<std::size_t>(rng() % std::size(fragments))];
    }
    if (line.find("\"Kill\"") != std::string::npos) continue;
    const std::string reply = server.handle_line(line);
    const json parsed = json::parse(reply, nullptr, false);
    CHECK_FALSE(parsed.is_discarded());
    CHECK((parsed.contains("Error") || parsed.contains("Pong") ||
           parsed.contains("Solution")));
  }
}

TEST_CASE("fuzzed socket traffic and oversized lines leave the connection usable") {
  ServerFixture fixture;
  LineClient client(fixture.server->port());

  std::mt19937_64 rng(73);
  std::uniform_int_distribution<int> byte(32, 126);
  for (int rep = 0; rep < 500; ++rep) {
    std::string line;
    const int n = static_cast<int>(rng() % 80);
    for (int i = 0; i < n; ++i) line.push_back(static_cast<char>(byte(rng)));
    client.send_line(line);
    const json reply = json::parse(client.read_line(), nullptr, false);
    CHECK_FALSE(reply.is_discarded());
  }

  // An oversized line yields one error response and the stream recovers.
  ServerConfig cfg;
  const std::string big(cfg.max_request_bytes + 64, 'x');
  client.send_line(big);
  const json oversize_reply = json::parse(client.read_line());
  REQUIRE(oversize_reply.contains("Error"));
  CHECK(oversize_reply["Error"]["code"] == 1000);

  const json pong = client.round_trip(json{{"Ping", 1}});
  CHECK(pong == json{{"Pong", 1}});
}

TEST_CASE("number serialization round-trips bit-identically") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> dist(-1e6, 1e6);
  std::vector<double> values = {0.1,    1.0 / 3.0, 1e-300, 1e300, -0.73,
                                5e-324, 2.2250738585072014e-308,
                                1.7976931348623157e308};
  for (int i = 0; i < 200; ++i) values.push_back(dist(rng));
  for (double x : values) {
    const json j = json::array({x});
    const json back = json::parse(j.dump());
    CHECK(back[0].get<double>() == x);
  }
}

TEST_CASE("kill acknowledges and shuts the server down") {
  ServerFixture fixture;
  LineClient client(fixture.server->port());
  const json reply = client.round_trip(json{{"Kill", 1}});
  CHECK(reply == json{{"Pong", 1}});
  if (fixture.runner.joinable()) fixture.runner.join();
  CHECK(true);  // run() returned, so shutdown completed
}
