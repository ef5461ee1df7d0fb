#include "ixsim/serve.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstdio>
#include <cstring>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "ixsim/runs.hpp"

namespace ixsim {

namespace {

std::string format_response(const Observation& obs, double reward, bool done, Outcome outcome) {
  std::string out = "{\"observation\":[";
  char num[40];
  for (int i = 0; i < kObsDim; ++i) {
    std::snprintf(num, sizeof(num), "%.17g", obs[i]);
    out += num;
    if (i + 1 < kObsDim) out += ',';
  }
  std::snprintf(num, sizeof(num), "%.17g", reward);
  out += "],\"reward\":";
  out += num;
  out += ",\"done\":";
  out += done ? "true" : "false";
  out += ",\"outcome\":\"";
  out += to_string(outcome);
  out += "\"}\n";
  return out;
}

bool send_all(int fd, const std::string& text) {
  size_t sent = 0;
  while (sent < text.size()) {
    const ssize_t n = ::send(fd, text.data() + sent, text.size() - sent, MSG_NOSIGNAL);
    if (n <= 0) return false;
    sent += static_cast<size_t>(n);
  }
  return true;
}

}  // namespace

void run_server(const RunConfig& cfg, const ServeOptions& options) {
  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listener < 0) throw std::runtime_error("serve: cannot create socket");
  const int one = 1;
  ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<uint16_t>(options.port));
  if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(listener);
    throw std::runtime_error("serve: cannot bind port " + std::to_string(options.port));
  }
  if (::listen(listener, 1) != 0) {
    ::close(listener);
    throw std::runtime_error("serve: listen failed");
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len);
  const int bound_port = ntohs(addr.sin_port);
  if (options.on_listening) options.on_listening(bound_port);

  const IntersectionMap map = build_default_intersection(cfg.map);
  std::optional<Env> env;
  bool running = true;

  while (running) {
    const int client = ::accept(listener, nullptr, nullptr);
    if (client < 0) break;
    std::string buffer;
    char chunk[4096];
    while (true) {
      const ssize_t n = ::recv(client, chunk, sizeof(chunk), 0);
      if (n <= 0) break;
      buffer.append(chunk, static_cast<size_t>(n));
      size_t pos;
      bool closed = false;
      while ((pos = buffer.find('\n')) != std::string::npos) {
        const std::string line = buffer.substr(0, pos);
        buffer.erase(0, pos + 1);
        if (line.empty()) continue;
        std::string reply;
        try {
          const auto req = nlohmann::json::parse(line);
          const std::string cmd = req.at("cmd").get<std::string>();
          if (cmd == "shutdown") {
            send_all(client, "{\"ok\":true}\n");
            running = false;
            closed = true;
            break;
          } else if (cmd == "reset") {
            const std::string spec = req.at("scenario").get<std::string>();
            const uint64_t seed = req.at("seed").get<uint64_t>();
            env.emplace(make_env(cfg, map, spec));
            const Observation obs = env->reset(seed);
            reply = format_response(obs, 0.0, false, Outcome::Running);
          } else if (cmd == "step") {
            if (!env) throw std::runtime_error("no environment; send reset first");
            const Action a{req.at("a0").get<double>(), req.at("a1").get<double>()};
            const StepOutput out = env->step(a);
            reply = format_response(out.observation, out.reward, out.done, out.outcome);
          } else {
            throw std::runtime_error("unknown cmd: " + cmd);
          }
        } catch (const std::exception& e) {
          reply = std::string("{\"error\":\"") + e.what() + "\"}\n";
        }
        if (!reply.empty() && !send_all(client, reply)) {
          closed = true;
          break;
        }
      }
      if (closed || !running) break;
    }
    ::close(client);
  }
  ::close(listener);
}

}  // namespace ixsim
