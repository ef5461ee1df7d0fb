#pragma once

#include <atomic>
#include <functional>

#include "ixsim/config.hpp"

namespace ixsim {

struct ServeOptions {
  int port = 0;  // 0: ephemeral
  /// Called with the bound port once the listener is ready.
  std::function<void(int)> on_listening;
};

/// Newline-delimited JSON environment server; blocks until a client sends
/// {"cmd":"shutdown"}. One client is served at a time.
///
/// Requests:
///   {"cmd":"reset","scenario":"<spec>","seed":<n>}
///   {"cmd":"step","a0":<x>,"a1":<y>}
///   {"cmd":"shutdown"}
/// Responses (fixed field order, >= 9 significant digits):
///   {"observation":[...34],"reward":r,"done":b,"outcome":"..."}
///   {"ok":true} | {"error":"..."}
void run_server(const RunConfig& cfg, const ServeOptions& options);

}  // namespace ixsim
