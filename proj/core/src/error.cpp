#include "frechetcp/error.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace frechetcp {
namespace {

std::mutex& handler_mutex() {
  static std::mutex mutex;
  return mutex;
}

WarningHandler& handler_slot() {
  static WarningHandler handler = [](std::string_view message) {
    std::clog << "frechetcp: warning: " << message << '\n';
  };
  return handler;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(handler_mutex());
  return std::exchange(handler_slot(), std::move(handler));
}

void warn(std::string_view message) {
  std::lock_guard lock(handler_mutex());
  if (handler_slot()) handler_slot()(message);
}

}  // namespace frechetcp
