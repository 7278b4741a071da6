#include "dicke/log.hpp"

#include <iostream>
#include <mutex>

namespace dicke::log {

namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

Sink& current_sink() {
  static Sink sink = [](std::string_view level, std::string_view message) {
    std::cerr << "[" << level << "] " << message << '\n';
  };
  return sink;
}

void emit(std::string_view level, const std::string& message) {
  std::lock_guard lock(sink_mutex());
  if (current_sink()) current_sink()(level, message);
}

}  // namespace

Sink set_sink(Sink sink) {
  std::lock_guard lock(sink_mutex());
  Sink previous = std::move(current_sink());
  current_sink() = std::move(sink);
  return previous;
}

void info(const std::string& message) { emit("info", message); }
void warn(const std::string& message) { emit("warn", message); }

}  // namespace dicke::log
