#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace dicke::log {

using Sink = std::function<void(std::string_view level, std::string_view message)>;

/// Replaces the process-wide sink (default: stderr). Returns the previous one.
Sink set_sink(Sink sink);

void info(const std::string& message);
void warn(const std::string& message);

}  // namespace dicke::log
