#pragma once

#include <string>

namespace spectralkl {

enum class LogLevel { kError = 0, kInfo = 1, kDebug = 2 };

/// Level from the SPECTRAL_KL_LOG environment variable (error|info|debug),
/// read once per process. Defaults to error.
LogLevel log_level();

/// Always printed to stderr with a "warning:" prefix.
void warn(const std::string& message);

/// Printed to stderr when the level admits them.
void log_info(const std::string& message);
void log_debug(const std::string& message);

}  // namespace spectralkl
