#pragma once

#include <string_view>

namespace contagion {

/// Writes "contagion: warning: <msg>" to stderr unless warnings are muted.
void log_warning(std::string_view msg);
void set_warnings_enabled(bool enabled);

}  // namespace contagion
