#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace corrcast {

using WarningSink = std::function<void(std::string_view)>;

// Warnings go to stderr unless a sink is installed. Thread-safe.
void warn(std::string_view message);

// Returns the previously installed sink. Pass an empty function to restore stderr.
WarningSink set_warning_sink(WarningSink sink);

} // namespace corrcast
