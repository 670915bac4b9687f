#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace offlang {

/// Base class for every error raised by the toolkit. Messages are meant to be
/// shown to the operator as-is.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using WarningSink = std::function<void(std::string_view)>;

/// Emits a non-fatal diagnostic. Defaults to stderr with a "warning: " prefix.
void warn(std::string_view message);

/// Replaces the warning sink and returns the previous one. Passing an empty
/// function restores the stderr sink.
WarningSink set_warning_sink(WarningSink sink);

}  // namespace offlang
