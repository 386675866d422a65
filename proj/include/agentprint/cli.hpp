#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

namespace agentprint {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUnexpected = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitSchema = 3;
inline constexpr int kExitModelMismatch = 4;

std::string_view tool_version();

/// A model whose features do not line up with the registry or the input.
class ModelMismatchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Entry point of the `agentprint` tool; returns the process exit code.
/// Summaries go to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace agentprint
