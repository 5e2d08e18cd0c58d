#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace mcse {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr std::uint64_t kDefaultSeed = 20100401;

/// args[0] is the program name. Returns the process exit code: 0 success,
/// 1 usage or configuration error, 2 results with budget-exceeded runs.
int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "1/3", "0.5" -> double.
[[nodiscard]] double parse_fraction(std::string_view text);
/// "1e5", "100000" -> 100000; must be a positive integer.
[[nodiscard]] std::size_t parse_count_text(std::string_view text);

/// 64-bit FNV-1a, used to fingerprint the resolved configuration.
[[nodiscard]] std::uint64_t fnv1a(std::string_view text);

}  // namespace mcse
