#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gwquant/signals.hpp"

namespace gwquant {

// Section layout:
//   # signal damage=<real> load=<real> replicate=<int> role=<baseline|test> sample_rate=<real>
//   <one amplitude per line>
// Sections are separated by blank lines. Other lines starting with '#' are comments.

void write_signals_csv(std::ostream& out, std::span<const Signal> signals,
                       std::optional<std::uint64_t> seed = std::nullopt);
void write_signals_csv(const std::filesystem::path& path, std::span<const Signal> signals,
                       std::optional<std::uint64_t> seed = std::nullopt);

std::vector<Signal> read_signals_csv(std::istream& in, const std::string& source_name = "<stream>");
std::vector<Signal> read_signals_csv(const std::filesystem::path& path);

/// Shortest round-trip representation (up to 17 significant digits).
std::string format_real(double value);

}  // namespace gwquant
