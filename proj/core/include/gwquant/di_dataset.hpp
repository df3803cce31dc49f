#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "gwquant/damage_index.hpp"

namespace gwquant {

// CSV header `damage[,load[,switch]],di`, one row per DI value.
void write_di_dataset_csv(std::ostream& out, const DiDataset& dataset, std::optional<std::uint64_t> seed = std::nullopt);
void write_di_dataset_csv(const std::filesystem::path& path, const DiDataset& dataset,
                          std::optional<std::uint64_t> seed = std::nullopt);

DiDataset read_di_dataset_csv(std::istream& in, const std::string& source_name = "<stream>");
DiDataset read_di_dataset_csv(const std::filesystem::path& path);

}  // namespace gwquant
