#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "gwquant/sgpr.hpp"
#include "gwquant/vhgpr.hpp"

namespace gwquant {

inline constexpr std::string_view kModelSchema = "gwquant-model";
inline constexpr int kModelSchemaVersion = 1;

using AnyModel = std::variant<SgprModel, VhgprModel>;

enum class ModelKind { sgpr, vhgpr };
ModelKind parse_model_kind(std::string_view text);
std::string_view to_string(ModelKind kind);
ModelKind kind_of(const AnyModel& model);

const Regressor& as_regressor(const AnyModel& model);

// Text serialization: a "gwquant-model <version>" line, then "key value..."
// lines with reals at 17 significant digits, then the training rows inline.
// Cached factorizations are rebuilt on load.
void save_model(std::ostream& out, const AnyModel& model, std::optional<std::uint64_t> seed = std::nullopt);
void save_model(const std::filesystem::path& path, const AnyModel& model,
                std::optional<std::uint64_t> seed = std::nullopt);

AnyModel load_model(std::istream& in, const std::string& source_name = "<stream>");
AnyModel load_model(const std::filesystem::path& path);

}  // namespace gwquant
