#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "uprop/forecaster.hpp"

namespace uprop::io {

inline constexpr int kCheckpointFormatVersion = 1;

struct Checkpoint {
  forecaster::UPropModel model;
  double final_loss = 0.0;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

/// JSON document with format_version, dims, hyperparameters, norm, seed,
/// final_loss and every parameter tensor as {rows, cols, data} (row-major).
/// Doubles are written in shortest round-trip form, so parse∘serialize is the
/// identity on the bit level.
std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint parse_checkpoint(std::string_view json_text);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
/// Throws MissingCheckpointError if the file does not exist, DataError if malformed.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace uprop::io
