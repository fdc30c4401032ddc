#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uprop/evaluation.hpp"
#include "uprop/forecaster.hpp"
#include "uprop/synth.hpp"

namespace uprop::io {

/// Run configuration shared by the CLI commands. Every key is optional;
/// unknown keys and out-of-range values are rejected with ConfigError.
struct RunConfig {
  std::size_t dims = 3;
  std::size_t layers = 3;
  std::size_t hidden = 64;
  double dropout = 0.2;
  std::size_t lookahead = 2;
  std::size_t epochs = 20;
  double lr = 0.001;
  std::size_t batch_size = 32;
  std::size_t window = 120;
  std::optional<std::size_t> stride;  // defaults to window
  double sigma_floor = 1e-3;
  double rollout_reveal = 1.0;
  double context_hide = 0.6;
  std::uint64_t seed = 0;
  std::vector<double> missing_rates{0.05, 0.1, 0.2, 0.5};
  std::vector<std::size_t> lookaheads{2, 4, 8, 16};
  std::vector<evaluation::Method> methods{evaluation::Method::kUprop, evaluation::Method::kMean,
                                          evaluation::Method::kSample};
  data::SynthParams synth;

  std::size_t effective_stride() const { return stride.value_or(window); }
  forecaster::ModelSpec model_spec() const;
  /// Training settings for lookahead `k` (the config's own lookahead if unset).
  forecaster::TrainConfig train_config(std::optional<std::size_t> k = std::nullopt) const;
  void validate() const;
};

RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path);
std::string serialize_run_config(const RunConfig& config);

}  // namespace uprop::io
