#include "uprop/checkpoint.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "uprop/errors.hpp"

namespace uprop::io {

using json = nlohmann::ordered_json;

std::string serialize_checkpoint(const Checkpoint& ck) {
  const auto& m = ck.model;
  const auto spec = m.spec();
  const auto& tc = m.train_config;

  json doc;
  doc["format_version"] = kCheckpointFormatVersion;
  doc["dims"] = m.dims;
  doc["hyperparameters"] = {
      {"layers", spec.layers},         {"hidden", spec.hidden},
      {"dropout", spec.dropout},       {"sigma_floor", spec.sigma_floor},
      {"lookahead", tc.lookahead},     {"epochs", tc.epochs},
      {"lr", tc.learning_rate},        {"batch_size", tc.batch_size},
      {"window", tc.window_length},    {"rollout_reveal", tc.rollout_reveal},
      {"context_hide", tc.context_hide},
  };
  doc["norm"] = {{"mean", m.norm.mean}, {"std", m.norm.std}};
  json weights = json::object();
  for (const auto& [name, t] : m.net.named_tensors()) {
    weights[name] = {{"rows", t->rows}, {"cols", t->cols}, {"data", t->data}};
  }
  doc["weights"] = std::move(weights);
  doc["seed"] = tc.seed;
  doc["final_loss"] = ck.final_loss;
  return doc.dump(1) + "\n";
}

namespace {

template <typename T>
T field(const json& obj, const char* key) {
  if (!obj.contains(key)) throw DataError(std::string("checkpoint is missing \"") + key + "\"");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint field \"") + key + "\": " + e.what());
  }
}

Checkpoint parse_document(const json& doc) {
  const int version = field<int>(doc, "format_version");
  if (version != kCheckpointFormatVersion) {
    throw DataError("unsupported checkpoint format_version " + std::to_string(version));
  }

  const auto& hp = doc.at("hyperparameters");
  forecaster::ModelSpec spec;
  spec.dims = field<std::size_t>(doc, "dims");
  spec.layers = field<std::size_t>(hp, "layers");
  spec.hidden = field<std::size_t>(hp, "hidden");
  spec.dropout = field<double>(hp, "dropout");
  spec.sigma_floor = field<double>(hp, "sigma_floor");
  forecaster::TrainConfig tc;
  tc.lookahead = field<std::size_t>(hp, "lookahead");
  tc.epochs = field<std::size_t>(hp, "epochs");
  tc.learning_rate = field<double>(hp, "lr");
  tc.batch_size = field<std::size_t>(hp, "batch_size");
  tc.window_length = field<std::size_t>(hp, "window");
  tc.rollout_reveal = field<double>(hp, "rollout_reveal");
  tc.context_hide = field<double>(hp, "context_hide");
  tc.seed = field<std::uint64_t>(doc, "seed");

  data::NormStats norm;
  const auto& n = doc.at("norm");
  norm.mean = field<std::vector<double>>(n, "mean");
  norm.std = field<std::vector<double>>(n, "std");

  Checkpoint ck;
  try {
    ck.model = forecaster::UPropModel::create(spec, tc, std::move(norm), 0);
  } catch (const std::exception& e) {
    throw DataError(std::string("checkpoint hyperparameters invalid: ") + e.what());
  }
  const auto& weights = doc.at("weights");
  auto named = ck.model.net.named_tensors();
  if (weights.size() != named.size()) {
    throw DataError("checkpoint has " + std::to_string(weights.size()) + " tensors, expected " +
                    std::to_string(named.size()));
  }
  for (auto& [name, t] : named) {
    if (!weights.contains(name)) throw DataError("checkpoint is missing tensor " + name);
    const auto& w = weights.at(name);
    const auto rows = field<std::size_t>(w, "rows");
    const auto cols = field<std::size_t>(w, "cols");
    auto values = field<std::vector<double>>(w, "data");
    if (rows != t->rows || cols != t->cols || values.size() != rows * cols) {
      throw DataError("tensor " + name + " has the wrong shape");
    }
    t->data = std::move(values);
  }
  ck.final_loss = field<double>(doc, "final_loss");
  ck.model.validate();
  return ck;
}

}  // namespace

Checkpoint parse_checkpoint(std::string_view text) {
  try {
    return parse_document(json::parse(text));
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  out << serialize_checkpoint(checkpoint);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw MissingCheckpointError("checkpoint not found: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_checkpoint(ss.str());
}

}  // namespace uprop::io
