#include "uprop/config.hpp"

#include <fstream>
#include <algorithm>
#include <map>
#include <sstream>

#include "json.hpp"
#include "uprop/errors.hpp"

namespace uprop::io {

using json = nlohmann::ordered_json;

forecaster::ModelSpec RunConfig::model_spec() const {
  return forecaster::ModelSpec{dims, layers, hidden, dropout, sigma_floor};
}

forecaster::TrainConfig RunConfig::train_config(std::optional<std::size_t> k) const {
  forecaster::TrainConfig tc;
  tc.lookahead = k.value_or(lookahead);
  tc.epochs = epochs;
  tc.learning_rate = lr;
  tc.batch_size = batch_size;
  tc.window_length = window;
  tc.seed = seed;
  tc.rollout_reveal = rollout_reveal;
  tc.context_hide = context_hide;
  return tc;
}

void RunConfig::validate() const {
  model_spec().validate();
  train_config().validate();
  if (effective_stride() < 1) throw ConfigError("stride must be at least 1");
  if (missing_rates.empty()) throw ConfigError("missing_rates must not be empty");
  for (double r : missing_rates) {
    if (!(r >= 0.0 && r < 1.0)) throw ConfigError("missing rates must be in [0, 1)");
  }
  if (lookaheads.empty()) throw ConfigError("lookaheads must not be empty");
  for (std::size_t k : lookaheads) {
    if (k < 1 || k >= window) throw ConfigError("each lookahead must satisfy 1 <= k < window");
  }
  if (methods.empty()) throw ConfigError("methods must not be empty");
  if (std::find(methods.begin(), methods.end(), evaluation::Method::kUprop) == methods.end()) {
    throw ConfigError("methods must include uprop (differences are taken against it)");
  }
  if (!(synth.period > 0.0)) throw ConfigError("synth.period must be positive");
  if (!(synth.ar_coefficient > -1.0 && synth.ar_coefficient < 1.0) ||
      !(synth.cpu_ar_coefficient > -1.0 && synth.cpu_ar_coefficient < 1.0)) {
    throw ConfigError("synth AR coefficients must be in (-1, 1)");
  }
  if (!(synth.traffic_correlation >= 0.0 && synth.traffic_correlation <= 1.0)) {
    throw ConfigError("synth.traffic_correlation must be in [0, 1]");
  }
  if (synth.ar_noise < 0.0 || synth.cpu_noise < 0.0 || synth.node_level_spread < 0.0) {
    throw ConfigError("synth noise and spread parameters must be nonnegative");
  }
}

namespace {

template <typename T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key \"" + key + "\" has the wrong type");
  }
}

std::size_t get_count(const json& j, const std::string& key) {
  if (!j.is_number_integer() || (j.is_number_integer() && j.get<long long>() < 0)) {
    throw ConfigError("config key \"" + key + "\" must be a nonnegative integer");
  }
  return j.get<std::size_t>();
}

double get_real(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("config key \"" + key + "\" must be a number");
  return j.get<double>();
}

void parse_synth(const json& j, data::SynthParams& p) {
  if (!j.is_object()) throw ConfigError("config key \"synth\" must be an object");
  const std::map<std::string, double data::SynthParams::*> fields = {
      {"period", &data::SynthParams::period},
      {"seasonal_amplitude", &data::SynthParams::seasonal_amplitude},
      {"ar_coefficient", &data::SynthParams::ar_coefficient},
      {"ar_noise", &data::SynthParams::ar_noise},
      {"traffic_correlation", &data::SynthParams::traffic_correlation},
      {"base_log_level", &data::SynthParams::base_log_level},
      {"node_level_spread", &data::SynthParams::node_level_spread},
      {"cpu_bias", &data::SynthParams::cpu_bias},
      {"cpu_gain", &data::SynthParams::cpu_gain},
      {"cpu_ar_coefficient", &data::SynthParams::cpu_ar_coefficient},
      {"cpu_noise", &data::SynthParams::cpu_noise},
  };
  for (const auto& [key, value] : j.items()) {
    const auto it = fields.find(key);
    if (it == fields.end()) throw ConfigError("unknown config key \"synth." + key + "\"");
    p.*(it->second) = get_real(value, "synth." + key);
  }
}

}  // namespace

RunConfig parse_run_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  RunConfig c;
  for (const auto& [key, v] : doc.items()) {
    if (key == "dims") c.dims = get_count(v, key);
    else if (key == "layers") c.layers = get_count(v, key);
    else if (key == "hidden") c.hidden = get_count(v, key);
    else if (key == "dropout") c.dropout = get_real(v, key);
    else if (key == "lookahead") c.lookahead = get_count(v, key);
    else if (key == "epochs") c.epochs = get_count(v, key);
    else if (key == "lr") c.lr = get_real(v, key);
    else if (key == "batch_size") c.batch_size = get_count(v, key);
    else if (key == "window") c.window = get_count(v, key);
    else if (key == "stride") c.stride = get_count(v, key);
    else if (key == "sigma_floor") c.sigma_floor = get_real(v, key);
    else if (key == "rollout_reveal") c.rollout_reveal = get_real(v, key);
    else if (key == "context_hide") c.context_hide = get_real(v, key);
    else if (key == "seed") c.seed = get_as<std::uint64_t>(v, key);
    else if (key == "missing_rates") {
      if (!v.is_array()) throw ConfigError("missing_rates must be an array");
      c.missing_rates.clear();
      for (const auto& r : v) c.missing_rates.push_back(get_real(r, key));
    } else if (key == "lookaheads") {
      if (!v.is_array()) throw ConfigError("lookaheads must be an array");
      c.lookaheads.clear();
      for (const auto& k : v) c.lookaheads.push_back(get_count(k, key));
    } else if (key == "methods") {
      if (!v.is_array()) throw ConfigError("methods must be an array");
      c.methods.clear();
      for (const auto& m : v) c.methods.push_back(evaluation::parse_method(get_as<std::string>(m, key)));
    } else if (key == "synth") {
      parse_synth(v, c.synth);
    } else {
      throw ConfigError("unknown config key \"" + key + "\"");
    }
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string serialize_run_config(const RunConfig& c) {
  json doc;
  doc["dims"] = c.dims;
  doc["layers"] = c.layers;
  doc["hidden"] = c.hidden;
  doc["dropout"] = c.dropout;
  doc["lookahead"] = c.lookahead;
  doc["epochs"] = c.epochs;
  doc["lr"] = c.lr;
  doc["batch_size"] = c.batch_size;
  doc["window"] = c.window;
  doc["stride"] = c.effective_stride();
  doc["sigma_floor"] = c.sigma_floor;
  doc["rollout_reveal"] = c.rollout_reveal;
  doc["context_hide"] = c.context_hide;
  doc["seed"] = c.seed;
  doc["missing_rates"] = c.missing_rates;
  doc["lookaheads"] = c.lookaheads;
  json methods = json::array();
  for (auto m : c.methods) methods.push_back(std::string(evaluation::to_string(m)));
  doc["methods"] = methods;
  const auto& p = c.synth;
  doc["synth"] = {{"period", p.period},
                  {"seasonal_amplitude", p.seasonal_amplitude},
                  {"ar_coefficient", p.ar_coefficient},
                  {"ar_noise", p.ar_noise},
                  {"traffic_correlation", p.traffic_correlation},
                  {"base_log_level", p.base_log_level},
                  {"node_level_spread", p.node_level_spread},
                  {"cpu_bias", p.cpu_bias},
                  {"cpu_gain", p.cpu_gain},
                  {"cpu_ar_coefficient", p.cpu_ar_coefficient},
                  {"cpu_noise", p.cpu_noise}};
  return doc.dump(2) + "\n";
}

}  // namespace uprop::io
