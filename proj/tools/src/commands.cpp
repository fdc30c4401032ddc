#include "uprop_cli/commands.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "uprop/checkpoint.hpp"
#include "uprop/config.hpp"
#include "uprop/data.hpp"
#include "uprop/errors.hpp"
#include "uprop/evaluation.hpp"
#include "uprop/forecaster.hpp"
#include "uprop/novelty.hpp"
#include "uprop/synth.hpp"
#include "uprop/training.hpp"

namespace uprop::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

io::RunConfig config_or_default(const std::string& path) {
  return path.empty() ? io::RunConfig{} : io::load_run_config(path);
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  return f;
}

fs::path checkpoint_name(const fs::path& dir, std::size_t k) {
  return dir / fmt::format("model_k{}.json", k);
}

data::DatasetSplit load_split(const std::string& data_path, const io::RunConfig& config) {
  const auto series = data::load_series(data_path);
  if (series.empty()) throw DataError("no CSV files found at " + data_path);
  auto windows = data::window_all(series, config.window, config.effective_stride());
  return data::split(std::move(windows), {}, config.seed);
}

data::TimeSeries load_single(const std::string& path) {
  auto series = data::load_series(path);
  if (series.size() != 1) {
    throw DataError(fmt::format("expected one series at {}, found {}", path, series.size()));
  }
  return std::move(series.front());
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
  std::string out;
  std::size_t nodes = 10;
  std::size_t steps = 2000;
  std::uint64_t seed = 0;
  std::string config;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const auto config = config_or_default(a.config);
  const auto series = data::synth_cloud(a.nodes, a.steps, a.seed, config.synth);
  fs::create_directories(a.out);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto path = fs::path(a.out) / fmt::format("node_{:03d}.csv", i);
    data::save_csv(series[i], path);
    fmt::print(out, "{}\n", path.string());
  }
  return kOk;
}

// ---- mask ------------------------------------------------------------------

struct MaskArgs {
  std::string data;
  std::string out;
  double rate = 0.1;
  std::uint64_t seed = 0;
};

int cmd_mask(const MaskArgs& a, std::ostream& out) {
  const auto truth = load_single(a.data);
  const auto masked = data::emulate_missing(truth, a.rate, a.seed);
  const fs::path target(a.out);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  data::save_csv(masked, target);
  data::save_mask_csv(masked, data::mask_path_for(target));
  fmt::print(out, "{} missing of {}\n", masked.missing_count(), masked.steps * masked.dims);
  return kOk;
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  std::string data;
  std::string config;
  std::string model_out;
  std::string models_dir;
  std::string loss_out;
  std::optional<std::size_t> lookahead;
};

void train_one(const std::vector<data::TimeSeries>& windows, const io::RunConfig& config,
               std::size_t k, const fs::path& model_path, const fs::path& loss_path,
               std::ostream& out) {
  auto result = forecaster::train(
      windows, config.model_spec(), config.train_config(k), [&](std::size_t epoch, double loss) {
        fmt::print(out, "k={} epoch {} loss {}\n", k, epoch + 1, num(loss));
        out.flush();
      });
  io::save_checkpoint({result.model, result.loss_history.back()}, model_path);
  auto f = open_output(loss_path);
  f << "epoch,loss\n";
  for (std::size_t e = 0; e < result.loss_history.size(); ++e) {
    f << (e + 1) << ',' << num(result.loss_history[e]) << '\n';
  }
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const auto config = config_or_default(a.config);
  if (a.model_out.empty() == a.models_dir.empty()) {
    throw ConfigError("give exactly one of --model-out and --models-dir");
  }
  const auto parts = load_split(a.data, config);
  if (parts.train.empty()) throw DataError("not enough windows to train on");

  if (!a.model_out.empty()) {
    const std::size_t k = a.lookahead.value_or(config.lookahead);
    config.train_config(k).validate();
    const fs::path model_path(a.model_out);
    const fs::path loss_path =
        a.loss_out.empty() ? fs::path(model_path).replace_extension(".loss.csv") : fs::path(a.loss_out);
    if (model_path.has_parent_path()) fs::create_directories(model_path.parent_path());
    train_one(parts.train, config, k, model_path, loss_path, out);
    return kOk;
  }
  const fs::path dir(a.models_dir);
  fs::create_directories(dir);
  std::vector<std::size_t> ks = config.lookaheads;
  if (a.lookahead) ks = {*a.lookahead};
  for (std::size_t k : ks) {
    config.train_config(k).validate();
    const auto model_path = checkpoint_name(dir, k);
    train_one(parts.train, config, k, model_path, fs::path(model_path).replace_extension(".loss.csv"),
              out);
  }
  return kOk;
}

// ---- forecast --------------------------------------------------------------

struct ForecastArgs {
  std::string model;
  std::string data;
  std::size_t at = 0;
  std::optional<std::size_t> horizon;
  std::string format = "csv";
  std::string out;
};

int cmd_forecast(const ForecastArgs& a, std::ostream& out) {
  const auto model = io::load_checkpoint(a.model).model;
  const auto series = load_single(a.data);
  if (a.at >= series.steps) {
    throw RangeError(fmt::format("--at {} is outside the series (T={})", a.at, series.steps));
  }
  const std::size_t k = a.horizon.value_or(model.train_config.lookahead);
  if (k < 1) throw ConfigError("--horizon must be at least 1");

  const auto normalized = data::normalize(series.slice(0, a.at + 1), model.norm);
  const auto filtered = forecaster::filter_series(model, normalized);
  std::vector<prob::DistVector> inputs;
  inputs.reserve(filtered.size());
  for (const auto& s : filtered) inputs.push_back(s.input);
  const auto f = forecaster::rollout(model, inputs, k).denormalized(model.norm);

  std::ostringstream buf;
  if (a.format == "csv") {
    buf << "step,t,dim,mu,sigma,lower95,upper95\n";
    for (std::size_t j = 0; j < f.horizon(); ++j) {
      const auto [lo, hi] = prob::interval95(f.steps[j]);
      for (std::size_t d = 0; d < model.dims; ++d) {
        buf << (j + 1) << ',' << (f.origin_t + j + 1) << ',' << d << ',' << num(f.steps[j].mu[d])
            << ',' << num(f.steps[j].sigma[d]) << ',' << num(lo[d]) << ',' << num(hi[d]) << '\n';
      }
    }
  } else if (a.format == "json") {
    nlohmann::ordered_json doc;
    doc["origin"] = f.origin_t;
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < f.horizon(); ++j) {
      const auto [lo, hi] = prob::interval95(f.steps[j]);
      for (std::size_t d = 0; d < model.dims; ++d) {
        rows.push_back({{"step", j + 1},
                        {"t", f.origin_t + j + 1},
                        {"dim", d},
                        {"mu", f.steps[j].mu[d]},
                        {"sigma", f.steps[j].sigma[d]},
                        {"lower95", lo[d]},
                        {"upper95", hi[d]}});
      }
    }
    doc["rows"] = std::move(rows);
    buf << doc.dump(1) << '\n';
  } else {
    throw ConfigError("--format must be csv or json");
  }
  if (a.out.empty()) {
    out << buf.str();
  } else {
    open_output(a.out) << buf.str();
  }
  return kOk;
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateArgs {
  std::string models_dir;
  std::string data;
  std::string config;
  std::string out;
};

std::string rate_label(double r) { return fmt::format("{:g}%", r * 100.0); }

std::string difference_table(const evaluation::EvalGrid& g, std::size_t m) {
  std::string s = "missing";
  for (std::size_t k : g.lookaheads) s += fmt::format(",{}", k);
  s += '\n';
  for (std::size_t r = 0; r < g.rates.size(); ++r) {
    s += rate_label(g.rates[r]);
    for (std::size_t l = 0; l < g.lookaheads.size(); ++l) s += ',' + num(g.difference(r, l, m));
    s += '\n';
  }
  return s;
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const auto config = config_or_default(a.config);
  std::vector<forecaster::UPropModel> models;
  for (std::size_t k : config.lookaheads) {
    models.push_back(io::load_checkpoint(checkpoint_name(a.models_dir, k)).model);
    if (models.back().train_config.lookahead != k) {
      throw DataError(fmt::format("{} was trained with lookahead {}",
                                  checkpoint_name(a.models_dir, k).string(),
                                  models.back().train_config.lookahead));
    }
  }
  const auto parts = load_split(a.data, config);
  if (parts.test.empty()) throw DataError("no test windows");

  evaluation::EvalOptions opt;
  opt.missing_rates = config.missing_rates;
  opt.methods = config.methods;
  opt.seed = config.seed;
  const auto g = evaluation::evaluate_grid(models, parts.test, opt);

  std::string grid = "missing_rate,lookahead,method,nll,coverage95,count\n";
  for (std::size_t r = 0; r < g.rates.size(); ++r) {
    for (std::size_t l = 0; l < g.lookaheads.size(); ++l) {
      for (std::size_t m = 0; m < g.methods.size(); ++m) {
        const auto& c = g.cell(r, l, m);
        grid += fmt::format("{},{},{},{},{},{}\n", num(g.rates[r]), g.lookaheads[l],
                            evaluation::to_string(g.methods[m]), num(c.nll), num(c.coverage),
                            c.count);
      }
    }
  }
  std::map<std::string, std::string> tables;
  for (std::size_t m = 0; m < g.methods.size(); ++m) {
    if (g.methods[m] == evaluation::Method::kUprop) continue;
    tables[std::string(evaluation::to_string(g.methods[m]))] = difference_table(g, m);
  }

  if (!a.out.empty()) {
    fs::create_directories(a.out);
    open_output(fs::path(a.out) / "grid.csv") << grid;
    for (const auto& [name, table] : tables) {
      open_output(fs::path(a.out) / ("difference_" + name + ".csv")) << table;
    }
  }
  out << grid;
  for (const auto& [name, table] : tables) {
    fmt::print(out, "\n{} - uprop\n{}", name, table);
  }
  return kOk;
}

// ---- detect ----------------------------------------------------------------

struct DetectArgs {
  std::string model;
  std::string data;
  std::string method = "kl";
  double quantile = 0.99;
  std::string calibrate_on = "val";
  double calibration_fraction = 0.5;
  std::size_t near = 1;
  std::size_t far = 8;
  bool reverse_kl = false;
  std::string out;
};

int cmd_detect(const DetectArgs& a, std::ostream& out, std::ostream& err) {
  const auto model = io::load_checkpoint(a.model).model;
  const auto kind = novelty::parse_score_kind(a.method);
  const novelty::StreamOptions opts{a.near, a.far, a.reverse_kl};
  const auto series = data::normalize(load_single(a.data), model.norm);
  auto scores = novelty::score_stream(model, series, kind, opts);

  std::vector<double> calibration;
  if (a.calibrate_on == "val") {
    if (!(a.calibration_fraction > 0.0 && a.calibration_fraction < 1.0)) {
      throw ConfigError("--calibration-fraction must be in (0, 1)");
    }
    const auto cut = static_cast<std::size_t>(a.calibration_fraction * static_cast<double>(series.steps));
    for (const auto& s : scores) {
      if (s.t < cut) calibration.push_back(s.value);
    }
  } else {
    for (const auto& clean : data::load_series(a.calibrate_on)) {
      for (const auto& s : novelty::score_stream(model, data::normalize(clean, model.norm), kind, opts)) {
        calibration.push_back(s.value);
      }
    }
  }
  const auto threshold = novelty::calibrate_threshold(calibration, a.quantile, kind);
  novelty::apply_threshold(scores, threshold);

  std::ostringstream buf;
  buf << "t,kind,score,flagged\n";
  std::size_t flagged = 0;
  for (const auto& s : scores) {
    buf << s.t << ',' << novelty::to_string(s.kind) << ',' << num(s.value) << ','
        << (s.flagged ? 1 : 0) << '\n';
    flagged += s.flagged ? 1 : 0;
  }
  if (a.out.empty()) {
    out << buf.str();
  } else {
    open_output(a.out) << buf.str();
  }
  fmt::print(err, "threshold q={} cutoff={} from {} scores; flagged {} of {}\n",
             num(threshold.quantile), num(threshold.cutoff), calibration.size(), flagged,
             scores.size());
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Probabilistic multi-step forecasting with propagated input uncertainty", "uprop"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Write synthetic cloud-node series, one CSV per node");
  s->add_option("--out", synth.out, "Output directory")->required();
  s->add_option("--nodes", synth.nodes, "Number of nodes")->check(CLI::PositiveNumber);
  s->add_option("--steps", synth.steps, "Steps per node");
  s->add_option("--seed", synth.seed, "Random seed");
  s->add_option("--config", synth.config, "Run config JSON (synth section)");

  MaskArgs mask;
  auto* mk = app.add_subcommand("mask", "Hide random cells of a complete series");
  mk->add_option("--data", mask.data, "Complete series CSV")->required();
  mk->add_option("--out", mask.out, "Masked CSV; the mask sidecar is written next to it")->required();
  mk->add_option("--rate", mask.rate, "Per-cell missing probability");
  mk->add_option("--seed", mask.seed, "Random seed");

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train a forecaster on complete series");
  t->add_option("--data", train.data, "CSV file or directory")->required();
  t->add_option("--config", train.config, "Run config JSON");
  t->add_option("--model-out", train.model_out, "Checkpoint path for a single model");
  t->add_option("--models-dir", train.models_dir,
                "Directory receiving model_k<k>.json for every configured lookahead");
  t->add_option("--loss-out", train.loss_out, "Loss history CSV (single model)");
  t->add_option("--lookahead", train.lookahead, "Override the training lookahead");

  ForecastArgs fc;
  auto* f = app.add_subcommand("forecast", "Multi-step forecast with 95% intervals");
  f->add_option("--model", fc.model, "Checkpoint")->required();
  f->add_option("--data", fc.data, "Series CSV")->required();
  f->add_option("--at", fc.at, "Origin step (last consumed step)")->required();
  f->add_option("--horizon", fc.horizon, "Steps to forecast (default: model lookahead)");
  f->add_option("--format", fc.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  f->add_option("--out", fc.out, "Output file (default: stdout)");

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "Missing-rate x lookahead x method NLL grid");
  e->add_option("--models-dir", ev.models_dir, "Directory with model_k<k>.json")->required();
  e->add_option("--data", ev.data, "CSV file or directory")->required();
  e->add_option("--config", ev.config, "Run config JSON");
  e->add_option("--out", ev.out, "Directory for grid.csv and difference tables");

  DetectArgs dt;
  auto* d = app.add_subcommand("detect", "Novelty scores and flags for a series");
  d->add_option("--model", dt.model, "Checkpoint")->required();
  d->add_option("--data", dt.data, "Series CSV")->required();
  d->add_option("--method", dt.method, "kl, surprise or volatility")
      ->check(CLI::IsMember({"kl", "surprise", "volatility"}));
  d->add_option("--quantile", dt.quantile, "Calibration quantile");
  d->add_option("--calibrate-on", dt.calibrate_on,
                "\"val\" (leading part of --data) or a clean CSV file or directory");
  d->add_option("--calibration-fraction", dt.calibration_fraction,
                "Leading fraction of the stream used with --calibrate-on val");
  d->add_option("--near", dt.near, "Near origin offset for kl");
  d->add_option("--far", dt.far, "Far origin offset for kl");
  d->add_flag("--reverse-kl", dt.reverse_kl, "Score KL(q||p) instead of KL(p||q)");
  d->add_option("--out", dt.out, "Output file (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*s) return cmd_synth(synth, out);
    if (*mk) return cmd_mask(mask, out);
    if (*t) return cmd_train(train, out);
    if (*f) return cmd_forecast(fc, out);
    if (*e) return cmd_evaluate(ev, out);
    if (*d) return cmd_detect(dt, out, err);
  } catch (const ConfigError& ex) {
    fmt::print(err, "config error: {}\n", ex.what());
    return kConfigError;
  } catch (const MissingCheckpointError& ex) {
    fmt::print(err, "missing checkpoint: {}\n", ex.what());
    return kMissingCheckpoint;
  } catch (const DataError& ex) {
    fmt::print(err, "data error: {}\n", ex.what());
    return kDataError;
  } catch (const RangeError& ex) {
    fmt::print(err, "range error: {}\n", ex.what());
    return kDataError;
  } catch (const ShapeError& ex) {
    fmt::print(err, "shape error: {}\n", ex.what());
    return kDataError;
  } catch (const DomainError& ex) {
    fmt::print(err, "domain error: {}\n", ex.what());
    return kDataError;
  } catch (const fs::filesystem_error& ex) {
    fmt::print(err, "file error: {}\n", ex.what());
    return kDataError;
  } catch (const std::exception& ex) {
    fmt::print(err, "error: {}\n", ex.what());
    return kFailure;
  }
  return kFailure;
}

}  // namespace uprop::cli
