#include "cooc/commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cooc/bundle.hpp"
#include "cooc/error.hpp"
#include "cooc/pipeline.hpp"

namespace cooc {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p, bool config) {
  std::ifstream in(p);
  if (!in) {
    const auto msg = "cannot open " + p.string();
    if (config) throw ConfigError(msg);
    throw DataError(msg);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PipelineConfig resolve_config(const GlobalOptions& opts, std::ostream& log) {
  PipelineConfig cfg =
      opts.config ? parse_config(read_file(*opts.config, true)) : PipelineConfig{};
  if (opts.seed) cfg.seed = *opts.seed;
  log << "config:\n" << config_to_json(cfg) << "\n";
  return cfg;
}

void write_text(const std::optional<fs::path>& path, const std::string& text) {
  if (!path) {
    std::cout << text;
    return;
  }
  std::ofstream out(*path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path->string());
  out << text;
}

std::optional<fs::path> sibling(const std::optional<fs::path>& path,
                                const std::string& suffix) {
  if (!path) return std::nullopt;
  return path->parent_path() / (path->stem().string() + suffix + ".csv");
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

int cmd_synth(const fs::path& spec_path, const GlobalOptions& opts, std::ostream& log) {
  if (!opts.out) throw ConfigError("synth needs --out");
  const auto spec = synth_spec_from_json(read_file(spec_path, true));
  const auto seed = opts.seed.value_or(0);
  log << "synth spec:\n" << synth_spec_to_json(spec) << "\nseed: " << seed << "\n";
  const auto data = synth_dataset(spec, seed);
  save_dataset(data, *opts.out);
  log << "wrote " << data.size() << " videos, " << data.total_points()
      << " points to " << opts.out->string() << "\n";
  return kExitOk;
}

int cmd_fit(const fs::path& data_path, const GlobalOptions& opts, std::ostream& log) {
  if (!opts.out) throw ConfigError("fit needs --out for the bundle directory");
  const auto cfg = resolve_config(opts, log);
  const auto data = load_dataset(data_path);
  const auto model = fit_pipeline(data, cfg, opts.threads);
  save_bundle(model, *opts.out);
  log << "vocabulary: " << model.base_vocabulary.size() << " -> "
      << model.vocabulary.size() << " words\n";
  log << "training accuracy: " << percent(model.training_accuracy()) << "%\n";
  log << "bundle written to " << opts.out->string() << "\n";
  return kExitOk;
}

int cmd_predict(const fs::path& bundle_path, const fs::path& data_path,
                const GlobalOptions& opts, std::ostream& log) {
  const auto model = load_bundle(bundle_path);
  log << "config:\n" << config_to_json(model.config) << "\n";
  const auto data = load_dataset(data_path);
  const auto preds = predict(model, data, opts.threads);

  std::string table = "video_id,predicted\n";
  for (std::size_t i = 0; i < preds.size(); ++i)
    table += data.videos()[i].video_id + "," + preds[i] + "\n";

  std::vector<std::string> p, t;
  for (std::size_t i = 0; i < preds.size(); ++i)
    if (!data.videos()[i].action_class.empty()) {
      p.push_back(preds[i]);
      t.push_back(data.videos()[i].action_class);
    }
  if (t.empty()) {
    write_text(opts.out, table);
    log << "no truth labels; wrote predictions only\n";
    return kExitOk;
  }
  const auto report = evaluate(p, t, "bundle " + bundle_path.string());
  write_text(opts.out, accuracy_table(report));
  if (opts.out) {
    write_text(sibling(opts.out, "_confusion"), confusion_table(report));
    write_text(sibling(opts.out, "_predictions"), table);
  } else {
    std::cout << "\n" << confusion_table(report);
  }
  log << "accuracy: " << percent(report.overall_percent) << "% over " << t.size()
      << " labeled videos\n";
  return kExitOk;
}

int cmd_sweep(const std::optional<fs::path>& data_path, const GlobalOptions& opts,
              std::ostream& log) {
  const auto cfg = resolve_config(opts, log);
  TradeoffSweep sweep;
  if (!cfg.replay_rates.empty()) {
    log << "replay mode: " << cfg.replay_rates.size() << " injected rates\n";
    sweep = replay_sweep(cfg);
  } else {
    if (!data_path) throw ConfigError("sweep needs a data file unless replay.rates is set");
    sweep = run_sweep(load_dataset(*data_path), cfg, opts.threads);
  }
  write_text(opts.out, tradeoff_table(sweep));
  log << "best size: " << sweep.best_size << "\n";
  return kExitOk;
}

int cmd_eval(const fs::path& data_path, const GlobalOptions& opts, std::ostream& log) {
  const auto cfg = resolve_config(opts, log);
  const auto data = load_dataset(data_path);
  const auto cv = cross_validate(data, cfg, opts.threads);
  write_text(opts.out, accuracy_table(cv.pooled));
  if (opts.out)
    write_text(sibling(opts.out, "_confusion"), confusion_table(cv.pooled));
  else
    std::cout << "\n" << confusion_table(cv.pooled);
  for (std::size_t f = 0; f < cv.fold_accuracy.size(); ++f)
    log << "fold " << f + 1 << ": " << percent(cv.fold_accuracy[f]) << "%\n";
  log << "mean fold accuracy: " << percent(cv.mean_accuracy) << "% ("
      << cv.pooled.split << ")\n";
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& log) {
  CLI::App app{"Spatio-temporal co-occurrence action classifier"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions opts;
  std::string config, out;
  std::uint64_t seed = 0;
  auto* config_opt = app.add_option("--config", config, "JSON configuration file");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  app.add_option("--threads", opts.threads, "worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);
  auto* out_opt = app.add_option("--out", out, "output path");

  std::string spec, data, bundle;
  auto* synth = app.add_subcommand("synth", "generate a synthetic feature file");
  synth->add_option("spec", spec, "synthetic dataset spec (JSON)")->required();
  auto* fit = app.add_subcommand("fit", "fit the pipeline and write a model bundle");
  fit->add_option("data", data, "feature file")->required();
  auto* pred = app.add_subcommand("predict", "classify videos with a model bundle");
  pred->add_option("bundle", bundle, "bundle directory")->required();
  pred->add_option("data", data, "feature file")->required();
  auto* sweep = app.add_subcommand("sweep", "vocabulary size trade-off sweep");
  sweep->add_option("data", data, "feature file (omit in replay mode)");
  auto* eval = app.add_subcommand("eval", "cross-validated evaluation");
  eval->add_option("data", data, "feature file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, std::cout, log);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (*config_opt) opts.config = config;
  if (*seed_opt) opts.seed = seed;
  if (*out_opt) opts.out = out;

  try {
    if (*synth) return cmd_synth(spec, opts, log);
    if (*fit) return cmd_fit(data, opts, log);
    if (*pred) return cmd_predict(bundle, data, opts, log);
    if (*sweep)
      return cmd_sweep(data.empty() ? std::nullopt : std::optional<fs::path>(data),
                       opts, log);
    if (*eval) return cmd_eval(data, opts, log);
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace cooc
