#include "cgcn/cli.hpp"

#include "cgcn/io.hpp"
#include "cgcn/oracles.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>

namespace cgcn {
namespace {

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string dataset_name(const std::string& dir, const std::string& name) {
  if (!name.empty()) return name;
  std::filesystem::path p(dir);
  if (p.filename().empty()) p = p.parent_path();
  return p.filename().string();
}

int split_index(const std::string& split) {
  if (split == "train") return 0;
  if (split == "val" || split == "validation") return 1;
  if (split == "test") return 2;
  return 3;  // all
}

int do_train(const std::string& data, const std::string& name, const std::string& config_path,
             const std::string& out_path, const std::optional<std::uint64_t>& seed, bool quiet, std::ostream& out) {
  TrainConfig config = config_path.empty() ? TrainConfig{} : load_config(config_path);
  if (seed) config.seed = *seed;
  config.validate();
  DatasetManifest manifest;
  const Dataset ds = load_tudataset(data, dataset_name(data, name), &manifest);
  out << "dataset " << manifest.name << ": " << manifest.graphs << " graphs, " << manifest.nodes << " nodes, "
      << manifest.edges << " edges, " << manifest.classes << " classes, features " << to_string(manifest.features)
      << "\n";
  const auto splits = split_dataset(ds, config.split, config.seed);
  out << "split: " << splits[0].size() << " train / " << splits[1].size() << " val / " << splits[2].size()
      << " test (seed " << config.seed << ")\n";

  const TrainResult trained = train_layerwise(splits[0], config, [&](int layer, int epoch, double value, double eta) {
    if (!quiet) {
      out << "layer " << layer << " epoch " << epoch + 1 << " objective " << fixed(value, 6) << " lr " << eta
          << "\n";
    }
  });
  for (std::size_t l = 0; l < trained.traces.size(); ++l) {
    out << "layer " << l << " final objective " << fixed(trained.traces[l].back(), 6) << "\n";
  }
  static constexpr const char* kNames[] = {"train", "val", "test"};
  for (std::size_t s = 0; s < 3; ++s) {
    const Metrics m = evaluate(trained.model, splits[s]);
    out << kNames[s] << " accuracy " << fixed(m.accuracy) << " loss " << fixed(m.mean_loss) << "\n";
  }
  save_model(trained.model, out_path, format_config(config));
  out << "model written to " << out_path << "\n";
  return 0;
}

int do_eval(const std::string& model_path, const std::string& data, const std::string& name,
            const std::string& split, std::ostream& out) {
  const ModelArchive archive = load_model(model_path);
  const Dataset ds = load_tudataset(data, dataset_name(data, name));
  const int which = split_index(split);
  Dataset target = ds;
  if (which < 3) {
    std::istringstream echo(archive.config_echo);
    const TrainConfig config = parse_config(echo, model_path + " (config echo)");
    target = split_dataset(ds, config.split, config.seed)[static_cast<std::size_t>(which)];
  }
  if (target.feature_dim() != archive.model.input_dim()) {
    throw std::runtime_error("model expects " + std::to_string(archive.model.input_dim()) +
                             " node features, dataset has " + std::to_string(target.feature_dim()));
  }
  const Metrics m = evaluate(archive.model, target);
  out << split << " graphs " << target.size() << " accuracy " << fixed(m.accuracy) << " loss " << fixed(m.mean_loss)
      << "\n";
  return 0;
}

int do_inspect(const std::string& model_path, std::ostream& out) {
  const ModelArchive archive = load_model(model_path);
  const CgcnModel& model = archive.model;
  out << "archive version " << archive.version << ", shift " << to_string(model.shift_kind) << ", "
      << model.layers.size() << " layer(s), " << model.num_classes() << " classes\n";
  bool within = true;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const CgcnLayer& layer = model.layers[l];
    const double norm = nuclear_norm(layer.filters);
    const bool ok = norm <= layer.budget * (1 + 1e-9);
    within = within && ok;
    out << "layer " << l << ": input " << layer.input_dim() << ", output " << layer.output_dim() << ", hops "
        << layer.hops() << ", filters " << layer.filters.rows() << "x" << layer.filters.cols() << ", nuclear norm "
        << fixed(norm, 6) << " <= budget " << fixed(layer.budget, 6) << (ok ? " ok" : " VIOLATED") << "\n";
    for (const FactorizedKernel& fk : layer.kernels) {
      out << "  hop " << fk.hop << ": " << to_string(fk.spec.kind);
      if (fk.spec.kind == KernelKind::kGaussianRbf) out << " gamma " << fk.spec.gamma;
      out << ", " << (fk.is_nystrom() ? "nystrom" : "exact") << ", anchors " << fk.anchors.rows() << ", width "
          << fk.width() << "\n";
    }
  }
  for (std::size_t l = 0; l < model.hidden_readouts.size(); ++l) {
    out << "hidden readout " << l << ": " << model.hidden_readouts[l].weights.rows() << "x"
        << model.hidden_readouts[l].weights.cols() << "\n";
  }
  out << "readout: " << model.readout.weights.rows() << "x" << model.readout.weights.cols() << " + bias\n";
  return within ? 0 : 1;
}

int do_verify(std::uint64_t seed, const std::string& summary, std::ostream& out) {
  const std::vector<OracleReport> reports = run_all(seed);
  bool all = true;
  for (const OracleReport& r : reports) {
    out << format_report(r) << "\n";
    all = all && r.pass;
  }
  if (!summary.empty()) write_summary(reports, summary);
  out << (all ? "all oracles passed" : "oracle failures") << "\n";
  return all ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Convexified graph convolutional networks: train, evaluate, inspect and verify.", "cgcn"};
  app.require_subcommand(1);

  std::string data, name, config_path, out_path, model_path, split = "test", summary;
  std::uint64_t seed_value = 0;
  std::uint64_t verify_seed = 0;
  bool quiet = false;

  auto* train = app.add_subcommand("train", "Train a model layer by layer on a TUDataset directory.");
  train->add_option("--data", data, "Dataset directory holding <NAME>_A.txt etc.")->required()->check(CLI::ExistingDirectory);
  train->add_option("--name", name, "Dataset name prefix (default: directory name)");
  train->add_option("--config", config_path, "Config file (default: reference settings)")->check(CLI::ExistingFile);
  train->add_option("--out", out_path, "Output model archive")->required();
  auto* seed_opt = train->add_option("--seed", seed_value, "Master seed, overrides the config");
  train->add_flag("--quiet", quiet, "Do not print per-epoch objectives");
  train->footer(config_help());

  auto* eval = app.add_subcommand("eval", "Evaluate a saved model on a dataset split.");
  eval->add_option("--model", model_path, "Model archive")->required()->check(CLI::ExistingFile);
  eval->add_option("--data", data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--name", name, "Dataset name prefix (default: directory name)");
  eval->add_option("--split", split, "train | val | test | all, using the archived seed and ratios")
      ->check(CLI::IsMember({"train", "val", "validation", "test", "all"}));

  auto* inspect = app.add_subcommand("inspect", "Print layer shapes, nuclear norms against budgets and landmarks.");
  inspect->add_option("--model", model_path, "Model archive")->required()->check(CLI::ExistingFile);

  auto* verify = app.add_subcommand("verify", "Run the verification oracle suite.");
  verify->add_option("--seed", verify_seed, "Base seed of the oracle inputs");
  verify->add_option("--summary", summary, "Write name,pass,max_deviation lines to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const CLI::App* failing = &app;
    for (const CLI::App* sub : app.get_subcommands()) failing = sub;
    err << failing->help();
    return 2;
  }

  try {
    if (train->parsed()) {
      std::optional<std::uint64_t> seed;
      if (seed_opt->count() > 0) seed = seed_value;
      return do_train(data, name, config_path, out_path, seed, quiet, out);
    }
    if (eval->parsed()) return do_eval(model_path, data, name, split, out);
    if (inspect->parsed()) return do_inspect(model_path, out);
    if (verify->parsed()) return do_verify(verify_seed, summary, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace cgcn
