// Command-line front end: train, quantize, eval, sweep and report.
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <CLI11.hpp>

#include "dan/experiment.hpp"
#include "dan/regularizer.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace dan;

RegKind reg_kind_from(const std::string& name) {
  if (name == "mixed") return RegKind::kMixed;
  if (name == "l1") return RegKind::kL1;
  if (name == "l2") return RegKind::kL2;
  if (name == "none") return RegKind::kNone;
  throw CLI::ValidationError("--reg", "unknown regularizer kind: " + name);
}

std::vector<Index> parse_layers(const std::vector<std::int64_t>& sizes) {
  if (sizes.size() < 2) {
    throw CLI::ValidationError("--layers",
                               "need an input width and at least one layer");
  }
  std::vector<Index> layers;
  for (auto s : sizes) {
    if (s < 1) throw CLI::ValidationError("--layers", "sizes must be positive");
    layers.push_back(static_cast<Index>(s));
  }
  return layers;
}

std::ofstream open_or_fail(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(IoCode::kFileOpen, "cannot open " + path);
  return out;
}

struct TrainFlags {
  std::string data_dir;
  std::vector<std::int64_t> layers = {784, 800, 800};
  double lambda = 1e-4;
  double gamma = 0.5;
  std::string reg = "mixed";
  int epochs = 50;
  int batch = 100;
  double learning_rate = 0.05;
  int cd_steps = 1;
  std::uint64_t seed = 1;
  std::int64_t train_count = 10000;
};

void add_train_flags(CLI::App* cmd, TrainFlags* flags) {
  cmd->add_option("--data-dir", flags->data_dir, "directory with MNIST IDX files")
      ->envname("DAN_DATA_DIR")
      ->required();
  cmd->add_option("--layers", flags->layers,
                  "network widths, input first (e.g. 784,800,800)")
      ->delimiter(',');
  cmd->add_option("--lambda", flags->lambda, "decay strength");
  cmd->add_option("--gamma", flags->gamma, "row/column balance in [0,1]")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--reg", flags->reg, "regularizer: mixed|l1|l2|none");
  cmd->add_option("--epochs", flags->epochs)->check(CLI::NonNegativeNumber);
  cmd->add_option("--batch", flags->batch)->check(CLI::PositiveNumber);
  cmd->add_option("--lr", flags->learning_rate, "learning rate");
  cmd->add_option("--cd-steps", flags->cd_steps)->check(CLI::PositiveNumber);
  cmd->add_option("--seed", flags->seed);
  cmd->add_option("--train-count", flags->train_count,
                  "training images drawn from the train split");
}

TrainConfig train_config_from(const TrainFlags& flags) {
  TrainConfig cfg;
  cfg.learning_rate = flags.learning_rate;
  cfg.epochs = flags.epochs;
  cfg.batch_size = flags.batch;
  cfg.cd_steps = flags.cd_steps;
  cfg.seed = flags.seed;
  return cfg;
}

int cmd_train(const TrainFlags& flags, const std::string& out_path,
              std::string log_path) {
  if (log_path.empty()) log_path = out_path + ".train.csv";
  std::ofstream log = open_or_fail(log_path);
  log << "layer,epoch,recon_error,sigma_u0.1\n";

  const MnistPair data = load_mnist(
      flags.data_dir, static_cast<Index>(flags.train_count), 0, flags.seed);

  RegularizerConfig reg;
  reg.kind = reg_kind_from(flags.reg);
  reg.lambda = flags.lambda;
  reg.gamma = flags.gamma;

  DanModel model = train_stack(
      data.train.images, parse_layers(flags.layers), train_config_from(flags),
      reg, [&log](const LayerProgress& p) {
        log << p.layer << ',' << p.epoch << ',' << p.reconstruction_error
            << ',' << p.sigma_at_0_1 << '\n';
      });
  model.provenance.dataset_hash = data.train.source_hash;
  save_model(model, out_path);
  std::cout << "wrote " << out_path << " (progress log: " << log_path << ")\n";
  return 0;
}

int cmd_quantize(const std::string& model_path, const std::string& mode_name,
                 std::optional<double> threshold, std::optional<double> target,
                 const std::string& out_path, const std::string& report_path) {
  const LoadedModel loaded = load_model(model_path);
  const auto* dense = std::get_if<DanModel>(&loaded);
  if (dense == nullptr) {
    throw std::runtime_error("quantize expects a real-valued model file");
  }

  QuantMode mode;
  if (mode_name == "s") {
    mode = QuantMode::kSparseReal;
  } else if (mode_name == "b") {
    mode = QuantMode::kSparseBinary;
  } else if (mode_name == "B") {
    mode = QuantMode::kSparseBinaryBinaryFeatures;
  } else {
    throw CLI::ValidationError("--mode", "expected s, b or B");
  }

  const QuantizedModel quantized =
      threshold.has_value() ? quantize_at_threshold(*dense, *threshold, mode)
                            : quantize_at_sigma(*dense, *target, mode);
  save_model(quantized, out_path);

  const QuantizationReport report = memory_report(quantized);
  if (!report_path.empty()) {
    std::ofstream out = open_or_fail(report_path);
    write_csv(report, out);
  }
  write_csv(report, std::cout);
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_dir,
             const std::string& head_mode, const std::string& head_path,
             const std::string& head_out, std::uint64_t seed,
             std::string variant, bool binary_features,
             std::int64_t train_count, std::int64_t test_count,
             const std::string& stats_out) {
  const LoadedModel loaded = load_model(model_path);

  const MnistPair data =
      load_mnist(data_dir, static_cast<Index>(train_count),
                 static_cast<Index>(test_count), seed);

  Matrix train_features, test_features;
  double sigma_mean = 1.0;
  if (const auto* dense = std::get_if<DanModel>(&loaded)) {
    if (!dense->layers.empty() &&
        dense->layers.front().visible_count() != data.train.pixel_count()) {
      throw std::runtime_error("model input width does not match the data");
    }
    train_features = dense_features(dense->layers, data.train.images);
    test_features = dense_features(dense->layers, data.test.images);
    sigma_mean = memory_report(*dense).mean_sigma();
    if (variant.empty()) variant = "dense";
    if (!stats_out.empty()) {
      std::ofstream stats = open_or_fail(stats_out);
      stats << "layer,unit,mean_activation,mean_abs_centered\n";
      for (const UnitStat& s :
           feature_sparsity_stats(*dense, data.test.images)) {
        stats << s.layer << ',' << s.unit << ',' << s.mean_activation << ','
              << s.mean_abs_centered << '\n';
      }
    }
  } else {
    const auto& packed = std::get<PackedNetwork>(loaded);
    if (!packed.layers.empty() &&
        packed.layers.front().visible_count != data.train.pixel_count()) {
      throw std::runtime_error("model input width does not match the data");
    }
    if (!stats_out.empty()) {
      throw std::runtime_error(
          "--stats-out needs a real-valued model (activation statistics)");
    }
    const FeatureMode mode =
        binary_features ? FeatureMode::kBinary : FeatureMode::kReal;
    train_features = packed_features(packed.layers, data.train.images, mode);
    test_features = packed_features(packed.layers, data.test.images, mode);
    std::int64_t reserved = 0, total = 0;
    for (const SparseBinaryLayer& layer : packed.layers) {
      for (Index j = 0; j < layer.hidden_count; ++j) {
        reserved += static_cast<std::int64_t>(layer.in_degree(j));
      }
      total +=
          static_cast<std::int64_t>(layer.visible_count) * layer.hidden_count;
    }
    sigma_mean = total == 0
                     ? 0.0
                     : static_cast<double>(reserved) / static_cast<double>(total);
    if (variant.empty()) {
      variant =
          binary_features ? "sparse-binary-binary-features" : "sparse-binary";
    }
  }

  ClassifierHead head;
  if (head_mode == "retrain") {
    HeadConfig cfg;
    cfg.seed = Rng(seed).split(9100).seed();
    head = train_head(train_features, data.train.labels, 10, cfg);
    if (!head_out.empty()) save_head(head, head_out);
  } else if (head_mode == "load") {
    if (head_path.empty()) {
      throw CLI::ValidationError("--head-path",
                                 "required when --head load is used");
    }
    head = load_head(head_path);
  } else {
    throw CLI::ValidationError("--head", "expected retrain or load");
  }

  const double acc = accuracy(head, test_features, data.test.labels);
  std::cout << "variant,sigma,accuracy\n"
            << variant << ',' << sigma_mean << ',' << acc << '\n';
  return 0;
}

void write_sweep_header(std::ostream& out, std::size_t layer_count) {
  out << "param,value,variant,accuracy";
  for (std::size_t l = 1; l <= layer_count; ++l) {
    out << ",sigma_l" << l << ",normM_W_l" << l << ",normM_Wt_l" << l;
  }
  out << '\n';
}

void write_sweep_row(std::ostream& out, const std::string& param, double value,
                     const std::string& variant, double accuracy,
                     const std::vector<double>& sigmas,
                     const std::vector<double>& row_norms,
                     const std::vector<double>& col_norms) {
  out << param << ',' << value << ',' << variant << ',' << accuracy;
  for (std::size_t l = 0; l < sigmas.size(); ++l) {
    out << ',' << sigmas[l] << ',' << row_norms[l] << ',' << col_norms[l];
  }
  out << '\n';
}

int cmd_sweep(const std::string& param, const std::vector<double>& values,
              const TrainFlags& flags, const std::string& model_path,
              const std::string& out_path) {
  std::ofstream out = open_or_fail(out_path);

  Preset preset;
  preset.name = "sweep";
  preset.layer_sizes = parse_layers(flags.layers);
  preset.train_count = static_cast<Index>(flags.train_count);
  preset.train = train_config_from(flags);
  preset.lambda = flags.lambda;
  preset.gamma = flags.gamma;

  const MnistPair data =
      load_mnist(flags.data_dir, preset.train_count, 10000, flags.seed);
  write_sweep_header(out, preset.layer_sizes.size() - 1);

  if (param == "lambda" || param == "gamma") {
    const RegKind kind = reg_kind_from(flags.reg);
    const std::string variant = flags.reg;
    for (double value : values) {
      const double lambda = param == "lambda" ? value : flags.lambda;
      const double gamma = param == "gamma" ? value : flags.gamma;
      const TrainedSummary summary =
          train_summary(data, preset, kind, lambda, gamma, flags.seed,
                        /*with_accuracy=*/true, &std::cerr);
      write_sweep_row(out, param, value, variant, summary.accuracy,
                      summary.sigma_u01, summary.row_norms, summary.col_norms);
    }
    return 0;
  }

  if (param != "sigma") {
    throw CLI::ValidationError("--param", "expected lambda, gamma or sigma");
  }

  // Reserved-ratio sweep over a fixed base model: quantize per value.
  DanModel base;
  if (!model_path.empty()) {
    const LoadedModel loaded = load_model(model_path);
    const auto* dense = std::get_if<DanModel>(&loaded);
    if (dense == nullptr) {
      throw std::runtime_error("sigma sweeps need a real-valued base model");
    }
    base = *dense;
  } else {
    const TrainedSummary summary =
        train_summary(data, preset, reg_kind_from(flags.reg), flags.lambda,
                      flags.gamma, flags.seed, /*with_accuracy=*/false,
                      &std::cerr);
    base = summary.model;
  }

  for (double value : values) {
    const QuantizedModel pruned =
        quantize_at_sigma(base, value, QuantMode::kSparseReal);
    const QuantizedModel binary = binarize(pruned);
    const QuantizedModel binary_features = with_binary_features(binary);
    const QuantizedModel* variants[3] = {&pruned, &binary, &binary_features};
    const char* names[3] = {"s", "b", "B"};
    for (int m = 0; m < 3; ++m) {
      const QuantizedModel& q = *variants[m];
      const QuantizationReport report = memory_report(q);
      std::vector<double> sigmas, row_norms, col_norms;
      for (std::size_t l = 0; l < q.weights.size(); ++l) {
        sigmas.push_back(report.layers[l].sigma);
        row_norms.push_back(mixed_norm(q.weights[l]));
        col_norms.push_back(mixed_norm(q.weights[l].transpose()));
      }
      const double acc = eval_accuracy(q, data, flags.seed);
      write_sweep_row(out, param, value, names[m], acc, sigmas, row_norms,
                      col_norms);
    }
  }
  return 0;
}

int cmd_report(const std::string& preset_name, const std::string& data_dir,
               std::uint64_t seed, const std::string& out_path,
               const std::string& models_dir) {
  Preset preset = preset_by_name(preset_name);
  const MnistPair data =
      load_mnist(data_dir, preset.train_count, preset.test_count, seed);

  const PipelineResult result =
      run_table_pipeline(data, preset, seed, &std::cerr);

  if (!models_dir.empty()) {
    save_model(result.dbn, models_dir + "/dbn.danm");
    save_model(result.dan, models_dir + "/dan.danm");
  }

  std::ofstream out = open_or_fail(out_path);
  write_variant_csv_header(out);
  for (const VariantResult& row : result.rows) {
    write_variant_csv_row(out, row);
  }
  std::cout << "wrote " << out_path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse binary deep network toolkit"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "train a stack on MNIST");
  TrainFlags train_flags;
  std::string train_out, train_log;
  add_train_flags(train, &train_flags);
  train->add_option("--out", train_out, "output model file")->required();
  train->add_option("--log", train_log,
                    "progress CSV (default <out>.train.csv)");

  // quantize
  auto* quantize = app.add_subcommand("quantize", "prune and binarize a model");
  std::string q_model, q_mode = "s", q_out, q_report;
  double q_threshold = 0.0, q_sigma = 0.0;
  quantize->add_option("--model", q_model)->required();
  quantize->add_option("--mode", q_mode,
                       "s (sparse), b (binary), B (binary features)");
  auto* opt_threshold =
      quantize->add_option("--threshold", q_threshold, "prune |w| <= threshold");
  auto* opt_sigma =
      quantize->add_option("--sigma", q_sigma, "target reserved-weight ratio");
  quantize->add_option("--out", q_out)->required();
  quantize->add_option("--report", q_report, "per-layer report CSV");

  // eval
  auto* eval = app.add_subcommand("eval", "feature quality of a model");
  std::string e_model, e_data, e_head = "retrain", e_head_path, e_head_out;
  std::string e_variant, e_stats;
  std::uint64_t e_seed = 1;
  bool e_binary_features = false;
  std::int64_t e_train_count = 10000, e_test_count = 10000;
  eval->add_option("--model", e_model)->required();
  eval->add_option("--data-dir", e_data)->envname("DAN_DATA_DIR")->required();
  eval->add_option("--head", e_head, "retrain | load");
  eval->add_option("--head-path", e_head_path, "head file for --head load");
  eval->add_option("--head-out", e_head_out, "save the retrained head");
  eval->add_option("--seed", e_seed);
  eval->add_option("--variant", e_variant, "label for the CSV row");
  eval->add_flag("--binary-features", e_binary_features,
                 "threshold features at 0.5 (packed models)");
  eval->add_option("--train-count", e_train_count);
  eval->add_option("--test-count", e_test_count);
  eval->add_option("--stats-out", e_stats, "per-unit activation CSV");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "parameter sweeps as CSV");
  TrainFlags sweep_flags;
  sweep_flags.train_count = 2000;
  std::string s_param, s_out, s_model;
  std::vector<double> s_values;
  sweep->add_option("--param", s_param, "lambda | gamma | sigma")->required();
  sweep->add_option("--values", s_values)->delimiter(',')->required();
  add_train_flags(sweep, &sweep_flags);
  sweep->add_option("--model", s_model, "base model for sigma sweeps");
  sweep->add_option("--out", s_out)->required();

  // report
  auto* report = app.add_subcommand("report", "five-variant comparison table");
  std::string r_preset = "table2", r_data, r_out, r_models;
  std::uint64_t r_seed = 1;
  report->add_option("--preset", r_preset, "table2 | small");
  report->add_option("--data-dir", r_data)->envname("DAN_DATA_DIR")->required();
  report->add_option("--seed", r_seed);
  report->add_option("--out", r_out)->required();
  report->add_option("--models-dir", r_models, "also save the trained stacks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (train->parsed()) return cmd_train(train_flags, train_out, train_log);
    if (quantize->parsed()) {
      if (opt_threshold->count() + opt_sigma->count() != 1) {
        std::cerr << "quantize: give exactly one of --threshold or --sigma\n";
        return 2;
      }
      std::optional<double> threshold, target;
      if (opt_threshold->count() > 0) threshold = q_threshold;
      if (opt_sigma->count() > 0) target = q_sigma;
      return cmd_quantize(q_model, q_mode, threshold, target, q_out, q_report);
    }
    if (eval->parsed()) {
      return cmd_eval(e_model, e_data, e_head, e_head_path, e_head_out, e_seed,
                      e_variant, e_binary_features, e_train_count, e_test_count,
                      e_stats);
    }
    if (sweep->parsed()) {
      return cmd_sweep(s_param, s_values, sweep_flags, s_model, s_out);
    }
    if (report->parsed()) {
      return cmd_report(r_preset, r_data, r_seed, r_out, r_models);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
