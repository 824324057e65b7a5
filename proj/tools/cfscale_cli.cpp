// Copyright 2026 the cfscale authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cfscale/evaluate.hpp"
#include "cfscale/spectrum.hpp"
#include "cfscale/sweep.hpp"
#include "cfscale/trainer.hpp"

using namespace cfscale;

namespace {

// "2..1024" expands powers of 2; otherwise a comma list.
std::vector<int> parse_dims(const std::string& spec) {
  std::vector<int> dims;
  auto range = spec.find("..");
  if (range != std::string::npos) {
    int lo = std::stoi(spec.substr(0, range));
    int hi = std::stoi(spec.substr(range + 2));
    for (int d = lo; d <= hi; d *= 2) dims.push_back(d);
  } else {
    std::istringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) dims.push_back(std::stoi(tok));
  }
  return dims;
}

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> seeds;
  std::istringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) seeds.push_back(std::stoull(tok));
  return seeds;
}

std::string dataset_label(const std::string& path) {
  auto slash = path.find_last_of('/');
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = base.find_last_of('.');
  return dot == std::string::npos ? base : base.substr(0, dot);
}

struct CommonOpts {
  std::string model = "bpr";
  std::string data;
  std::string format = "tsv-ui";
  std::string dims = "2..1024";
  std::string seeds = "0";
  int epochs = 100;
  int patience = 10;
  int batch_size = 2048;
  double lr = 0.001;
  double noise_delta = 0.0;
  double drop_save_ratio = -1.0;
  bool drop_get_low = true;
  double sgl_gamma = 0.1;
  double sgl_tau = 0.2;
  double sgl_rho = 0.1;
  int layers = 2;
  std::string out = "sweep.csv";
  int jobs = 1;
  std::uint64_t split_seed = 42;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--model", o.model, "bpr, neumf, lightgcn, or sgl");
  cmd->add_option("--data", o.data, "interaction file path")->required();
  cmd->add_option("--format", o.format, "tsv-ui or tsv-uirt");
  cmd->add_option("--dims", o.dims, "dims, e.g. 2..1024 or 8,16,32");
  cmd->add_option("--seeds", o.seeds, "comma-separated seed list");
  cmd->add_option("--epochs", o.epochs, "max training epochs");
  cmd->add_option("--patience", o.patience, "early-stopping patience");
  cmd->add_option("--batch-size", o.batch_size, "mini-batch size");
  cmd->add_option("--lr", o.lr, "learning rate");
  cmd->add_option("--noise-delta", o.noise_delta, "injected noise ratio");
  cmd->add_option("--drop-save-ratio", o.drop_save_ratio,
                  "enable BPR-drop with this save ratio");
  cmd->add_option("--drop-get-low", o.drop_get_low,
                  "keep lowest-loss samples (default true)");
  cmd->add_option("--sgl-gamma", o.sgl_gamma, "contrastive weight");
  cmd->add_option("--sgl-tau", o.sgl_tau, "contrastive temperature");
  cmd->add_option("--sgl-rho", o.sgl_rho, "edge-dropout probability");
  cmd->add_option("--layers", o.layers, "propagation layers");
  cmd->add_option("--out", o.out, "output CSV path");
  cmd->add_option("--jobs", o.jobs, "parallel sweep points");
  cmd->add_option("--split-seed", o.split_seed, "train/valid/test split seed");
}

SweepConfig to_sweep_config(const CommonOpts& o) {
  SweepConfig cfg;
  if (o.model == "bpr") cfg.model = ModelKind::bpr();
  else if (o.model == "neumf") cfg.model = ModelKind::neumf();
  else if (o.model == "lightgcn") cfg.model = ModelKind::lightgcn(o.layers);
  else if (o.model == "sgl")
    cfg.model = ModelKind::sgl(o.layers, o.sgl_rho, o.sgl_gamma, o.sgl_tau);
  else throw CLI::ValidationError("--model", "unknown model: " + o.model);

  cfg.dataset_path = o.data;
  cfg.format = o.format == "tsv-uirt" ? FileFormat::TsvUirt : FileFormat::TsvUi;
  cfg.dataset_name = dataset_label(o.data);
  cfg.dims = parse_dims(o.dims);
  cfg.seeds = parse_seeds(o.seeds);
  cfg.train.max_epochs = o.epochs;
  cfg.train.patience = o.patience;
  cfg.train.batch_size = o.batch_size;
  cfg.train.lr = o.lr;
  if (cfg.model.variant == ModelVariant::Sgl)
    cfg.train.objective.kind = ObjectiveKind::SglComposite;
  if (o.noise_delta > 0.0) cfg.noise = NoiseSpec{o.noise_delta, 7};
  if (o.drop_save_ratio > 0.0) {
    DropConfig drop;
    drop.save_ratio = o.drop_save_ratio;
    drop.get_low = o.drop_get_low;
    cfg.drop = drop;
  }
  cfg.output_path = o.out;
  cfg.jobs = o.jobs;
  cfg.split_spec.seed = o.split_seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"collaborative-filtering embedding-scaling harness"};
  app.require_subcommand(1);

  CommonOpts sweep_opts, drop_opts;
  std::string drop_grid = "0.8,0.85,0.9,0.95";

  auto* sweep_cmd = app.add_subcommand("sweep", "run a dimension sweep");
  add_common(sweep_cmd, sweep_opts);

  auto* drop_cmd =
      app.add_subcommand("drop-compare", "baseline vs drop-loss grid");
  add_common(drop_cmd, drop_opts);
  drop_cmd->add_option("--grid", drop_grid, "save-ratio grid");

  std::string stats_path, stats_format = "tsv-ui";
  auto* stats_cmd = app.add_subcommand("stats", "print dataset statistics");
  stats_cmd->add_option("--data", stats_path)->required();
  stats_cmd->add_option("--format", stats_format);

  std::string classify_csv, classify_variant = "baseline";
  auto* classify_cmd =
      app.add_subcommand("classify", "classify a sweep curve shape");
  classify_cmd->add_option("--in", classify_csv, "sweep CSV")->required();
  classify_cmd->add_option("--variant", classify_variant);

  std::string spec_path, spec_format = "tsv-ui", spec_out = "spectrum.csv",
              adj_out;
  auto* spectrum_cmd =
      app.add_subcommand("spectrum", "export the adjacency spectrum");
  spectrum_cmd->add_option("--data", spec_path)->required();
  spectrum_cmd->add_option("--format", spec_format);
  spectrum_cmd->add_option("--out", spec_out);
  spectrum_cmd->add_option("--adj-out", adj_out,
                           "also export coordinate-format adjacency");

  CommonOpts train_opts;
  std::string params_out = "params.bin", history_out;
  auto* train_cmd = app.add_subcommand("train", "train one model instance");
  add_common(train_cmd, train_opts);
  train_cmd->add_option("--params-out", params_out);
  train_cmd->add_option("--history-out", history_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*stats_cmd) {
      auto d = load_interactions(stats_path, stats_format == "tsv-uirt"
                                                 ? FileFormat::TsvUirt
                                                 : FileFormat::TsvUi);
      std::cout << stats(d).csv_row() << "\n";
      return 0;
    }
    if (*classify_cmd) {
      auto points = read_sweep_csv(classify_csv);
      SweepResult r;
      r.points = points;
      auto curve = r.mean_per_dim(classify_variant);
      auto cls = classify_curve(curve);
      std::cout << shape_name(cls.shape) << " (peaks:";
      for (int d : cls.peak_dims) std::cout << " " << d;
      std::printf("; log-fit R2=%.4f slope=%.5f)\n", cls.log_fit_r2,
                  cls.log_fit_slope);
      return 0;
    }
    if (*spectrum_cmd) {
      auto d = load_interactions(spec_path, spec_format == "tsv-uirt"
                                                ? FileFormat::TsvUirt
                                                : FileFormat::TsvUi);
      auto adj = build_normalized_adjacency(d);
      if (!adj_out.empty()) export_coordinate(adj, adj_out);
      export_spectrum_csv(eigen_spectrum(adj), spec_out);
      std::cout << "wrote " << spec_out << "\n";
      return 0;
    }
    if (*train_cmd) {
      auto cfg = to_sweep_config(train_opts);
      Dataset full = load_interactions(cfg.dataset_path, cfg.format);
      auto [train_d, valid_d, test_d] = split(full, cfg.split_spec);
      if (cfg.noise && cfg.noise->delta > 0.0)
        train_d = inject_noise(train_d, *cfg.noise);
      TrainConfig tc = cfg.train;
      tc.dim = cfg.dims.front();
      tc.seed = cfg.seeds.front();
      if (cfg.drop) {
        tc.objective.kind = ObjectiveKind::BprDrop;
        tc.objective.drop = *cfg.drop;
      }
      auto result = train(cfg.model, train_d, valid_d, tc);
      save_params(result.params, cfg.model, params_out);
      if (!history_out.empty()) result.history.export_csv(history_out);
      const NormAdj* adj_ptr = nullptr;
      NormAdj adj;
      if (cfg.model.is_graph()) {
        adj = build_normalized_adjacency(train_d);
        adj_ptr = &adj;
      }
      auto report = evaluate(cfg.model, result.params, adj_ptr, train_d,
                             &valid_d, test_d, tc.k_eval);
      std::cout << report.csv_row() << "\n";
      return 0;
    }

    SweepResult result;
    if (*drop_cmd) {
      std::vector<double> grid;
      std::istringstream ss(drop_grid);
      std::string tok;
      while (std::getline(ss, tok, ',')) grid.push_back(std::stod(tok));
      result = compare_drop(to_sweep_config(drop_opts), grid);
    } else {
      result = run_sweep(to_sweep_config(sweep_opts));
    }
    for (const auto& p : result.points)
      if (p.failed)
        std::cerr << "point failed: dim=" << p.dim << " seed=" << p.seed
                  << " variant=" << p.variant << "\n";
    return result.all_completed() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
