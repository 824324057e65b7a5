// Copyright 2026 the cfscale authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cfscale/trainer.hpp"

namespace cfscale {

struct SweepConfig {
  ModelKind model;
  std::string dataset_path;
  FileFormat format = FileFormat::TsvUi;
  std::string dataset_name;            // label for the CSV
  std::vector<int> dims;               // strictly increasing
  TrainConfig train;
  std::optional<NoiseSpec> noise;
  std::optional<DropConfig> drop;
  std::string output_path;
  std::vector<std::uint64_t> seeds = {0};
  SplitSpec split_spec;
  int jobs = 1;
};

struct SweepPoint {
  std::string model;
  std::string dataset;
  int dim = 0;
  std::uint64_t seed = 0;
  std::string variant;
  double ndcg = 0.0;
  int epochs_trained = 0;
  double wall_seconds = 0.0;
  bool failed = false;
};

inline constexpr const char* kSweepCsvHeader =
    "model,dataset,dim,seed,variant,ndcg20,epochs_trained,wall_seconds";

struct SweepResult {
  std::vector<SweepPoint> points;
  // Mean NDCG per dim (over seeds), in ascending dim order.
  std::vector<std::pair<int, double>> mean_per_dim(
      const std::string& variant) const;
  bool all_completed() const;
};

// Streams rows to the output CSV as they complete; rows already present in
// the file are skipped, so a finished sweep reruns without any training.
SweepResult run_sweep(const SweepConfig& cfg);

// Baseline plus one variant per save_ratio in the grid, across all dims.
SweepResult compare_drop(const SweepConfig& cfg,
                         const std::vector<double>& save_ratios);

enum class CurveShape { Logarithmic, SinglePeak, DoublePeak, Other };

struct CurveClass {
  CurveShape shape = CurveShape::Other;
  std::vector<int> peak_dims;  // dims of counted interior maxima
  double log_fit_r2 = 0.0;
  double log_fit_slope = 0.0;
};

const char* shape_name(CurveShape s);

// Interior maxima with topographic prominence >= prominence_frac of the
// curve's range; logarithmic fit a + b*ln(dim) for the 0-peak case. An odd
// smooth_window > 1 applies a moving average before peak counting.
CurveClass classify_curve(const std::vector<std::pair<int, double>>& points,
                          double prominence_frac = 0.02,
                          double log_fit_r2_min = 0.9, int smooth_window = 1);

std::vector<SweepPoint> read_sweep_csv(const std::string& path);

}  // namespace cfscale
