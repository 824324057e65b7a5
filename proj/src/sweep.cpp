// Copyright 2026 the cfscale authors
// SPDX-License-Identifier: Apache-2.0

#include "cfscale/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "cfscale/errors.hpp"

namespace cfscale {

std::vector<std::pair<int, double>> SweepResult::mean_per_dim(
    const std::string& variant) const {
  std::map<int, std::pair<double, int>> acc;
  for (const auto& p : points) {
    if (p.failed || p.variant != variant) continue;
    acc[p.dim].first += p.ndcg;
    acc[p.dim].second += 1;
  }
  std::vector<std::pair<int, double>> out;
  for (const auto& [dim, sc] : acc)
    out.emplace_back(dim, sc.first / (double)sc.second);
  return out;
}

bool SweepResult::all_completed() const {
  return std::none_of(points.begin(), points.end(),
                      [](const SweepPoint& p) { return p.failed; });
}

std::vector<SweepPoint> read_sweep_csv(const std::string& path) {
  std::vector<SweepPoint> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      first = false;
      continue;
    }
    if (line.empty()) continue;
    std::istringstream ss(line);
    SweepPoint p;
    std::string field;
    std::getline(ss, p.model, ',');
    std::getline(ss, p.dataset, ',');
    std::getline(ss, field, ',');
    p.dim = std::stoi(field);
    std::getline(ss, field, ',');
    p.seed = std::stoull(field);
    std::getline(ss, p.variant, ',');
    std::getline(ss, field, ',');
    p.failed = field == "failed";
    if (!p.failed) p.ndcg = std::stod(field);
    std::getline(ss, field, ',');
    p.epochs_trained = std::stoi(field);
    std::getline(ss, field, ',');
    p.wall_seconds = std::stod(field);
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

std::string point_key(const SweepPoint& p) {
  return p.model + "|" + p.dataset + "|" + std::to_string(p.dim) + "|" +
         std::to_string(p.seed) + "|" + p.variant;
}

std::string format_row(const SweepPoint& p) {
  char buf[256];
  if (p.failed)
    std::snprintf(buf, sizeof(buf), "%s,%s,%d,%llu,%s,failed,%d,%.3f",
                  p.model.c_str(), p.dataset.c_str(), p.dim,
                  (unsigned long long)p.seed, p.variant.c_str(),
                  p.epochs_trained, p.wall_seconds);
  else
    std::snprintf(buf, sizeof(buf), "%s,%s,%d,%llu,%s,%.6f,%d,%.3f",
                  p.model.c_str(), p.dataset.c_str(), p.dim,
                  (unsigned long long)p.seed, p.variant.c_str(), p.ndcg,
                  p.epochs_trained, p.wall_seconds);
  return buf;
}

struct WorkItem {
  int dim;
  std::uint64_t seed;
  std::string variant;
  std::optional<DropConfig> drop;
};

std::string variant_label(const std::optional<DropConfig>& drop,
                          const ObjectiveConfig& obj) {
  if (drop) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "drop%.2f", drop->save_ratio);
    return buf;
  }
  return obj.kind == ObjectiveKind::SglComposite ? "sgl" : "baseline";
}

SweepResult run_items(const SweepConfig& cfg,
                      const std::vector<WorkItem>& items) {
  if (cfg.dims.size() < 1) throw ConfigError("sweep needs at least one dim");
  for (std::size_t i = 1; i < cfg.dims.size(); ++i)
    if (cfg.dims[i] <= cfg.dims[i - 1])
      throw ConfigError("dims must be strictly increasing");

  Dataset full = load_interactions(cfg.dataset_path, cfg.format);
  auto [train_d, valid_d, test_d] = split(full, cfg.split_spec);
  if (cfg.noise && cfg.noise->delta > 0.0)
    train_d = inject_noise(train_d, *cfg.noise);

  SweepResult result;
  std::map<std::string, SweepPoint> done;
  for (auto& p : read_sweep_csv(cfg.output_path)) {
    done.emplace(point_key(p), p);
  }

  const bool fresh = done.empty() && !std::filesystem::exists(cfg.output_path);
  std::ofstream out;
  if (!cfg.output_path.empty()) {
    out.open(cfg.output_path, std::ios::app);
    if (!out) throw ConfigError("cannot open output file: " + cfg.output_path);
    if (fresh) out << kSweepCsvHeader << "\n";
  }

  std::vector<WorkItem> pending;
  for (const auto& item : items) {
    SweepPoint probe;
    probe.model = variant_name(cfg.model.variant);
    probe.dataset = cfg.dataset_name;
    probe.dim = item.dim;
    probe.seed = item.seed;
    probe.variant = item.variant;
    auto it = done.find(point_key(probe));
    if (it != done.end() && !it->second.failed)
      result.points.push_back(it->second);
    else
      pending.push_back(item);
  }

  std::mutex io_mutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t idx = next.fetch_add(1);
      if (idx >= pending.size()) return;
      const auto& item = pending[idx];
      SweepPoint p;
      p.model = variant_name(cfg.model.variant);
      p.dataset = cfg.dataset_name;
      p.dim = item.dim;
      p.seed = item.seed;
      p.variant = item.variant;
      auto t0 = std::chrono::steady_clock::now();
      try {
        TrainConfig tc = cfg.train;
        tc.dim = item.dim;
        tc.seed = item.seed;
        if (item.drop) {
          tc.objective.kind = ObjectiveKind::BprDrop;
          tc.objective.drop = *item.drop;
        }
        auto trained = train(cfg.model, train_d, valid_d, tc);
        const NormAdj* adj_ptr = nullptr;
        NormAdj adj;
        if (cfg.model.is_graph()) {
          adj = build_normalized_adjacency(train_d);
          adj_ptr = &adj;
        }
        auto report = evaluate(cfg.model, trained.params, adj_ptr, train_d,
                               &valid_d, test_d, cfg.train.k_eval);
        p.ndcg = report.ndcg_at_k;
        p.epochs_trained = (int)trained.history.epochs.size();
      } catch (const std::exception&) {
        p.failed = true;
      }
      p.wall_seconds = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
      std::lock_guard<std::mutex> lock(io_mutex);
      result.points.push_back(p);
      if (out.is_open()) {
        out << format_row(p) << "\n";
        out.flush();
      }
    }
  };

  const int jobs = std::max(cfg.jobs, 1);
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::sort(result.points.begin(), result.points.end(),
            [](const SweepPoint& a, const SweepPoint& b) {
              return std::tie(a.variant, a.dim, a.seed) <
                     std::tie(b.variant, b.dim, b.seed);
            });
  return result;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg) {
  std::vector<WorkItem> items;
  const std::string label = variant_label(cfg.drop, cfg.train.objective);
  for (int dim : cfg.dims)
    for (auto seed : cfg.seeds) items.push_back({dim, seed, label, cfg.drop});
  return run_items(cfg, items);
}

SweepResult compare_drop(const SweepConfig& cfg,
                         const std::vector<double>& save_ratios) {
  if (save_ratios.empty()) throw ConfigError("drop grid must be non-empty");
  std::vector<WorkItem> items;
  for (int dim : cfg.dims)
    for (auto seed : cfg.seeds) {
      items.push_back({dim, seed, "baseline", std::nullopt});
      for (double ratio : save_ratios) {
        DropConfig drop = cfg.drop.value_or(DropConfig{});
        drop.save_ratio = ratio;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "drop%.2f", ratio);
        items.push_back({dim, seed, buf, drop});
      }
    }
  return run_items(cfg, items);
}

const char* shape_name(CurveShape s) {
  switch (s) {
    case CurveShape::Logarithmic: return "logarithmic";
    case CurveShape::SinglePeak: return "single-peak";
    case CurveShape::DoublePeak: return "double-peak";
    case CurveShape::Other: return "other";
  }
  return "?";
}

CurveClass classify_curve(const std::vector<std::pair<int, double>>& points,
                          double prominence_frac, double log_fit_r2_min,
                          int smooth_window) {
  const int n = (int)points.size();
  if (n < 3) throw ConfigError("curve classification needs >= 3 points");
  if (smooth_window < 1 || smooth_window % 2 == 0)
    throw ConfigError("smooth_window must be odd and >= 1");
  for (int i = 1; i < n; ++i)
    if (points[i].first <= points[i - 1].first)
      throw ConfigError("points must be in ascending dim order");

  // moving average; endpoints average the available neighbors
  const int half = smooth_window / 2;
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    int cnt = 0;
    for (int j = std::max(0, i - half); j <= std::min(n - 1, i + half); ++j) {
      sum += points[j].second;
      ++cnt;
    }
    s[i] = sum / cnt;
  }

  const double range =
      *std::max_element(s.begin(), s.end()) - *std::min_element(s.begin(), s.end());
  CurveClass cls;
  for (int i = 1; i + 1 < n; ++i) {
    if (!(s[i] > s[i - 1] && s[i] >= s[i + 1])) continue;
    // topographic prominence: walk outward until higher ground, track minima
    double key_saddle = -INFINITY;
    bool higher_found = false;
    for (int side = 0; side < 2; ++side) {
      double low = s[i];
      bool higher = false;
      for (int j = i + (side == 0 ? -1 : 1); j >= 0 && j < n;
           j += (side == 0 ? -1 : 1)) {
        if (s[j] > s[i]) { higher = true; break; }
        low = std::min(low, s[j]);
      }
      if (higher) {
        key_saddle = std::max(key_saddle, low);
        higher_found = true;
      } else {
        key_saddle = std::max(key_saddle, low);
      }
    }
    (void)higher_found;
    double prominence = s[i] - key_saddle;
    if (range > 0.0 && prominence >= prominence_frac * range)
      cls.peak_dims.push_back(points[i].first);
  }

  // least-squares fit ndcg = a + b*ln(dim) on the raw points
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (const auto& [dim, y] : points) {
    double x = std::log((double)dim);
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
  }
  double denom = n * sxx - sx * sx;
  if (denom > 0) {
    cls.log_fit_slope = (n * sxy - sx * sy) / denom;
    double a = (sy - cls.log_fit_slope * sx) / n;
    double ss_res = 0, ss_tot = 0, mean_y = sy / n;
    for (const auto& [dim, y] : points) {
      double pred = a + cls.log_fit_slope * std::log((double)dim);
      ss_res += (y - pred) * (y - pred);
      ss_tot += (y - mean_y) * (y - mean_y);
    }
    cls.log_fit_r2 = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  }

  const int peaks = (int)cls.peak_dims.size();
  if (peaks == 0 && cls.log_fit_r2 >= log_fit_r2_min && cls.log_fit_slope > 0)
    cls.shape = CurveShape::Logarithmic;
  else if (peaks == 1)
    cls.shape = CurveShape::SinglePeak;
  else if (peaks == 2)
    cls.shape = CurveShape::DoublePeak;
  else
    cls.shape = CurveShape::Other;
  return cls;
}

}  // namespace cfscale
