// src/protocol.cpp

// Copyright 2026 The IRS Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "irs/protocol.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "irs/incremental.hpp"

namespace irs {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string mode_name(ProtocolMode m) {
  switch (m) {
    case ProtocolMode::kBatch: return "batch";
    case ProtocolMode::kIncremental: return "incremental";
    case ProtocolMode::kActive: return "active";
  }
  return "?";
}

ProtocolMode parse_mode(const std::string& s) {
  if (s == "batch") return ProtocolMode::kBatch;
  if (s == "incremental") return ProtocolMode::kIncremental;
  if (s == "active") return ProtocolMode::kActive;
  throw Error("unknown protocol mode: " + s);
}

std::optional<KernelKind> parse_kernel(const std::string& s) {
  if (s == "none") return std::nullopt;
  if (s == "rbf") return KernelKind::kRbf;
  if (s == "linear") return KernelKind::kLinear;
  throw Error("unknown kernel: " + s);
}

std::string kernel_name(std::optional<KernelKind> k) {
  if (!k) return "none";
  return *k == KernelKind::kRbf ? "rbf" : "linear";
}

std::vector<double> mean_curve(const std::vector<std::vector<double>>& curves) {
  if (curves.empty()) return {};
  std::vector<double> out(curves[0].size(), 0.0);
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < out.size() && i < c.size(); ++i) out[i] += c[i];
  }
  for (double& v : out) v /= static_cast<double>(curves.size());
  return out;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

Matrix gather_cols(const Matrix& m, const std::vector<Index>& cols) {
  Matrix out(m.rows(), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Index>(i)) = m.col(cols[i]);
  return out;
}

FeatureMatrix load_data(const ProtocolConfig& c) {
  if (c.manifest) return load_features(*c.manifest).features;
  return gen_synthetic(c.synthetic);
}

struct TestSet {
  Matrix probes, gallery;
  std::vector<Label> probe_ids, gallery_ids;
};

TestSet test_set(const FeatureMatrix& fm, const SplitSpec& split, bool single_shot) {
  std::vector<Index> g = columns_where(fm, split.test_ids, split.gallery_cam);
  if (single_shot) g = single_shot_columns(fm, g, split.seed);
  std::set<Label> in_gallery;
  for (Index c : g) in_gallery.insert(fm.ids()[c]);
  std::vector<Index> p;
  for (Index c : columns_where(fm, split.test_ids, split.probe_cam)) {
    if (in_gallery.count(fm.ids()[c])) p.push_back(c);
  }
  if (p.empty() || g.empty()) throw Error("test split has no probe/gallery pairs");
  TestSet t;
  t.probes = gather_cols(fm.data(), p);
  t.gallery = gather_cols(fm.data(), g);
  for (Index c : p) t.probe_ids.push_back(fm.ids()[c]);
  for (Index c : g) t.gallery_ids.push_back(fm.ids()[c]);
  return t;
}

EvalResult evaluate_lists(const std::vector<RankList>& lists, const TestSet& t) {
  EvalResult r;
  r.cmc = cmc(lists, t.probe_ids, t.gallery_ids);
  r.map = mean_ap(lists, t.probe_ids, t.gallery_ids);
  r.num_probes = lists.size();
  return r;
}

FeatureMatrix train_part(const FeatureMatrix& fm, const SplitSpec& split) {
  std::vector<Index> cols;
  for (Index j = 0; j < fm.size(); ++j) {
    if (split.train_ids.count(fm.ids()[j])) cols.push_back(j);
  }
  return fm.select(cols);
}

SeedReport run_batch_seed(const ProtocolConfig& c, const FeatureMatrix& fm, std::uint64_t seed) {
  const SplitSpec split = make_split(fm, c.split_ratio, seed, c.probe_cam, c.gallery_cam);
  const FeatureMatrix train = train_part(fm, split);
  SeedReport rep;
  rep.seed = seed;
  const auto t0 = Clock::now();
  const EmbeddingModel model = fit_batch(train, c.coding, c.lambda, c.kernel, c.bandwidth, seed);
  rep.alt_seconds = seconds_since(t0);
  rep.result = evaluate_split(model, fm, split, c.single_shot);
  return rep;
}

SeedReport run_incremental_seed(const ProtocolConfig& c, const FeatureMatrix& fm, std::uint64_t seed) {
  const SplitSpec split = make_split(fm, c.split_ratio, seed, c.probe_cam, c.gallery_cam);
  std::vector<Label> order(split.train_ids.begin(), split.train_ids.end());
  Rng rng(seed + 1);
  rng.shuffle(order);
  if (c.start_ids < 1 || c.start_ids >= order.size()) {
    throw Error("start_ids must be in [1, number of training identities)");
  }
  std::map<Label, std::vector<Index>> cols_of;
  for (Index j = 0; j < fm.size(); ++j) {
    if (split.train_ids.count(fm.ids()[j])) cols_of[fm.ids()[j]].push_back(j);
  }
  auto columns_for = [&](std::size_t from, std::size_t to) {
    std::vector<Index> cols;
    for (std::size_t i = from; i < to; ++i) {
      const auto& v = cols_of[order[i]];
      cols.insert(cols.end(), v.begin(), v.end());
    }
    return cols;
  };
  auto labels_of = [&](const std::vector<Index>& cols) {
    std::vector<Label> l;
    for (Index c2 : cols) l.push_back(fm.ids()[c2]);
    return l;
  };

  const std::vector<Index> start_cols = columns_for(0, c.start_ids);
  std::optional<KernelLift> lift;
  if (c.kernel) {
    const Matrix anchors = gather_cols(fm.data(), start_cols);
    Kernel k{*c.kernel, 1.0};
    if (k.kind == KernelKind::kRbf) k.bandwidth = c.bandwidth ? *c.bandwidth : median_bandwidth(anchors);
    lift.emplace(anchors, k);
  }
  auto space = [&](const Matrix& raw) { return lift ? lift->apply(raw) : raw; };

  SeedReport rep;
  rep.seed = seed;
  Matrix x_all = space(gather_cols(fm.data(), start_cols));
  std::vector<Label> labels_all = labels_of(start_cols);

  auto t0 = Clock::now();
  IncrementalState state = IncrementalState::init(x_all, onehot(labels_all), c.lambda);
  rep.alt_seconds += seconds_since(t0);
  EmbeddingModel batch;
  bool have_batch = false;

  const std::size_t remaining = order.size() - c.start_ids;
  const auto schedule = update_schedule(remaining, c.updates == 0 ? remaining : c.updates);
  std::size_t next = c.start_ids;
  for (std::size_t chunk : schedule) {
    const auto cols = columns_for(next, next + chunk);
    next += chunk;
    const Matrix xp = space(gather_cols(fm.data(), cols));
    const auto labels = labels_of(cols);

    t0 = Clock::now();
    state.update_labeled(xp, labels);
    const double dt = seconds_since(t0);
    rep.alt_seconds += dt;
    rep.update_times_ms.push_back(dt * 1e3);

    x_all.conservativeResize(Eigen::NoChange, x_all.cols() + xp.cols());
    x_all.rightCols(xp.cols()) = xp;
    labels_all.insert(labels_all.end(), labels.begin(), labels.end());
    if (c.batch_baseline) {
      const TargetCoding y = onehot(labels_all);
      t0 = Clock::now();
      batch = fit_linear(x_all, y.Y, c.lambda);
      const double bt = seconds_since(t0);
      rep.batch_alt_seconds += bt;
      rep.batch_times_ms.push_back(bt * 1e3);
      have_batch = true;
    }
  }
  if (!have_batch) batch = fit_linear(x_all, onehot(labels_all).Y, c.lambda);

  rep.p_relative_difference = relative_frobenius(state.P(), batch.P);

  const TestSet t = test_set(fm, split, c.single_shot);
  const EmbeddingModel inc = state.model();
  const auto lists_inc = rank_all(inc, space(t.probes), space(t.gallery));
  const auto lists_bat = rank_all(batch, space(t.probes), space(t.gallery));
  rep.rankings_identical = true;
  for (std::size_t i = 0; i < lists_inc.size(); ++i) {
    if (lists_inc[i].order != lists_bat[i].order) rep.rankings_identical = false;
  }
  rep.result = evaluate_lists(lists_inc, t);
  return rep;
}

}  // namespace

std::vector<std::size_t> update_schedule(std::size_t total, std::size_t updates) {
  if (updates == 0 || updates > total) throw Error("update count must be in [1, remaining identities]");
  std::vector<std::size_t> out(updates, total / updates);
  for (std::size_t i = 0; i < total % updates; ++i) ++out[i];
  return out;
}

EmbeddingModel fit_batch(const FeatureMatrix& train, CodingScheme coding, double lambda,
                         std::optional<KernelKind> kernel, std::optional<double> bandwidth,
                         std::uint64_t seed) {
  const TargetCoding y = make_coding(coding, train.ids(), 0, seed);
  if (!kernel) return fit_linear(train, y, lambda);
  Kernel k{*kernel, 1.0};
  if (k.kind == KernelKind::kRbf) k.bandwidth = bandwidth ? *bandwidth : median_bandwidth(train.data());
  return fit_kernel(train, y, lambda, k);
}

EvalResult evaluate_split(const EmbeddingModel& model, const FeatureMatrix& fm, const SplitSpec& split,
                          bool single_shot) {
  const TestSet t = test_set(fm, split, single_shot);
  return evaluate_lists(rank_all(model, t.probes, t.gallery), t);
}

ProtocolConfig ProtocolConfig::from_json(const json& j) {
  ProtocolConfig c;
  c.mode = parse_mode(j.value("mode", std::string("batch")));
  if (j.contains("manifest")) c.manifest = j["manifest"].get<std::string>();
  if (j.contains("synthetic")) {
    const json& s = j["synthetic"];
    c.synthetic.num_ids = s.value("num_ids", c.synthetic.num_ids);
    c.synthetic.imgs_per_id_per_cam = s.value("imgs_per_id_per_cam", c.synthetic.imgs_per_id_per_cam);
    c.synthetic.dim = s.value("d", c.synthetic.dim);
    c.synthetic.view_shift_scale = s.value("view_shift_scale", c.synthetic.view_shift_scale);
    c.synthetic.noise_scale = s.value("noise_scale", c.synthetic.noise_scale);
    c.synthetic.seed = s.value("seed", c.synthetic.seed);
  }
  if (j.contains("seeds")) {
    c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
  } else if (j.contains("num_seeds")) {
    c.seeds.clear();
    for (std::uint64_t s = 0; s < j["num_seeds"].get<std::uint64_t>(); ++s) c.seeds.push_back(s);
  }
  if (c.seeds.empty()) throw Error("protocol needs at least one seed");
  c.split_ratio = j.value("split_ratio", c.split_ratio);
  c.lambda = j.value("lambda", c.lambda);
  if (j.contains("coding")) c.coding = parse_coding(j["coding"].get<std::string>());
  if (j.contains("kernel")) c.kernel = parse_kernel(j["kernel"].get<std::string>());
  if (j.contains("bandwidth") && j["bandwidth"].is_number()) c.bandwidth = j["bandwidth"].get<double>();
  c.single_shot = j.value("single_shot", c.single_shot);
  c.probe_cam = j.value("probe_cam", c.probe_cam);
  c.gallery_cam = j.value("gallery_cam", c.gallery_cam);
  c.start_ids = j.value("start_ids", c.start_ids);
  c.updates = j.value("updates", c.updates);
  c.batch_baseline = j.value("batch_baseline", c.batch_baseline);
  if (j.contains("strategies")) {
    c.strategies.clear();
    for (const auto& s : j["strategies"]) c.strategies.push_back(parse_strategy(s.get<std::string>()));
  }
  c.budget = j.value("budget", c.budget);
  c.seed_ids = j.value("seed_ids", c.seed_ids);
  if (j.contains("checkpoints")) c.checkpoints = j["checkpoints"].get<std::vector<std::size_t>>();
  if (j.contains("scope")) {
    const auto s = j["scope"].get<std::string>();
    if (s == "unlabeled") c.scope = GalleryScope::kUnlabeled;
    else if (s == "all") c.scope = GalleryScope::kAll;
    else throw Error("unknown gallery scope: " + s);
  }
  c.extra_anchors = j.value("extra_anchors", c.extra_anchors);
  if (!(c.lambda >= 0.0)) throw Error("lambda must be nonnegative");
  if (!(c.split_ratio > 0.0 && c.split_ratio < 1.0)) throw Error("split_ratio must be in (0,1)");
  return c;
}

json ProtocolConfig::to_json() const {
  json j = {{"mode", mode_name(mode)},
            {"seeds", seeds},
            {"split_ratio", split_ratio},
            {"lambda", lambda},
            {"coding", irs::to_string(coding)},
            {"kernel", kernel_name(kernel)},
            {"single_shot", single_shot},
            {"probe_cam", probe_cam},
            {"gallery_cam", gallery_cam}};
  if (manifest) {
    j["manifest"] = *manifest;
  } else {
    j["synthetic"] = {{"num_ids", synthetic.num_ids},
                      {"imgs_per_id_per_cam", synthetic.imgs_per_id_per_cam},
                      {"d", synthetic.dim},
                      {"view_shift_scale", synthetic.view_shift_scale},
                      {"noise_scale", synthetic.noise_scale},
                      {"seed", synthetic.seed}};
  }
  j["bandwidth"] = bandwidth ? json(*bandwidth) : json("median");
  if (mode == ProtocolMode::kIncremental) {
    j["start_ids"] = start_ids;
    j["updates"] = updates;
    j["batch_baseline"] = batch_baseline;
  }
  if (mode == ProtocolMode::kActive) {
    std::vector<std::string> names;
    for (Strategy s : strategies) names.push_back(irs::to_string(s));
    j["strategies"] = names;
    j["budget"] = budget;
    j["seed_ids"] = seed_ids;
    j["checkpoints"] = checkpoints;
    j["scope"] = scope == GalleryScope::kAll ? "all" : "unlabeled";
    j["extra_anchors"] = extra_anchors;
  }
  return j;
}

std::string ProtocolConfig::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json().dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json ProtocolReport::to_json() const {
  json seeds = json::array();
  for (const auto& s : per_seed) {
    json e = {{"seed", s.seed},
              {"rank1", s.result.rank1()},
              {"mAP", s.result.map},
              {"cmc", s.result.cmc.values},
              {"probes", s.result.num_probes},
              {"alt_seconds", s.alt_seconds}};
    if (mode == ProtocolMode::kIncremental) {
      e["batch_alt_seconds"] = s.batch_alt_seconds;
      e["p_relative_difference"] = s.p_relative_difference;
      e["rankings_identical"] = s.rankings_identical;
      e["update_times_ms"] = s.update_times_ms;
      e["batch_times_ms"] = s.batch_times_ms;
    }
    seeds.push_back(std::move(e));
  }
  json j = {{"config_digest", config_digest},
            {"mode", mode_name(mode)},
            {"per_seed", seeds},
            {"mean_cmc", mean_cmc},
            {"mean_rank1", mean_rank1},
            {"mAP", map},
            {"alt_seconds", alt_seconds},
            {"update_times_ms", update_times_ms}};
  if (mode == ProtocolMode::kIncremental) j["batch_alt_seconds"] = batch_alt_seconds;
  if (mode == ProtocolMode::kActive) {
    json rows = json::array();
    for (const auto& r : checkpoints) {
      rows.push_back({{"strategy", irs::to_string(r.strategy)},
                      {"labels", r.labels},
                      {"mean_rank1", r.mean_rank1},
                      {"mean_mAP", r.mean_map},
                      {"rank1_per_seed", r.rank1_per_seed},
                      {"mAP_per_seed", r.map_per_seed},
                      {"mean_cmc", r.mean_cmc}});
    }
    j["checkpoints"] = rows;
  }
  return j;
}

namespace {

void run_active(const ProtocolConfig& c, const FeatureMatrix& fm, ProtocolReport& report,
                const SessionHook& hook) {
  std::vector<std::size_t> marks = c.checkpoints;
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
  std::erase_if(marks, [&](std::size_t m) { return m > c.budget; });
  if (marks.empty()) marks.push_back(c.budget);
  for (Strategy strategy : c.strategies) {
    std::map<std::size_t, std::vector<EvalResult>> at;
    for (std::uint64_t seed : c.seeds) {
      const SplitSpec split = make_split(fm, c.split_ratio, seed, c.probe_cam, c.gallery_cam);
      const TestSet t = test_set(fm, split, c.single_shot);
      ActiveConfig ac;
      ac.strategy = strategy;
      ac.budget = c.budget;
      ac.seed_ids = c.seed_ids;
      ac.seed = seed;
      ac.lambda = c.lambda;
      ac.scope = c.scope;
      ac.probe_cam = c.probe_cam;
      ac.gallery_cam = c.gallery_cam;
      ac.kernel = c.kernel;
      ac.bandwidth = c.bandwidth;
      ac.extra_anchors = c.extra_anchors;
      LabelingSession session(train_part(fm, split), ac);
      const Matrix probes = session.to_space(t.probes);
      const Matrix gallery = session.to_space(t.gallery);
      std::size_t next_mark = 0;
      auto snapshot = [&](const LabelingSession& s) {
        const auto lists = rank_all(s.state().model(), probes, gallery);
        return evaluate_lists(lists, t);
      };
      const auto t0 = Clock::now();
      const auto log = run_session(session, oracle_annotator(session.pool()), default_updater(),
                  [&](const LabelingSession& s, const StepRecord&) {
                    while (next_mark < marks.size() && s.annotations() == marks[next_mark]) {
                      at[marks[next_mark++]].push_back(snapshot(s));
                    }
                  });
      report.alt_seconds += seconds_since(t0);
      // Pool exhausted before the remaining checkpoints: they see the final model.
      while (next_mark < marks.size()) at[marks[next_mark++]].push_back(snapshot(session));
      if (hook) hook(strategy, seed, session, log);
      spdlog::info("active: strategy {} seed {} done ({} annotations)", irs::to_string(strategy), seed,
                   session.annotations());
    }
    for (std::size_t mark : marks) {
      CheckpointRow row;
      row.strategy = strategy;
      row.labels = mark;
      std::vector<std::vector<double>> curves;
      for (const auto& r : at[mark]) {
        row.rank1_per_seed.push_back(r.rank1());
        row.map_per_seed.push_back(r.map);
        curves.push_back(r.cmc.values);
      }
      row.mean_rank1 = mean(row.rank1_per_seed);
      row.mean_map = mean(row.map_per_seed);
      row.mean_cmc = mean_curve(curves);
      report.checkpoints.push_back(std::move(row));
    }
  }
}

}  // namespace

ProtocolReport run_protocol(const ProtocolConfig& config, const SessionHook& hook) {
  const FeatureMatrix fm = load_data(config);
  ProtocolReport report;
  report.config_digest = config.digest();
  report.mode = config.mode;
  if (config.mode == ProtocolMode::kActive) {
    run_active(config, fm, report, hook);
    return report;
  }
  for (std::uint64_t seed : config.seeds) {
    report.per_seed.push_back(config.mode == ProtocolMode::kBatch ? run_batch_seed(config, fm, seed)
                                                                  : run_incremental_seed(config, fm, seed));
  }
  std::vector<std::vector<double>> curves, times;
  std::vector<double> maps, r1;
  for (const auto& s : report.per_seed) {
    curves.push_back(s.result.cmc.values);
    times.push_back(s.update_times_ms);
    maps.push_back(s.result.map);
    r1.push_back(s.result.rank1());
    report.alt_seconds += s.alt_seconds;
    report.batch_alt_seconds += s.batch_alt_seconds;
  }
  report.mean_cmc = mean_curve(curves);
  report.map = mean(maps);
  report.mean_rank1 = mean(r1);
  report.update_times_ms = mean_curve(times);
  return report;
}

std::string cmc_csv(const std::vector<double>& curve) {
  std::ostringstream out;
  out.precision(10);
  out << "rank,value\n";
  for (std::size_t i = 0; i < curve.size(); ++i) out << (i + 1) << ',' << curve[i] << '\n';
  return out.str();
}

}  // namespace irs
