// tools/irs_cli.cpp

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

// Command-line entry points: gen-synth, train, evaluate, simulate, serve.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "irs/active.hpp"
#include "irs/dataset.hpp"
#include "irs/evaluation.hpp"
#include "irs/log.hpp"
#include "irs/protocol.hpp"
#include "irs/regression.hpp"
#include "irs/serialization.hpp"
#include "irs/service.hpp"

namespace {

using nlohmann::json;
using namespace irs;

struct Globals {
  std::string manifest;
  double lambda = kDefaultLambda;
  std::string kernel = "none";
  std::string bandwidth = "median";
  std::uint64_t seed = 0;
};

std::optional<KernelKind> kernel_of(const Globals& g) {
  if (g.kernel == "none") return std::nullopt;
  if (g.kernel == "rbf") return KernelKind::kRbf;
  if (g.kernel == "linear") return KernelKind::kLinear;
  throw Error("unknown kernel: " + g.kernel);
}

std::optional<double> bandwidth_of(const Globals& g) {
  if (g.bandwidth == "median") return std::nullopt;
  try {
    const double v = std::stod(g.bandwidth);
    if (!(v > 0)) throw Error("bandwidth must be positive");
    return v;
  } catch (const std::logic_error&) {
    throw Error("bandwidth must be 'median' or a positive number");
  }
}

Dataset require_manifest(const Globals& g) {
  if (g.manifest.empty()) throw Error("--manifest is required");
  return load_features(g.manifest);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out << text;
}

void print_result(const EvalResult& r) {
  std::printf("Rank-1: %.2f%%", 100.0 * r.rank1());
  for (std::size_t k : {5u, 10u, 20u}) {
    if (k <= r.cmc.values.size()) std::printf("  Rank-%zu: %.2f%%", k, 100.0 * r.cmc.at(k));
  }
  std::printf("  mAP: %.2f%%\n", 100.0 * r.map);
}

json result_json(const EvalResult& r) {
  return {{"rank1", r.rank1()}, {"mAP", r.map}, {"cmc", r.cmc.values}};
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  init_logging();
  CLI::App app{"Identity regression space embedding: training, evaluation, active labelling"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--manifest", g.manifest, "Dataset manifest (JSON)");
  app.add_option("--lambda", g.lambda, "Ridge regularisation strength")->capture_default_str();
  app.add_option("--kernel", g.kernel, "rbf | linear | none")->capture_default_str();
  app.add_option("--bandwidth", g.bandwidth, "RBF bandwidth: 'median' or a number")->capture_default_str();
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();

  // gen-synth
  auto* gen = app.add_subcommand("gen-synth", "Write a synthetic two-camera dataset");
  SyntheticSpec syn;
  std::string gen_out, gen_format = "f64le";
  gen->add_option("--out", gen_out, "Manifest path to write")->required();
  gen->add_option("--num-ids", syn.num_ids)->capture_default_str();
  gen->add_option("--imgs", syn.imgs_per_id_per_cam, "Images per identity per camera")->capture_default_str();
  gen->add_option("--dim", syn.dim)->capture_default_str();
  gen->add_option("--shift", syn.view_shift_scale, "View-shift scale")->capture_default_str();
  gen->add_option("--noise", syn.noise_scale, "Noise scale")->capture_default_str();
  gen->add_option("--format", gen_format, "f64le | csv")->capture_default_str();

  // train
  auto* train = app.add_subcommand("train", "Fit a batch model on the train split and evaluate it");
  std::string coding = "onehot", model_out, report_out;
  double ratio = 0.5;
  bool single_shot = false;
  train->add_option("--coding", coding, "onehot | fda | random")->capture_default_str();
  train->add_option("--ratio", ratio, "Fraction of identities used for training")->capture_default_str();
  train->add_option("--model", model_out, "Model file to write");
  train->add_option("--report", report_out, "JSON report to write");
  train->add_flag("--single-shot", single_shot, "One random gallery image per identity");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Evaluate saved model(s) on the test split");
  std::vector<std::string> models, extra;
  std::string cmc_out;
  eval->add_option("--model", models, "Model file for --manifest")->required();
  eval->add_option("--fuse", extra, "Additional MANIFEST,MODEL pairs fused at score level");
  eval->add_option("--ratio", ratio, "Split ratio used at training time")->capture_default_str();
  eval->add_option("--report", report_out, "JSON report to write");
  eval->add_option("--cmc-csv", cmc_out, "CMC curve CSV to write");
  eval->add_flag("--single-shot", single_shot);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Active labelling with a ground-truth annotator");
  std::string strategy = "jointe2", compare, log_out, replay_in, ckpt_out, checkpoints = "50,100,150,200",
              pool = "train", scope = "unlabeled";
  std::size_t budget = 200, seed_ids = 10, seeds = 1, extra_anchors = 0;
  sim->add_option("--strategy", strategy, "jointe2 | random | density")->capture_default_str();
  sim->add_option("--compare", compare, "Comma-separated strategies to compare");
  sim->add_option("--budget", budget)->capture_default_str();
  sim->add_option("--seed-ids", seed_ids, "Identities labelled before active selection")->capture_default_str();
  sim->add_option("--seeds", seeds, "Number of seeds (folds), starting at --seed")->capture_default_str();
  sim->add_option("--checkpoints", checkpoints, "Label counts at which to evaluate")->capture_default_str();
  sim->add_option("--ratio", ratio)->capture_default_str();
  sim->add_option("--scope", scope, "Gallery scope for the criteria: unlabeled | all")->capture_default_str();
  sim->add_option("--extra-anchors", extra_anchors, "Random pool anchors added for kernel sessions")
      ->capture_default_str();
  sim->add_option("--log", log_out, "Session log (JSON lines) to write");
  sim->add_option("--report", report_out, "JSON report to write");
  sim->add_option("--checkpoint", ckpt_out, "Final model state checkpoint to write");
  sim->add_option("--replay", replay_in, "Re-apply a recorded session log instead of simulating");
  sim->add_option("--pool", pool, "Replay pool: all | train")->capture_default_str();

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP annotation service");
  std::string listen = "127.0.0.1:8080", static_dir;
  std::size_t window = 50;
  std::string serve_pool = "all";
  serve->add_option("--listen", listen, "host:port")->capture_default_str();
  serve->add_option("--rank-window", window, "Ranked candidates shown per probe")->capture_default_str();
  serve->add_option("--budget", budget)->capture_default_str();
  serve->add_option("--seed-ids", seed_ids)->capture_default_str();
  serve->add_option("--strategy", strategy)->capture_default_str();
  serve->add_option("--pool", serve_pool, "all | train")->capture_default_str();
  serve->add_option("--ratio", ratio)->capture_default_str();
  serve->add_option("--log", log_out);
  serve->add_option("--checkpoint", ckpt_out);
  serve->add_option("--static-dir", static_dir, "Directory served at / (annotation console build)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*gen) {
      syn.seed = g.seed;
      Dataset ds;
      ds.name = "synthetic";
      ds.features = gen_synthetic(syn);
      write_dataset(gen_out, ds, gen_format == "csv" ? FeatureFormat::kCsv : FeatureFormat::kF64le);
      std::printf("wrote %s: d=%ld n=%ld ids=%d\n", gen_out.c_str(), static_cast<long>(ds.features.dim()),
                  static_cast<long>(ds.features.size()), syn.num_ids);
      return 0;
    }

    if (*train) {
      const Dataset ds = require_manifest(g);
      const FeatureMatrix& fm = ds.features;
      const SplitSpec split = make_split(fm, ratio, g.seed);
      std::vector<Index> cols;
      for (Index j = 0; j < fm.size(); ++j) {
        if (split.train_ids.count(fm.ids()[j])) cols.push_back(j);
      }
      const EmbeddingModel model =
          fit_batch(fm.select(cols), parse_coding(coding), g.lambda, kernel_of(g), bandwidth_of(g), g.seed);
      const EvalResult r = evaluate_split(model, fm, split, single_shot);
      print_result(r);
      if (!model_out.empty()) save_model(std::filesystem::path(model_out), model);
      if (!report_out.empty()) {
        json rep = result_json(r);
        rep["coding"] = coding;
        rep["lambda"] = g.lambda;
        rep["kernel"] = g.kernel;
        rep["train_ids"] = split.train_ids.size();
        rep["test_ids"] = split.test_ids.size();
        write_text(report_out, rep.dump(2) + "\n");
      }
      return 0;
    }

    if (*eval) {
      const Dataset ds = require_manifest(g);
      const SplitSpec split = make_split(ds.features, ratio, g.seed);
      std::vector<std::pair<FeatureMatrix, EmbeddingModel>> runs;
      runs.emplace_back(ds.features, load_model(std::filesystem::path(models.at(0))));
      for (const auto& pair : extra) {
        const auto parts = split_list(pair);
        if (parts.size() != 2) throw Error("--fuse expects MANIFEST,MODEL");
        runs.emplace_back(load_features(parts[0]).features, load_model(std::filesystem::path(parts[1])));
      }
      const FeatureMatrix& fm = ds.features;
      std::vector<Index> gcols = columns_where(fm, split.test_ids, split.gallery_cam);
      if (single_shot) gcols = single_shot_columns(fm, gcols, split.seed);
      std::set<Label> gids;
      for (Index c : gcols) gids.insert(fm.ids()[c]);
      std::vector<Index> pcols;
      for (Index c : columns_where(fm, split.test_ids, split.probe_cam)) {
        if (gids.count(fm.ids()[c])) pcols.push_back(c);
      }
      std::vector<Matrix> dists;
      for (const auto& [feat, model] : runs) {
        if (feat.ids() != fm.ids() || feat.cams() != fm.cams()) {
          throw Error("fused feature files must list the same samples in the same order");
        }
        dists.push_back(distance_matrix(model, feat.select(pcols).data(), feat.select(gcols).data()));
      }
      const Matrix fused = dists.size() == 1 ? dists[0] : fuse_scores(dists);
      const auto lists = rank_matrix(fused);
      std::vector<Label> pids, gl;
      for (Index c : pcols) pids.push_back(fm.ids()[c]);
      for (Index c : gcols) gl.push_back(fm.ids()[c]);
      EvalResult r{cmc(lists, pids, gl), mean_ap(lists, pids, gl)};
      print_result(r);
      if (!report_out.empty()) write_text(report_out, result_json(r).dump(2) + "\n");
      if (!cmc_out.empty()) write_text(cmc_out, cmc_csv(r.cmc.values));
      return 0;
    }

    if (*sim) {
      const Dataset ds = require_manifest(g);
      if (!replay_in.empty()) {
        SessionConfig sc;
        sc.pool = pool;
        sc.split_ratio = ratio;
        sc.active.strategy = parse_strategy(strategy);
        sc.active.budget = budget;
        sc.active.seed_ids = seed_ids;
        sc.active.seed = g.seed;
        sc.active.lambda = g.lambda;
        sc.active.kernel = kernel_of(g);
        sc.active.bandwidth = bandwidth_of(g);
        sc.validate();
        LabelingSession session(session_pool(ds.features, sc), sc.active);
        const auto records = read_log(replay_in);
        replay(session, records);
        std::printf("replayed %zu records (%zu annotations)\n", records.size(), session.annotations());
        if (!ckpt_out.empty()) save_checkpoint(std::filesystem::path(ckpt_out), session.state());
        return 0;
      }
      ProtocolConfig pc;
      pc.mode = ProtocolMode::kActive;
      pc.manifest = g.manifest;
      pc.lambda = g.lambda;
      pc.kernel = kernel_of(g);
      pc.bandwidth = bandwidth_of(g);
      pc.split_ratio = ratio;
      pc.budget = budget;
      pc.seed_ids = seed_ids;
      pc.extra_anchors = extra_anchors;
      pc.scope = scope == "all" ? GalleryScope::kAll : GalleryScope::kUnlabeled;
      if (scope != "all" && scope != "unlabeled") throw Error("scope must be 'unlabeled' or 'all'");
      pc.seeds.clear();
      for (std::size_t s = 0; s < std::max<std::size_t>(seeds, 1); ++s) pc.seeds.push_back(g.seed + s);
      pc.strategies.clear();
      for (const auto& name : compare.empty() ? std::vector<std::string>{strategy} : split_list(compare)) {
        pc.strategies.push_back(parse_strategy(name));
      }
      pc.checkpoints.clear();
      for (const auto& c : split_list(checkpoints)) pc.checkpoints.push_back(std::stoul(c));
      const bool single_run = pc.strategies.size() == 1 && pc.seeds.size() == 1;
      const auto report = run_protocol(pc, [&](Strategy s, std::uint64_t seed, const LabelingSession& session,
                                               const std::vector<StepRecord>& log) {
        std::string suffix = single_run ? "" : "." + to_string(s) + ".s" + std::to_string(seed);
        if (!log_out.empty()) {
          std::filesystem::path p(log_out);
          if (!single_run) p.replace_filename(p.stem().string() + suffix + p.extension().string());
          std::string text;
          for (const auto& r : log) text += to_json_line(r) + "\n";
          write_text(p.string(), text);
        }
        if (!ckpt_out.empty()) {
          std::filesystem::path p(ckpt_out);
          if (!single_run) p.replace_filename(p.stem().string() + suffix + p.extension().string());
          save_checkpoint(p, session.state());
        }
      });
      std::printf("%-10s %7s %9s %9s\n", "strategy", "labels", "rank1(%)", "mAP(%)");
      for (const auto& row : report.checkpoints) {
        std::printf("%-10s %7zu %9.2f %9.2f\n", to_string(row.strategy).c_str(), row.labels,
                    100.0 * row.mean_rank1, 100.0 * row.mean_map);
      }
      if (!report_out.empty()) {
        json rep = report.to_json();
        rep["config"] = pc.to_json();
        write_text(report_out, rep.dump(2) + "\n");
      }
      return 0;
    }

    if (*serve) {
      Dataset ds = require_manifest(g);
      SessionConfig sc;
      sc.manifest = g.manifest;
      sc.rank_window = window;
      sc.pool = serve_pool;
      sc.split_ratio = ratio;
      sc.active.strategy = parse_strategy(strategy);
      sc.active.budget = budget;
      sc.active.seed_ids = seed_ids;
      sc.active.seed = g.seed;
      sc.active.lambda = g.lambda;
      sc.active.kernel = kernel_of(g);
      sc.active.bandwidth = bandwidth_of(g);
      const auto colon = listen.rfind(':');
      if (colon == std::string::npos) throw Error("--listen expects host:port");
      sc.host = listen.substr(0, colon);
      sc.port = std::stoi(listen.substr(colon + 1));
      if (!log_out.empty()) sc.log_path = log_out;
      if (!ckpt_out.empty()) sc.checkpoint_path = ckpt_out;
      if (!static_dir.empty()) sc.static_dir = static_dir;
      sc.validate();
      AnnotationService service(std::move(ds), sc);
      std::printf("session %s listening on %s\n", service.session_id().c_str(), listen.c_str());
      std::fflush(stdout);
      if (!service.listen()) throw Error("cannot bind " + listen);
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "fatal: %s\n", e.what());
    return 1;
  }
  return 0;
}
