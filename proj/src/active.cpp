// src/active.cpp

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

#include "irs/active.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <set>

#include <json.hpp>
#include <spdlog/spdlog.h>

namespace irs {

using nlohmann::json;

Strategy parse_strategy(const std::string& name) {
  if (name == "jointe2") return Strategy::kJointE2;
  if (name == "random") return Strategy::kRandom;
  if (name == "density") return Strategy::kDensity;
  throw Error("unknown strategy: " + name);
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kJointE2: return "jointe2";
    case Strategy::kRandom: return "random";
    case Strategy::kDensity: return "density";
  }
  return "?";
}

namespace {

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<T>();
}

void erase_sorted(std::vector<Index>& v, Index x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) throw Error("index " + std::to_string(x) + " not in pool");
  v.erase(it);
}

bool contains_sorted(const std::vector<Index>& v, Index x) {
  return std::binary_search(v.begin(), v.end(), x);
}

Matrix gather_rows(const Matrix& m, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = m.row(rows[i]);
  return out;
}

Matrix gather_cols(const Matrix& m, const std::vector<Index>& cols) {
  Matrix out(m.rows(), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Index>(i)) = m.col(cols[i]);
  return out;
}

Index argmax_first(const Vector& v) {
  Index best = 0;
  for (Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = i;
  }
  return best;
}

}  // namespace

std::string to_json_line(const StepRecord& r) {
  json j = {{"step", r.step},
            {"probe_index", r.probe_index},
            {"gallery_index", opt(r.gallery_index)},
            {"chosen_by", r.chosen_by},
            {"true_match_rank", opt(r.true_match_rank)},
            {"epsilon1", opt(r.epsilon1)},
            {"epsilon2", opt(r.epsilon2)},
            {"epsilon3", opt(r.epsilon3)},
            {"update_ms", r.update_ms}};
  return j.dump();
}

StepRecord step_from_json_line(const std::string& line) {
  const json j = json::parse(line);
  StepRecord r;
  r.step = j.at("step").get<std::size_t>();
  r.probe_index = j.at("probe_index").get<Index>();
  r.gallery_index = get_opt<Index>(j, "gallery_index");
  r.chosen_by = j.value("chosen_by", std::string{});
  r.true_match_rank = get_opt<std::size_t>(j, "true_match_rank");
  r.epsilon1 = get_opt<double>(j, "epsilon1");
  r.epsilon2 = get_opt<double>(j, "epsilon2");
  r.epsilon3 = get_opt<double>(j, "epsilon3");
  r.update_ms = j.value("update_ms", 0.0);
  return r;
}

Annotator oracle_annotator(const FeatureMatrix& pool) {
  return [ids = pool.ids()](const AnnotationRequest& req) -> std::optional<Index> {
    const Label want = ids.at(static_cast<std::size_t>(req.probe_index));
    for (Index g : req.ranking->order) {
      if (ids[static_cast<std::size_t>(g)] == want) return g;
    }
    return std::nullopt;
  };
}

ModelUpdater default_updater() {
  return [](IncrementalState& s, const Matrix& xp, std::span<const Label> labels) {
    s.update_labeled(xp, labels);
  };
}

Vector normalize_by_max(const Vector& v) {
  if (v.size() == 0) return v;
  const double mx = v.maxCoeff();
  if (!(mx > 0.0)) return Vector::Zero(v.size());
  return v / mx;
}

LabelingSession::LabelingSession(FeatureMatrix pool, ActiveConfig config)
    : pool_(std::move(pool)), config_(std::move(config)), rng_(config_.seed) {
  if (config_.seed_ids < 1) throw Error("seed set must contain at least one identity");
  if (config_.probe_cam == config_.gallery_cam) throw Error("probe and gallery cameras must differ");

  std::set<Label> in_probe, in_gallery;
  for (Index j = 0; j < pool_.size(); ++j) {
    if (pool_.cams()[j] == config_.probe_cam) in_probe.insert(pool_.ids()[j]);
    if (pool_.cams()[j] == config_.gallery_cam) in_gallery.insert(pool_.ids()[j]);
  }
  std::vector<Label> both;
  std::set_intersection(in_probe.begin(), in_probe.end(), in_gallery.begin(), in_gallery.end(),
                        std::back_inserter(both));
  if (both.size() < config_.seed_ids) {
    throw Error("pool has " + std::to_string(both.size()) + " identities seen in both views, " +
                std::to_string(config_.seed_ids) + " needed for the seed set");
  }
  rng_.shuffle(both);
  seed_identities_.assign(both.begin(), both.begin() + static_cast<std::ptrdiff_t>(config_.seed_ids));
  const std::set<Label> seeded(seed_identities_.begin(), seed_identities_.end());

  std::vector<Index> seed_cols;
  for (Index j = 0; j < pool_.size(); ++j) {
    const Label cam = pool_.cams()[j];
    const bool is_probe = cam == config_.probe_cam, is_gallery = cam == config_.gallery_cam;
    if (!is_probe && !is_gallery) continue;
    if (seeded.count(pool_.ids()[j])) {
      seed_cols.push_back(j);
      (is_probe ? labeled_probes_ : labeled_gallery_).push_back(j);
    } else {
      (is_probe ? probe_pool_ : gallery_pool_).push_back(j);
    }
  }
  next_label_ = *std::max_element(pool_.ids().begin(), pool_.ids().end()) + 1;

  if (config_.kernel) {
    std::vector<Index> anchor_cols = seed_cols;
    if (config_.extra_anchors > 0) {
      std::vector<Index> rest;
      std::set_union(probe_pool_.begin(), probe_pool_.end(), gallery_pool_.begin(),
                     gallery_pool_.end(), std::back_inserter(rest));
      rng_.shuffle(rest);
      rest.resize(std::min(rest.size(), config_.extra_anchors));
      anchor_cols.insert(anchor_cols.end(), rest.begin(), rest.end());
    }
    Matrix anchors = gather_cols(pool_.data(), anchor_cols);
    Kernel k{*config_.kernel, 1.0};
    if (k.kind == KernelKind::kRbf) k.bandwidth = config_.bandwidth ? *config_.bandwidth : median_bandwidth(anchors);
    lift_.emplace(std::move(anchors), k);
    space_ = lift_->apply(pool_.data());
  } else {
    space_ = pool_.data();
  }

  std::vector<Label> seed_labels;
  for (Index c : seed_cols) seed_labels.push_back(pool_.ids()[c]);
  state_ = IncrementalState::init(gather_cols(space_, seed_cols), onehot(seed_labels), config_.lambda);
}

Matrix LabelingSession::to_space(const Matrix& raw) const {
  return lift_ ? lift_->apply(raw) : raw;
}

EmbeddingModel LabelingSession::model() const {
  EmbeddingModel m = state_.model();
  if (lift_) {
    m.kind = ModelKind::kKernel;
    m.kernel = lift_->kernel();
    m.anchors = lift_->anchors();
    m.Q = std::move(m.P);
    m.P.resize(0, 0);
  }
  return m;
}

Matrix LabelingSession::embedded_space() const { return space_.transpose() * state_.P(); }

std::vector<Index> LabelingSession::gallery_scope() const {
  if (config_.scope == GalleryScope::kUnlabeled) return gallery_pool_;
  std::vector<Index> all;
  std::set_union(gallery_pool_.begin(), gallery_pool_.end(), labeled_gallery_.begin(),
                 labeled_gallery_.end(), std::back_inserter(all));
  return all;
}

Vector diversity_scores(const Matrix& probes, const Matrix& labeled) {
  if (labeled.rows() == 0) return Vector::Zero(probes.rows());
  return squared_distances(probes, labeled).rowwise().minCoeff();
}

Vector discrepancy_scores(const Matrix& probes, const Matrix& gallery) {
  if (gallery.rows() == 0) throw Error("discrepancy needs a nonempty gallery");
  return squared_distances(probes, gallery).rowwise().minCoeff();
}

Vector entropy_of_rows(const Matrix& d2) {
  Vector h(d2.rows());
  for (Index i = 0; i < d2.rows(); ++i) {
    // Shift by the row minimum before exponentiating.
    const RowVector z = -(d2.row(i).array() - d2.row(i).minCoeff()).matrix();
    const RowVector e = z.array().exp().matrix();
    const double sum = e.sum();
    h(i) = std::log(sum) - e.dot(z) / sum;
  }
  return h;
}

Vector uncertainty_scores(const Matrix& probes, const Matrix& gallery) {
  if (gallery.rows() < 2) throw Error("uncertainty needs at least two gallery samples");
  return entropy_of_rows(squared_distances(probes, gallery));
}

Vector LabelingSession::score_diversity() const {
  const Matrix emb = embedded_space();
  return diversity_scores(gather_rows(emb, probe_pool_), gather_rows(emb, labeled_probes_));
}

Vector LabelingSession::score_discrepancy() const {
  const Matrix emb = embedded_space();
  return discrepancy_scores(gather_rows(emb, probe_pool_), gather_rows(emb, gallery_scope()));
}

Vector LabelingSession::score_uncertainty() const {
  const Matrix emb = embedded_space();
  return uncertainty_scores(gather_rows(emb, probe_pool_), gather_rows(emb, gallery_scope()));
}

Criteria LabelingSession::score() const {
  const auto scope = gallery_scope();
  if (scope.empty()) throw Error("criteria need a nonempty gallery");
  const Matrix emb = embedded_space();
  const Matrix probes = gather_rows(emb, probe_pool_);
  const Matrix d2 = squared_distances(probes, gather_rows(emb, scope));
  Criteria c;
  c.diversity = diversity_scores(probes, gather_rows(emb, labeled_probes_));
  c.discrepancy = d2.rowwise().minCoeff();
  c.uncertainty = entropy_of_rows(d2);
  return c;
}

Index LabelingSession::select_density(const Matrix& emb) const {
  const Matrix probes = gather_rows(emb, probe_pool_);
  const Matrix d = distances(probes, probes);
  const auto n = static_cast<std::size_t>(d.rows());
  const std::size_t k = std::min(config_.density_k, n > 0 ? n - 1 : 0);
  if (k == 0) return probe_pool_.front();
  Vector score(d.rows());
  std::vector<double> row;
  for (Index i = 0; i < d.rows(); ++i) {
    row.clear();
    for (Index j = 0; j < d.cols(); ++j) {
      if (j != i) row.push_back(d(i, j));
    }
    std::partial_sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k), row.end());
    double s = 0.0;
    for (std::size_t t = 0; t < k; ++t) s += row[t];
    score(i) = s / static_cast<double>(k);
  }
  Index best = 0;
  for (Index i = 1; i < score.size(); ++i) {
    if (score(i) < score(best)) best = i;
  }
  return probe_pool_[static_cast<std::size_t>(best)];
}

Index LabelingSession::select_next() {
  if (probe_pool_.empty()) throw Error("probe pool is empty");
  last_criteria_.reset();
  Index chosen = 0;
  switch (config_.strategy) {
    case Strategy::kJointE2: {
      const Criteria c = score();
      const Vector total =
          normalize_by_max(c.diversity) + normalize_by_max(c.discrepancy) + normalize_by_max(c.uncertainty);
      const Index i = argmax_first(total);
      chosen = probe_pool_[static_cast<std::size_t>(i)];
      last_criteria_ = std::array<double, 3>{c.diversity(i), c.discrepancy(i), c.uncertainty(i)};
      break;
    }
    case Strategy::kRandom:
      chosen = probe_pool_[rng_.below(probe_pool_.size())];
      break;
    case Strategy::kDensity:
      chosen = select_density(embedded_space());
      break;
  }
  last_selected_ = chosen;
  return chosen;
}

RankList LabelingSession::rank_candidates(Index probe) const {
  if (gallery_pool_.empty()) throw Error("gallery pool is empty");
  const Matrix& p = state_.P();
  const RowVector ep = space_.col(probe).transpose() * p;
  const Matrix eg = gather_cols(space_, gallery_pool_).transpose() * p;
  const Matrix d = distances(ep, eg);
  const RowVector row = d.row(0);
  RankList local = rank_by_distances(probe, row);
  for (auto& g : local.order) g = gallery_pool_[static_cast<std::size_t>(g)];
  return local;
}

StepRecord LabelingSession::annotate(Index probe, std::optional<Index> gallery,
                                     const std::string& chosen_by, const ModelUpdater& updater) {
  if (!contains_sorted(probe_pool_, probe)) {
    throw Error("probe " + std::to_string(probe) + " is not in the unlabeled probe pool");
  }
  if (gallery && !contains_sorted(gallery_pool_, *gallery)) {
    throw Error("gallery " + std::to_string(*gallery) + " is not in the unlabeled gallery pool");
  }
  if (annotations_ >= config_.budget && gallery) throw Error("labelling budget exhausted");
  StepRecord rec;
  rec.step = steps_;
  rec.probe_index = probe;
  rec.gallery_index = gallery;
  rec.chosen_by = chosen_by;
  if (last_selected_ == probe && last_criteria_) {
    rec.epsilon1 = (*last_criteria_)[0];
    rec.epsilon2 = (*last_criteria_)[1];
    rec.epsilon3 = (*last_criteria_)[2];
  }
  if (gallery) {
    const RankList ranking = rank_candidates(probe);
    const auto pos = std::find(ranking.order.begin(), ranking.order.end(), *gallery);
    rec.true_match_rank = static_cast<std::size_t>(pos - ranking.order.begin()) + 1;

    Matrix xp(space_.rows(), 2);
    xp.col(0) = space_.col(probe);
    xp.col(1) = space_.col(*gallery);
    const Label labels[2] = {next_label_, next_label_};
    const auto t0 = std::chrono::steady_clock::now();
    updater(state_, xp, labels);
    const auto t1 = std::chrono::steady_clock::now();
    rec.update_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

    erase_sorted(probe_pool_, probe);
    erase_sorted(gallery_pool_, *gallery);
    labeled_probes_.insert(std::upper_bound(labeled_probes_.begin(), labeled_probes_.end(), probe), probe);
    labeled_gallery_.insert(std::upper_bound(labeled_gallery_.begin(), labeled_gallery_.end(), *gallery),
                            *gallery);
    ++next_label_;
    ++annotations_;
  } else {
    erase_sorted(probe_pool_, probe);
    spdlog::info("step {}: probe {} skipped", steps_, probe);
  }
  last_selected_.reset();
  last_criteria_.reset();
  ++steps_;
  return rec;
}

std::vector<StepRecord> run_session(LabelingSession& session, const Annotator& annotator,
                                    const ModelUpdater& updater, const StepObserver& observer) {
  std::vector<StepRecord> log;
  const std::string chosen_by = to_string(session.config().strategy);
  while (!session.finished()) {
    const Index probe = session.select_next();
    const RankList ranking = session.rank_candidates(probe);
    const AnnotationRequest req{probe, &ranking};
    std::optional<Index> answer;
    for (int attempt = 0;; ++attempt) {
      try {
        answer = annotator(req);
        break;
      } catch (const AnnotatorError& e) {
        if (attempt >= session.config().max_retries) {
          throw Error("annotator failed after " + std::to_string(attempt + 1) + " attempts: " + e.what());
        }
        spdlog::warn("annotator failure on probe {} (attempt {}): {}", probe, attempt + 1, e.what());
      }
    }
    log.push_back(session.annotate(probe, answer, chosen_by, updater));
    if (observer) observer(session, log.back());
  }
  return log;
}

}  // namespace irs
