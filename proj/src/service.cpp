// src/service.cpp

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

#include "irs/service.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "irs/serialization.hpp"

namespace irs {

using nlohmann::json;

void SessionConfig::validate() const {
  if (active.seed_ids < 1) throw Error("seed-set size must be >= 1");
  if (rank_window < 1) throw Error("rank window must be >= 1");
  if (pool != "all" && pool != "train") throw Error("pool must be 'all' or 'train'");
  if (!(active.lambda >= 0.0)) throw Error("lambda must be nonnegative");
}

FeatureMatrix session_pool(const FeatureMatrix& fm, const SessionConfig& cfg) {
  if (cfg.pool == "all") return fm;
  const SplitSpec split = make_split(fm, cfg.split_ratio, cfg.active.seed, cfg.active.probe_cam,
                                     cfg.active.gallery_cam);
  std::vector<Index> cols;
  for (Index j = 0; j < fm.size(); ++j) {
    if (split.train_ids.count(fm.ids()[j])) cols.push_back(j);
  }
  return fm.select(cols);
}

void replay(LabelingSession& session, const std::vector<StepRecord>& records) {
  for (const auto& r : records) {
    session.annotate(r.probe_index, r.gallery_index, r.chosen_by);
  }
}

std::vector<StepRecord> read_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("log not found: " + path.string());
  std::vector<StepRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(step_from_json_line(line));
    } catch (const json::exception& e) {
      throw Error("malformed log line " + std::to_string(out.size() + 1) + ": " + e.what());
    }
  }
  return out;
}

namespace {

std::string make_session_id() {
  std::random_device rd;
  std::ostringstream os;
  os << std::hex << rd() << rd();
  return os.str();
}

HttpReply reply(int status, const json& j) { return {status, j.dump(), "application/json"}; }

HttpReply error_reply(int status, const std::string& msg) { return reply(status, {{"error", msg}}); }

}  // namespace

AnnotationService::AnnotationService(Dataset dataset, SessionConfig config)
    : dataset_(std::move(dataset)),
      config_(std::move(config)),
      session_id_(make_session_id()),
      session_(session_pool(dataset_.features, config_), config_.active) {
  config_.validate();
  if (config_.pool != "all") dataset_.images.clear();  // pool indices no longer match the manifest
  if (config_.log_path) std::ofstream(*config_.log_path, std::ios::trunc);
  if (config_.checkpoint_path) save_checkpoint(*config_.checkpoint_path, session_.state());
}

AnnotationService::~AnnotationService() { stop(); }

HttpReply AnnotationService::state() {
  std::lock_guard lock(mu_);
  json ranks = json::array();
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : records_) {
    if (r.true_match_rank) {
      ranks.push_back(*r.true_match_rank);
      sum += static_cast<double>(*r.true_match_rank);
      ++n;
    }
  }
  json j = {{"session", session_id_},
            {"step", session_.steps()},
            {"annotations", session_.annotations()},
            {"budget", session_.config().budget},
            {"budget_left", session_.budget_left()},
            {"finished", session_.finished()},
            {"issued_probe", issued_ ? json(*issued_) : json(nullptr)},
            {"probe_pool", session_.probe_pool().size()},
            {"gallery_pool", session_.gallery_pool().size()},
            {"rank_window", config_.rank_window},
            {"strategy", to_string(session_.config().strategy)},
            {"rank_history", ranks},
            {"mean_true_match_rank", n ? json(sum / static_cast<double>(n)) : json(nullptr)}};
  return reply(200, j);
}

HttpReply AnnotationService::next() {
  std::lock_guard lock(mu_);
  json j = {{"session", session_id_},
            {"step", session_.steps()},
            {"budget", session_.config().budget},
            {"budget_left", session_.budget_left()}};
  if (session_.finished()) {
    j["finished"] = true;
    return reply(200, j);
  }
  if (!issued_) {
    issued_ = session_.select_next();
    issued_ranking_ = session_.rank_candidates(*issued_);
  }
  const bool thumbs = !dataset_.images.empty();
  auto thumb = [&](Index i) { return "/api/thumbnails/" + std::to_string(i); };
  json probe = {{"index", *issued_}};
  if (thumbs) probe["thumbnail"] = thumb(*issued_);
  json ranked = json::array();
  const std::size_t shown = std::min(config_.rank_window, issued_ranking_->order.size());
  for (std::size_t k = 0; k < shown; ++k) {
    json c = {{"index", issued_ranking_->order[k]},
              {"rank", k + 1},
              {"distance", issued_ranking_->distances[k]}};
    if (thumbs) c["thumbnail"] = thumb(issued_ranking_->order[k]);
    ranked.push_back(std::move(c));
  }
  j["finished"] = false;
  j["probe"] = probe;
  j["ranked"] = ranked;
  if (const auto& crit = session_.last_criteria()) {
    j["criteria"] = {{"epsilon1", (*crit)[0]}, {"epsilon2", (*crit)[1]}, {"epsilon3", (*crit)[2]}};
  }
  return reply(200, j);
}

HttpReply AnnotationService::annotate(const std::string& body) {
  json req;
  try {
    req = json::parse(body);
  } catch (const json::exception&) {
    return error_reply(400, "body is not valid JSON");
  }
  std::lock_guard lock(mu_);
  if (req.contains("session") && req["session"] != session_id_) return error_reply(404, "unknown session");
  if (!req.contains("probe_index") || !req["probe_index"].is_number_integer()) {
    return error_reply(400, "probe_index is required");
  }
  const auto probe = req["probe_index"].get<Index>();
  if (!issued_ || *issued_ != probe) {
    return error_reply(409, "probe " + std::to_string(probe) + " is not the currently issued probe");
  }
  std::optional<Index> gallery;
  const bool skip = req.value("skip", false);
  if (!skip) {
    if (!req.contains("gallery_index") || !req["gallery_index"].is_number_integer()) {
      return error_reply(400, "gallery_index is required unless skip is set");
    }
    gallery = req["gallery_index"].get<Index>();
    if (!std::binary_search(session_.gallery_pool().begin(), session_.gallery_pool().end(), *gallery)) {
      return error_reply(400, "gallery " + std::to_string(*gallery) + " is not in the unlabeled gallery pool");
    }
  }
  StepRecord rec;
  try {
    rec = session_.annotate(probe, gallery, to_string(session_.config().strategy));
  } catch (const Error& e) {
    return error_reply(400, e.what());
  }
  issued_.reset();
  issued_ranking_.reset();
  records_.push_back(rec);
  if (config_.log_path) {
    std::ofstream out(*config_.log_path, std::ios::app);
    out << to_json_line(rec) << '\n';
  }
  if (config_.checkpoint_path && gallery) save_checkpoint(*config_.checkpoint_path, session_.state());
  return reply(200, {{"updated", gallery.has_value()},
                     {"step", session_.steps()},
                     {"budget_left", session_.budget_left()},
                     {"true_match_rank", rec.true_match_rank ? json(*rec.true_match_rank) : json(nullptr)}});
}

HttpReply AnnotationService::log() {
  std::lock_guard lock(mu_);
  std::string out;
  for (const auto& r : records_) out += to_json_line(r) + "\n";
  return {200, out, "application/x-ndjson"};
}

HttpReply AnnotationService::thumbnail(Index index) {
  if (dataset_.images.empty()) return error_reply(404, "manifest provides no image paths");
  if (index < 0 || index >= static_cast<Index>(dataset_.images.size())) {
    return error_reply(404, "no such sample");
  }
  const std::string& path = dataset_.images[static_cast<std::size_t>(index)];
  std::ifstream in(path, std::ios::binary);
  if (!in) return error_reply(404, "image not found");
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string type = "application/octet-stream";
  const auto ext = std::filesystem::path(path).extension().string();
  if (ext == ".png") type = "image/png";
  else if (ext == ".jpg" || ext == ".jpeg") type = "image/jpeg";
  else if (ext == ".bmp") type = "image/bmp";
  return {200, buf.str(), type};
}

std::vector<StepRecord> AnnotationService::records() {
  std::lock_guard lock(mu_);
  return records_;
}

IncrementalState AnnotationService::state_snapshot() {
  std::lock_guard lock(mu_);
  return session_.state();
}

void AnnotationService::install_routes() {
  server_ = std::make_unique<httplib::Server>();
  auto& s = *server_;
  s.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  auto send = [](httplib::Response& res, const HttpReply& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  auto wrong_session = [this](const httplib::Request& req) {
    return req.has_param("session") && req.get_param_value("session") != session_id_;
  };
  s.Get("/api/session/state", [this, send, wrong_session](const httplib::Request& req, httplib::Response& res) {
    send(res, wrong_session(req) ? error_reply(404, "unknown session") : state());
  });
  s.Get("/api/session/next", [this, send, wrong_session](const httplib::Request& req, httplib::Response& res) {
    send(res, wrong_session(req) ? error_reply(404, "unknown session") : next());
  });
  s.Post("/api/session/annotate", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, annotate(req.body));
  });
  s.Options("/api/session/annotate", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  s.Get("/api/session/log", [this, send, wrong_session](const httplib::Request& req, httplib::Response& res) {
    send(res, wrong_session(req) ? error_reply(404, "unknown session") : log());
  });
  s.Get(R"(/api/thumbnails/(\d+))", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, thumbnail(std::stol(req.matches[1])));
  });
  s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string msg = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      msg = e.what();
    }
    res.status = 500;
    res.set_content(json{{"error", msg}}.dump(), "application/json");
  });
  if (config_.static_dir) s.set_mount_point("/", config_.static_dir->string());
}

bool AnnotationService::listen() {
  install_routes();
  spdlog::info("serving session {} on {}:{}", session_id_, config_.host, config_.port);
  return server_->listen(config_.host, config_.port);
}

int AnnotationService::bind_any() {
  install_routes();
  return server_->bind_to_any_port(config_.host);
}

bool AnnotationService::listen_after_bind() { return server_->listen_after_bind(); }

void AnnotationService::stop() {
  if (server_) server_->stop();
}

}  // namespace irs
