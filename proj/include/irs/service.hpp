// include/irs/service.hpp

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

#ifndef IRS_SERVICE_HPP_
#define IRS_SERVICE_HPP_

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "irs/active.hpp"
#include "irs/dataset.hpp"

namespace httplib {
class Server;
}

namespace irs {

/// Everything needed to start an annotation session.
struct SessionConfig {
  std::string manifest;
  ActiveConfig active;
  std::size_t rank_window = 50;
  // "all": every manifest sample is in the unlabeled pool. "train": only the
  // train identities of a random split (split_ratio, active.seed).
  std::string pool = "all";
  double split_ratio = 0.5;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::filesystem::path> log_path;
  std::optional<std::filesystem::path> checkpoint_path;
  std::optional<std::filesystem::path> static_dir;

  void validate() const;
};

/// The unlabeled pool a session config selects from a dataset.
FeatureMatrix session_pool(const FeatureMatrix& fm, const SessionConfig& cfg);

/// Re-applies a recorded annotation sequence to a fresh session.
void replay(LabelingSession& session, const std::vector<StepRecord>& records);
std::vector<StepRecord> read_log(const std::filesystem::path& path);

struct HttpReply {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Single human-in-the-loop session behind a JSON API:
///   GET  /api/session/state
///   GET  /api/session/next
///   POST /api/session/annotate   {probe_index, gallery_index} or {probe_index, skip: true}
///   GET  /api/session/log        (JSON lines)
///   GET  /api/thumbnails/{index}
/// All handlers run under one mutex, so an annotation's model update completes
/// before any later request is answered.
class AnnotationService {
 public:
  AnnotationService(Dataset dataset, SessionConfig config);
  ~AnnotationService();

  HttpReply state();
  HttpReply next();
  HttpReply annotate(const std::string& body);
  HttpReply log();
  HttpReply thumbnail(Index index);

  const std::string& session_id() const { return session_id_; }

  /// Blocks serving HTTP until stop() is called. Returns false if the bind
  /// fails.
  bool listen();
  /// Binds to an ephemeral port on host; returns the port, or -1.
  int bind_any();
  bool listen_after_bind();
  void stop();

  /// Snapshot of the session under the lock.
  std::vector<StepRecord> records();
  IncrementalState state_snapshot();

 private:
  void install_routes();

  Dataset dataset_;
  SessionConfig config_;
  std::string session_id_;
  std::mutex mu_;
  LabelingSession session_;
  std::optional<Index> issued_;
  std::optional<RankList> issued_ranking_;
  std::vector<StepRecord> records_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace irs

#endif  // IRS_SERVICE_HPP_
