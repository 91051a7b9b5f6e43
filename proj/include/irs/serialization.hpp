// include/irs/serialization.hpp

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

#ifndef IRS_SERIALIZATION_HPP_
#define IRS_SERIALIZATION_HPP_

#include <filesystem>
#include <iosfwd>

#include "irs/incremental.hpp"
#include "irs/regression.hpp"

namespace irs {

// Container layout shared by model files and state checkpoints:
//   8-byte magic ("IRSMODL1" or "IRSCKPT1")
//   u64 little-endian header length, then that many bytes of JSON
//   one "f64le" block per entry of header["payloads"], in order
//
// Model header: {kind: "linear"|"kernel", lambda, d, m, kernel?, bandwidth?,
//                payloads: ["P"] or ["Q", "anchors"]}
// Checkpoint header: {kind: "incremental", lambda, d, m, n_seen,
//                     update_count, classes: [...], payloads: ["Tinv", "P"]}

void save_model(std::ostream& out, const EmbeddingModel& model);
EmbeddingModel load_model(std::istream& in);
void save_model(const std::filesystem::path& path, const EmbeddingModel& model);
EmbeddingModel load_model(const std::filesystem::path& path);

void save_checkpoint(std::ostream& out, const IncrementalState& state);
IncrementalState load_checkpoint(std::istream& in);
void save_checkpoint(const std::filesystem::path& path, const IncrementalState& state);
IncrementalState load_checkpoint(const std::filesystem::path& path);

}  // namespace irs

#endif  // IRS_SERIALIZATION_HPP_
