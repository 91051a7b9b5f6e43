// src/serialization.cpp

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

#include "irs/serialization.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace irs {

using nlohmann::json;

namespace {

constexpr char kModelMagic[] = "IRSMODL1";
constexpr char kCheckpointMagic[] = "IRSCKPT1";

void write_container(std::ostream& out, const char* magic, const json& header,
                     std::initializer_list<const Matrix*> blocks) {
  const std::string text = header.dump();
  const auto len = static_cast<std::uint64_t>(text.size());
  out.write(magic, 8);
  out.write(reinterpret_cast<const char*>(&len), 8);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const Matrix* m : blocks) write_f64le(out, *m);
  if (!out) throw Error("write failed");
}

json read_header(std::istream& in, const char* magic) {
  std::array<char, 8> got{};
  if (!in.read(got.data(), 8) || std::memcmp(got.data(), magic, 8) != 0) {
    throw Error(std::string("bad magic: expected ") + magic);
  }
  std::uint64_t len = 0;
  if (!in.read(reinterpret_cast<char*>(&len), 8) || len > (1u << 30)) throw Error("bad header length");
  std::string text(len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(len))) throw Error("header truncated");
  return json::parse(text);
}

void expect_shape(const Matrix& m, Index rows, Index cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw Error(std::string("payload '") + what + "' has unexpected shape");
  }
}

}  // namespace

void save_model(std::ostream& out, const EmbeddingModel& model) {
  json h = {{"lambda", model.lambda}, {"d", model.input_dim()}, {"m", model.width()},
            {"solver", model.solver.method}, {"effective_rank", model.solver.effective_rank}};
  if (model.kind == ModelKind::kLinear) {
    h["kind"] = "linear";
    h["payloads"] = {"P"};
    write_container(out, kModelMagic, h, {&model.P});
  } else {
    h["kind"] = "kernel";
    h["kernel"] = model.kernel.kind == KernelKind::kRbf ? "rbf" : "linear";
    h["bandwidth"] = model.kernel.bandwidth;
    h["payloads"] = {"Q", "anchors"};
    write_container(out, kModelMagic, h, {&model.Q, &model.anchors});
  }
}

EmbeddingModel load_model(std::istream& in) {
  const json h = read_header(in, kModelMagic);
  EmbeddingModel m;
  m.lambda = h.at("lambda").get<double>();
  m.solver.method = h.value("solver", std::string{});
  m.solver.effective_rank = h.value("effective_rank", Index{0});
  const auto d = h.at("d").get<Index>();
  const auto w = h.at("m").get<Index>();
  const std::string kind = h.at("kind").get<std::string>();
  if (kind == "linear") {
    m.kind = ModelKind::kLinear;
    m.P = read_f64le(in);
    expect_shape(m.P, d, w, "P");
  } else if (kind == "kernel") {
    m.kind = ModelKind::kKernel;
    m.kernel.kind = h.at("kernel").get<std::string>() == "rbf" ? KernelKind::kRbf : KernelKind::kLinear;
    m.kernel.bandwidth = h.at("bandwidth").get<double>();
    m.Q = read_f64le(in);
    m.anchors = read_f64le(in);
    expect_shape(m.anchors, d, m.Q.rows(), "anchors");
    if (m.Q.cols() != w) throw Error("payload 'Q' has unexpected shape");
  } else {
    throw Error("unknown model kind: " + kind);
  }
  return m;
}

void save_model(const std::filesystem::path& path, const EmbeddingModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path.string());
  save_model(out, model);
}

EmbeddingModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("model file not found: " + path.string());
  return load_model(in);
}

void save_checkpoint(std::ostream& out, const IncrementalState& state) {
  json h = {{"kind", "incremental"},
            {"lambda", state.lambda()},
            {"d", state.dim()},
            {"m", state.P().cols()},
            {"n_seen", state.n_seen()},
            {"update_count", state.update_count()},
            {"classes", state.classes().labels()},
            {"payloads", {"Tinv", "P"}}};
  write_container(out, kCheckpointMagic, h, {&state.Tinv(), &state.P()});
}

IncrementalState load_checkpoint(std::istream& in) {
  const json h = read_header(in, kCheckpointMagic);
  const auto d = h.at("d").get<Index>();
  const auto w = h.at("m").get<Index>();
  Matrix tinv = read_f64le(in);
  Matrix p = read_f64le(in);
  expect_shape(tinv, d, d, "Tinv");
  expect_shape(p, d, w, "P");
  const auto labels = h.at("classes").get<std::vector<Label>>();
  return IncrementalState::restore(std::move(tinv), std::move(p), ClassRegistry(labels),
                                   h.at("lambda").get<double>(), h.at("n_seen").get<Index>(),
                                   h.at("update_count").get<Index>());
}

void save_checkpoint(const std::filesystem::path& path, const IncrementalState& state) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path.string());
  save_checkpoint(out, state);
}

IncrementalState load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("checkpoint not found: " + path.string());
  return load_checkpoint(in);
}

}  // namespace irs
