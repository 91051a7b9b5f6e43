// src/dataset.cpp

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

#include "irs/dataset.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace irs {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::array<char, 8> kMagic = {'I', 'R', 'S', 'F', 'E', 'A', 'T', '1'};

static_assert(std::endian::native == std::endian::little,
              "f64le I/O assumes a little-endian host");

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  return out;
}

bool parse_double(const std::string& s, double& v) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [p, ec] = std::from_chars(first, last, v);
  return ec == std::errc() && p == last;
}

bool parse_label(const std::string& s, Label& v) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size();
}

// Integer label list from a file: one label per line, or "id,cam" rows in
// which case `column` picks the field. A non-numeric first line is a header.
std::vector<Label> read_label_file(const fs::path& path, std::size_t column) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open label file: " + path.string());
  std::vector<Label> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    auto cells = split_commas(line);
    const std::size_t pick = cells.size() > 1 ? column : 0;
    Label v = 0;
    if (pick >= cells.size() || !parse_label(cells[pick], v)) {
      if (out.empty() && lineno == 1) continue;
      throw Error("bad label at line " + std::to_string(lineno) + " of " + path.string());
    }
    out.push_back(v);
  }
  return out;
}

std::vector<Label> labels_from_json(const json& node, const fs::path& base,
                                    std::size_t column, const char* what) {
  if (node.is_array()) return node.get<std::vector<Label>>();
  if (node.is_string()) {
    fs::path p = node.get<std::string>();
    if (p.is_relative()) p = base / p;
    return read_label_file(p, column);
  }
  throw Error(std::string("manifest field '") + what + "' must be an array or a path");
}

}  // namespace

FeatureMatrix::FeatureMatrix(Matrix data, std::vector<Label> ids, std::vector<Label> cams)
    : data_(std::move(data)), ids_(std::move(ids)), cams_(std::move(cams)) {
  if (data_.rows() < 1 || data_.cols() < 1) throw Error("feature matrix must have d >= 1 and n >= 1");
  const auto n = static_cast<std::size_t>(data_.cols());
  if (ids_.size() != n || cams_.size() != n) {
    throw Error("label count mismatch: n=" + std::to_string(n) + ", ids=" +
                std::to_string(ids_.size()) + ", cams=" + std::to_string(cams_.size()));
  }
  for (Index j = 0; j < data_.cols(); ++j) {
    for (Index i = 0; i < data_.rows(); ++i) {
      if (!std::isfinite(data_(i, j))) {
        throw Error("non-finite value at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
}

FeatureMatrix FeatureMatrix::select(std::span<const Index> columns) const {
  Matrix d(dim(), static_cast<Index>(columns.size()));
  std::vector<Label> ids, cams;
  ids.reserve(columns.size());
  cams.reserve(columns.size());
  for (std::size_t k = 0; k < columns.size(); ++k) {
    const Index c = columns[k];
    if (c < 0 || c >= size()) throw Error("column index out of range");
    d.col(static_cast<Index>(k)) = data_.col(c);
    ids.push_back(ids_[c]);
    cams.push_back(cams_[c]);
  }
  return FeatureMatrix(std::move(d), std::move(ids), std::move(cams));
}

FeatureMatrix FeatureMatrix::concat(const FeatureMatrix& a, const FeatureMatrix& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.dim() != b.dim()) throw Error("concat: dimension mismatch");
  Matrix d(a.dim(), a.size() + b.size());
  d << a.data(), b.data();
  std::vector<Label> ids = a.ids(), cams = a.cams();
  ids.insert(ids.end(), b.ids().begin(), b.ids().end());
  cams.insert(cams.end(), b.cams().begin(), b.cams().end());
  return FeatureMatrix(std::move(d), std::move(ids), std::move(cams));
}

std::vector<Label> FeatureMatrix::distinct_ids() const {
  std::vector<Label> out;
  std::unordered_set<Label> seen;
  for (Label l : ids_) {
    if (seen.insert(l).second) out.push_back(l);
  }
  return out;
}

void write_f64le(std::ostream& out, const Matrix& m) {
  const auto rows = static_cast<std::uint32_t>(m.rows());
  const auto cols = static_cast<std::uint32_t>(m.cols());
  out.write(kMagic.data(), kMagic.size());
  out.write(reinterpret_cast<const char*>(&rows), 4);
  out.write(reinterpret_cast<const char*>(&cols), 4);
  // Eigen's default storage is column-major, which is the on-disk order.
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
  if (!out) throw Error("write failed");
}

Matrix read_f64le(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw Error("bad magic: expected IRSFEAT1");
  }
  std::uint32_t rows = 0, cols = 0;
  if (!in.read(reinterpret_cast<char*>(&rows), 4) || !in.read(reinterpret_cast<char*>(&cols), 4)) {
    throw Error("header truncated");
  }
  Matrix m(rows, cols);
  const auto bytes = static_cast<std::streamsize>(sizeof(double) * m.size());
  in.read(reinterpret_cast<char*>(m.data()), bytes);
  if (in.gcount() != bytes) throw Error("payload truncated");
  return m;
}

void write_f64le_file(const fs::path& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path.string());
  write_f64le(out, m);
}

Matrix read_f64le_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open feature file: " + path.string());
  Matrix m = read_f64le(in);
  if (in.peek() != std::char_traits<char>::eof()) throw Error("trailing bytes after payload");
  return m;
}

Matrix read_csv_features(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open feature file: " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split_commas(line);
    const std::size_t row = rows.size() + 1;
    if (rows.empty()) width = cells.size();
    if (cells.size() != width) {
      throw Error("dimension mismatch at row " + std::to_string(row) + ": expected " +
                  std::to_string(width) + " values, got " + std::to_string(cells.size()));
    }
    std::vector<double> vals(width);
    for (std::size_t c = 0; c < width; ++c) {
      if (!parse_double(cells[c], vals[c])) {
        throw Error("unparseable value at (" + std::to_string(row) + "," + std::to_string(c + 1) + ")");
      }
      if (!std::isfinite(vals[c])) {
        throw Error("non-finite value at (" + std::to_string(row) + "," + std::to_string(c + 1) + ")");
      }
    }
    rows.push_back(std::move(vals));
  }
  Matrix m(static_cast<Index>(width), static_cast<Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t i = 0; i < width; ++i) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[j][i];
  }
  return m;
}

Dataset load_features(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw Error("manifest not found: " + manifest_path.string());
  json mf;
  try {
    mf = json::parse(in);
  } catch (const json::exception& e) {
    throw Error("manifest " + manifest_path.string() + " is not valid JSON: " + e.what());
  }
  const fs::path base = manifest_path.parent_path();
  for (const char* key : {"features", "format", "d", "n", "ids", "cams"}) {
    if (!mf.contains(key)) throw Error(std::string("manifest missing field '") + key + "'");
  }
  fs::path feat = mf["features"].get<std::string>();
  if (feat.is_relative()) feat = base / feat;
  if (!fs::exists(feat)) throw Error("feature file not found: " + feat.string());

  const std::string format = mf["format"].get<std::string>();
  Matrix data;
  if (format == "f64le") {
    data = read_f64le_file(feat);
  } else if (format == "csv") {
    data = read_csv_features(feat);
  } else {
    throw Error("unsupported feature format: " + format);
  }
  const auto d = mf["d"].get<Index>();
  const auto n = mf["n"].get<Index>();
  if (data.rows() != d || data.cols() != n) {
    throw Error("dimension mismatch: manifest says d=" + std::to_string(d) + " n=" + std::to_string(n) +
                ", file has d=" + std::to_string(data.rows()) + " n=" + std::to_string(data.cols()));
  }
  auto ids = labels_from_json(mf["ids"], base, 0, "ids");
  auto cams = labels_from_json(mf["cams"], base, 1, "cams");

  Dataset ds;
  ds.name = mf.value("name", std::string{});
  ds.features = FeatureMatrix(std::move(data), std::move(ids), std::move(cams));
  if (mf.contains("images")) {
    for (const auto& p : mf["images"]) {
      fs::path ip = p.get<std::string>();
      if (ip.is_relative()) ip = base / ip;
      ds.images.push_back(ip.string());
    }
    if (ds.images.size() != static_cast<std::size_t>(n)) throw Error("image path count mismatch");
  }
  if (mf.contains("preprocess")) {
    for (const auto& op : mf["preprocess"]) {
      if (op.get<std::string>() == "l2") {
        ds.features = l2_normalize(ds.features);
      } else {
        throw Error("unknown preprocessing op: " + op.get<std::string>());
      }
    }
  }
  return ds;
}

void write_dataset(const fs::path& manifest_path, const Dataset& ds, FeatureFormat format) {
  const fs::path base = manifest_path.parent_path();
  if (!base.empty()) fs::create_directories(base);
  const std::string stem = manifest_path.stem().string();
  const FeatureMatrix& fm = ds.features;
  std::string feat_name;
  if (format == FeatureFormat::kF64le) {
    feat_name = stem + ".f64";
    write_f64le_file(base / feat_name, fm.data());
  } else {
    feat_name = stem + ".csv";
    std::ofstream out(base / feat_name);
    out.precision(17);
    for (Index j = 0; j < fm.size(); ++j) {
      for (Index i = 0; i < fm.dim(); ++i) out << (i ? "," : "") << fm.data()(i, j);
      out << '\n';
    }
    if (!out) throw Error("write failed: " + (base / feat_name).string());
  }
  json mf = {{"name", ds.name},
             {"features", feat_name},
             {"format", format == FeatureFormat::kF64le ? "f64le" : "csv"},
             {"d", fm.dim()},
             {"n", fm.size()},
             {"ids", fm.ids()},
             {"cams", fm.cams()}};
  if (!ds.images.empty()) mf["images"] = ds.images;
  std::ofstream out(manifest_path);
  if (!out) throw Error("cannot open for writing: " + manifest_path.string());
  out << mf.dump(2) << '\n';
}

SplitSpec make_split(const FeatureMatrix& fm, double ratio, std::uint64_t seed, Label probe_cam,
                     Label gallery_cam) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error("split ratio must be in (0,1)");
  if (probe_cam == gallery_cam) throw Error("probe and gallery cameras must differ");
  std::vector<Label> ids = fm.distinct_ids();
  if (ids.size() < 2) throw Error("split needs at least 2 identities");
  std::sort(ids.begin(), ids.end());
  Rng rng(seed);
  rng.shuffle(ids);
  auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(ids.size())));
  n_train = std::clamp<std::size_t>(n_train, 1, ids.size() - 1);
  SplitSpec s;
  s.train_ids.insert(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test_ids.insert(ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());
  s.probe_cam = probe_cam;
  s.gallery_cam = gallery_cam;
  s.seed = seed;
  return s;
}

std::vector<Index> columns_where(const FeatureMatrix& fm, const std::set<Label>& ids, Label cam) {
  std::vector<Index> out;
  for (Index j = 0; j < fm.size(); ++j) {
    if (fm.cams()[j] == cam && ids.count(fm.ids()[j])) out.push_back(j);
  }
  return out;
}

FeatureMatrix gen_synthetic(const SyntheticSpec& spec) {
  if (spec.num_ids < 2 || spec.imgs_per_id_per_cam < 1 || spec.dim < 2) {
    throw Error("synthetic spec requires num_ids >= 2, imgs_per_id_per_cam >= 1, d >= 2");
  }
  if (spec.view_shift_scale < 0 || spec.noise_scale < 0) throw Error("scales must be nonnegative");
  Rng rng(spec.seed);
  const Index d = spec.dim;
  Vector shift(d);
  for (Index i = 0; i < d; ++i) shift(i) = rng.normal();
  Matrix base(d, spec.num_ids);
  for (Index k = 0; k < spec.num_ids; ++k) {
    for (Index i = 0; i < d; ++i) base(i, k) = rng.normal();
  }
  const Index n = static_cast<Index>(spec.num_ids) * 2 * spec.imgs_per_id_per_cam;
  Matrix data(d, n);
  std::vector<Label> ids, cams;
  ids.reserve(n);
  cams.reserve(n);
  Index col = 0;
  for (Index k = 0; k < spec.num_ids; ++k) {
    for (Label cam = 1; cam <= 2; ++cam) {
      for (int img = 0; img < spec.imgs_per_id_per_cam; ++img) {
        Vector x = base.col(k);
        if (cam == 2) x += spec.view_shift_scale * shift;
        for (Index i = 0; i < d; ++i) x(i) += spec.noise_scale * rng.normal();
        data.col(col++) = x;
        ids.push_back(k + 1);
        cams.push_back(cam);
      }
    }
  }
  return FeatureMatrix(std::move(data), std::move(ids), std::move(cams));
}

FeatureMatrix l2_normalize(const FeatureMatrix& fm) {
  Matrix d = fm.data();
  for (Index j = 0; j < d.cols(); ++j) {
    const double nrm = d.col(j).norm();
    if (nrm > 0) d.col(j) /= nrm;
  }
  return FeatureMatrix(std::move(d), fm.ids(), fm.cams());
}

}  // namespace irs
