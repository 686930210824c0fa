// Copyright 2026 The seqgdpp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "seqgdpp/data_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "seqgdpp/errors.hpp"
#include "seqgdpp/eval.hpp"

namespace seqgdpp {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

static_assert(std::endian::native == std::endian::little,
              "feature sidecars are little-endian");

namespace {

std::string read_file(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path.string() + ": cannot open for writing");
  out << content;
  if (!out) throw ParseError(path.string() + ": write failed");
}

ojson parse_document(const std::string &text, const std::string &file) {
  try {
    return ojson::parse(text);
  } catch (const ojson::parse_error &e) {
    throw ParseError(file + ": " + e.what());
  }
}

const ojson &member(const ojson &obj, const char *key, const std::string &file,
                    const std::string &where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(file + ": " + where + ": missing field \"" + key + "\"");
  }
  return obj[key];
}

void check_format_version(const ojson &doc, const std::string &file) {
  const ojson &v = member(doc, "format_version", file, "document");
  if (!v.is_number_integer() || v.get<int>() != 1) {
    throw ParseError(file + ": unsupported format_version (expected 1)");
  }
}

Shot parse_shot(const ojson &node, const std::string &file,
                const std::string &where, bool inline_features) {
  if (!node.is_object()) {
    throw ParseError(file + ": " + where + ": shot must be an object");
  }
  Shot shot;
  const ojson &id = member(node, "id", file, where);
  if (!id.is_number_integer()) {
    throw ParseError(file + ": " + where + ".id: expected an integer");
  }
  shot.id = id.get<std::int64_t>();
  const ojson &time = member(node, "time_s", file, where);
  if (!time.is_number()) {
    throw ParseError(file + ": " + where + ".time_s: expected a number");
  }
  shot.time_s = time.get<double>();
  if (inline_features) {
    const ojson &feature = member(node, "feature", file, where);
    if (!feature.is_array() || feature.empty()) {
      throw ParseError(file + ": " + where +
                       ".feature: expected a nonempty array");
    }
    for (const ojson &v : feature) {
      if (!v.is_number()) {
        throw ParseError(file + ": " + where +
                         ".feature: expected numeric entries");
      }
      shot.feature.push_back(v.get<double>());
    }
  } else if (node.contains("feature")) {
    throw ParseError(file + ": " + where +
                     ".feature: inline features conflict with the sidecar");
  }
  const ojson &tags = member(node, "tags", file, where);
  if (!tags.is_array()) {
    throw ParseError(file + ": " + where + ".tags: expected an array");
  }
  for (const ojson &t : tags) {
    if (!t.is_string()) {
      throw ParseError(file + ": " + where + ".tags: expected strings");
    }
    shot.tags.push_back(t.get<std::string>());
  }
  return shot;
}

// Selections are arrays (one per segment) of sorted, unique local indices.
SelectionSequence parse_selection(const ojson &node,
                                  const SegmentedSequence &seq,
                                  const std::string &file,
                                  const std::string &where) {
  if (!node.is_array() ||
      static_cast<int>(node.size()) != seq.num_segments()) {
    throw IntegrityError(file + ": " + where + ": expected " +
                         std::to_string(seq.num_segments()) +
                         " per-segment index arrays");
  }
  SelectionSequence sel;
  for (int t = 0; t < seq.num_segments(); ++t) {
    const ojson &entry = node[t];
    if (!entry.is_array()) {
      throw IntegrityError(file + ": " + where + "[" + std::to_string(t) +
                           "]: expected an index array");
    }
    SubsetIndex x;
    const int n = static_cast<int>(seq.segment(t).size());
    for (const ojson &v : entry) {
      if (!v.is_number_integer()) {
        throw IntegrityError(file + ": " + where + "[" + std::to_string(t) +
                             "]: expected integer shot indices");
      }
      const int j = v.get<int>();
      if (j < 0 || j >= n) {
        throw IntegrityError(file + ": " + where + "[" + std::to_string(t) +
                             "]: shot index " + std::to_string(j) +
                             " references no shot in segment " +
                             std::to_string(t));
      }
      if (!x.empty() && j <= x.back()) {
        throw IntegrityError(file + ": " + where + "[" + std::to_string(t) +
                             "]: indices must be sorted and unique");
      }
      x.push_back(j);
    }
    sel.selected.push_back(std::move(x));
  }
  return sel;
}

VideoEntry load_video(const fs::path &path) {
  const std::string file = path.string();
  const ojson doc = parse_document(read_file(path), file);
  check_format_version(doc, file);

  const ojson &id = member(doc, "video_id", file, "document");
  if (!id.is_string() || id.get<std::string>().empty()) {
    throw ParseError(file + ": video_id: expected a nonempty string");
  }

  Eigen::MatrixXd sidecar;
  const bool has_sidecar = doc.contains("features_sidecar");
  if (has_sidecar) {
    if (!doc["features_sidecar"].is_string()) {
      throw ParseError(file + ": features_sidecar: expected a filename");
    }
    sidecar = read_feature_sidecar(
        (path.parent_path() / doc["features_sidecar"].get<std::string>())
            .string());
  }

  const ojson &segments = member(doc, "segments", file, "document");
  if (!segments.is_array() || segments.empty()) {
    throw ParseError(file + ": segments: expected a nonempty array");
  }
  std::vector<std::vector<Shot>> grouped;
  int total = 0;
  for (std::size_t t = 0; t < segments.size(); ++t) {
    const ojson &seg = segments[t];
    const std::string seg_where = "segments[" + std::to_string(t) + "]";
    if (!seg.is_array()) {
      throw ParseError(file + ": " + seg_where + ": expected a shot array");
    }
    std::vector<Shot> shots;
    for (std::size_t i = 0; i < seg.size(); ++i) {
      Shot shot = parse_shot(seg[i], file,
                             seg_where + "[" + std::to_string(i) + "]",
                             !has_sidecar);
      if (has_sidecar) {
        if (total >= sidecar.rows()) {
          throw IntegrityError(file + ": sidecar holds " +
                               std::to_string(sidecar.rows()) +
                               " rows, fewer than the shot count");
        }
        shot.feature.assign(sidecar.row(total).begin(),
                            sidecar.row(total).end());
      }
      shots.push_back(std::move(shot));
      ++total;
    }
    grouped.push_back(std::move(shots));
  }
  if (has_sidecar && total != sidecar.rows()) {
    throw IntegrityError(file + ": sidecar holds " +
                         std::to_string(sidecar.rows()) + " rows for " +
                         std::to_string(total) + " shots");
  }

  std::optional<SegmentedSequence> seq;
  try {
    seq.emplace(std::move(grouped));
  } catch (const Error &e) {
    throw IntegrityError(file + ": " + e.what());
  }

  VideoEntry entry{id.get<std::string>(), std::move(*seq), {}, std::nullopt};
  const ojson &summaries = member(doc, "user_summaries", file, "document");
  if (!summaries.is_array()) {
    throw ParseError(file + ": user_summaries: expected an array");
  }
  for (std::size_t u = 0; u < summaries.size(); ++u) {
    entry.user_summaries.push_back(
        parse_selection(summaries[u], entry.seq, file,
                        "user_summaries[" + std::to_string(u) + "]"));
  }
  if (doc.contains("oracle")) {
    entry.oracle = parse_selection(doc["oracle"], entry.seq, file, "oracle");
  }
  return entry;
}

ojson selection_to_json(const SelectionSequence &sel) {
  ojson out = ojson::array();
  for (const SubsetIndex &x : sel.selected) out.push_back(x);
  return out;
}

}  // namespace

int Dataset::feature_dim() const {
  if (videos.empty()) throw ArgumentError("dataset has no videos");
  return videos.front().seq.feature_dim();
}

const VideoEntry &Dataset::video_by_id(const std::string &video_id) const {
  for (const VideoEntry &v : videos) {
    if (v.video_id == video_id) return v;
  }
  throw ArgumentError("no video with id \"" + video_id + "\"");
}

Dataset load_dataset(const std::string &path) {
  fs::path index = path;
  if (fs::is_directory(index)) index /= "index.json";
  const fs::path dir = index.parent_path();
  const std::string file = index.string();

  const ojson doc = parse_document(read_file(index), file);
  check_format_version(doc, file);
  const ojson &videos = member(doc, "videos", file, "document");
  if (!videos.is_array() || videos.empty()) {
    throw ParseError(file + ": videos: expected a nonempty file list");
  }

  Dataset ds;
  std::unordered_set<std::string> seen_ids;
  for (const ojson &name : videos) {
    if (!name.is_string()) {
      throw ParseError(file + ": videos: expected filename strings");
    }
    VideoEntry entry = load_video(dir / name.get<std::string>());
    if (!seen_ids.insert(entry.video_id).second) {
      throw IntegrityError(file + ": duplicate video id \"" + entry.video_id +
                           "\"");
    }
    if (!ds.videos.empty() &&
        entry.seq.feature_dim() != ds.videos.front().seq.feature_dim()) {
      throw IntegrityError(
          file + ": video \"" + entry.video_id + "\" has feature dimension " +
          std::to_string(entry.seq.feature_dim()) + ", expected " +
          std::to_string(ds.videos.front().seq.feature_dim()));
    }
    ds.videos.push_back(std::move(entry));
  }
  return ds;
}

void save_dataset(const Dataset &dataset, const std::string &dir,
                  bool use_sidecar) {
  if (dataset.videos.empty()) throw ArgumentError("dataset has no videos");
  fs::create_directories(dir);
  const fs::path base = dir;

  ojson index;
  index["format_version"] = 1;
  index["videos"] = ojson::array();
  for (const VideoEntry &v : dataset.videos) {
    index["videos"].push_back(v.video_id + ".json");
  }
  write_file(base / "index.json", index.dump(2) + "\n");

  for (const VideoEntry &v : dataset.videos) {
    ojson doc;
    doc["format_version"] = 1;
    doc["video_id"] = v.video_id;
    if (use_sidecar) doc["features_sidecar"] = v.video_id + ".bin";
    doc["segments"] = ojson::array();
    for (int t = 0; t < v.seq.num_segments(); ++t) {
      ojson seg = ojson::array();
      for (const Shot &s : v.seq.segment(t)) {
        ojson node;
        node["id"] = s.id;
        node["time_s"] = s.time_s;
        if (!use_sidecar) node["feature"] = s.feature;
        node["tags"] = s.tags;
        seg.push_back(std::move(node));
      }
      doc["segments"].push_back(std::move(seg));
    }
    doc["user_summaries"] = ojson::array();
    for (const SelectionSequence &u : v.user_summaries) {
      doc["user_summaries"].push_back(selection_to_json(u));
    }
    if (v.oracle) doc["oracle"] = selection_to_json(*v.oracle);
    write_file(base / (v.video_id + ".json"), doc.dump(2) + "\n");

    if (use_sidecar) {
      Eigen::MatrixXd features(v.seq.total_shots(), v.seq.feature_dim());
      for (int i = 0; i < v.seq.total_shots(); ++i) {
        const Shot &s = v.seq.shot(i);
        for (int j = 0; j < v.seq.feature_dim(); ++j) {
          features(i, j) = s.feature[j];
        }
      }
      write_feature_sidecar((base / (v.video_id + ".bin")).string(), features);
    }
  }
}

void write_feature_sidecar(const std::string &path,
                           const Eigen::MatrixXd &features) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out.write("GDPPFEAT", 8);
  const std::uint32_t count = static_cast<std::uint32_t>(features.rows());
  const std::uint32_t dim = static_cast<std::uint32_t>(features.cols());
  out.write(reinterpret_cast<const char *>(&count), sizeof(count));
  out.write(reinterpret_cast<const char *>(&dim), sizeof(dim));
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
      const double v = features(i, j);
      out.write(reinterpret_cast<const char *>(&v), sizeof(v));
    }
  }
  if (!out) throw ParseError(path + ": write failed");
}

Eigen::MatrixXd read_feature_sidecar(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open");
  char magic[8];
  in.read(magic, 8);
  if (!in || std::string(magic, 8) != "GDPPFEAT") {
    throw ParseError(path + ": bad sidecar magic (expected GDPPFEAT)");
  }
  std::uint32_t count = 0;
  std::uint32_t dim = 0;
  in.read(reinterpret_cast<char *>(&count), sizeof(count));
  in.read(reinterpret_cast<char *>(&dim), sizeof(dim));
  if (!in || dim == 0) {
    throw ParseError(path + ": bad sidecar header");
  }
  Eigen::MatrixXd features(count, dim);
  for (std::uint32_t i = 0; i < count; ++i) {
    for (std::uint32_t j = 0; j < dim; ++j) {
      double v = 0.0;
      in.read(reinterpret_cast<char *>(&v), sizeof(v));
      if (!in) throw ParseError(path + ": truncated sidecar");
      features(i, j) = v;
    }
  }
  if (in.peek() != std::ifstream::traits_type::eof()) {
    throw ParseError(path + ": trailing bytes after feature rows");
  }
  return features;
}

std::vector<std::vector<Shot>> segment_every(const std::vector<Shot> &shots,
                                             int m) {
  if (m < 1) throw ArgumentError("segment size must be at least 1");
  if (shots.empty()) throw ArgumentError("cannot segment an empty shot list");
  std::vector<std::vector<Shot>> out;
  for (std::size_t i = 0; i < shots.size(); i += m) {
    const std::size_t end = std::min(shots.size(), i + m);
    out.emplace_back(shots.begin() + i, shots.begin() + end);
  }
  return out;
}

Dataset generate_synthetic(const SynthConfig &c) {
  if (c.n_videos < 1 || c.num_segments < 1 || c.segment_size < 1 ||
      c.feature_dim < 1 || c.n_events < 1 || c.n_users < 1) {
    throw ArgumentError("synthetic counts must be positive");
  }
  const int total = c.num_segments * c.segment_size;
  if (c.n_events > total) {
    throw ArgumentError("n_events exceeds the shot count");
  }
  if (!(c.sigma_n >= 0.0) || !std::isfinite(c.sigma_n) ||
      !(c.shot_spacing_s > 0.0)) {
    throw ArgumentError("invalid noise level or shot spacing");
  }
  for (double p : {c.p_replace, c.p_add, c.p_scene_tag, c.p_noise_tag}) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ArgumentError("perturbation probabilities must lie in [0, 1]");
    }
  }

  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Deterministic well-separated event means: one dominant axis per event,
  // magnitude stepped once the axes wrap around.
  std::vector<Eigen::VectorXd> means(c.n_events);
  for (int e = 0; e < c.n_events; ++e) {
    means[e] = Eigen::VectorXd::Zero(c.feature_dim);
    means[e][e % c.feature_dim] = 3.0 + 1.0 * (e / c.feature_dim);
  }

  Dataset ds;
  for (int v = 0; v < c.n_videos; ++v) {
    // Contiguous event runs of near-equal size covering all shots.
    std::vector<int> run_begin(c.n_events + 1);
    for (int e = 0; e <= c.n_events; ++e) {
      run_begin[e] = static_cast<int>(
          static_cast<std::int64_t>(e) * total / c.n_events);
    }
    std::vector<int> run_of(total);
    for (int e = 0; e < c.n_events; ++e) {
      for (int i = run_begin[e]; i < run_begin[e + 1]; ++i) run_of[i] = e;
    }

    std::vector<std::string> scene_tag(c.n_events);
    for (int e = 0; e < c.n_events; ++e) {
      if (unit(rng) < c.p_scene_tag) {
        scene_tag[e] =
            "scene" + std::to_string(static_cast<int>(unit(rng) * 4.0) % 4);
      }
    }

    std::vector<Shot> flat(total);
    for (int i = 0; i < total; ++i) {
      const int e = run_of[i];
      Shot &s = flat[i];
      s.id = i;
      s.time_s = c.shot_spacing_s * i;
      s.feature.resize(c.feature_dim);
      for (int j = 0; j < c.feature_dim; ++j) {
        s.feature[j] = means[e][j];
        if (c.sigma_n > 0.0) s.feature[j] += c.sigma_n * gauss(rng);
      }
      s.tags.push_back("event" + std::to_string(e));
      if (!scene_tag[e].empty()) s.tags.push_back(scene_tag[e]);
      if (unit(rng) < c.p_noise_tag) {
        s.tags.push_back("blur" +
                         std::to_string(static_cast<int>(unit(rng) * 3.0) % 3));
      }
    }

    std::vector<std::vector<Shot>> segments;
    for (int t = 0; t < c.num_segments; ++t) {
      segments.emplace_back(flat.begin() + t * c.segment_size,
                            flat.begin() + (t + 1) * c.segment_size);
    }
    SegmentedSequence seq(std::move(segments));

    // Each user starts from the first shot of every run and perturbs it
    // without ever dropping an event.
    std::vector<SelectionSequence> users;
    for (int u = 0; u < c.n_users; ++u) {
      std::set<int> picks;
      for (int e = 0; e < c.n_events; ++e) {
        const int begin = run_begin[e];
        const int size = run_begin[e + 1] - begin;
        int pick = begin;
        if (size > 1 && unit(rng) < c.p_replace) {
          std::uniform_int_distribution<int> other(begin + 1,
                                                   begin + size - 1);
          pick = other(rng);
        }
        picks.insert(pick);
        if (size > 1 && unit(rng) < c.p_add) {
          std::uniform_int_distribution<int> offset(0, size - 2);
          int extra = begin + offset(rng);
          if (extra >= pick) ++extra;
          picks.insert(extra);
        }
      }
      SelectionSequence sel;
      sel.selected.assign(c.num_segments, {});
      for (int g : picks) {
        sel.selected[g / c.segment_size].push_back(g % c.segment_size);
      }
      users.push_back(std::move(sel));
    }

    char buf[32];
    std::snprintf(buf, sizeof(buf), "synth_%03d", v);
    VideoEntry entry{buf, std::move(seq), std::move(users), std::nullopt};
    entry.oracle = aggregate_oracle(entry.seq, entry.user_summaries);
    ds.videos.push_back(std::move(entry));
  }
  return ds;
}

std::vector<SplitPlan> make_splits(const Dataset &dataset) {
  const int n = static_cast<int>(dataset.videos.size());
  if (n < 4) {
    throw InsufficientDataError("leave-one-out needs at least 4 videos, got " +
                                std::to_string(n));
  }
  std::vector<SplitPlan> folds;
  for (int i = 0; i < n; ++i) {
    SplitPlan plan;
    plan.test.push_back(dataset.videos[i].video_id);
    plan.validation.push_back(dataset.videos[(i + 1) % n].video_id);
    plan.validation.push_back(dataset.videos[(i + 2) % n].video_id);
    for (int j = 0; j < n; ++j) {
      if (j == i || j == (i + 1) % n || j == (i + 2) % n) continue;
      plan.train.push_back(dataset.videos[j].video_id);
    }
    folds.push_back(std::move(plan));
  }
  return folds;
}

SelectionSequence uniform_baseline(const SegmentedSequence &seq,
                                   int target_length) {
  const int n = seq.total_shots();
  if (target_length < 1 || target_length > n) {
    throw ArgumentError("target length " + std::to_string(target_length) +
                        " outside [1, " + std::to_string(n) + "]");
  }
  SelectionSequence sel;
  sel.selected.assign(seq.num_segments(), {});
  for (int i = 0; i < target_length; ++i) {
    const int g = static_cast<int>(std::llround(
        static_cast<double>(i) * n / target_length));
    int t = seq.num_segments() - 1;
    while (seq.segment_offset(t) > g) --t;
    sel.selected[t].push_back(g - seq.segment_offset(t));
  }
  return sel;
}

PSDKernel load_kernel_json(const std::string &path) {
  const ojson doc = parse_document(read_file(path), path);
  check_format_version(doc, path);
  const ojson &dim = member(doc, "dim", path, "document");
  if (!dim.is_number_integer() || dim.get<int>() < 1) {
    throw ParseError(path + ": dim: expected a positive integer");
  }
  const int n = dim.get<int>();
  const ojson &ids = member(doc, "item_ids", path, "document");
  if (!ids.is_array() || static_cast<int>(ids.size()) != n) {
    throw ParseError(path + ": item_ids: expected " + std::to_string(n) +
                     " integers");
  }
  std::vector<std::int64_t> item_ids;
  for (const ojson &v : ids) {
    if (!v.is_number_integer()) {
      throw ParseError(path + ": item_ids: expected integers");
    }
    item_ids.push_back(v.get<std::int64_t>());
  }
  const ojson &entries = member(doc, "entries", path, "document");
  if (!entries.is_array() || static_cast<int>(entries.size()) != n) {
    throw ParseError(path + ": entries: expected " + std::to_string(n) +
                     " rows");
  }
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    const ojson &row = entries[i];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw ParseError(path + ": entries[" + std::to_string(i) +
                       "]: expected " + std::to_string(n) + " numbers");
    }
    for (int j = 0; j < n; ++j) {
      if (!row[j].is_number()) {
        throw ParseError(path + ": entries[" + std::to_string(i) +
                         "]: expected numbers");
      }
      m(i, j) = row[j].get<double>();
    }
  }
  try {
    return PSDKernel(std::move(m), std::move(item_ids));
  } catch (const Error &e) {
    throw InvalidKernelError(path + ": " + e.what());
  }
}

void save_kernel_json(const PSDKernel &kernel, const std::string &path) {
  ojson doc;
  doc["format_version"] = 1;
  doc["dim"] = kernel.dim();
  doc["item_ids"] = kernel.item_ids();
  doc["entries"] = ojson::array();
  for (int i = 0; i < kernel.dim(); ++i) {
    ojson row = ojson::array();
    for (int j = 0; j < kernel.dim(); ++j) {
      row.push_back(kernel.entries()(i, j));
    }
    doc["entries"].push_back(std::move(row));
  }
  write_file(path, doc.dump(2) + "\n");
}

}  // namespace seqgdpp
