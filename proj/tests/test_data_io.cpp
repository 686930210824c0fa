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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "seqgdpp/checkpoint.hpp"
#include "seqgdpp/data_io.hpp"
#include "seqgdpp/errors.hpp"

namespace {

namespace fs = std::filesystem;
using namespace seqgdpp;

fs::path fresh_dir(const std::string &name) {
  fs::path p = fs::temp_directory_path() / ("seqgdpp_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string read_bytes(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

void write_text(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

// Byte-compares every regular file of two directories.
void check_dirs_equal(const fs::path &a, const fs::path &b) {
  std::vector<std::string> names_a, names_b;
  for (const auto &e : fs::directory_iterator(a)) {
    names_a.push_back(e.path().filename().string());
  }
  for (const auto &e : fs::directory_iterator(b)) {
    names_b.push_back(e.path().filename().string());
  }
  std::sort(names_a.begin(), names_a.end());
  std::sort(names_b.begin(), names_b.end());
  REQUIRE(names_a == names_b);
  for (const std::string &name : names_a) {
    CHECK(read_bytes(a / name) == read_bytes(b / name));
  }
}

Shot make_shot(std::int64_t id, double time_s, std::vector<double> feature) {
  Shot s;
  s.id = id;
  s.time_s = time_s;
  s.feature = std::move(feature);
  return s;
}

SynthConfig tiny_config() {
  SynthConfig c;
  c.n_videos = 2;
  c.num_segments = 2;
  c.segment_size = 3;
  c.feature_dim = 2;
  c.n_events = 3;
  c.sigma_n = 0.2;
  c.seed = 7;
  return c;
}

const char *kMinimalIndex =
    "{\"format_version\":1,\"videos\":[\"v0.json\"]}";

std::string minimal_video(const std::string &summaries,
                          const std::string &oracle = "") {
  std::string doc =
      "{\"format_version\":1,\"video_id\":\"v0\",\"segments\":"
      "[[{\"id\":0,\"time_s\":0.0,\"feature\":[1.0],\"tags\":[]},"
      "{\"id\":1,\"time_s\":1.0,\"feature\":[2.0],\"tags\":[\"a\"]}]],"
      "\"user_summaries\":" +
      summaries;
  if (!oracle.empty()) doc += ",\"oracle\":" + oracle;
  return doc + "}";
}

}  // namespace

TEST_CASE("segment_every cuts fixed-size segments with a short tail") {
  std::vector<Shot> shots;
  for (int i = 0; i < 10; ++i) {
    shots.push_back(make_shot(i, static_cast<double>(i), {0.0}));
  }
  const auto segments = segment_every(shots, 3);
  REQUIRE(segments.size() == 4);
  CHECK(segments[0].size() == 3);
  CHECK(segments[1].size() == 3);
  CHECK(segments[2].size() == 3);
  CHECK(segments[3].size() == 1);
  CHECK(segments[3][0].id == 9);
  CHECK(segment_every(shots).size() == 1);
  CHECK_THROWS_AS(segment_every(shots, 0), ArgumentError);
  CHECK_THROWS_AS(segment_every({}, 3), ArgumentError);
}

TEST_CASE("uniform_baseline spaces shots by the rounding rule") {
  std::vector<std::vector<Shot>> segments;
  int id = 0;
  for (int size : {4, 3, 3}) {
    std::vector<Shot> segment;
    for (int i = 0; i < size; ++i, ++id) {
      segment.push_back(make_shot(id, static_cast<double>(id), {0.0}));
    }
    segments.push_back(std::move(segment));
  }
  const SegmentedSequence seq(segments);
  REQUIRE(seq.total_shots() == 10);

  // N = 10, target 5: global indices {0, 2, 4, 6, 8}.
  const SelectionSequence five = uniform_baseline(seq, 5);
  CHECK(five.selected[0] == SubsetIndex{0, 2});
  CHECK(five.selected[1] == SubsetIndex{0, 2});
  CHECK(five.selected[2] == SubsetIndex{1});
  CHECK(total_selected(five) == 5);

  const SelectionSequence all = uniform_baseline(seq, 10);
  CHECK(total_selected(all) == 10);
  CHECK(all.selected[0] == SubsetIndex{0, 1, 2, 3});

  const SelectionSequence one = uniform_baseline(seq, 1);
  CHECK(one.selected[0] == SubsetIndex{0});
  CHECK(one.selected[1].empty());
  CHECK(one.selected[2].empty());

  CHECK_THROWS_AS(uniform_baseline(seq, 0), ArgumentError);
  CHECK_THROWS_AS(uniform_baseline(seq, 11), ArgumentError);
}

TEST_CASE("make_splits rotates validation folds over every video") {
  SynthConfig c = tiny_config();
  c.n_videos = 12;
  const Dataset ds = generate_synthetic(c);
  const std::vector<SplitPlan> folds = make_splits(ds);
  REQUIRE(folds.size() == 12);

  std::set<std::string> tested;
  for (int i = 0; i < 12; ++i) {
    const SplitPlan &fold = folds[i];
    REQUIRE(fold.test.size() == 1);
    REQUIRE(fold.validation.size() == 2);
    REQUIRE(fold.train.size() == 9);
    CHECK(fold.test[0] == ds.videos[i].video_id);
    CHECK(fold.validation[0] == ds.videos[(i + 1) % 12].video_id);
    CHECK(fold.validation[1] == ds.videos[(i + 2) % 12].video_id);
    tested.insert(fold.test[0]);

    std::set<std::string> everyone(fold.train.begin(), fold.train.end());
    everyone.insert(fold.validation.begin(), fold.validation.end());
    everyone.insert(fold.test.begin(), fold.test.end());
    CHECK(everyone.size() == 12);
  }
  CHECK(tested.size() == 12);

  c.n_videos = 4;
  const std::vector<SplitPlan> four = make_splits(generate_synthetic(c));
  REQUIRE(four.size() == 4);
  CHECK(four[0].train.size() == 1);
  CHECK(four[0].validation.size() == 2);
  CHECK(four[0].test.size() == 1);

  c.n_videos = 3;
  CHECK_THROWS_AS(make_splits(generate_synthetic(c)),
                  InsufficientDataError);
}

TEST_CASE("generate_synthetic is deterministic and well-formed") {
  const SynthConfig c = tiny_config();
  const Dataset a = generate_synthetic(c);
  const Dataset b = generate_synthetic(c);

  REQUIRE(a.videos.size() == 2);
  CHECK(a.videos[0].video_id == "synth_000");
  CHECK(a.videos[1].video_id == "synth_001");
  CHECK(a.feature_dim() == 2);
  for (const VideoEntry &v : a.videos) {
    CHECK(v.seq.num_segments() == c.num_segments);
    for (int t = 0; t < v.seq.num_segments(); ++t) {
      CHECK(static_cast<int>(v.seq.segment(t).size()) == c.segment_size);
    }
    CHECK(static_cast<int>(v.user_summaries.size()) == c.n_users);
    REQUIRE(v.oracle.has_value());
    CHECK(total_selected(*v.oracle) >= 1);
  }

  const fs::path dir_a = fresh_dir("synth_a");
  const fs::path dir_b = fresh_dir("synth_b");
  save_dataset(a, dir_a.string());
  save_dataset(b, dir_b.string());
  check_dirs_equal(dir_a, dir_b);
}

TEST_CASE("synthetic events control the feature and coverage structure") {
  SynthConfig c = tiny_config();
  c.sigma_n = 0.0;
  c.n_events = 3;
  const Dataset ds = generate_synthetic(c);
  for (const VideoEntry &v : ds.videos) {
    std::set<std::vector<double>> distinct;
    for (int i = 0; i < v.seq.total_shots(); ++i) {
      distinct.insert(v.seq.shot(i).feature);
    }
    CHECK(distinct.size() == 3);
  }

  // One event per shot: every user summary covers every shot.
  c.n_events = c.num_segments * c.segment_size;
  c.p_replace = 0.3;
  c.p_add = 0.3;
  const Dataset full = generate_synthetic(c);
  for (const VideoEntry &v : full.videos) {
    for (const SelectionSequence &u : v.user_summaries) {
      CHECK(total_selected(u) == v.seq.total_shots());
    }
    CHECK(total_selected(*v.oracle) == v.seq.total_shots());
  }
}

TEST_CASE("generate_synthetic rejects invalid configurations") {
  SynthConfig c = tiny_config();
  c.n_videos = 0;
  CHECK_THROWS_AS(generate_synthetic(c), ArgumentError);
  c = tiny_config();
  c.n_events = c.num_segments * c.segment_size + 1;
  CHECK_THROWS_AS(generate_synthetic(c), ArgumentError);
  c = tiny_config();
  c.sigma_n = -0.1;
  CHECK_THROWS_AS(generate_synthetic(c), ArgumentError);
  c = tiny_config();
  c.p_replace = 1.5;
  CHECK_THROWS_AS(generate_synthetic(c), ArgumentError);
  c = tiny_config();
  c.shot_spacing_s = 0.0;
  CHECK_THROWS_AS(generate_synthetic(c), ArgumentError);
}

TEST_CASE("dataset save and load round-trip byte for byte") {
  SynthConfig c = tiny_config();
  c.p_scene_tag = 0.8;
  c.p_noise_tag = 0.3;
  const Dataset ds = generate_synthetic(c);

  for (bool sidecar : {false, true}) {
    const std::string tag = sidecar ? "rt_sidecar" : "rt_json";
    const fs::path first = fresh_dir(tag + "_1");
    const fs::path second = fresh_dir(tag + "_2");
    save_dataset(ds, first.string(), sidecar);
    const Dataset loaded = load_dataset(first.string());
    save_dataset(loaded, second.string(), sidecar);
    check_dirs_equal(first, second);

    REQUIRE(loaded.videos.size() == ds.videos.size());
    for (std::size_t v = 0; v < ds.videos.size(); ++v) {
      const VideoEntry &x = ds.videos[v];
      const VideoEntry &y = loaded.videos[v];
      CHECK(x.video_id == y.video_id);
      REQUIRE(y.seq.total_shots() == x.seq.total_shots());
      for (int i = 0; i < x.seq.total_shots(); ++i) {
        CHECK(x.seq.shot(i).id == y.seq.shot(i).id);
        CHECK(x.seq.shot(i).feature == y.seq.shot(i).feature);
        CHECK(x.seq.shot(i).tags == y.seq.shot(i).tags);
      }
      REQUIRE(y.oracle.has_value());
      CHECK(y.oracle->selected == x.oracle->selected);
      REQUIRE(y.user_summaries.size() == x.user_summaries.size());
      for (std::size_t u = 0; u < x.user_summaries.size(); ++u) {
        CHECK(y.user_summaries[u].selected == x.user_summaries[u].selected);
      }
    }
  }
}

TEST_CASE("load_dataset accepts a minimal document") {
  const fs::path dir = fresh_dir("minimal");
  write_text(dir / "index.json", kMinimalIndex);
  write_text(dir / "v0.json",
             "{\"format_version\":1,\"video_id\":\"v0\",\"segments\":"
             "[[{\"id\":0,\"time_s\":0.0,\"feature\":[1.5],\"tags\":[]}]],"
             "\"user_summaries\":[]}");
  const Dataset ds = load_dataset(dir.string());
  REQUIRE(ds.videos.size() == 1);
  CHECK(ds.videos[0].video_id == "v0");
  CHECK(ds.videos[0].seq.num_segments() == 1);
  CHECK(ds.videos[0].seq.total_shots() == 1);
  CHECK(ds.videos[0].seq.feature_dim() == 1);
  CHECK(ds.videos[0].user_summaries.empty());
  CHECK(!ds.videos[0].oracle.has_value());
  // The index file itself also names the dataset.
  CHECK(load_dataset((dir / "index.json").string()).videos.size() == 1);

  CHECK(ds.video_by_id("v0").video_id == "v0");
  CHECK_THROWS_AS(ds.video_by_id("nope"), ArgumentError);
}

TEST_CASE("load_dataset rejects malformed documents") {
  const fs::path dir = fresh_dir("malformed");

  CHECK_THROWS_AS(load_dataset((dir / "missing").string()), ParseError);

  write_text(dir / "index.json", "{\"format_version\":1,\"videos\":[]}");
  CHECK_THROWS_AS(load_dataset(dir.string()), ParseError);

  write_text(dir / "index.json", "{\"format_version\":2,"
                                 "\"videos\":[\"v0.json\"]}");
  CHECK_THROWS_AS(load_dataset(dir.string()), ParseError);

  write_text(dir / "index.json", kMinimalIndex);
  write_text(dir / "v0.json", "{not json");
  CHECK_THROWS_AS(load_dataset(dir.string()), ParseError);

  // Shot without features (and no sidecar declared).
  write_text(dir / "v0.json",
             "{\"format_version\":1,\"video_id\":\"v0\",\"segments\":"
             "[[{\"id\":0,\"time_s\":0.0,\"tags\":[]}]],"
             "\"user_summaries\":[]}");
  CHECK_THROWS_AS(load_dataset(dir.string()), ParseError);

  // Non-string tag.
  write_text(dir / "v0.json",
             "{\"format_version\":1,\"video_id\":\"v0\",\"segments\":"
             "[[{\"id\":0,\"time_s\":0.0,\"feature\":[1.0],\"tags\":[3]}]],"
             "\"user_summaries\":[]}");
  CHECK_THROWS_AS(load_dataset(dir.string()), ParseError);

  // Mixed feature dimensions inside one video.
  write_text(dir / "v0.json",
             "{\"format_version\":1,\"video_id\":\"v0\",\"segments\":"
             "[[{\"id\":0,\"time_s\":0.0,\"feature\":[1.0],\"tags\":[]},"
             "{\"id\":1,\"time_s\":1.0,\"feature\":[1.0,2.0],\"tags\":[]}]],"
             "\"user_summaries\":[]}");
  CHECK_THROWS_AS(load_dataset(dir.string()), IntegrityError);

  // Summary referencing a shot index outside the segment.
  write_text(dir / "v0.json", minimal_video("[[[5]]]"));
  CHECK_THROWS_AS(load_dataset(dir.string()), IntegrityError);

  // Summary with the wrong number of segments.
  write_text(dir / "v0.json", minimal_video("[[]]"));
  CHECK_THROWS_AS(load_dataset(dir.string()), IntegrityError);

  // Unsorted selection indices.
  write_text(dir / "v0.json", minimal_video("[[[1,0]]]"));
  CHECK_THROWS_AS(load_dataset(dir.string()), IntegrityError);

  // Oracle validated like any selection.
  write_text(dir / "v0.json", minimal_video("[]", "[[3]]"));
  CHECK_THROWS_AS(load_dataset(dir.string()), IntegrityError);

  // Duplicate video ids across the index.
  write_text(dir / "index.json",
             "{\"format_version\":1,\"videos\":[\"v0.json\",\"v0.json\"]}");
  write_text(dir / "v0.json", minimal_video("[]"));
  CHECK_THROWS_AS(load_dataset(dir.string()), IntegrityError);

  // Feature dimension differs across videos.
  write_text(dir / "index.json",
             "{\"format_version\":1,\"videos\":[\"v0.json\",\"v1.json\"]}");
  write_text(dir / "v1.json",
             "{\"format_version\":1,\"video_id\":\"v1\",\"segments\":"
             "[[{\"id\":0,\"time_s\":0.0,\"feature\":[1.0,2.0],"
             "\"tags\":[]}]],\"user_summaries\":[]}");
  CHECK_THROWS_AS(load_dataset(dir.string()), IntegrityError);
}

TEST_CASE("feature sidecars round-trip and reject corruption") {
  const fs::path dir = fresh_dir("sidecar");
  const fs::path bin = dir / "f.bin";
  std::mt19937_64 rng(11);
  Eigen::MatrixXd features = oracle::random_psd(4, rng);
  write_feature_sidecar(bin.string(), features);
  const Eigen::MatrixXd back = read_feature_sidecar(bin.string());
  REQUIRE(back.rows() == 4);
  REQUIRE(back.cols() == 4);
  CHECK((back - features).cwiseAbs().maxCoeff() == 0.0);

  const std::string good = read_bytes(bin);

  std::string bad = good;
  bad[0] = 'X';
  write_text(bin, bad);
  CHECK_THROWS_AS(read_feature_sidecar(bin.string()), ParseError);

  write_text(bin, good.substr(0, good.size() - 4));
  CHECK_THROWS_AS(read_feature_sidecar(bin.string()), ParseError);

  write_text(bin, good + "x");
  CHECK_THROWS_AS(read_feature_sidecar(bin.string()), ParseError);

  write_text(bin, good.substr(0, 10));
  CHECK_THROWS_AS(read_feature_sidecar(bin.string()), ParseError);

  CHECK_THROWS_AS(read_feature_sidecar((dir / "none.bin").string()),
                  ParseError);
}

TEST_CASE("sidecar row counts must match the shot count") {
  const fs::path dir = fresh_dir("sidecar_rows");
  write_text(dir / "index.json", kMinimalIndex);
  write_text(dir / "v0.json",
             "{\"format_version\":1,\"video_id\":\"v0\","
             "\"features_sidecar\":\"v0.bin\",\"segments\":"
             "[[{\"id\":0,\"time_s\":0.0,\"tags\":[]},"
             "{\"id\":1,\"time_s\":1.0,\"tags\":[]}]],"
             "\"user_summaries\":[]}");

  write_feature_sidecar((dir / "v0.bin").string(),
                        Eigen::MatrixXd::Identity(1, 3));
  CHECK_THROWS_AS(load_dataset(dir.string()), IntegrityError);

  Eigen::MatrixXd three(3, 3);
  three << 1, 0, 0, 0, 1, 0, 0, 0, 1;
  write_feature_sidecar((dir / "v0.bin").string(), three);
  CHECK_THROWS_AS(load_dataset(dir.string()), IntegrityError);

  Eigen::MatrixXd two(2, 3);
  two << 1, 2, 3, 4, 5, 6;
  write_feature_sidecar((dir / "v0.bin").string(), two);
  const Dataset ds = load_dataset(dir.string());
  CHECK(ds.videos[0].seq.shot(1).feature == std::vector<double>{4, 5, 6});
}

TEST_CASE("checkpoint kind strings name the four trainers") {
  CHECK(checkpoint_kind_string(ModelKind::kSeqDPP, false) == "seqdpp");
  CHECK(checkpoint_kind_string(ModelKind::kSeqDPP, true) == "lm-seqdpp");
  CHECK(checkpoint_kind_string(ModelKind::kSeqGDPP, false) == "seqgdpp");
  CHECK(checkpoint_kind_string(ModelKind::kSeqGDPP, true) == "lm-seqgdpp");
  for (ModelKind kind : {ModelKind::kSeqDPP, ModelKind::kSeqGDPP}) {
    for (bool lm : {false, true}) {
      const Checkpoint c =
          checkpoint_kind_from_string(checkpoint_kind_string(kind, lm));
      CHECK(c.kind == kind);
      CHECK(c.large_margin == lm);
    }
  }
  CHECK_THROWS_AS(checkpoint_kind_from_string("gdpp"), ParseError);
  CHECK_THROWS_AS(checkpoint_kind_from_string(""), ParseError);
}

TEST_CASE("checkpoints round-trip byte for byte") {
  Checkpoint ckpt;
  ckpt.kind = ModelKind::kSeqDPP;
  ckpt.large_margin = true;
  ckpt.params = default_params(3, 2, 2.5, 7);
  ckpt.params.beta = {0.2, 0.3, 0.5};
  ckpt.params.w << 0.5, -1.25;

  const fs::path dir = fresh_dir("ckpt");
  const fs::path path = dir / "model.json";
  save_checkpoint(ckpt, path.string());
  const Checkpoint back = load_checkpoint(path.string());
  CHECK(back.kind == ckpt.kind);
  CHECK(back.large_margin == ckpt.large_margin);
  CHECK(back.params.beta == ckpt.params.beta);
  CHECK((back.params.w - ckpt.params.w).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.params.alpha == ckpt.params.alpha);
  CHECK(back.params.m0 == ckpt.params.m0);
  CHECK(back.params.bandwidth_exponents == ckpt.params.bandwidth_exponents);

  const std::string first = read_bytes(path);
  save_checkpoint(back, path.string());
  CHECK(read_bytes(path) == first);
}

TEST_CASE("checkpoint parsing rejects malformed documents") {
  CHECK_THROWS_AS(checkpoint_from_json("{not json", "ctx"), ParseError);
  CHECK_THROWS_AS(checkpoint_from_json("[1,2]", "ctx"), ParseError);
  CHECK_THROWS_AS(checkpoint_from_json("{\"beta\":[1.0]}", "ctx"),
                  ParseError);

  Checkpoint ckpt;
  ckpt.params = default_params(2, 2, 1.0, 3);
  std::string good = checkpoint_to_json(ckpt);
  CHECK(checkpoint_from_json(good, "ctx").params.m0 == 3);

  // feature_dim must agree with |w|.
  const std::size_t pos = good.find("\"feature_dim\": 2");
  REQUIRE(pos != std::string::npos);
  std::string bad = good;
  bad.replace(pos, 16, "\"feature_dim\": 3");
  CHECK_THROWS_AS(checkpoint_from_json(bad, "ctx"), ParseError);

  CHECK_THROWS_AS(load_checkpoint("/nonexistent/model.json"), ParseError);
}

TEST_CASE("kernel fixtures round-trip through JSON") {
  std::mt19937_64 rng(23);
  const PSDKernel kernel(oracle::random_psd(4, rng, 0.1),
                         {10, 20, 30, 40});
  const fs::path dir = fresh_dir("kernel");
  const fs::path path = dir / "k.json";
  save_kernel_json(kernel, path.string());
  const PSDKernel back = load_kernel_json(path.string());
  REQUIRE(back.dim() == 4);
  CHECK(back.item_ids() == kernel.item_ids());
  CHECK((back.entries() - kernel.entries()).cwiseAbs().maxCoeff() <= 1e-15);

  write_text(path, "{\"format_version\":1,\"dim\":0,\"item_ids\":[],"
                   "\"entries\":[]}");
  CHECK_THROWS_AS(load_kernel_json(path.string()), ParseError);

  write_text(path, "{\"format_version\":1,\"dim\":2,\"item_ids\":[1],"
                   "\"entries\":[[1,0],[0,1]]}");
  CHECK_THROWS_AS(load_kernel_json(path.string()), ParseError);

  write_text(path, "{\"format_version\":1,\"dim\":2,\"item_ids\":[1,2],"
                   "\"entries\":[[1,0]]}");
  CHECK_THROWS_AS(load_kernel_json(path.string()), ParseError);

  write_text(path, "{\"format_version\":1,\"dim\":2,\"item_ids\":[1,2],"
                   "\"entries\":[[1,\"x\"],[0,1]]}");
  CHECK_THROWS_AS(load_kernel_json(path.string()), ParseError);

  // Indefinite matrices are rejected at construction.
  write_text(path, "{\"format_version\":1,\"dim\":2,\"item_ids\":[1,2],"
                   "\"entries\":[[0,1],[1,0]]}");
  CHECK_THROWS_AS(load_kernel_json(path.string()), InvalidKernelError);

  CHECK_THROWS_AS(load_kernel_json((dir / "none.json").string()),
                  ParseError);
}
