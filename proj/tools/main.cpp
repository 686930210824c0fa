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

// Command-line driver. Exit codes: 0 success, 1 verification or training
// failure, 2 usage or input error. Every command is deterministic given
// --seed; output files carry no timestamps.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "seqgdpp/checkpoint.hpp"
#include "seqgdpp/data_io.hpp"
#include "seqgdpp/dpp.hpp"
#include "seqgdpp/errors.hpp"
#include "seqgdpp/eval.hpp"
#include "seqgdpp/gdpp.hpp"
#include "seqgdpp/kernel.hpp"
#include "seqgdpp/large_margin.hpp"
#include "seqgdpp/seq_model.hpp"
#include "seqgdpp/sequence.hpp"
#include "seqgdpp/subset.hpp"
#include "seqgdpp/train.hpp"

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using namespace seqgdpp;

void write_text(const fs::path &path, const std::string &content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw seqgdpp::ParseError(path.string() + ": cannot open for writing");
  out << content;
  if (!out) throw seqgdpp::ParseError(path.string() + ": write failed");
}

int env_workers() {
  const char *v = std::getenv("GDPP_NUM_WORKERS");
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  if (v != nullptr) workers = std::atoi(v);
  return std::max(1, workers);
}

// ---------------------------------------------------------------- train --

struct TrainOpts {
  std::string data;
  std::string out;
  std::string model = "seqgdpp";
  int epochs = -1;
  int margin_epochs = -1;
  double alpha = 0.0;
  std::vector<double> grid;
  int length = 0;
  int fold = -1;
  std::uint64_t seed = 13;
};

std::string records_jsonl(const std::vector<TrainRecord> &records) {
  std::string out;
  for (const TrainRecord &r : records) {
    ojson line;
    line["epoch"] = r.epoch;
    line["split"] = r.split;
    line["loss"] = r.loss;
    if (r.has_f1) line["f1"] = r.f1;
    out += line.dump() + "\n";
  }
  return out;
}

int cmd_train(const TrainOpts &opts) {
  const Checkpoint kind_probe = checkpoint_kind_from_string(opts.model);
  const Dataset ds = load_dataset(opts.data);
  const std::vector<SplitPlan> folds = make_splits(ds);

  // Videos without a stored oracle get one aggregated from their users.
  std::vector<SelectionSequence> computed(ds.videos.size());
  std::vector<TrainingExample> all(ds.videos.size());
  for (std::size_t i = 0; i < ds.videos.size(); ++i) {
    const VideoEntry &v = ds.videos[i];
    const SelectionSequence *oracle = v.oracle ? &*v.oracle : nullptr;
    if (oracle == nullptr) {
      if (v.user_summaries.empty()) {
        throw IntegrityError("video \"" + v.video_id +
                             "\" has neither an oracle nor user summaries");
      }
      computed[i] = aggregate_oracle(v.seq, v.user_summaries);
      oracle = &computed[i];
    }
    all[i] = TrainingExample{&v.seq, oracle, &v.user_summaries};
  }
  const auto examples_for = [&](const std::vector<std::string> &ids) {
    std::vector<TrainingExample> out;
    for (const std::string &id : ids) {
      for (std::size_t i = 0; i < ds.videos.size(); ++i) {
        if (ds.videos[i].video_id == id) out.push_back(all[i]);
      }
    }
    return out;
  };

  TrainHyperparams hp;
  if (opts.epochs >= 0) hp.max_epochs = opts.epochs;
  if (opts.alpha > 0.0) hp.alpha_grid = {opts.alpha};
  if (!opts.grid.empty()) hp.alpha_grid = opts.grid;
  if (opts.length > 0) hp.m0 = opts.length;
  LMHyperparams lm_hp;
  lm_hp.mle = hp;
  if (opts.margin_epochs >= 0) lm_hp.margin_epochs = opts.margin_epochs;

  std::vector<int> fold_ids;
  if (opts.fold >= 0) {
    if (opts.fold >= static_cast<int>(folds.size())) {
      throw ArgumentError("fold " + std::to_string(opts.fold) +
                          " out of range (have " +
                          std::to_string(folds.size()) + ")");
    }
    fold_ids.push_back(opts.fold);
  } else {
    for (std::size_t k = 0; k < folds.size(); ++k) {
      fold_ids.push_back(static_cast<int>(k));
    }
  }

  std::vector<std::optional<FittedModel>> results(fold_ids.size());
  std::vector<std::exception_ptr> errors(fold_ids.size());
  std::atomic<std::size_t> cursor{0};
  const auto worker = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= fold_ids.size()) return;
      try {
        const SplitPlan &plan = folds[fold_ids[i]];
        const std::vector<TrainingExample> train = examples_for(plan.train);
        const std::vector<TrainingExample> val = examples_for(plan.validation);
        FittedModel model =
            kind_probe.large_margin
                ? lm_train(kind_probe.kind, train, val, lm_hp)
                : train_mle(kind_probe.kind, train, val, hp);
        const fs::path dir =
            fs::path(opts.out) / ("fold_" + std::to_string(fold_ids[i]));
        fs::create_directories(dir);
        save_checkpoint({model.kind, model.large_margin, model.params},
                        (dir / "model.json").string());
        write_text(dir / "records.jsonl", records_jsonl(model.records));
        results[i] = std::move(model);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n_workers =
      std::min<int>(env_workers(), static_cast<int>(fold_ids.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_workers; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread &t : pool) t.join();
  for (const std::exception_ptr &e : errors) {
    if (e) std::rethrow_exception(e);
  }

  // The top-level checkpoint comes from the fold with the best validation
  // objective (F1 for large-margin models, likelihood otherwise).
  std::size_t best = 0;
  const auto score = [&](const FittedModel &m) {
    return m.large_margin ? m.val_f1 : m.val_ll;
  };
  ojson summary;
  summary["model"] = opts.model;
  summary["folds"] = ojson::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const FittedModel &m = *results[i];
    ojson entry;
    entry["fold"] = fold_ids[i];
    entry["train_ll"] = m.train_ll;
    entry["val_ll"] = m.val_ll;
    if (m.val_f1 >= 0.0) entry["val_f1"] = m.val_f1;
    summary["folds"].push_back(std::move(entry));
    if (score(m) > score(*results[best])) best = i;
  }
  summary["best_fold"] = fold_ids[best];
  const FittedModel &winner = *results[best];
  save_checkpoint({winner.kind, winner.large_margin, winner.params},
                  (fs::path(opts.out) / "model.json").string());
  write_text(fs::path(opts.out) / "train_summary.json",
             summary.dump(2) + "\n");
  std::cout << "trained " << results.size() << " fold(s); best fold "
            << fold_ids[best] << "\n";
  return 0;
}

// ---------------------------------------------------------------- infer --

struct InferOpts {
  std::string model;
  std::string data;
  std::string out;
  std::string video;
  int length = 0;
  std::uint64_t seed = 13;
};

int cmd_infer(const InferOpts &opts) {
  const Dataset ds = load_dataset(opts.data);
  std::vector<const VideoEntry *> targets;
  if (!opts.video.empty()) {
    targets.push_back(&ds.video_by_id(opts.video));
  } else {
    for (const VideoEntry &v : ds.videos) targets.push_back(&v);
  }

  std::optional<Checkpoint> ckpt;
  if (opts.model != "uniform") {
    ckpt = load_checkpoint(opts.model);
    if (static_cast<int>(ckpt->params.w.size()) != ds.feature_dim()) {
      throw IntegrityError("checkpoint feature_dim " +
                           std::to_string(ckpt->params.w.size()) +
                           " does not match the dataset's " +
                           std::to_string(ds.feature_dim()));
    }
    if (opts.length > 0) {
      if (ckpt->kind == ModelKind::kSeqGDPP) {
        ckpt->params.m0 = opts.length;
      } else {
        std::cerr << "note: --length only affects seqgdpp models\n";
      }
    }
  } else if (opts.length <= 0) {
    throw ArgumentError("the uniform baseline requires --length");
  }

  ojson out = ojson::array();
  for (const VideoEntry *v : targets) {
    SelectionSequence sel;
    std::vector<double> step_lp;
    if (!ckpt) {
      sel = uniform_baseline(v->seq, opts.length);
    } else {
      sel = greedy_infer(ckpt->kind, ckpt->params, v->seq);
      int selected = 0;
      for (int t = 0; t < v->seq.num_segments(); ++t) {
        const SubsetIndex &x_prev =
            (t == 0) ? SubsetIndex{} : sel.selected[t - 1];
        const double lp =
            ckpt->kind == ModelKind::kSeqDPP
                ? seqdpp_conditional_log_prob(ckpt->params, v->seq, t, x_prev,
                                              sel.selected[t])
                : seqgdpp_conditional_log_prob(ckpt->params, v->seq, t, x_prev,
                                               sel.selected[t], selected);
        step_lp.push_back(lp);
        selected += static_cast<int>(sel.selected[t].size());
      }
    }
    ojson entry;
    entry["video_id"] = v->video_id;
    entry["selected_shot_ids"] = selected_ids(v->seq, sel);
    entry["per_step_log_prob"] = step_lp;
    out.push_back(std::move(entry));
  }
  write_text(opts.out, out.dump(2) + "\n");
  std::cout << "wrote summaries for " << targets.size() << " video(s)\n";
  return 0;
}

// ----------------------------------------------------------------- eval --

struct EvalOpts {
  std::string data;
  std::string system;
  std::string out;
  std::vector<double> grid;
};

EvalCurve mean_curve(const std::vector<EvalCurve> &curves) {
  EvalCurve mean = curves.front();
  bool uniform_users = true;
  for (const EvalCurve &c : curves) {
    uniform_users =
        uniform_users && c.f1_user[0].size() == mean.f1_user[0].size();
  }
  const double n = static_cast<double>(curves.size());
  for (std::size_t i = 1; i < curves.size(); ++i) {
    const EvalCurve &c = curves[i];
    for (std::size_t g = 0; g < mean.grid.size(); ++g) {
      mean.f1_mean[g] += c.f1_mean[g];
      if (uniform_users) {
        for (std::size_t u = 0; u < mean.f1_user[g].size(); ++u) {
          mean.f1_user[g][u] += c.f1_user[g][u];
        }
      }
    }
    mean.f1_unfiltered += c.f1_unfiltered;
    mean.auc_raw += c.auc_raw;
    mean.auc += c.auc;
  }
  for (std::size_t g = 0; g < mean.grid.size(); ++g) {
    mean.f1_mean[g] /= n;
    for (std::size_t u = 0; u < mean.f1_user[g].size(); ++u) {
      mean.f1_user[g][u] /= n;
    }
  }
  if (!uniform_users) mean.f1_user.assign(mean.grid.size(), {});
  mean.f1_unfiltered /= n;
  mean.auc_raw /= n;
  mean.auc /= n;
  return mean;
}

int cmd_eval(const EvalOpts &opts) {
  const Dataset ds = load_dataset(opts.data);
  std::ifstream in(opts.system, std::ios::binary);
  if (!in) throw seqgdpp::ParseError(opts.system + ": cannot open");
  ojson sys_doc;
  try {
    sys_doc = ojson::parse(in);
  } catch (const ojson::parse_error &e) {
    throw seqgdpp::ParseError(opts.system + ": " + e.what());
  }
  if (sys_doc.is_object()) {
    ojson wrapped = ojson::array();
    wrapped.push_back(std::move(sys_doc));
    sys_doc = std::move(wrapped);
  }
  if (!sys_doc.is_array() || sys_doc.empty()) {
    throw seqgdpp::ParseError(opts.system +
                              ": expected summaries for at least one video");
  }

  const std::vector<double> grid =
      opts.grid.empty() ? default_filter_grid() : opts.grid;
  std::vector<EvalCurve> pi_curves;
  std::vector<EvalCurve> gauss_curves;
  for (const ojson &entry : sys_doc) {
    if (!entry.is_object() || !entry.contains("video_id") ||
        !entry["video_id"].is_string() ||
        !entry.contains("selected_shot_ids") ||
        !entry["selected_shot_ids"].is_array()) {
      throw seqgdpp::ParseError(
          opts.system + ": summaries need video_id and selected_shot_ids");
    }
    const std::string id = entry["video_id"].get<std::string>();
    const VideoEntry *video = nullptr;
    for (const VideoEntry &v : ds.videos) {
      if (v.video_id == id) video = &v;
    }
    if (video == nullptr) {
      throw IntegrityError(opts.system + ": video id \"" + id +
                           "\" is not in the dataset");
    }
    if (video->user_summaries.empty()) {
      throw IntegrityError("video \"" + id + "\" has no user summaries");
    }
    std::vector<Shot> system;
    for (const ojson &sid : entry["selected_shot_ids"]) {
      if (!sid.is_number_integer()) {
        throw seqgdpp::ParseError(opts.system +
                                  ": selected_shot_ids must be integers");
      }
      const std::int64_t want = sid.get<std::int64_t>();
      const Shot *found = nullptr;
      for (int g = 0; g < video->seq.total_shots(); ++g) {
        if (video->seq.shot(g).id == want) found = &video->seq.shot(g);
      }
      if (found == nullptr) {
        throw IntegrityError(opts.system + ": shot id " +
                             std::to_string(want) + " is not in video \"" +
                             id + "\"");
      }
      system.push_back(*found);
    }
    std::vector<std::vector<Shot>> users;
    for (const SelectionSequence &u : video->user_summaries) {
      users.push_back(selected_shots(video->seq, u));
    }
    pi_curves.push_back(
        evaluate_summary(system, users, grid, TemporalFilter::Kind::kPi));
    gauss_curves.push_back(
        evaluate_summary(system, users, grid, TemporalFilter::Kind::kGaussian));
  }

  const EvalCurve pi = mean_curve(pi_curves);
  const EvalCurve gauss = mean_curve(gauss_curves);
  fs::create_directories(opts.out);
  write_text(fs::path(opts.out) / "pi_curve.csv", curve_to_csv(pi));
  write_text(fs::path(opts.out) / "gauss_curve.csv", curve_to_csv(gauss));
  ojson report;
  report["auc_pi"] = pi.auc;
  report["auc_gauss"] = gauss.auc;
  report["f1_unfiltered"] = pi.f1_unfiltered;
  write_text(fs::path(opts.out) / "auc.json", report.dump(2) + "\n");
  std::cout << "auc_pi " << pi.auc << " auc_gauss " << gauss.auc
            << " f1_unfiltered " << pi.f1_unfiltered << "\n";
  return 0;
}

// --------------------------------------------------------------- sample --

struct SampleOpts {
  std::string data;
  std::string out;
  int samples = 1000;
  int length = -1;
  double alpha = 0.0;
  std::uint64_t seed = 13;
};

int cmd_sample(const SampleOpts &opts) {
  if (opts.samples < 1) throw ArgumentError("--samples must be positive");
  std::mt19937_64 rng(opts.seed);
  std::optional<PSDKernel> kernel;
  if (!opts.data.empty()) {
    kernel = load_kernel_json(opts.data);
  } else {
    // Reproducible default: a 6x6 Wishart-style kernel.
    const int n = 6;
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
    }
    kernel.emplace(Eigen::MatrixXd(a.transpose() * a / n));
  }
  const int n = kernel->dim();

  std::optional<GDPPModel> gdpp;
  if (opts.alpha > 0.0) {
    if (opts.length < 0) {
      throw ArgumentError("--alpha needs --length as the size target");
    }
    std::vector<double> weights(n + 1);
    for (int k = 0; k <= n; ++k) {
      const double d = k - static_cast<double>(opts.length);
      weights[k] = std::exp(-opts.alpha * d * d);
    }
    gdpp.emplace(*kernel, SizePrior(weights));
  }

  std::vector<int> size_counts(n + 1, 0);
  ojson draws = ojson::array();
  for (int s = 0; s < opts.samples; ++s) {
    SubsetIndex y;
    if (gdpp) {
      y = sample_gdpp(*gdpp, rng);
    } else if (opts.length >= 0) {
      y = sample_kdpp(*kernel, opts.length, rng);
    } else {
      y = sample_dpp(*kernel, rng);
    }
    ++size_counts[y.size()];
    ojson ids = ojson::array();
    for (int i : y) ids.push_back(kernel->item_ids()[i]);
    draws.push_back(std::move(ids));
  }

  ojson doc;
  doc["dim"] = n;
  doc["size_counts"] = size_counts;
  doc["samples"] = std::move(draws);
  write_text(opts.out, doc.dump(2) + "\n");
  std::cout << "drew " << opts.samples << " samples\n";
  return 0;
}

// ---------------------------------------------------------------- synth --

struct SynthOpts {
  SynthConfig config;
  std::string out;
  bool sidecar = false;
};

int cmd_synth(const SynthOpts &opts) {
  const Dataset ds = generate_synthetic(opts.config);
  save_dataset(ds, opts.out, opts.sidecar);
  std::cout << "wrote " << ds.videos.size() << " videos to " << opts.out
            << "\n";
  return 0;
}

// ----------------------------------------------------------- bruteforce --

struct BruteOpts {
  std::string out;
  int samples = 50000;
  std::uint64_t seed = 13;
  std::string inject_fault;
};

// Independent determinant path for the enumeration harness: raw Eigen LU on
// a hand-built submatrix, no seqgdpp code.
double raw_subset_det(const Eigen::MatrixXd &m, const SubsetIndex &y) {
  if (y.empty()) return 1.0;
  Eigen::MatrixXd sub(y.size(), y.size());
  for (std::size_t a = 0; a < y.size(); ++a) {
    for (std::size_t b = 0; b < y.size(); ++b) sub(a, b) = m(y[a], y[b]);
  }
  return sub.determinant();
}

Eigen::MatrixXd random_wishart(int n, double ridge, std::mt19937_64 &rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
  }
  Eigen::MatrixXd l = a.transpose() * a / n;
  l.diagonal().array() += ridge;
  return l;
}

struct CheckResult {
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass() const { return deviation < tolerance; }
};

CheckResult check_normalization(std::mt19937_64 &rng) {
  CheckResult r{0.0, 1e-8};
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 2 + rep % 7;
    const PSDKernel L(random_wishart(n, 0.0, rng));
    double total = 0.0;
    for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
      total += std::exp(log_prob_ensemble(L, subset_from_mask(mask, n)));
    }
    r.deviation = std::max(r.deviation, std::abs(total - 1.0));
  }
  return r;
}

CheckResult check_conditional(std::mt19937_64 &rng) {
  CheckResult r{0.0, 1e-8};
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 6;
    const int n_prev = 1 + rep % 3;
    const Eigen::MatrixXd raw = random_wishart(n, 0.2, rng);
    const PSDKernel L(raw);
    SubsetIndex prev;
    SubsetIndex rest;
    for (int i = 0; i < n; ++i) {
      (i < n_prev ? prev : rest).push_back(i);
    }
    const PSDKernel omega = condition_kernel(L, prev, rest);
    const double log_norm = log_det_plus_identity(omega);
    const int m = static_cast<int>(rest.size());

    double denom = 0.0;
    for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
      SubsetIndex u = prev;
      for (int i = 0; i < m; ++i) {
        if (mask & (1ull << i)) u.push_back(rest[i]);
      }
      denom += raw_subset_det(raw, u);
    }
    for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
      SubsetIndex x;
      SubsetIndex u = prev;
      for (int i = 0; i < m; ++i) {
        if (mask & (1ull << i)) {
          x.push_back(i);
          u.push_back(rest[i]);
        }
      }
      const double lib =
          std::exp(log_det_psd(omega.submatrix(x)) - log_norm);
      const double brute = raw_subset_det(raw, u) / denom;
      r.deviation = std::max(r.deviation, std::abs(lib - brute));
    }
  }
  return r;
}

CheckResult check_gdpp_reduction(std::mt19937_64 &rng, bool broken_pi) {
  CheckResult r{0.0, 1e-8};
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 6;
    const Eigen::MatrixXd raw = random_wishart(n, 0.1, rng);
    const PSDKernel L(raw);
    const int k = rep % (n + 1);
    for (int mode = 0; mode < 2; ++mode) {
      const SizePrior prior = mode == 0 ? bounded_cardinality_prior(n, 0, n)
                                        : bounded_cardinality_prior(n, k, k);
      const GDPPModel model(L, prior);
      double denom = 0.0;
      for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
        const SubsetIndex y = subset_from_mask(mask, n);
        double pi = prior.weight(static_cast<int>(y.size()));
        if (broken_pi) pi *= 1.0 + 0.1 * static_cast<double>(y.size());
        denom += pi * raw_subset_det(raw, y);
      }
      for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
        const SubsetIndex y = subset_from_mask(mask, n);
        const double pi = prior.weight(static_cast<int>(y.size()));
        const double brute = pi * raw_subset_det(raw, y) / denom;
        const double lib = std::exp(gdpp_log_prob(model, y));
        r.deviation = std::max(r.deviation, std::abs(lib - brute));
      }
    }
  }
  return r;
}

CheckResult check_sampler_tv(int n_samples, std::mt19937_64 &rng,
                             double *size_tv) {
  CheckResult r{0.0, 0.02};
  const int n = 6;
  Eigen::MatrixXd raw = random_wishart(n, 0.0, rng);
  raw *= 3.0;
  const PSDKernel L(raw);
  const SizePrior prior = bounded_cardinality_prior(n, 1, 3);
  const GDPPModel model(L, prior);

  std::vector<double> exact(1ull << n, 0.0);
  double denom = 0.0;
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    const SubsetIndex y = subset_from_mask(mask, n);
    exact[mask] = prior.weight(static_cast<int>(y.size())) *
                  raw_subset_det(L.entries(), y);
    denom += exact[mask];
  }
  for (double &p : exact) p /= denom;

  std::vector<double> counts(1ull << n, 0.0);
  std::vector<double> size_counts(n + 1, 0.0);
  for (int s = 0; s < n_samples; ++s) {
    const SubsetIndex y = sample_gdpp(model, rng);
    std::uint64_t mask = 0;
    for (int i : y) mask |= 1ull << i;
    counts[mask] += 1.0;
    size_counts[y.size()] += 1.0;
  }
  double tv = 0.0;
  std::vector<double> exact_size(n + 1, 0.0);
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    tv += std::abs(counts[mask] / n_samples - exact[mask]);
    exact_size[subset_from_mask(mask, n).size()] += exact[mask];
  }
  r.deviation = 0.5 * tv;
  double stv = 0.0;
  for (int k = 0; k <= n; ++k) {
    stv += std::abs(size_counts[k] / n_samples - exact_size[k]);
  }
  *size_tv = 0.5 * stv;
  return r;
}

int cmd_bruteforce(const BruteOpts &opts) {
  std::mt19937_64 rng(opts.seed);
  double size_tv = 0.0;
  const CheckResult normalization = check_normalization(rng);
  const CheckResult conditional = check_conditional(rng);
  const CheckResult reduction =
      check_gdpp_reduction(rng, opts.inject_fault == "pi-normalization");
  const CheckResult sampler = check_sampler_tv(opts.samples, rng, &size_tv);
  const bool size_ok = size_tv < 0.01;

  ojson report;
  report["seed"] = opts.seed;
  report["samples"] = opts.samples;
  const auto emit = [&report](const char *name, const CheckResult &c) {
    ojson entry;
    entry["max_abs_deviation"] = c.deviation;
    entry["tolerance"] = c.tolerance;
    entry["pass"] = c.pass();
    report["checks"][name] = std::move(entry);
  };
  emit("normalization", normalization);
  emit("conditional", conditional);
  emit("gdpp-reduction", reduction);
  emit("sampler-tv", sampler);
  report["checks"]["sampler-tv"]["size_tv"] = size_tv;
  report["checks"]["sampler-tv"]["size_tolerance"] = 0.01;
  report["checks"]["sampler-tv"]["pass"] = sampler.pass() && size_ok;
  const bool pass = normalization.pass() && conditional.pass() &&
                    reduction.pass() && sampler.pass() && size_ok;
  report["pass"] = pass;

  const std::string text = report.dump(2) + "\n";
  if (opts.out.empty()) {
    std::cout << text;
  } else {
    write_text(opts.out, text);
  }
  if (!pass) {
    for (const auto &[name, entry] : report["checks"].items()) {
      if (!entry["pass"].get<bool>()) {
        std::cerr << "FAIL " << name << " deviation "
                  << entry["max_abs_deviation"].get<double>() << "\n";
      }
    }
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Sequential determinantal point processes for supervised "
               "video summarization"};
  app.require_subcommand(1);

  TrainOpts train_opts;
  CLI::App *train = app.add_subcommand("train", "Fit a model with leave-one-out folds");
  train->add_option("--data", train_opts.data, "Dataset directory")->required();
  train->add_option("--out", train_opts.out, "Output directory")->required();
  train->add_option("--model", train_opts.model,
                    "seqdpp, lm-seqdpp, seqgdpp or lm-seqgdpp")
      ->check(CLI::IsMember({"seqdpp", "lm-seqdpp", "seqgdpp", "lm-seqgdpp"}));
  train->add_option("--epochs", train_opts.epochs, "Max likelihood epochs");
  train->add_option("--margin-epochs", train_opts.margin_epochs,
                    "Margin epochs for lm-* models");
  train->add_option("--alpha", train_opts.alpha, "Fix alpha, skipping the grid");
  train->add_option("--grid", train_opts.grid, "Alpha grid")->delimiter(',');
  train->add_option("--length", train_opts.length, "Override the M0 target");
  train->add_option("--fold", train_opts.fold, "Train a single fold");
  train->add_option("--seed", train_opts.seed, "RNG seed");

  InferOpts infer_opts;
  CLI::App *infer = app.add_subcommand("infer", "Summarize videos with a trained model");
  infer->add_option("--model", infer_opts.model,
                    "Checkpoint path, or \"uniform\"")->required();
  infer->add_option("--data", infer_opts.data, "Dataset directory")->required();
  infer->add_option("--out", infer_opts.out, "Output JSON file")->required();
  infer->add_option("--video", infer_opts.video, "Restrict to one video id");
  infer->add_option("--length", infer_opts.length, "M0 target (seqgdpp, uniform)");
  infer->add_option("--seed", infer_opts.seed, "RNG seed");

  EvalOpts eval_opts;
  CLI::App *eval = app.add_subcommand("eval", "Score system summaries against user summaries");
  eval->add_option("--data", eval_opts.data, "Dataset directory")->required();
  eval->add_option("--system", eval_opts.system, "Summary JSON from infer")->required();
  eval->add_option("--out", eval_opts.out, "Output directory")->required();
  eval->add_option("--grid", eval_opts.grid, "Filter parameter grid (seconds)")
      ->delimiter(',');

  SampleOpts sample_opts;
  CLI::App *sample = app.add_subcommand("sample", "Draw subsets from a DPP, k-DPP or size-prior model");
  sample->add_option("--data", sample_opts.data, "Kernel JSON (default: built-in 6x6)");
  sample->add_option("--out", sample_opts.out, "Output JSON file")->required();
  sample->add_option("--samples", sample_opts.samples, "Number of draws");
  sample->add_option("--length", sample_opts.length, "Subset size k (k-DPP)");
  sample->add_option("--alpha", sample_opts.alpha,
                     "Size-prior sharpness around --length");
  sample->add_option("--seed", sample_opts.seed, "RNG seed");

  SynthOpts synth_opts;
  CLI::App *synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("--out", synth_opts.out, "Output directory")->required();
  synth->add_option("--videos", synth_opts.config.n_videos, "Video count");
  synth->add_option("--segments", synth_opts.config.num_segments, "Segments per video");
  synth->add_option("--segment-size", synth_opts.config.segment_size, "Shots per segment");
  synth->add_option("--dim", synth_opts.config.feature_dim, "Feature dimension");
  synth->add_option("--events", synth_opts.config.n_events, "Hidden event count");
  synth->add_option("--noise", synth_opts.config.sigma_n, "Feature noise sigma");
  synth->add_option("--users", synth_opts.config.n_users, "Simulated users");
  synth->add_option("--p-replace", synth_opts.config.p_replace,
                    "Per-event replace probability");
  synth->add_option("--p-add", synth_opts.config.p_add,
                    "Per-event add probability");
  synth->add_option("--seed", synth_opts.config.seed, "RNG seed");
  synth->add_flag("--sidecar", synth_opts.sidecar, "Write binary feature sidecars");

  BruteOpts brute_opts;
  CLI::App *brute = app.add_subcommand("bruteforce", "Verify the library against enumeration oracles");
  brute->add_option("--out", brute_opts.out, "Report file (default: stdout)");
  brute->add_option("--samples", brute_opts.samples, "Sampler draws");
  brute->add_option("--seed", brute_opts.seed, "RNG seed");
  brute->add_option("--inject-fault", brute_opts.inject_fault,
                    "Deliberately break a check (testing aid)")
      ->check(CLI::IsMember({"pi-normalization"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }

  try {
    if (train->parsed()) return cmd_train(train_opts);
    if (infer->parsed()) return cmd_infer(infer_opts);
    if (eval->parsed()) return cmd_eval(eval_opts);
    if (sample->parsed()) return cmd_sample(sample_opts);
    if (synth->parsed()) return cmd_synth(synth_opts);
    if (brute->parsed()) return cmd_bruteforce(brute_opts);
  } catch (const ArgumentError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const seqgdpp::ParseError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IntegrityError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InsufficientDataError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidKernelError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
