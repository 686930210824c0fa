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

#include "seqgdpp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "seqgdpp/errors.hpp"

namespace seqgdpp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::string> dedup(const std::vector<std::string> &tags) {
  std::vector<std::string> out(tags);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

TemporalFilter pi_filter(double window_s) {
  TemporalFilter f{TemporalFilter::Kind::kPi, window_s};
  validate_filter(f);
  return f;
}

TemporalFilter gaussian_filter(double sigma_s) {
  TemporalFilter f{TemporalFilter::Kind::kGaussian, sigma_s};
  validate_filter(f);
  return f;
}

TemporalFilter no_filter() {
  return TemporalFilter{TemporalFilter::Kind::kNone, 0.0};
}

void validate_filter(const TemporalFilter &filter) {
  if (filter.kind == TemporalFilter::Kind::kNone) return;
  if (!(filter.parameter > 0.0)) {
    throw ArgumentError("temporal filter parameter must be positive");
  }
}

double iou_similarity(const std::vector<std::string> &a,
                      const std::vector<std::string> &b) {
  const std::vector<std::string> sa = dedup(a);
  const std::vector<std::string> sb = dedup(b);
  if (sa.empty() && sb.empty()) return 0.0;
  std::vector<std::string> common;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(),
                        std::back_inserter(common));
  const double inter = static_cast<double>(common.size());
  const double uni =
      static_cast<double>(sa.size() + sb.size()) - inter;
  return inter / uni;
}

double filtered_similarity(double sim, double dt_s,
                           const TemporalFilter &filter) {
  validate_filter(filter);
  switch (filter.kind) {
    case TemporalFilter::Kind::kPi:
      return dt_s <= filter.parameter ? sim : 0.0;
    case TemporalFilter::Kind::kGaussian:
      return sim *
             std::exp(-dt_s * dt_s / (2.0 * filter.parameter * filter.parameter));
    case TemporalFilter::Kind::kNone:
      return sim;
  }
  return sim;
}

Matching max_weight_matching(const Eigen::MatrixXd &weights) {
  const int nr = static_cast<int>(weights.rows());
  const int nc = static_cast<int>(weights.cols());
  Matching result;
  if (nr == 0 || nc == 0) return result;
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < nc; ++j) {
      if (!(weights(i, j) >= 0.0) || !std::isfinite(weights(i, j))) {
        throw ArgumentError("matching weights must be finite and nonnegative");
      }
    }
  }

  // Hungarian algorithm on the negated, zero-padded square cost matrix.
  // Padding costs 0, so padded assignments never beat real positive-weight
  // pairs and the square optimum equals the best partial injection.
  const int s = std::max(nr, nc);
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(s + 1, s + 1);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nc; ++j) cost(i + 1, j + 1) = -weights(i, j);

  std::vector<double> u(s + 1, 0.0), v(s + 1, 0.0), minv(s + 1, 0.0);
  std::vector<int> p(s + 1, 0), way(s + 1, 0);
  std::vector<bool> used(s + 1, false);
  for (int i = 1; i <= s; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= s; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= s; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  for (int j = 1; j <= s; ++j) {
    const int i = p[j];
    if (i >= 1 && i <= nr && j <= nc && weights(i - 1, j - 1) > 0.0) {
      result.pairs.emplace_back(i - 1, j - 1);
      result.total_weight += weights(i - 1, j - 1);
    }
  }
  std::sort(result.pairs.begin(), result.pairs.end());
  return result;
}

MatchResult match_f1(const std::vector<Shot> &system,
                     const std::vector<Shot> &user,
                     const TemporalFilter &filter) {
  validate_filter(filter);
  MatchResult out;
  if (system.empty() && user.empty()) {
    out.precision = 1.0;
    out.recall = 1.0;
    out.f1 = 1.0;
    out.degenerate = true;
    return out;
  }
  if (system.empty() || user.empty()) return out;

  Eigen::MatrixXd w(system.size(), user.size());
  for (std::size_t i = 0; i < system.size(); ++i) {
    for (std::size_t j = 0; j < user.size(); ++j) {
      const double sim = iou_similarity(system[i].tags, user[j].tags);
      const double dt = std::abs(system[i].time_s - user[j].time_s);
      w(i, j) = filtered_similarity(sim, dt, filter);
    }
  }
  Matching m = max_weight_matching(w);
  out.total_weight = m.total_weight;
  out.pairs = std::move(m.pairs);
  out.precision = out.total_weight / static_cast<double>(system.size());
  out.recall = out.total_weight / static_cast<double>(user.size());
  const double denom = out.precision + out.recall;
  out.f1 = denom > 0.0 ? 2.0 * out.precision * out.recall / denom : 0.0;
  return out;
}

EvalCurve evaluate_summary(const std::vector<Shot> &system,
                           const std::vector<std::vector<Shot>> &users,
                           const std::vector<double> &grid,
                           TemporalFilter::Kind kind) {
  if (users.empty()) {
    throw ArgumentError("evaluation needs at least one user summary");
  }
  if (grid.empty()) {
    throw ArgumentError("evaluation needs a nonempty filter grid");
  }
  if (kind == TemporalFilter::Kind::kNone) {
    throw ArgumentError("sweep the PI or GAUSSIAN filter, not NONE");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || (i > 0 && grid[i] <= grid[i - 1])) {
      throw ArgumentError("filter grid must be positive, strictly increasing");
    }
  }

  EvalCurve curve;
  curve.grid = grid;
  for (double param : grid) {
    const TemporalFilter filter{kind, param};
    std::vector<double> per_user;
    double total = 0.0;
    for (const std::vector<Shot> &user : users) {
      const double f1 = match_f1(system, user, filter).f1;
      per_user.push_back(f1);
      total += f1;
    }
    curve.f1_user.push_back(std::move(per_user));
    curve.f1_mean.push_back(total / static_cast<double>(users.size()));
  }
  {
    double total = 0.0;
    for (const std::vector<Shot> &user : users) {
      total += match_f1(system, user, no_filter()).f1;
    }
    curve.f1_unfiltered = total / static_cast<double>(users.size());
  }

  double area = 0.0;
  double prev_x = 0.0;
  double prev_y = curve.f1_mean.front();
  bool truncated = false;
  for (std::size_t i = 0; i < curve.grid.size() && !truncated; ++i) {
    const double x = curve.grid[i];
    const double y = curve.f1_mean[i];
    if (x >= kAucHorizonS) {
      const double y_h =
          prev_y + (y - prev_y) * (kAucHorizonS - prev_x) / (x - prev_x);
      area += 0.5 * (prev_y + y_h) * (kAucHorizonS - prev_x);
      truncated = true;
    } else {
      area += 0.5 * (prev_y + y) * (x - prev_x);
      prev_x = x;
      prev_y = y;
    }
  }
  if (!truncated) area += prev_y * (kAucHorizonS - prev_x);
  curve.auc_raw = area;
  curve.auc = area / kAucHorizonS;
  return curve;
}

std::vector<double> default_filter_grid() {
  std::vector<double> grid;
  for (int s = 5; s <= 60; s += 5) grid.push_back(s);
  return grid;
}

std::string curve_to_csv(const EvalCurve &curve) {
  std::string out = "param_s,f1_mean";
  const std::size_t n_users = curve.f1_user.empty() ? 0 : curve.f1_user[0].size();
  char buf[64];
  for (std::size_t u = 0; u < n_users; ++u) {
    std::snprintf(buf, sizeof(buf), ",f1_user%zu", u + 1);
    out += buf;
  }
  out += "\n";
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g", curve.grid[i],
                  curve.f1_mean[i]);
    out += buf;
    for (std::size_t u = 0; u < n_users; ++u) {
      std::snprintf(buf, sizeof(buf), ",%.10g", curve.f1_user[i][u]);
      out += buf;
    }
    out += "\n";
  }
  std::snprintf(buf, sizeof(buf), "inf,%.10g", curve.f1_unfiltered);
  out += buf;
  out += "\n";
  return out;
}

SelectionSequence aggregate_oracle(const SegmentedSequence &seq,
                                   const std::vector<SelectionSequence> &users) {
  if (users.empty()) {
    throw ArgumentError("oracle aggregation needs at least one user summary");
  }
  std::vector<std::vector<Shot>> user_shots;
  user_shots.reserve(users.size());
  for (const SelectionSequence &u : users) {
    user_shots.push_back(selected_shots(seq, u));
  }

  // The greedy loop scores O(n^2) candidate summaries; caching the pairwise
  // tag IoUs keeps each score to one matching instead of one full match_f1.
  const int n = seq.total_shots();
  std::vector<Eigen::MatrixXd> sim(user_shots.size());
  for (std::size_t u = 0; u < user_shots.size(); ++u) {
    sim[u].resize(n, static_cast<Eigen::Index>(user_shots[u].size()));
    for (int g = 0; g < n; ++g) {
      for (std::size_t j = 0; j < user_shots[u].size(); ++j) {
        sim[u](g, j) =
            iou_similarity(seq.shot(g).tags, user_shots[u][j].tags);
      }
    }
  }
  const auto mean_f1 = [&](const std::vector<bool> &chosen) {
    std::vector<int> rows;
    for (int g = 0; g < n; ++g) {
      if (chosen[g]) rows.push_back(g);
    }
    double total = 0.0;
    for (std::size_t u = 0; u < user_shots.size(); ++u) {
      const std::size_t m = user_shots[u].size();
      if (rows.empty() && m == 0) {
        total += 1.0;
        continue;
      }
      if (rows.empty() || m == 0) continue;
      Eigen::MatrixXd w(rows.size(), m);
      for (std::size_t a = 0; a < rows.size(); ++a) {
        w.row(a) = sim[u].row(rows[a]);
      }
      const double weight = max_weight_matching(w).total_weight;
      const double precision = weight / static_cast<double>(rows.size());
      const double recall = weight / static_cast<double>(m);
      if (precision + recall > 0.0) {
        total += 2.0 * precision * recall / (precision + recall);
      }
    }
    return total / static_cast<double>(user_shots.size());
  };

  // Scores of tied candidates can differ by summation noise, so ties are
  // detected within a small tolerance before the id tie-break applies.
  constexpr double kTieTol = 1e-12;
  std::vector<bool> chosen(n, false);
  double best = mean_f1(chosen);
  for (;;) {
    int arg = -1;
    std::int64_t arg_id = 0;
    double top = -kInf;
    for (int g = 0; g < n; ++g) {
      if (chosen[g]) continue;
      chosen[g] = true;
      const double score = mean_f1(chosen);
      chosen[g] = false;
      const std::int64_t id = seq.shot(g).id;
      if (score > top + kTieTol) {
        top = score;
        arg = g;
        arg_id = id;
      } else if (score >= top - kTieTol && arg >= 0 && id < arg_id) {
        arg = g;
        arg_id = id;
      }
    }
    if (arg < 0 || top <= best + kTieTol) break;
    chosen[arg] = true;
    best = top;
  }

  SelectionSequence out;
  out.selected.resize(seq.num_segments());
  for (int t = 0; t < seq.num_segments(); ++t) {
    const int off = seq.segment_offset(t);
    for (std::size_t j = 0; j < seq.segment(t).size(); ++j) {
      if (chosen[off + static_cast<int>(j)]) {
        out.selected[t].push_back(static_cast<int>(j));
      }
    }
  }
  return out;
}

}  // namespace seqgdpp
