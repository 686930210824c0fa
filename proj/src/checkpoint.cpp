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

#include "seqgdpp/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "seqgdpp/errors.hpp"

namespace seqgdpp {

namespace {

using ojson = nlohmann::ordered_json;

double require_number(const ojson &obj, const char *key,
                      const std::string &ctx) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    throw ParseError(ctx + ": missing or non-numeric field \"" + key + "\"");
  }
  return obj[key].get<double>();
}

}  // namespace

std::string checkpoint_kind_string(ModelKind kind, bool large_margin) {
  std::string base = kind == ModelKind::kSeqDPP ? "seqdpp" : "seqgdpp";
  return large_margin ? "lm-" + base : base;
}

Checkpoint checkpoint_kind_from_string(const std::string &name) {
  Checkpoint ckpt;
  std::string base = name;
  if (base.rfind("lm-", 0) == 0) {
    ckpt.large_margin = true;
    base = base.substr(3);
  }
  if (base == "seqdpp") {
    ckpt.kind = ModelKind::kSeqDPP;
  } else if (base == "seqgdpp") {
    ckpt.kind = ModelKind::kSeqGDPP;
  } else {
    throw ParseError("unknown model kind \"" + name +
                     "\" (expected seqdpp, lm-seqdpp, seqgdpp or lm-seqgdpp)");
  }
  return ckpt;
}

std::string checkpoint_to_json(const Checkpoint &ckpt) {
  validate_params(ckpt.params);
  ojson doc;
  doc["kind"] = checkpoint_kind_string(ckpt.kind, ckpt.large_margin);
  doc["beta"] = ckpt.params.beta;
  doc["w"] = std::vector<double>(
      ckpt.params.w.data(), ckpt.params.w.data() + ckpt.params.w.size());
  doc["alpha"] = ckpt.params.alpha;
  doc["M0"] = ckpt.params.m0;
  doc["bandwidth_exponents"] = ckpt.params.bandwidth_exponents;
  doc["feature_dim"] = static_cast<int>(ckpt.params.w.size());
  return doc.dump(2) + "\n";
}

Checkpoint checkpoint_from_json(const std::string &text,
                                const std::string &context) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const ojson::parse_error &e) {
    throw ParseError(context + ": " + e.what());
  }
  if (!doc.is_object()) {
    throw ParseError(context + ": checkpoint must be a JSON object");
  }
  if (!doc.contains("kind") || !doc["kind"].is_string()) {
    throw ParseError(context + ": missing or non-string field \"kind\"");
  }
  Checkpoint ckpt = checkpoint_kind_from_string(doc["kind"].get<std::string>());

  const auto number_array = [&](const char *key) {
    if (!doc.contains(key) || !doc[key].is_array()) {
      throw ParseError(context + ": missing or non-array field \"" +
                       std::string(key) + "\"");
    }
    std::vector<double> out;
    for (const ojson &v : doc[key]) {
      if (!v.is_number()) {
        throw ParseError(context + ": field \"" + std::string(key) +
                         "\" has a non-numeric entry");
      }
      out.push_back(v.get<double>());
    }
    return out;
  };

  ckpt.params.beta = number_array("beta");
  const std::vector<double> w = number_array("w");
  ckpt.params.w = Eigen::Map<const Eigen::VectorXd>(
      w.data(), static_cast<Eigen::Index>(w.size()));
  ckpt.params.alpha = require_number(doc, "alpha", context);
  ckpt.params.m0 = require_number(doc, "M0", context);
  const std::vector<double> exponents = number_array("bandwidth_exponents");
  ckpt.params.bandwidth_exponents.clear();
  for (double v : exponents) {
    ckpt.params.bandwidth_exponents.push_back(static_cast<int>(v));
  }
  const int feature_dim =
      static_cast<int>(require_number(doc, "feature_dim", context));
  if (feature_dim != static_cast<int>(ckpt.params.w.size())) {
    throw ParseError(context + ": feature_dim does not match |w|");
  }
  try {
    validate_params(ckpt.params);
  } catch (const Error &e) {
    throw ParseError(context + ": " + e.what());
  }
  return ckpt;
}

void save_checkpoint(const Checkpoint &ckpt, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << checkpoint_to_json(ckpt);
  if (!out) throw ParseError(path + ": write failed");
}

Checkpoint load_checkpoint(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open checkpoint");
  std::ostringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_json(buf.str(), path);
}

}  // namespace seqgdpp
