/*
 * Copyright 2026 The fedgbt Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fedgbt/data_io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include "fedgbt/error.h"
#include "fedgbt/random.h"

namespace fedgbt {
namespace {

[[noreturn]] void ParseFail(size_t line, const std::string& what) {
  throw Error(ErrorCode::kParse, "line " + std::to_string(line) + ": " + what);
}

double ParseNumber(std::string_view token, size_t line) {
  double value = 0.0;
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value)) {
    ParseFail(line, "bad number '" + std::string(token) + "'");
  }
  return value;
}

uint32_t ReadBigEndian32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    throw Error(ErrorCode::kFormat, "truncated IDX header");
  }
  return (uint32_t{b[0]} << 24) | (uint32_t{b[1]} << 16) | (uint32_t{b[2]} << 8) | b[3];
}

}  // namespace

Dataset ParseLibsvm(std::istream& in, const std::string& name) {
  Dataset data;
  data.name = name;
  std::string text;
  size_t line_no = 0;
  uint32_t max_feature = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (auto hash = text.find('#'); hash != std::string::npos) text.resize(hash);
    std::istringstream tokens(text);
    std::string token;
    if (!(tokens >> token)) continue;
    Instance inst;
    inst.label = ParseNumber(token, line_no);
    while (tokens >> token) {
      auto colon = token.find(':');
      if (colon == std::string::npos || colon == 0) ParseFail(line_no, "expected idx:value");
      std::string_view idx_text(token.data(), colon);
      uint64_t idx = 0;
      auto [ptr, ec] = std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), idx);
      if (ec != std::errc() || ptr != idx_text.data() + idx_text.size() || idx == 0 ||
          idx > UINT32_MAX) {
        ParseFail(line_no, "bad feature index '" + std::string(idx_text) + "'");
      }
      double value = ParseNumber(std::string_view(token).substr(colon + 1), line_no);
      uint32_t f = static_cast<uint32_t>(idx - 1);
      if (!inst.features.empty() && inst.features.back().first >= f) {
        ParseFail(line_no, "feature indices must increase");
      }
      inst.features.emplace_back(f, value);
      max_feature = std::max(max_feature, f + 1);
    }
    data.instances.push_back(std::move(inst));
  }

  bool plus_minus = true;
  bool zero_one = true;
  double max_label = 0;
  for (const auto& inst : data.instances) {
    double y = inst.label;
    plus_minus &= (y == -1 || y == 1);
    zero_one &= (y == 0 || y == 1);
    max_label = std::max(max_label, y);
  }
  if (!plus_minus) {
    for (const auto& inst : data.instances) {
      if (inst.label < 0 || inst.label != std::floor(inst.label)) {
        throw Error(ErrorCode::kParse, "labels must be +/-1 or class indices");
      }
    }
  }
  if (plus_minus && !data.instances.empty()) {
    for (auto& inst : data.instances) inst.label = inst.label > 0 ? 1 : 0;
    data.class_count = 2;
  } else if (zero_one) {
    data.class_count = 2;
  } else {
    data.class_count = static_cast<uint32_t>(max_label) + 1;
  }
  data.feature_count = max_feature;
  return data;
}

Dataset LoadLibsvm(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfiguration, "cannot open dataset " + path.string());
  return ParseLibsvm(in, path.stem().string());
}

void WriteLibsvm(const Dataset& data, std::ostream& out) {
  auto old_precision = out.precision(17);
  for (const auto& inst : data.instances) {
    if (data.class_count == 2) {
      out << (inst.label > 0 ? "+1" : "-1");
    } else {
      out << static_cast<int>(inst.label);
    }
    for (const auto& [f, v] : inst.features) out << ' ' << (f + 1) << ':' << v;
    out << '\n';
  }
  out.precision(old_precision);
}

Dataset LoadIdx(const std::filesystem::path& images, const std::filesystem::path& labels) {
  std::ifstream img(images, std::ios::binary);
  std::ifstream lab(labels, std::ios::binary);
  if (!img || !lab) throw Error(ErrorCode::kConfiguration, "cannot open IDX files");
  if (ReadBigEndian32(img) != 0x00000803) throw Error(ErrorCode::kFormat, "bad image magic");
  if (ReadBigEndian32(lab) != 0x00000801) throw Error(ErrorCode::kFormat, "bad label magic");
  const uint32_t count = ReadBigEndian32(img);
  const uint32_t rows = ReadBigEndian32(img);
  const uint32_t cols = ReadBigEndian32(img);
  if (ReadBigEndian32(lab) != count) {
    throw Error(ErrorCode::kFormat, "image and label counts differ");
  }
  const size_t pixels = static_cast<size_t>(rows) * cols;
  Dataset data;
  data.name = images.stem().string();
  data.feature_count = static_cast<uint32_t>(pixels);
  data.class_count = 10;
  std::vector<unsigned char> buffer(pixels);
  for (uint32_t i = 0; i < count; ++i) {
    char label = 0;
    if (!img.read(reinterpret_cast<char*>(buffer.data()), buffer.size()) || !lab.get(label)) {
      throw Error(ErrorCode::kFormat, "IDX file truncated at item " + std::to_string(i));
    }
    Instance inst;
    inst.label = static_cast<unsigned char>(label);
    for (size_t p = 0; p < pixels; ++p) {
      if (buffer[p] != 0) inst.features.emplace_back(p, buffer[p] / 255.0);
    }
    data.class_count = std::max<uint32_t>(data.class_count, inst.label + 1);
    data.instances.push_back(std::move(inst));
  }
  return data;
}

std::vector<std::vector<size_t>> Partition(size_t instance_count, size_t users, uint64_t seed) {
  if (users == 0 || users > instance_count) {
    throw Error(ErrorCode::kConfiguration,
                "cannot partition " + std::to_string(instance_count) + " instances over " +
                    std::to_string(users) + " users");
  }
  std::vector<size_t> order(instance_count);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng = Rng::Derive(seed, "partition");
  rng.Shuffle(order);
  std::vector<std::vector<size_t>> parts(users);
  for (size_t i = 0; i < order.size(); ++i) parts[i % users].push_back(order[i]);
  for (auto& part : parts) std::sort(part.begin(), part.end());
  return parts;
}

std::vector<size_t> StratifiedSubsampleIndices(const Dataset& data, size_t total) {
  if (total >= data.size()) {
    std::vector<size_t> all(data.size());
    std::iota(all.begin(), all.end(), size_t{0});
    return all;
  }
  std::map<int, std::vector<size_t>> by_class;
  for (size_t i = 0; i < data.size(); ++i) {
    by_class[static_cast<int>(data.instances[i].label)].push_back(i);
  }
  // Largest-remainder apportionment of `total` across classes.
  std::vector<std::pair<int, size_t>> quota;
  std::vector<std::pair<double, int>> remainders;
  size_t assigned = 0;
  for (const auto& [label, idx] : by_class) {
    double exact = static_cast<double>(total) * idx.size() / data.size();
    size_t q = static_cast<size_t>(std::floor(exact));
    quota.emplace_back(label, q);
    remainders.emplace_back(-(exact - q), label);
    assigned += q;
  }
  std::sort(remainders.begin(), remainders.end());
  for (size_t k = 0; assigned < total && k < remainders.size(); ++k, ++assigned) {
    for (auto& [label, q] : quota) {
      if (label == remainders[k].second) ++q;
    }
  }
  std::vector<size_t> keep;
  for (const auto& [label, q] : quota) {
    const auto& idx = by_class[label];
    keep.insert(keep.end(), idx.begin(), idx.begin() + std::min(q, idx.size()));
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

Dataset StratifiedSubsample(const Dataset& data, size_t total) {
  return data.Subset(StratifiedSubsampleIndices(data, total));
}

void QuantizeFeatures(Dataset& data, const FixedPointCodec& codec) {
  for (auto& inst : data.instances) {
    for (auto& [f, v] : inst.features) v = codec.Quantize(v);
  }
}

Dataset MakeSynthetic(size_t instances, uint32_t features, uint64_t seed, double label_noise) {
  Rng rng = Rng::Derive(seed, "synthetic");
  std::vector<double> w(features);
  for (auto& wi : w) wi = 2 * rng.UniformDouble() - 1;
  Dataset data;
  data.name = "synthetic";
  data.feature_count = features;
  data.class_count = 2;
  for (size_t i = 0; i < instances; ++i) {
    Instance inst;
    double z = 0;
    for (uint32_t f = 0; f < features; ++f) {
      // Two decimal places keep the number of distinct values modest.
      double v = std::round(rng.UniformDouble() * 100) / 100;
      z += w[f] * (v - 0.5);
      if (v != 0) inst.features.emplace_back(f, v);
    }
    bool flip = rng.UniformDouble() < label_noise;
    inst.label = ((z > 0) != flip) ? 1 : 0;
    data.instances.push_back(std::move(inst));
  }
  return data;
}

}  // namespace fedgbt
