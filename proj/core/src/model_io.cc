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

#include "fedgbt/model_io.h"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fedgbt/error.h"

namespace fedgbt {

using nlohmann::json;

std::string ModelToJson(const Model& model) {
  json trees = json::array();
  for (const Cart& tree : model.trees) {
    json nodes = json::array();
    for (const CartNode& n : tree.nodes()) {
      if (n.leaf) {
        nodes.push_back({{"leaf", true}, {"weight", n.weight}});
      } else {
        nodes.push_back({{"leaf", false},
                         {"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right}});
      }
    }
    trees.push_back({{"output", tree.output()}, {"nodes", std::move(nodes)}});
  }
  json doc = {{"format", "fedgbt-model"},
              {"version", kModelFormatVersion},
              {"loss", LossKindName(model.loss)},
              {"class_count", model.class_count},
              {"eta", model.eta},
              {"trees", std::move(trees)}};
  return doc.dump(1) + "\n";
}

namespace {

// Splits are replayed in node order, which reproduces the ids a tree gets
// while it is grown; anything else is rejected.
Cart ReadTree(const json& t, int outputs) {
  Cart tree;
  const int output = t.at("output").get<int>();
  if (output < 0 || output >= outputs) throw Error(ErrorCode::kFormat, "tree output out of range");
  tree.set_output(output);
  const json& nodes = t.at("nodes");
  if (!nodes.is_array() || nodes.empty()) throw Error(ErrorCode::kFormat, "tree has no nodes");
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (i >= tree.nodes().size()) throw Error(ErrorCode::kFormat, "unreachable node");
    const json& n = nodes[i];
    if (n.at("leaf").get<bool>()) {
      tree.SetWeight(static_cast<int32_t>(i), n.at("weight").get<double>());
      continue;
    }
    const int32_t left = n.at("left").get<int32_t>();
    const int32_t right = n.at("right").get<int32_t>();
    if (left != static_cast<int32_t>(tree.nodes().size()) || right != left + 1) {
      throw Error(ErrorCode::kFormat, "child ids out of order at node " + std::to_string(i));
    }
    tree.Split(static_cast<int32_t>(i), n.at("feature").get<uint32_t>(),
               n.at("threshold").get<double>());
  }
  if (tree.nodes().size() != nodes.size()) throw Error(ErrorCode::kFormat, "missing nodes");
  return tree;
}

}  // namespace

Model ModelFromJson(std::string_view text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("format") != "fedgbt-model") throw Error(ErrorCode::kFormat, "not a model dump");
    const int version = doc.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw Error(ErrorCode::kFormat, "unsupported model version " + std::to_string(version));
    }
    Model model;
    model.loss = ParseLossKind(doc.at("loss").get<std::string>());
    model.class_count = doc.at("class_count").get<int>();
    model.eta = doc.at("eta").get<double>();
    if (model.class_count < 2) throw Error(ErrorCode::kFormat, "class_count must be >= 2");
    for (const json& t : doc.at("trees")) model.trees.push_back(ReadTree(t, model.outputs()));
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("model JSON: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kFormat) throw;
    throw Error(ErrorCode::kFormat, std::string("model JSON: ") + e.what());
  }
}

void WriteFileAtomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kRuntime, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::kRuntime, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kRuntime, "cannot move " + tmp.string() + " into place");
  }
}

void SaveModel(const Model& model, const std::filesystem::path& path) {
  WriteFileAtomic(path, ModelToJson(model));
}

Model LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kRuntime, "cannot read " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  return ModelFromJson(text.str());
}

}  // namespace fedgbt
