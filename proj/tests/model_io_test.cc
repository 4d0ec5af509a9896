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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "fedgbt/data_io.h"
#include "fedgbt/error.h"
#include "fedgbt/model_io.h"
#include "fedgbt/plaintext_trainer.h"

namespace fedgbt {
namespace {

Model Trained() {
  const Dataset d = MakeSynthetic(200, 4, 6);
  BoostParams p;
  p.rounds = 4;
  return TrainPlaintext(d, CandidateSchema::Build(d, 8), p, {});
}

TEST(ModelIoTest, JsonRoundTripIsExact) {
  const Model m = Trained();
  const Model back = ModelFromJson(ModelToJson(m));
  EXPECT_EQ(back.trees, m.trees);
  EXPECT_EQ(back.eta, m.eta);
  EXPECT_EQ(back.loss, m.loss);
  EXPECT_EQ(back.class_count, m.class_count);
  EXPECT_EQ(ModelToJson(back), ModelToJson(m));
}

TEST(ModelIoTest, RejectsMalformedDocuments) {
  for (const char* text :
       {"", "{", "[]", R"({"format":"other","version":1})",
        R"({"format":"fedgbt-model","version":99,"loss":"logistic","class_count":2,"eta":0.3,"trees":[]})",
        R"({"format":"fedgbt-model","version":1,"loss":"logistic","class_count":2,"eta":0.3,
            "trees":[{"output":0,"nodes":[{"feature":0,"threshold":1,"left":5,"right":6}]}]})"}) {
    try {
      ModelFromJson(text);
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kFormat) << text;
    }
  }
}

TEST(ModelIoTest, SaveAndLoad) {
  const auto dir = std::filesystem::temp_directory_path() / "fedgbt_model_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "model.json";
  const Model m = Trained();
  SaveModel(m, path);
  EXPECT_FALSE(std::filesystem::exists(dir / "model.json.tmp"));
  EXPECT_EQ(LoadModel(path).trees, m.trees);
  std::filesystem::remove_all(dir);
  EXPECT_THROW(LoadModel(path), Error);
}

}  // namespace
}  // namespace fedgbt
