#!/usr/bin/env python3
# Copyright 2026 The fedgbt Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Converts the raw UCI Adult files into the 123-feature binary LIBSVM layout.

Continuous columns are cut into quantile bins fitted on the training split
(capital gain/loss become zero/non-zero indicators); categorical columns are
one-hot encoded over the category lists published with the dataset. Unknown
values ("?") produce no active feature. Labels are +1 for ">50K", -1 otherwise.

Usage:
  prepare_adult.py --raw-dir DIR --out-dir data/adult
  prepare_adult.py --wheel responsibly-0.1.2-py3-none-any.whl --out-dir data/adult
"""

import argparse
import os
import sys
import zipfile

COLUMNS = [
    ("age", "quantile", 5),
    ("workclass", "cat", ["Private", "Self-emp-not-inc", "Self-emp-inc",
                          "Federal-gov", "Local-gov", "State-gov",
                          "Without-pay", "Never-worked"]),
    ("fnlwgt", "quantile", 5),
    ("education", "cat", ["Bachelors", "Some-college", "11th", "HS-grad",
                          "Prof-school", "Assoc-acdm", "Assoc-voc", "9th",
                          "7th-8th", "12th", "Masters", "1st-4th", "10th",
                          "Doctorate", "5th-6th", "Preschool"]),
    ("education-num", "quantile", 5),
    ("marital-status", "cat", ["Married-civ-spouse", "Divorced",
                               "Never-married", "Separated", "Widowed",
                               "Married-spouse-absent", "Married-AF-spouse"]),
    ("occupation", "cat", ["Tech-support", "Craft-repair", "Other-service",
                           "Sales", "Exec-managerial", "Prof-specialty",
                           "Handlers-cleaners", "Machine-op-inspct",
                           "Adm-clerical", "Farming-fishing",
                           "Transport-moving", "Priv-house-serv",
                           "Protective-serv", "Armed-Forces"]),
    ("relationship", "cat", ["Wife", "Own-child", "Husband", "Not-in-family",
                             "Other-relative", "Unmarried"]),
    ("race", "cat", ["White", "Asian-Pac-Islander", "Amer-Indian-Eskimo",
                     "Other", "Black"]),
    ("sex", "cat", ["Female", "Male"]),
    ("capital-gain", "nonzero", 2),
    ("capital-loss", "nonzero", 2),
    ("hours-per-week", "quantile", 5),
    ("native-country", "cat", [
        "United-States", "Cambodia", "England", "Puerto-Rico", "Canada",
        "Germany", "Outlying-US(Guam-USVI-etc)", "India", "Japan", "Greece",
        "South", "China", "Cuba", "Iran", "Honduras", "Philippines", "Italy",
        "Poland", "Jamaica", "Vietnam", "Mexico", "Portugal", "Ireland",
        "France", "Dominican-Republic", "Laos", "Ecuador", "Taiwan", "Haiti",
        "Columbia", "Hungary", "Guatemala", "Nicaragua", "Scotland",
        "Thailand", "Yugoslavia", "El-Salvador", "Trinadad&Tobago", "Peru",
        "Hong", "Holand-Netherlands"]),
]


def read_rows(text):
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("|"):
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != 15:
            continue
        rows.append(fields)
    return rows


def quantile_cuts(values, bins):
    ordered = sorted(values)
    cuts = []
    for i in range(1, bins):
        cut = ordered[(i * len(ordered)) // bins]
        if not cuts or cut > cuts[-1]:
            cuts.append(cut)
    return cuts


def bin_index(value, cuts):
    index = 0
    for cut in cuts:
        if value >= cut:
            index += 1
    return index


def build_encoder(train_rows):
    layout = []
    offset = 0
    for column, (name, kind, arg) in enumerate(COLUMNS):
        if kind == "quantile":
            cuts = quantile_cuts([float(r[column]) for r in train_rows], arg)
            layout.append((column, kind, cuts, offset))
            offset += arg
        elif kind == "nonzero":
            layout.append((column, kind, None, offset))
            offset += arg
        else:
            layout.append((column, kind, {c: i for i, c in enumerate(arg)}, offset))
            offset += len(arg)
    return layout, offset


def encode_row(row, layout):
    active = []
    for column, kind, info, offset in layout:
        raw = row[column]
        if raw == "?":
            continue
        if kind == "quantile":
            active.append(offset + bin_index(float(raw), info))
        elif kind == "nonzero":
            active.append(offset + (1 if float(raw) != 0.0 else 0))
        else:
            if raw in info:
                active.append(offset + info[raw])
    label = "+1" if row[14].rstrip(".") == ">50K" else "-1"
    return label + "".join(" %d:1" % (i + 1) for i in sorted(active))


def load_raw(args):
    if args.wheel:
        with zipfile.ZipFile(args.wheel) as wheel:
            base = "responsibly/dataset/adult/"
            return (wheel.read(base + "adult.data").decode(),
                    wheel.read(base + "adult.test").decode())
    with open(os.path.join(args.raw_dir, "adult.data")) as f:
        train = f.read()
    with open(os.path.join(args.raw_dir, "adult.test")) as f:
        test = f.read()
    return train, test


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--raw-dir")
    source.add_argument("--wheel")
    parser.add_argument("--out-dir", required=True)
    args = parser.parse_args()

    train_text, test_text = load_raw(args)
    train_rows = read_rows(train_text)
    test_rows = read_rows(test_text)
    layout, width = build_encoder(train_rows)
    if width != 123:
        sys.exit("unexpected feature width %d" % width)

    os.makedirs(args.out_dir, exist_ok=True)
    for name, rows in (("adult.train.libsvm", train_rows),
                       ("adult.test.libsvm", test_rows)):
        path = os.path.join(args.out_dir, name)
        with open(path, "w") as out:
            for row in rows:
                out.write(encode_row(row, layout) + "\n")
        print("%s: %d instances" % (path, len(rows)))


if __name__ == "__main__":
    main()
