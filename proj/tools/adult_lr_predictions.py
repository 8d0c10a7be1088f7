# Copyright 2026 The Fairbound Authors.
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

"""Writes scikit-learn logistic-regression predictions for the Adult rows.

Rows are the complete rows of adult.data followed by adult.test, in file
order, matching `fairbound ingest --adult adult.data --adult adult.test`.
One prediction (+1 / -1) per line after a header line.
"""

import argparse
import pathlib

import pandas as pd
from sklearn.linear_model import LogisticRegression
from sklearn.preprocessing import OneHotEncoder, StandardScaler
from sklearn.compose import ColumnTransformer
from sklearn.pipeline import make_pipeline

COLUMNS = [
    "age", "workclass", "fnlwgt", "education", "education-num",
    "marital-status", "occupation", "relationship", "race", "sex",
    "capital-gain", "capital-loss", "hours-per-week", "native-country",
    "income",
]
NUMERIC = ["age", "education-num", "capital-gain", "capital-loss", "hours-per-week"]


def read_rows(path):
    rows = []
    for line in pathlib.Path(path).read_text().splitlines():
        if not line.strip() or line.startswith("|"):
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != len(COLUMNS):
            continue
        if any(f in ("", "?") for f in fields):
            continue
        fields[-1] = fields[-1].rstrip(".")
        rows.append(fields)
    return rows


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--adult-dir", default="data/adult")
    parser.add_argument("--out", default="data/adult/lr_predictions.txt")
    args = parser.parse_args()
    d = pathlib.Path(args.adult_dir)
    frame = pd.DataFrame(read_rows(d / "adult.data") + read_rows(d / "adult.test"),
                         columns=COLUMNS)
    for c in NUMERIC:
        frame[c] = frame[c].astype(float)
    categorical = [c for c in COLUMNS if c not in NUMERIC + ["fnlwgt", "income"]]
    model = make_pipeline(
        ColumnTransformer([("num", StandardScaler(), NUMERIC),
                           ("cat", OneHotEncoder(handle_unknown="ignore"), categorical)]),
        LogisticRegression(max_iter=2000))
    y = (frame["income"] == ">50K").astype(int)
    model.fit(frame, y)
    pred = model.predict(frame)
    with open(args.out, "w") as out:
        out.write("prediction\n")
        for v in pred:
            out.write("1\n" if v == 1 else "-1\n")
    print(f"wrote {len(pred)} predictions, accuracy {(pred == y).mean():.4f}")


if __name__ == "__main__":
    main()
