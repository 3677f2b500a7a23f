#!/usr/bin/env python3
# Copyright 2026 The glassboost Authors.
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
"""Builds data/heart.csv and data/adult.csv from wheels on PyPI.

The UCI Heart Disease table (303 rows) ships inside scikit-lego and the UCI
Adult Income files (adult.data + adult.test, 48,842 rows) ship inside
responsibly. Both are fetched with `pip download` so no direct network access
to UCI is needed.

Credit-card fraud is too large to redistribute; place it at
data/creditcard.csv (Kaggle "mlg-ulb/creditcardfraud", target column "Class")
to enable the extended benchmark.
"""

import argparse
import csv
import io
import pathlib
import subprocess
import tempfile
import zipfile

ADULT_COLUMNS = [
    "age", "workclass", "fnlwgt", "education", "education-num",
    "marital-status", "occupation", "relationship", "race", "sex",
    "capital-gain", "capital-loss", "hours-per-week", "native-country",
    "income",
]


def fetch_wheel(package, dest):
    subprocess.run(
        ["pip", "download", "--no-deps", "--timeout", "90", "-d", dest, package],
        check=True)
    return next(pathlib.Path(dest).glob(package.replace("-", "_") + "*.whl"))


def write_heart(wheel, out):
    outer = zipfile.ZipFile(wheel)
    inner = zipfile.ZipFile(io.BytesIO(outer.read("sklego/data/hearts.zip")))
    out.write_bytes(inner.read("heart.csv"))


def adult_rows(text):
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("|"):
            continue
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != len(ADULT_COLUMNS):
            continue
        cells[-1] = cells[-1].rstrip(".")
        yield cells


def write_adult(wheel, out):
    z = zipfile.ZipFile(wheel)
    with out.open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(ADULT_COLUMNS)
        for name in ("adult.data", "adult.test"):
            text = z.read(f"responsibly/dataset/adult/{name}").decode("utf-8")
            w.writerows(adult_rows(text))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out-dir", default=str(pathlib.Path(__file__).resolve().parent.parent / "data"))
    args = ap.parse_args()
    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        write_heart(fetch_wheel("scikit-lego", tmp), out_dir / "heart.csv")
        write_adult(fetch_wheel("responsibly", tmp), out_dir / "adult.csv")


if __name__ == "__main__":
    main()
