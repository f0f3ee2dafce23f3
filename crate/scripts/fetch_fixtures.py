#!/usr/bin/env python3
"""Build the case-study CSV fixtures used by the dataset-golden tests.

Writes into OUT (default: fixtures/data, or $BIASGAUGE_FIXTURES):

  compas.csv            race,two_year_recid        6172 rows
  adult.csv             race,income                48842 rows
  drug_consumption.csv  ethnicity,cannabis         1885 rows

COMPAS and Adult are taken from the `responsibly` wheel on PyPI, which
bundles the ProPublica two-year file and the UCI Adult data/test splits.
Drug Consumption is read from a local copy of the UCI file
`drug_consumption.data` (pass --drug-data) or downloaded from UCI.

Every written file is checked against fixtures/SHA256SUMS.
"""

import argparse
import csv
import hashlib
import io
import os
import subprocess
import sys
import tempfile
import urllib.request
import zipfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
SUMS = REPO / "fixtures" / "SHA256SUMS"
WHEEL = "responsibly==0.1.2"
DRUG_URLS = [
    "https://archive.ics.uci.edu/ml/machine-learning-databases/00373/drug_consumption.data",
]

# UCI quantified ethnicity codes
DRUG_ETHNICITY = {
    "-0.50212": "Asian",
    "-1.10702": "Black",
    "1.90725": "Black/Asian",
    "0.12600": "White/Asian",
    "-0.22166": "White/Black",
    "0.11440": "Other",
    "-0.31685": "Caucasian",
}
DRUG_COLUMNS = [
    "id", "age", "gender", "education", "country", "ethnicity", "nscore",
    "escore", "oscore", "ascore", "cscore", "impulsive", "ss", "alcohol",
    "amphet", "amyl", "benzos", "caff", "cannabis", "choc", "coke", "crack",
    "ecstasy", "heroin", "ketamine", "legalh", "lsd", "meth", "mushrooms",
    "nicotine", "semer", "vsa",
]


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def fetch_wheel(workdir):
    subprocess.run(
        [sys.executable, "-m", "pip", "download", "--no-deps", "-d", workdir, WHEEL],
        check=True,
        stdout=subprocess.DEVNULL,
    )
    wheels = list(Path(workdir).glob("responsibly-*.whl"))
    if not wheels:
        sys.exit("responsibly wheel not found after download")
    return zipfile.ZipFile(wheels[0])


def build_compas(wheel, out):
    raw = wheel.read("responsibly/dataset/compas/compas-scores-two-years.csv").decode("utf-8")
    rows = []
    for r in csv.DictReader(io.StringIO(raw)):
        # standard two-year filter
        if r["days_b_screening_arrest"] == "":
            continue
        days = int(float(r["days_b_screening_arrest"]))
        if not -30 <= days <= 30:
            continue
        if r["is_recid"] == "-1" or r["c_charge_degree"] == "O" or r["score_text"] == "N/A":
            continue
        rows.append((r["race"], r["two_year_recid"]))
    write_csv(out / "compas.csv", ["race", "two_year_recid"], rows)


def build_adult(wheel, out):
    rows = []
    for member in ("adult.data", "adult.test"):
        text = wheel.read(f"responsibly/dataset/adult/{member}").decode("utf-8")
        for line in text.splitlines():
            if not line.strip() or line.startswith("|"):
                continue
            parts = [p.strip() for p in line.split(",")]
            rows.append((parts[8], parts[14].rstrip(".")))
    write_csv(out / "adult.csv", ["race", "income"], rows)


def read_drug(source):
    if source:
        return Path(source).read_text(encoding="utf-8")
    for url in DRUG_URLS:
        try:
            with urllib.request.urlopen(url, timeout=30) as resp:
                return resp.read().decode("utf-8")
        except OSError as e:
            print(f"cannot download {url}: {e}", file=sys.stderr)
    return None


def build_drug(source, out):
    text = read_drug(source)
    if text is None:
        print("drug_consumption.csv skipped; pass --drug-data PATH", file=sys.stderr)
        return
    rows = []
    for line in text.splitlines():
        if not line.strip():
            continue
        r = dict(zip(DRUG_COLUMNS, line.split(",")))
        ethnicity = DRUG_ETHNICITY[r["ethnicity"]]
        # CL0 never used, CL1 used over a decade ago
        user = "non-user" if r["cannabis"] in ("CL0", "CL1") else "user"
        rows.append((ethnicity, user))
    write_csv(out / "drug_consumption.csv", ["ethnicity", "cannabis"], rows)


def verify(out):
    ok = True
    for line in SUMS.read_text().splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        digest, name = line.split()
        path = out / name
        if not path.exists():
            print(f"absent   {name}")
            continue
        actual = hashlib.sha256(path.read_bytes()).hexdigest()
        status = "ok" if actual == digest else "MISMATCH"
        ok &= actual == digest
        print(f"{status:<8} {name} {actual}")
    return ok


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    default_out = os.environ.get("BIASGAUGE_FIXTURES") or str(REPO / "fixtures" / "data")
    p.add_argument("--out", default=default_out)
    p.add_argument("--drug-data", help="local copy of UCI drug_consumption.data")
    p.add_argument("--wheel", help="local responsibly wheel instead of downloading")
    p.add_argument("--verify-only", action="store_true")
    args = p.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if not args.verify_only:
        with tempfile.TemporaryDirectory() as tmp:
            wheel = zipfile.ZipFile(args.wheel) if args.wheel else fetch_wheel(tmp)
            build_compas(wheel, out)
            build_adult(wheel, out)
        build_drug(args.drug_data, out)
    sys.exit(0 if verify(out) else 1)


if __name__ == "__main__":
    main()
