#!/usr/bin/env python3
"""Convert public signed-network dumps to the `src dst weight [timestamp]` edge list.

    convert_snap.py wikielec wikiElec.ElecBs3.txt(.gz) > wikielec.txt
    convert_snap.py wikirfa  wiki-RfA.txt(.gz)         > wikirfa.txt
    convert_snap.py reddit   body.tsv title.tsv        > reddit.txt

Node names are written as integer ids (first-appearance order) so that names
containing spaces survive. Neutral votes carry no sign and are skipped.
Repeated pairs are kept; `slim ingest --aggregate` sums them.
"""

import argparse
import gzip
import sys
from datetime import datetime, timezone


def open_text(path):
    if path.endswith(".gz"):
        return gzip.open(path, "rt", encoding="utf-8", errors="replace")
    return open(path, encoding="utf-8", errors="replace")


class Ids:
    def __init__(self):
        self.ids = {}

    def __call__(self, name):
        return self.ids.setdefault(name, len(self.ids))


def epoch(text, fmt):
    try:
        return int(datetime.strptime(text.strip(), fmt).replace(tzinfo=timezone.utc).timestamp())
    except ValueError:
        return None


def emit(out, src, dst, weight, ts):
    out.write(f"{src} {dst} {weight}" + (f" {ts}" if ts is not None else "") + "\n")


def wikielec(paths, ids, out):
    # U <candidate id> <name> starts an election; V <vote> <voter id> <time> <name> follows.
    for path in paths:
        candidate = None
        with open_text(path) as f:
            for line in f:
                parts = line.rstrip("\n").split("\t")
                if parts[0] == "U" and len(parts) >= 2:
                    candidate = parts[1]
                elif parts[0] == "V" and candidate is not None and len(parts) >= 4:
                    vote = int(parts[1])
                    if vote != 0:
                        emit(out, ids(parts[2]), ids(candidate), vote, epoch(parts[3], "%Y-%m-%d %H:%M:%S"))


def wikirfa(paths, ids, out):
    # Records of SRC/TGT/VOT/RES/YEA/DAT/TXT lines separated by blank lines.
    def flush(rec):
        src, dst, vot = rec.get("SRC", ""), rec.get("TGT", ""), rec.get("VOT", "0")
        if src and dst and int(vot) != 0:
            emit(out, ids(src), ids(dst), int(vot), epoch(rec.get("DAT", ""), "%H:%M, %d %B %Y"))

    for path in paths:
        rec = {}
        with open_text(path) as f:
            for line in f:
                line = line.rstrip("\n")
                if not line:
                    if rec:
                        flush(rec)
                    rec = {}
                    continue
                key, _, value = line.partition(":")
                rec[key] = value
        if rec:
            flush(rec)


def reddit(paths, ids, out):
    # SOURCE_SUBREDDIT TARGET_SUBREDDIT POST_ID TIMESTAMP LINK_SENTIMENT PROPERTIES
    for path in paths:
        with open_text(path) as f:
            next(f, None)
            for line in f:
                parts = line.split("\t")
                if len(parts) < 5:
                    continue
                emit(out, ids(parts[0]), ids(parts[1]), int(parts[4]), epoch(parts[3], "%Y-%m-%d %H:%M:%S"))


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("format", choices=["wikielec", "wikirfa", "reddit"])
    ap.add_argument("inputs", nargs="+")
    args = ap.parse_args()
    {"wikielec": wikielec, "wikirfa": wikirfa, "reddit": reddit}[args.format](args.inputs, Ids(), sys.stdout)


if __name__ == "__main__":
    main()
