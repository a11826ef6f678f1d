"""Census of lines through >= k special points, split by classification and family tag."""
import argparse
import csv
import sys
from collections import Counter

from pcfgeom.incidence import family_tags, find_lines
from pcfgeom.pcfcatalog import build_catalog


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--bound", type=int, default=5)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--csv", default=None, help="write nonspecial lines here")
    args = ap.parse_args(argv)

    cat = build_catalog(args.bound)
    recs = find_lines(cat, args.k)
    print(f"bound {args.bound}: {len(cat)} parameters, {len(recs)} lines with >= {args.k} points")
    print(" ", dict(Counter(r.kind.value for r in recs)))
    rows, tagged = [], Counter()
    for r in recs:
        if r.kind.special:
            continue
        tags = family_tags(r.line, r.support, cat)
        tagged[" + ".join(tags[1:]) or "none"] += 1
        rows.append([len(r.support), " ".join(tags[1:]), " ".join(r.support_ids)])
    print("nonspecial lines by finer tag:")
    for t, n in sorted(tagged.items()):
        print(f"  {t}: {n}")
    print("size histogram:", dict(sorted(Counter(row[0] for row in rows).items())))
    if args.csv:
        out = sys.stdout if args.csv == "-" else open(args.csv, "w", newline="")
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["support_size", "tags", "support"])
        w.writerows(rows)


if __name__ == "__main__":
    main()
