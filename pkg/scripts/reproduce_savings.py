"""Bandwidth savings of a 1 TB layer-1 / 100 TB layer-2 hierarchy, 2011 and 2015 mixes.

Prints the report and the published figures side by side.

    python scripts/reproduce_savings.py [--c1 1TB] [--c2 100TB]
"""
import argparse

from cachemix.hierarchy import savings_table
from cachemix.scenario import load_scenario, parse_size

PUBLISHED = {
    ("2011", 0.8, "shared"): (17, 50), ("2011", 0.8, "VoD"): (23, 58),
    ("2011", 1.2, "shared"): (24, 50), ("2011", 1.2, "VoD"): (23, 58),
    ("2015", 0.8, "shared"): (27, 59), ("2015", 0.8, "VoD"): (37, 61),
    ("2015", 1.2, "shared"): (36, 59), ("2015", 1.2, "VoD"): (37, 61),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--c1", type=parse_size, default=1e12)
    ap.add_argument("--c2", type=parse_size, default=1e14)
    args = ap.parse_args()
    bases = {sc.year_label: sc.content_types
             for sc in (load_scenario("mix2011"), load_scenario("mix2015"))}
    rows = savings_table(bases, (0.8, 1.2), args.c1, args.c2)
    print(f"{'year':6}{'alpha':>6}{'layer 1':>9}{'L1 %':>7}{'total %':>9}{'published':>12}")
    for r in rows:
        pub = PUBLISHED.get((r.label, r.vod_alpha, r.policy))
        pub = f"{pub[0]:>4} {pub[1]:>4}" if pub and (args.c1, args.c2) == (1e12, 1e14) else ""
        print(f"{r.label:6}{r.vod_alpha:>6g}{r.policy:>9}{r.layer1_percent:>7}"
              f"{r.total_percent:>9}{pub:>12}   ({r.layer1_reduction:.4f}, {r.total_reduction:.4f})")


if __name__ == "__main__":
    main()
