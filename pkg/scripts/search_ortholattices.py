"""Enumerate small ortholattices and list those with join-form but no meet-form non-distributivity."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from _config import parse_config, write_json
from wqt.lattice import classify_nondistributivity, dualize, enumerate_ortholattices, quantum_type, information_type


@dataclass
class Config:
    max_size: int = 8
    out: str = ""


def main(cfg: Config) -> None:
    lats = enumerate_ortholattices(cfg.max_size)
    print(f"ortholattices with at most {cfg.max_size} elements: {len(lats)}")
    for size, count in sorted(Counter(len(l) for l in lats).items()):
        print(f"  size {size}: {count}")
    rows = []
    print(f"{'size':>4} {'distributive':>12} {'quantum':>7} {'info':>5} {'info-only':>9} {'dual ok':>7}")
    for lat in lats:
        v = classify_nondistributivity(lat)
        dual = dualize(lat)
        n = len(lat)
        dual_ok = all(information_type(lat, a, b, c) == quantum_type(dual, a, b, c)
                      for a in range(n) for b in range(n) for c in (0, 1))
        row = {"size": n, "distributive": v.distributive, "quantum_pairs": len(v.quantum_pairs),
               "information_pairs": len(v.information_pairs), "information_only": len(v.information_only),
               "dual_exchanges_forms": dual_ok, "order": [list(map(str, p)) for p in lat.order_pairs()]}
        rows.append(row)
        print(f"{n:>4} {str(v.distributive):>12} {row['quantum_pairs']:>7} {row['information_pairs']:>5} "
              f"{row['information_only']:>9} {str(dual_ok):>7}")
    write_json(cfg.out, cfg, rows)


if __name__ == "__main__":
    main(parse_config(Config, __doc__))
