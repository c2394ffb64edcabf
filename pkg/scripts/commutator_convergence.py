"""Residuals of the [L, M] and [L, T] finite-difference checks as dt shrinks, with observed order."""
from __future__ import annotations

import math
from dataclasses import dataclass

from _config import parse_config, write_json
from wqt.infodyn import InfoParams, TimeGrid, commutator_lm_check, commutator_lt_check, gaussian


@dataclass
class Config:
    half_width: float = 8.0
    dt_max: float = 0.1
    levels: int = 7
    K: float = math.log(2)
    I0: float = 0.0
    out: str = ""


def main(cfg: Config) -> None:
    params = InfoParams(cfg.I0, cfg.K)
    rows = []
    print(f"{'dt':>10} {'LM residual':>12} {'ratio':>7} {'LM scale':>10} {'LT residual':>12} {'ratio':>7}")
    dt = cfg.dt_max
    for _ in range(cfg.levels):
        grid = TimeGrid.symmetric(cfg.half_width, dt)
        lm = commutator_lm_check(gaussian, grid, params)
        lt = commutator_lt_check(gaussian, grid)
        # Taylor estimate: dt² max|ρ''| / 2 with max|ρ''| = 1 for the unit Gaussian
        rows.append({"dt": dt, "lm": lm.to_dict(), "lt": lt.to_dict(), "taylor_lt": dt * dt / 2})
        print(f"{dt:>10.2e} {lm.residual:>12.4e} {lm.ratio:>7.3f} {lm.scale.real:>10.6f} "
              f"{lt.residual:>12.4e} {lt.ratio:>7.3f}")
        dt /= 2
    write_json(cfg.out, cfg, rows)


if __name__ == "__main__":
    main(parse_config(Config, __doc__))
