"""Adaptive lambda-tracking: the gain rises only while the error is outside the lambda ball."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from fogpss import LambdaTrackerConfig, load_config, simulate
from fogpss.config import bundled_config_path


def main() -> None:
    cfg = load_config(bundled_config_path("lambda_tracker.cfg")).sim
    lam = cfg.controller.lam
    tr = simulate(cfg)
    k = tr.extras["k"]
    print(f"adaptive: gain {k[0]:.3f} -> {k[-1]:.3f}, entry into {lam + 0.05:g} ball at {tr.entry_time(lam + 0.05, 'xe_tilde')} s")
    print(f"  max |x_e| after 30 s = {np.abs(tr.x_e[tr.t >= 30]).max():.4f}")

    fixed = simulate(replace(cfg, controller=LambdaTrackerConfig(lam=100.0, alpha=cfg.controller.alpha, k0=k[0])))
    print(f"fixed gain {k[0]:.3f}: max |x_e| after 30 s = {np.abs(fixed.x_e[fixed.t >= 30]).max():.4f}")


if __name__ == "__main__":
    main()
