"""Integer-order self-support control of a decoupled two-joint robot, with and without measurement noise."""

from __future__ import annotations

import numpy as np

from fogpss import pss_robot_experiment
from fogpss.reproduce import default_robot_experiment


def main() -> None:
    for label, noise in (("noisy", True), ("noise-free", False)):
        tr = pss_robot_experiment(default_robot_experiment(noise))
        print(f"{label}:")
        print(f"  error radius per joint      {np.round(tr.radius, 4)}")
        print(f"  entry times                 {[None if t is None else round(t, 3) for t in tr.entry_times]}")
        print(f"  max |de/dt| inside the ball {np.round(tr.max_inside_edot, 3)} (bound {np.round(tr.derivative_bound, 3)})")
        print(f"  final |e|                   {np.round(np.abs(tr.e[-1]), 4)}")


if __name__ == "__main__":
    main()
