"""Compare the product-formula propagator with exact evolution.

Prints factored-versus-exact fidelity and both norms at fixed coupling * t = 1
while the coupling-to-drive ratio varies over several decades.

    python3 scripts/jc_regime_scan.py [J_max]
"""

import math
import sys

from well_ladder.cli import emit_table
from well_ladder.jcsim import JCConfig, regime_scan

RATIOS = [1 / 200, 1 / 50, 1 / 10, 1 / 2, 2, 10, 50, 200]


def main(J_max: str = "128") -> None:
    base = JCConfig(t=1.0, phi=2 * math.pi, J_max=int(J_max))
    emit_table(regime_scan(RATIOS, base), "csv")


if __name__ == "__main__":
    main(*sys.argv[1:2])
