"""Log-log convergence figure from a sweep `convergence.txt`.

Input columns: `order N l1_error rate`. One line per polynomial degree,
each annotated with its least-squares slope; dashed guides show the
nominal rates k+1.
"""

from __future__ import annotations

import numpy as np
import matplotlib.pyplot as plt

from .common import base_parser, run, save
from .io import column, load_table


def fitted_slopes(path):
    """{degree: (N, errors, slope)} from one convergence table."""
    meta, header, data = load_table(path)
    orders = column(header, data, "order", path).astype(int)
    ns = column(header, data, "N", path)
    errs = column(header, data, "l1_error", path)
    out = {}
    for k in sorted(set(orders)):
        sel = orders == k
        slope = -np.polyfit(np.log(ns[sel]), np.log(errs[sel]), 1)[0]
        out[k] = (ns[sel], errs[sel], float(slope))
    return meta, out


def render(args):
    meta, series = fitted_slopes(args.inputs[0])
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    for k, (ns, errs, slope) in series.items():
        ax.loglog(ns, errs, "o-", label=f"k={k}: slope {slope:.2f}")
        guide = errs[0] * (ns / ns[0]) ** (-(k + 1.0))
        ax.loglog(ns, guide, "--", color="gray", linewidth=0.8)
    ax.set_xlabel("cells N")
    ax.set_ylabel("L1 error")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    ax.set_title(args.title or f"convergence: {meta.get('case', '')}".strip())
    fig.tight_layout()
    save(fig, args)
    return 0


def main(argv=None):
    parser = base_parser("plotkit-convergence", __doc__)
    return run(lambda a: render(parser.parse_args(a)), argv)


if __name__ == "__main__":
    raise SystemExit(main())
