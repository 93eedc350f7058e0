"""Entropy-evolution figure from a run `timeseries.txt`.

Plots the total fluid entropy against time; `--with-em` adds the
electromagnetic energy-like entropy on a second axis.
"""

from __future__ import annotations

import matplotlib.pyplot as plt

from .common import base_parser, run, save
from .io import column, load_table


def render(args):
    path = args.inputs[0]
    meta, header, data = load_table(path)
    t = column(header, data, "t", path)
    ent = column(header, data, "total_fluid_entropy", path)
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    ax.plot(t, ent, color="tab:blue", label="fluid entropy")
    ax.set_xlabel("t")
    ax.set_ylabel("total fluid entropy")
    if args.with_em:
        em = column(header, data, "total_em_entropy", path)
        ax2 = ax.twinx()
        ax2.plot(t, em, color="tab:orange", label="EM entropy")
        ax2.set_ylabel("total EM entropy")
    ax.grid(True, alpha=0.3)
    ax.set_title(args.title or f"entropy: {meta.get('case', '')}".strip())
    fig.tight_layout()
    save(fig, args)
    return 0


def main(argv=None):
    parser = base_parser("plotkit-entropy", __doc__)
    parser.add_argument("--with-em", action="store_true",
                        help="also plot the electromagnetic entropy")
    return run(lambda a: render(parser.parse_args(a)), argv)


if __name__ == "__main__":
    raise SystemExit(main())
