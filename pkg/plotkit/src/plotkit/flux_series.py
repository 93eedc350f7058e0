"""Diagnostic time series from a run `timeseries.txt`.

Defaults to the reconnection flux; any numeric column can be selected
with `--field`.
"""

from __future__ import annotations

import matplotlib.pyplot as plt

from .common import base_parser, run, save
from .io import column, load_table


def render(args):
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    for path in args.inputs:
        meta, header, data = load_table(path)
        t = column(header, data, "t", path)
        v = column(header, data, args.field, path)
        ax.plot(t, v, label=meta.get("case", path))
    ax.set_xlabel("t")
    ax.set_ylabel(args.field)
    if len(args.inputs) > 1:
        ax.legend()
    ax.grid(True, alpha=0.3)
    if args.title:
        ax.set_title(args.title)
    fig.tight_layout()
    save(fig, args)
    return 0


def main(argv=None):
    parser = base_parser("plotkit-flux-series", __doc__)
    parser.add_argument("--field", default="reconnection_flux",
                        help="timeseries column to plot (default reconnection_flux)")
    return run(lambda a: render(parser.parse_args(a)), argv)


if __name__ == "__main__":
    raise SystemExit(main())
