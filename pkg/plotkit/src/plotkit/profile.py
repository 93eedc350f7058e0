"""1D profile overlay from snapshot files.

Plots one column against x for each input snapshot.  `--erf-reference`
overlays erf(x / sqrt(4 eta t)) using the `eta` and `t` values from the
snapshot metadata, the analytic resistive-diffusion profile.
"""

from __future__ import annotations

import math

import numpy as np
import matplotlib.pyplot as plt

from .common import base_parser, run, save
from .io import SchemaError, column, load_table


def render(args):
    fig, ax = plt.subplots(figsize=(5.6, 4.0))
    for path in args.inputs:
        meta, header, data = load_table(path)
        x = column(header, data, "x", path)
        y = column(header, data, args.field, path)
        order = np.argsort(x, kind="stable")
        label = f"t={float(meta['t']):g}" if "t" in meta else path
        ax.plot(x[order], y[order], label=label)
        if args.erf_reference:
            if "eta" not in meta or "t" not in meta:
                raise SchemaError(f"{path}: erf reference needs eta and t metadata")
            eta, t = float(meta["eta"]), float(meta["t"])
            if eta <= 0 or t <= 0:
                raise SchemaError(f"{path}: erf reference needs eta > 0 and t > 0")
            xs = np.sort(x)
            ref = np.array([math.erf(v / math.sqrt(4.0 * eta * t)) for v in xs])
            ax.plot(xs, ref, "k--", linewidth=0.9,
                    label=f"erf reference t={t:g}")
    ax.set_xlabel("x")
    ax.set_ylabel(args.field)
    ax.legend()
    ax.grid(True, alpha=0.3)
    if args.title:
        ax.set_title(args.title)
    fig.tight_layout()
    save(fig, args)
    return 0


def main(argv=None):
    parser = base_parser("plotkit-profile", __doc__)
    parser.add_argument("--field", default="rho_i",
                        help="snapshot column to plot (default rho_i)")
    parser.add_argument("--erf-reference", action="store_true",
                        help="overlay the analytic resistive-diffusion profile")
    return run(lambda a: render(parser.parse_args(a)), argv)


if __name__ == "__main__":
    raise SystemExit(main())
