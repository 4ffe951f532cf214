"""Batch front end: every solver and check as a subcommand.

Output is machine readable and deterministic: CSV files carry a header row
and 12 significant digits, JSON documents have exactly the top-level keys
config / results / residuals with sorted keys and no timestamps, so identical
configurations give byte-identical artifacts.  With --strict a residual above
its gate turns into exit code 1; invalid parameters exit 2.
"""

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import dnfields, exterior, regularity, spectrum1d, spectrum2d
from .bessel import zeros_j, zeros_jprime
from .multiindex import concat_sign, enumerate_ordered, sign_constants

CSV_DIGITS = "{:.12g}"


def _threads():
    """Advisory concurrency cap from MAXFORMS_THREADS.

    BLAS pools read their environment at import time, so this only seeds the
    usual knobs when they are still unset; the value is echoed in every JSON
    config block either way.
    """
    raw = os.environ.get("MAXFORMS_THREADS")
    if raw is None:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise ValueError("MAXFORMS_THREADS must be an integer") from None
    if n < 1:
        raise ValueError("MAXFORMS_THREADS must be positive")
    for key in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(key, str(n))
    return n


def _plain(obj):
    """Recursively convert to JSON-safe builtins; non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.integer, int)) and not isinstance(obj, bool):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, (np.complexfloating, complex)):
        return {"im": _plain(obj.imag), "re": _plain(obj.real)}
    return obj


def _doc(config: dict, results: dict, residuals: dict) -> str:
    payload = {
        "config": _plain(config),
        "results": _plain(results),
        "residuals": _plain(residuals),
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return CSV_DIGITS.format(float(value))


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _emit(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)


def _add_io(sp, formats, default):
    sp.add_argument("--output", default="-", metavar="PATH",
                    help="artifact path, '-' for stdout (default)")
    sp.add_argument("--format", choices=list(formats), default=default)
    sp.add_argument("--strict", action="store_true",
                    help="exit 1 when a residual exceeds its gate")


def _grid_pair(text: str):
    parts = text.split(",")
    if len(parts) == 1:
        parts = parts * 2
    if len(parts) != 2:
        raise ValueError("grid must be 'M' or 'Mr,Mphi'")
    try:
        mr, mphi = (int(p) for p in parts)
    except ValueError:
        raise ValueError("grid entries must be integers") from None
    return mr, mphi


def _order_list(text: str):
    try:
        orders = tuple(int(p) for p in text.split(",") if p)
    except ValueError:
        raise ValueError("orders must be a comma-separated integer list") from None
    if not orders or any(n < 1 for n in orders):
        raise ValueError("orders must be positive integers")
    return orders


# ---------------------------------------------------------------------------
# subcommands


def _run_bessel_zeros(args, threads) -> int:
    table = (zeros_j if args.kind == "fn" else zeros_jprime)(args.n, args.count)
    worst = float(np.max(table.residuals))
    if args.format == "csv":
        rows = [
            (m, z, r)
            for m, (z, r) in enumerate(zip(table.zeros, table.residuals), start=1)
        ]
        text = _csv(("m", "zero", "residual"), rows)
    else:
        text = _doc(
            {"count": args.count, "kind": args.kind, "n": args.n, "threads": threads},
            {"m": list(range(1, args.count + 1)), "zero": table.zeros},
            {"max_abs_value_at_zero": worst},
        )
    _emit(args.output, text)
    return 1 if args.strict and worst > 1e-10 else 0


def _run_eigen1d(args, threads) -> int:
    solve = spectrum1d.fd_eigensolve(args.grid, args.modes)
    ks = np.arange(1, args.modes + 1)
    exact = (ks - 0.5) ** 2
    abs_err = np.abs(solve.lambdas - exact)
    # consistency against the closed-form discrete spectrum, not the continuum
    closed = np.array(
        [spectrum1d.fd_eigenvalue_closed_form(args.grid, int(k)) for k in ks]
    )
    drift = float(np.max(np.abs(solve.lambdas - closed)))
    if args.format == "csv":
        rows = zip(ks, solve.lambdas, exact, abs_err)
        text = _csv(("k", "lambda_fd", "lambda_exact", "abs_err"), rows)
    else:
        text = _doc(
            {"grid": args.grid, "modes": args.modes, "threads": threads},
            {"lambda_exact": exact, "lambda_fd": solve.lambdas},
            {"abs_err_max": float(np.max(abs_err)), "solver_drift": drift},
        )
    _emit(args.output, text)
    gate = 1e-9 * max(1.0, float(closed[-1]))
    return 1 if args.strict and drift > gate else 0


def _reference_with_labels(q: int, count: int):
    """Ascending (lambda, n, m, omega) reference rows merged across orders."""
    rows = []
    for n in range(1, count + 5):
        table = zeros_j(n, count) if q == 0 else zeros_jprime(n, count)
        for m, z in enumerate(table.zeros, start=1):
            rows.append((float(z) ** 2, n, m, float(z)))
    rows.sort()
    return rows[:count]


def _run_eigen2d(args, threads) -> int:
    M_r, M_phi = args.grid
    if args.q == 0:
        route = "zaremba"
        lambdas = spectrum2d.zaremba2d_eigensolve(M_r, M_phi, args.modes).lambdas
    else:
        route = "radial"
        pool = []
        for n in range(1, args.modes + 5):
            sol = spectrum2d.radial_eigensolve(n, M_r, args.modes, bc="neumann")
            pool.extend(float(v) for v in sol.lambdas)
        lambdas = np.sort(np.array(pool))[: args.modes]
    reference = _reference_with_labels(args.q, args.modes)
    rel_err = np.array(
        [abs(lam - ref[0]) / ref[0] for lam, ref in zip(lambdas, reference)]
    )
    worst = float(np.max(rel_err))

    rows = [
        {
            "lambda_bessel": ref[0],
            "lambda_num": float(lam),
            "m": ref[2],
            "n": ref[1],
            "omega": ref[3],
            "rank": rank,
            "rel_err": float(err),
            "route": route,
        }
        for rank, (lam, ref, err) in enumerate(
            zip(lambdas, reference, rel_err), start=1
        )
    ]
    config = {
        "grid": list(args.grid),
        "modes": args.modes,
        "q": args.q,
        "threads": threads,
    }
    if args.metadata:
        _emit(args.metadata, _doc(config, {"modes": rows}, {"rel_err_max": worst}))
    if args.format == "csv":
        table = [
            (r["rank"], r["lambda_num"], r["lambda_bessel"], r["rel_err"], route)
            for r in rows
        ]
        text = _csv(("rank", "lambda_num", "lambda_bessel", "rel_err", "route"), table)
    else:
        text = _doc(config, {"modes": rows}, {"rel_err_max": worst})
    _emit(args.output, text)
    return 1 if args.strict and worst > 0.01 else 0


def _run_dn_fields(args, threads) -> int:
    partition = dnfields.arcs_from_string(args.arcs)
    basis = dnfields.build_basis(partition, h=args.h)
    report = dnfields.dimension_check(basis.gram)
    ones = np.ones(partition.count)
    scale = max(float(report.singular_values[0]), 1.0)
    kernel = float(np.max(np.abs(basis.gram @ ones))) / scale
    text = _doc(
        {
            "arcs": [[a, b] for a, b in partition.arcs],
            "h": args.h,
            "threads": threads,
        },
        {
            "K": partition.count,
            "gap": report.gap,
            "gram_eigenvalues": report.singular_values,
            "rank": report.rank,
        },
        {"constant_kernel": kernel, "solve_max": float(np.max(basis.residuals))},
    )
    _emit(args.output, text)
    bad = report.rank != partition.count - 1 or (
        partition.count > 1 and report.gap < 1e6
    )
    return 1 if args.strict and bad else 0


def _run_regularity(args, threads) -> int:
    report = regularity.classify(args.q, args.n, args.m, role=args.field)
    text = _doc(
        {
            "field": args.field,
            "m": args.m,
            "n": args.n,
            "q": args.q,
            "threads": threads,
        },
        {
            "eps": report.eps,
            "seminorms": report.seminorms,
            "slope": report.slope,
            "verdict": report.verdict,
        },
        {"one_minus_quality": 1.0 - report.quality},
    )
    _emit(args.output, text)
    return 1 if args.strict and report.verdict == "indeterminate" else 0


def _sign_suite_max(n_cap: int) -> int:
    """Exhaustive deviation over the sign-constant identity family, q,N <= cap."""
    worst = 0
    for N in range(1, n_cap + 1):
        sc = {q: sign_constants(q, N) for q in range(-1, N + 3)}
        for q in range(0, N + 1):
            checks = (
                sc[q + 2].double_hodge - sc[q].double_hodge,
                sc[q + 2].codiff_sign - sc[q].codiff_sign,
                sc[N - q].double_hodge - sc[q].double_hodge,
                sc[N - q].codiff_sign - sc[q + 1].codiff_sign,
                sc[q].double_hodge * sc[q + 1].codiff_sign - (-1) ** q,
                sc[q].codiff_sign * sc[q + 1].codiff_sign - (-1) ** N,
                sc[q].codiff_sign * sc[q].double_hodge - (-1) ** (N + q),
                sc[q - 1].double_hodge_sphere * sc[q].codiff_sign - 1,
                sc[q].codiff_sign_sphere * sc[q].double_hodge - (-1) ** (N + 1),
            )
            worst = max(worst, max(abs(c) for c in checks))
        for I in enumerate_ordered(min(2, N), N):
            J = tuple(i for i in range(1, N + 1) if i not in I)
            worst = max(
                worst,
                abs(
                    concat_sign(I, J)
                    - (-1) ** (len(I) * len(J)) * concat_sign(J, I)
                ),
            )
    return worst


def _form_max(form) -> float:
    vals = [np.max(np.abs(c.values)) for c in form.components.values()]
    return float(max(vals)) if vals else 0.0


def _random_grid_form(N: int, q: int, cells: int, seed: int):
    """Integer-valued components on a power-of-two grid: derivatives stay exact."""
    rng = np.random.default_rng(seed)
    shape = (cells,) * N
    comps = {}
    for key in enumerate_ordered(q, N):
        data = rng.integers(-4, 5, size=shape) + 1j * rng.integers(-4, 5, size=shape)
        comps[key] = data.astype(np.complex128)
    return exterior.FieldForm.from_grid(N, q, comps, spacing=(0.125,) * N)


def _run_identities(args, threads) -> int:
    if args.form:
        with open(args.form, encoding="ascii") as fh:
            a = exterior.grid_form_from_json(fh.read())
        N, q = a.N, a.q
        source = "file"
    else:
        N, q = args.N, args.q
        if not 0 <= q <= N:
            raise ValueError("degree must lie in 0..N")
        a = _random_grid_form(N, q, args.cells, args.seed)
        source = "generated"
    if args.dump_form:
        _emit(args.dump_form, exterior.grid_form_to_json(a) + "\n")

    b = _random_grid_form(N, 1, next(iter(a.components.values())).grid.shape[0],
                          args.seed + 1) if N >= 1 else None
    kappa = sign_constants(q, N).double_hodge
    residuals = {
        "codiff_routes_max": _form_max(
            exterior.codiff(a) - exterior.codiff_expansion(a)
        ),
        "dd_max": _form_max(exterior.ext_d(exterior.ext_d(a))),
        "double_hodge_max": _form_max(exterior.hodge(exterior.hodge(a)) - kappa * a),
        "sign_suite_max": _sign_suite_max(max(N, 8)),
    }
    if b is not None:
        flip = (-1) ** q
        residuals["wedge_anticommute_max"] = _form_max(
            exterior.wedge(a, b) - flip * exterior.wedge(b, a)
        )
    some = next(iter(a.components.values()))
    text = _doc(
        {"N": N, "q": q, "seed": None if args.form else args.seed,
         "source": source, "threads": threads},
        {"component_count": len(a.components), "grid_shape": list(some.grid.shape)},
        residuals,
    )
    _emit(args.output, text)
    worst = max(v for v in residuals.values())
    return 1 if args.strict and worst > 1e-8 else 0


def _bilinear(component, pts: np.ndarray) -> np.ndarray:
    """Bilinear interpolation on a grid component; outside points are clamped."""
    layout = component.grid
    vals = component.values
    rel = (pts - np.asarray(layout.origin)) / np.asarray(layout.spacing)
    i0 = np.clip(np.floor(rel).astype(int), 0, np.asarray(layout.shape) - 2)
    t = np.clip(rel - i0, 0.0, 1.0)
    ix, iy = i0[:, 0], i0[:, 1]
    tx, ty = t[:, 0], t[:, 1]
    v00 = vals[ix, iy]
    v10 = vals[ix + 1, iy]
    v01 = vals[ix, iy + 1]
    v11 = vals[ix + 1, iy + 1]
    return ((1 - tx) * (1 - ty) * v00 + tx * (1 - ty) * v10
            + (1 - tx) * ty * v01 + tx * ty * v11)


def _grid_trace_values(form, r: np.ndarray, M_phi: int) -> dict:
    phi = (np.arange(1, M_phi + 1) - 0.5) * (math.pi / M_phi)
    rg, pg = np.meshgrid(r, phi, indexing="ij")
    pts = np.column_stack(
        [(rg * np.cos(pg)).ravel(), (rg * np.sin(pg)).ravel()]
    )
    shape = rg.shape

    def sample(key):
        return _bilinear(form.components[key], pts).reshape(shape)

    if form.q == 0:
        return {"c": sample(())}
    if form.q == 1:
        f1, f2 = sample((1,)), sample((2,))
        f_r = f1 * np.cos(pg) + f2 * np.sin(pg)
        f_phi = -f1 * np.sin(pg) + f2 * np.cos(pg)
        return {"a": f_r, "d": rg * f_phi}
    if form.q == 2:
        return {"b": rg * sample((1, 2))}
    raise ValueError("expansion needs a form of degree 0, 1 or 2")


def _run_expand(args, threads) -> int:
    orders = args.orders
    r = spectrum2d.radial_nodes(args.radial_cells)
    config = {
        "angular_cells": args.angular_cells,
        "orders": list(orders),
        "radial_cells": args.radial_cells,
        "threads": threads,
    }
    own = None
    if args.form:
        with open(args.form, encoding="ascii") as fh:
            form = exterior.grid_form_from_json(fh.read())
        if form.N != 2:
            raise ValueError("expansion is defined on the half disk (N = 2)")
        values = _grid_trace_values(form, r, args.angular_cells)
        coeffs = spectrum2d.project_angular(values, orders, r)
        config.update({"q": form.q, "source": "file"})
    else:
        missing = [k for k in ("q", "n", "m") if getattr(args, k) is None]
        if missing:
            raise ValueError("either --form or all of --q/--n/--m are required")
        mode = spectrum2d.analytic_eigenform(args.q, args.n, args.m, role=args.field)
        coeffs = spectrum2d.extract_coefficients(
            mode, orders, M_r=args.radial_cells, M_phi=args.angular_cells
        )
        own = args.n
        config.update(
            {"field": args.field, "m": args.m, "n": args.n, "q": args.q,
             "source": "eigenform"}
        )

    cross = 0.0
    if own is not None:
        for rows in coeffs.families.values():
            for i, n in enumerate(orders):
                if n != own:
                    cross = max(cross, float(np.max(np.abs(rows[i]))))
    residuals = {} if own is None else {"cross_coefficient_max": cross}

    if args.format == "csv":
        table = []
        for letter in sorted(coeffs.families):
            rows = coeffs.families[letter]
            for i, n in enumerate(orders):
                for node, val in zip(r, rows[i]):
                    table.append((letter, n, node, val.real, val.imag))
        text = _csv(("family", "order", "r", "re", "im"), table)
    else:
        families = {
            letter: {
                str(n): {"im": rows[i].imag, "re": rows[i].real}
                for i, n in enumerate(orders)
            }
            for letter, rows in coeffs.families.items()
        }
        text = _doc(config, {"families": families, "nodes": r}, residuals)
    _emit(args.output, text)
    return 1 if args.strict and own is not None and cross > 1e-8 else 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maxforms",
        description="Half-disk Maxwell eigenmodes: solvers and identity checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    sp = sub.add_parser("identities", help="multi-index and calculus identity residuals")
    sp.add_argument("--N", type=int, default=4)
    sp.add_argument("--q", type=int, default=1)
    sp.add_argument("--cells", type=int, default=6, help="grid points per axis")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--form", metavar="PATH", help="check a stored grid form instead")
    sp.add_argument("--dump-form", metavar="PATH", help="write the checked form as JSON")
    _add_io(sp, ("json",), "json")
    sp.set_defaults(handler=_run_identities)

    sp = sub.add_parser("bessel-zeros", help="half-integer Bessel zero tables")
    sp.add_argument("--n", type=int, required=True, help="order index, nu = n - 1/2")
    sp.add_argument("--kind", choices=("fn", "dfn"), default="fn")
    sp.add_argument("--count", type=int, default=5)
    _add_io(sp, ("csv", "json"), "csv")
    sp.set_defaults(handler=_run_bessel_zeros)

    sp = sub.add_parser("eigen1d", help="half-circle spectrum, FD against exact")
    sp.add_argument("--modes", type=int, default=8)
    sp.add_argument("--grid", type=int, default=512)
    _add_io(sp, ("csv", "json"), "csv")
    sp.set_defaults(handler=_run_eigen1d)

    sp = sub.add_parser("eigen2d", help="half-disk spectrum against Bessel zeros")
    sp.add_argument("--q", type=int, choices=(0, 1), default=0)
    sp.add_argument("--modes", type=int, default=4)
    sp.add_argument("--grid", type=_grid_pair, default=(256, 256), metavar="MR,MPHI")
    sp.add_argument("--metadata", metavar="PATH",
                    help="also write eigenform metadata as JSON")
    _add_io(sp, ("csv", "json"), "csv")
    sp.set_defaults(handler=_run_eigen2d)

    sp = sub.add_parser("dn-fields", help="Dirichlet-Neumann field dimension")
    sp.add_argument("--arcs", required=True, metavar="A:B,A:B,...",
                    help="boundary arcs carrying the value condition")
    sp.add_argument("--h", type=float, default=0.05)
    _add_io(sp, ("json",), "json")
    sp.set_defaults(handler=_run_dn_fields)

    sp = sub.add_parser("regularity", help="gradient-energy ladder classification")
    sp.add_argument("--q", type=int, choices=(0, 1), required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--field", choices=("E", "H"), default="E")
    _add_io(sp, ("json",), "json")
    sp.set_defaults(handler=_run_regularity)

    sp = sub.add_parser("expand", help="radial coefficient families of a field")
    sp.add_argument("--q", type=int, choices=(0, 1))
    sp.add_argument("--n", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--field", choices=("E", "H"), default="E")
    sp.add_argument("--form", metavar="PATH", help="expand a stored grid form instead")
    sp.add_argument("--orders", type=_order_list, default=(1, 2, 3, 4),
                    metavar="N1,N2,...")
    sp.add_argument("--radial-cells", type=int, default=96)
    sp.add_argument("--angular-cells", type=int, default=256)
    _add_io(sp, ("csv", "json"), "csv")
    sp.set_defaults(handler=_run_expand)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        threads = _threads()
        return args.handler(args, threads)
    except (ValueError, OSError) as exc:
        print(f"maxforms: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
