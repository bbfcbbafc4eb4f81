"""Command-line front end: config-driven factorization, sampling, and checks.

Subcommands
-----------
factorize   eigendecompose and factor a kernel; writes decomposition JSON
            and the factor matrix CSV
sample      draw field realizations; writes a samples CSV plus a JSON
            sidecar recording seed, truncation, and gauge
verify      run the invariant suite and write a pass/fail report; exits
            nonzero when any check fails
integrate   integrate a deterministic or random integrand against the field
tangent     Gram matrix of rescaled increments at a base node

Exit codes: 0 success, 1 data or verification failure, 2 usage/config
error. All randomized outputs are reproducible from the seeds recorded in
the sidecars; files are written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
import tempfile
from pathlib import Path

import jsonschema
import numpy as np

from . import chaos, field, integrals, kernels, spaces, spectral
from .errors import (
    DimensionMismatchError,
    InsufficientSamplesError,
    InvalidParameterError,
    NotInRkhsError,
    NotPositiveSemidefiniteError,
    NumericError,
    UnknownKernelError,
)

__all__ = ["main", "CONFIG_SCHEMA"]

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

#: published schema for run configs; validated before any work happens
CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "wnfield run configuration",
    "type": "object",
    "required": ["space", "kernel"],
    "additionalProperties": False,
    "properties": {
        "space": {
            "oneOf": [
                {
                    "type": "object",
                    "required": ["type", "n"],
                    "additionalProperties": False,
                    "properties": {
                        "type": {"const": "interval_grid"},
                        "n": {"type": "integer", "minimum": 1},
                    },
                },
                {
                    "type": "object",
                    "required": ["type", "points", "weights"],
                    "additionalProperties": False,
                    "properties": {
                        "type": {"const": "custom"},
                        "points": {"type": "array", "minItems": 1},
                        "weights": {
                            "type": "array",
                            "minItems": 1,
                            "items": {"type": "number"},
                        },
                    },
                },
            ]
        },
        "kernel": {
            "type": "object",
            "required": ["name"],
            "additionalProperties": False,
            "properties": {
                "name": {"type": "string"},
                "params": {
                    "type": "object",
                    "additionalProperties": {"type": "number"},
                },
                "file": {"type": "string"},
            },
        },
        "gauge": {"enum": ["symmetric_sqrt", "triangular", "rotated"]},
        "gauge_seed": {"type": "integer"},
        "drop_tol": {"type": "number", "exclusiveMinimum": 0},
        "seed": {"type": "integer"},
        "truncate": {"type": ["integer", "null"], "minimum": 0},
        "sample": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n_draws": {"type": "integer", "minimum": 1},
                "format": {"enum": ["dense", "long"]},
            },
        },
        "verify": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "duality_pairs": {"type": "integer", "minimum": 1},
                "n_draws": {"type": "integer", "minimum": 2},
                "band_se": {"type": "number", "exclusiveMinimum": 0},
                "reproducing_functions": {"type": "integer", "minimum": 1},
                "factor_file": {"type": "string"},
                "tolerances": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "factorization": {"type": "number", "exclusiveMinimum": 0},
                        "orthonormality": {"type": "number", "exclusiveMinimum": 0},
                        "trace": {"type": "number", "exclusiveMinimum": 0},
                        "reproducing": {"type": "number", "exclusiveMinimum": 0},
                        "duality": {"type": "number", "exclusiveMinimum": 0},
                        "isometry": {"type": "number", "exclusiveMinimum": 0},
                    },
                },
            },
        },
        "integrate": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "integrand": {"type": "object"},
                "n_draws": {"type": "integer", "minimum": 2},
            },
        },
        "tangent": {
            "type": "object",
            "required": ["t_index", "offsets", "r"],
            "additionalProperties": False,
            "properties": {
                "t_index": {"type": "integer", "minimum": 0},
                "offsets": {
                    "type": "array",
                    "minItems": 1,
                    "items": {"type": "integer"},
                },
                "r": {"type": "number", "exclusiveMinimum": 0},
            },
        },
    },
}

INTEGRAND_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "components": {"type": "array", "items": {"type": "string"}},
        "field_values": {"type": "array", "items": {"type": "number"}},
    },
}


class UsageError(Exception):
    """Config or invocation problem: exit code 2."""


class DataError(Exception):
    """Numeric or verification failure: exit code 1."""


# -- config plumbing ------------------------------------------------------


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            config = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(config, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise UsageError(f"config schema violation: {exc.message}") from exc
    return config


def build_space(config: dict) -> spaces.DiscreteMeasureSpace:
    spec = config["space"]
    try:
        if spec["type"] == "interval_grid":
            return spaces.interval_grid(spec["n"])
        return spaces.DiscreteMeasureSpace(
            points=np.asarray(spec["points"], dtype=float),
            weights=np.asarray(spec["weights"], dtype=float),
        )
    except (ValueError, DimensionMismatchError) as exc:
        raise UsageError(f"bad space spec: {exc}") from exc


def build_kernel(config: dict, base_dir: Path) -> kernels.CovarianceKernel:
    spec = config["kernel"]
    name = spec["name"]
    if name == "custom":
        file = spec.get("file")
        if not file:
            raise UsageError("custom kernel requires a 'file' with the matrix CSV")
        path = Path(file)
        if not path.is_absolute():
            path = base_dir / path
        try:
            entries = np.loadtxt(path, delimiter=",", ndmin=2)
        except OSError as exc:
            raise UsageError(f"cannot read kernel matrix {path}: {exc}") from exc
        except ValueError as exc:
            raise DataError(f"kernel matrix {path} is not numeric CSV: {exc}") from exc
        try:
            return kernels.matrix_kernel(entries)
        except InvalidParameterError as exc:
            raise DataError(str(exc)) from exc
    try:
        return kernels.builtin_kernel(name, spec.get("params"))
    except (UnknownKernelError, InvalidParameterError) as exc:
        raise UsageError(str(exc)) from exc


def assemble_and_decompose(config: dict, base_dir: Path):
    """Space, covariance matrix, and decomposition from a config.

    Numeric failures (non-finite kernel values, indefinite matrices) map
    to DataError so the process exits 1, not 2.
    """
    space = build_space(config)
    kernel = build_kernel(config, base_dir)
    try:
        C = kernels.assemble(kernel, space)
        dec = spectral.decompose(C, space, drop_tol=config.get("drop_tol", 1e-12))
    except (NotPositiveSemidefiniteError, NumericError, DimensionMismatchError) as exc:
        raise DataError(str(exc)) from exc
    return space, C, dec


def build_field_from_config(config: dict, base_dir: Path) -> field.GaussianField:
    space, _, dec = assemble_and_decompose(config, base_dir)
    h = spectral.factorize(
        dec,
        gauge=config.get("gauge", "symmetric_sqrt"),
        seed=config.get("gauge_seed", 0),
    )
    return field.GaussianField(space=space, dec=dec, factor=h)


def _apply_overrides(config: dict, args) -> dict:
    config = dict(config)
    if args.seed is not None:
        config["seed"] = args.seed
    if args.truncate is not None:
        config["truncate"] = args.truncate
    if args.gauge is not None:
        gauge = args.gauge
        if gauge.startswith("rotated:"):
            try:
                config["gauge_seed"] = int(gauge.split(":", 1)[1])
            except ValueError:
                raise UsageError(f"bad gauge spec {gauge!r}: seed must be an integer")
            gauge = "rotated"
        if gauge not in spectral.GAUGES:
            raise UsageError(
                f"unknown gauge {gauge!r}; expected one of {spectral.GAUGES} "
                "(rotated may carry a seed as rotated:SEED)"
            )
        config["gauge"] = gauge
    return config


# -- output plumbing ------------------------------------------------------


def _write_atomic(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path: Path, payload: dict):
    _write_atomic(path, json.dumps(payload, indent=2) + "\n")


def _write_csv(path: Path, matrix: np.ndarray, header: str):
    buf = io.StringIO()
    np.savetxt(buf, np.atleast_2d(matrix), delimiter=",", fmt="%.15g",
               header=header, comments="")
    _write_atomic(path, buf.getvalue())


# -- subcommands ----------------------------------------------------------


def cmd_factorize(config: dict, out_dir: Path, base_dir: Path) -> int:
    space, C, dec = assemble_and_decompose(config, base_dir)
    h = spectral.factorize(dec, gauge=config.get("gauge", "symmetric_sqrt"),
                           seed=config.get("gauge_seed", 0))
    trace = kernels.trace_of_operator(C, space)
    _write_json(out_dir / "decomposition.json", {
        "eigenvalues": dec.eigenvalues.tolist(),
        "eigenfunctions": dec.eigenfunctions.T.tolist(),
        "rank": dec.rank,
        "dropped_mass": dec.dropped_mass,
    })
    header = ",".join(f"k{j + 1}" for j in range(dec.rank))
    _write_csv(out_dir / "factor.csv", h.factor, header)
    print(f"rank: {dec.rank}")
    print(f"trace: {trace:.12g}")
    print(f"dropped_mass: {dec.dropped_mass:.12g}")
    print(f"gauge: {h.gauge}")
    print(f"wrote {out_dir / 'decomposition.json'} and {out_dir / 'factor.csv'}")
    return EXIT_OK


def cmd_sample(config: dict, out_dir: Path, base_dir: Path) -> int:
    fld = build_field_from_config(config, base_dir)
    options = config.get("sample", {})
    n_draws = options.get("n_draws", 100)
    seed = config.get("seed", 0)
    m = config.get("truncate")
    if m is None:
        m = fld.dec.rank
    try:
        batch = field.sample(fld, n_draws, m=m, seed=seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    fmt = options.get("format", "dense")
    if fmt == "dense":
        header = ",".join(f"p{i + 1}" for i in range(fld.space.size))
        _write_csv(out_dir / "samples.csv", batch.draws, header)
    else:
        rows, cols = batch.draws.shape
        draw_idx = np.repeat(np.arange(rows), cols)
        point_idx = np.tile(np.arange(cols), rows)
        long = np.column_stack([draw_idx, point_idx, batch.draws.ravel()])
        _write_csv(out_dir / "samples.csv", long, "draw,point_index,value")
    _write_json(out_dir / "samples_meta.json", {
        "command": "sample",
        "seed": seed,
        "truncation": batch.truncation,
        "gauge": fld.factor.gauge,
        "n_draws": n_draws,
        "space_size": fld.space.size,
        "kernel": config["kernel"],
        "format": fmt,
    })
    print(f"wrote {n_draws} draws ({fmt}) to {out_dir / 'samples.csv'}")
    print(f"sidecar: {out_dir / 'samples_meta.json'}")
    return EXIT_OK


def _check(name: str, error: float, tolerance: float, detail: str = "") -> dict:
    return {
        "name": name,
        "pass": bool(error <= tolerance),
        "error": float(error),
        "tolerance": float(tolerance),
        "detail": detail,
    }


#: deterministic verify tolerances; overridable via verify.tolerances
DEFAULT_TOLERANCES = {
    "factorization": 1e-8,   # relative to the top eigenvalue
    "orthonormality": 1e-10,
    "trace": 1e-10,          # relative
    "reproducing": 1e-6,     # scaled by ||f|| sqrt(K(x,x))
    "duality": 1e-10,
    "isometry": 1e-12,
}


def cmd_verify(config: dict, out_dir: Path, base_dir: Path) -> int:
    options = config.get("verify", {})
    band_se = options.get("band_se", 5.0)
    tol = {**DEFAULT_TOLERANCES, **options.get("tolerances", {})}
    seed = config.get("seed", 0)
    rng = np.random.default_rng(seed)

    space, C, dec = assemble_and_decompose(config, base_dir)
    lam1 = dec.eigenvalues[0] if dec.rank else 0.0
    checks = []

    # factorization identity, per gauge; an external factor file replaces
    # the canonical gauge so corrupted factors are caught
    reproductions = {}
    factor_file = options.get("factor_file")
    for gauge in spectral.GAUGES:
        if gauge == "symmetric_sqrt" and factor_file:
            path = Path(factor_file)
            if not path.is_absolute():
                path = base_dir / path
            try:
                F = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
            except (OSError, ValueError) as exc:
                raise DataError(f"cannot read factor file {path}: {exc}") from exc
            if F.shape != (space.size, dec.rank):
                raise DataError(
                    f"factor file shape {F.shape} does not match ({space.size}, {dec.rank})"
                )
            h = spectral.WhiteNoiseKernel(factor=F, gauge="file")
        else:
            h = spectral.factorize(dec, gauge, seed=config.get("gauge_seed", 0))
        R = spectral.reproduce_covariance(h, space)
        reproductions[gauge] = R
        err = float(np.max(np.abs(R - C)))
        checks.append(_check(f"factorization_identity[{gauge}]", err, tol["factorization"] * lam1,
                             "max entrywise |hh^T - C|"))

    pairs = [(a, b) for i, a in enumerate(spectral.GAUGES) for b in spectral.GAUGES[i + 1:]]
    gauge_err = max(
        float(np.max(np.abs(reproductions[a] - reproductions[b]))) for a, b in pairs
    )
    checks.append(_check("gauge_invariance", gauge_err, tol["factorization"] * lam1,
                         "max entrywise spread of reproduced covariances"))

    gram = dec.whitened_vectors().T @ dec.whitened_vectors()
    ortho_err = float(np.max(np.abs(gram - np.eye(dec.rank))))
    checks.append(_check("eigenfunction_orthonormality", ortho_err, tol["orthonormality"]))

    trace = kernels.trace_of_operator(C, space)
    trace_err = abs(trace - float(dec.eigenvalues.sum())) / max(abs(trace), 1e-300)
    checks.append(_check("trace_consistency", trace_err, tol["trace"],
                         "relative |trace - sum of eigenvalues|"))

    worst = 0.0
    for _ in range(options.get("reproducing_functions", 10)):
        coeffs = rng.standard_normal(dec.rank)
        fvec = dec.eigenfunctions @ (np.sqrt(dec.eigenvalues) * coeffs)
        element = spectral.to_rkhs(fvec, dec)
        norm = np.sqrt(element.norm_squared())
        for x in range(space.size):
            lhs = spectral.rkhs_inner(element, spectral.kernel_section(x, dec))
            scale = max(norm * np.sqrt(max(C[x, x], 0.0)), 1e-300)
            worst = max(worst, abs(lhs - fvec[x]) / scale)
    checks.append(_check("reproducing_property", worst, tol["reproducing"],
                         "scaled |<f, K(x,.)> - f(x)| over random eigen-span f"))

    n_draws = options.get("n_draws", 20000)
    fld = field.GaussianField(space=space, dec=dec,
                              factor=spectral.factorize(dec, config.get("gauge", "symmetric_sqrt"),
                                                        seed=config.get("gauge_seed", 0)))
    batch = field.sample(fld, n_draws, seed=seed)
    emp = field.empirical_covariance(batch)
    se = field.covariance_standard_error(C, n_draws)
    band_err = float(np.max(np.abs(emp - C) / np.maximum(se, 1e-300)))
    checks.append(_check("empirical_covariance_band", band_err, band_se,
                         f"max |Chat - C| in standard errors, N={n_draws}"))

    if dec.rank >= 2:
        worst_z = 0.0
        full = field.sample(fld, n_draws, seed=seed).draws
        for m in {1, dec.rank // 2}:
            trunc = field.sample(fld, n_draws, m=m, seed=seed).draws
            sq = ((full - trunc) ** 2 * space.weights[None, :]).sum(axis=1)
            target = field.truncation_error(dec, m)
            tail_se = np.sqrt(2.0 * np.sum(dec.eigenvalues[m:] ** 2) / n_draws)
            worst_z = max(worst_z, abs(float(sq.mean()) - target) / max(tail_se, 1e-300))
        checks.append(_check("truncation_band", worst_z, band_se,
                             "empirical L2 truncation error in standard errors"))

    n_pairs = options.get("duality_pairs", 100)
    worst_dual = 0.0
    for _ in range(n_pairs):
        m_vars = int(rng.integers(1, 7))
        F = chaos.random_polynomial(rng, m_vars, 4, 5)
        u = integrals.RandomIntegrand(
            tuple(chaos.random_polynomial(rng, m_vars, 4, 4) for _ in range(m_vars))
        )
        worst_dual = max(worst_dual, integrals.duality_check(F, u))
    checks.append(_check("duality_battery", worst_dual, tol["duality"],
                         f"|E[F delta(u)] - E[<DF,u>]| over {n_pairs} random pairs"))

    iso_err = 0.0
    for _ in range(5):
        coeffs = rng.standard_normal(min(dec.rank, 6))
        f_el = spectral.RkhsElement(coeffs)
        delta = integrals.skorokhod_integral(integrals.deterministic_integrand(f_el))
        iso_err = max(iso_err, abs(chaos.expectation(delta * delta) - f_el.norm_squared()))
    checks.append(_check("deterministic_isometry", iso_err, tol["isometry"],
                         "|E[delta(f)^2] - ||f||^2| symbolically"))

    all_pass = all(c["pass"] for c in checks)
    report = {"all_pass": all_pass, "seed": seed, "checks": checks}
    _write_json(out_dir / "verification.json", report)
    for c in checks:
        status = "PASS" if c["pass"] else "FAIL"
        print(f"[{status}] {c['name']}: error {c['error']:.3e} (tol {c['tolerance']:.3e})")
    print(f"report: {out_dir / 'verification.json'}")
    return EXIT_OK if all_pass else EXIT_FAILURE


def _load_integrand(config: dict, args, base_dir: Path) -> dict:
    if getattr(args, "integrand", None):
        # command-line path: resolved against the working directory
        path = Path(args.integrand)
        try:
            with open(path) as fh:
                spec = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read integrand {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"integrand {path} is not valid JSON: {exc}") from exc
    else:
        spec = config.get("integrate", {}).get("integrand")
    if not spec:
        raise UsageError("no integrand given (config integrate.integrand or --integrand FILE)")
    try:
        jsonschema.validate(spec, INTEGRAND_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise UsageError(f"integrand schema violation: {exc.message}") from exc
    if bool(spec.get("components")) == bool(spec.get("field_values")):
        raise UsageError("integrand needs exactly one of 'components' or 'field_values'")
    return spec


def cmd_integrate(config: dict, out_dir: Path, base_dir: Path, args) -> int:
    spec = _load_integrand(config, args, base_dir)
    fld = build_field_from_config(config, base_dir)
    dec = fld.dec
    seed = config.get("seed", 0)
    n_draws = config.get("integrate", {}).get("n_draws", 10000)

    if "field_values" in spec and spec["field_values"]:
        values = np.asarray(spec["field_values"], dtype=float)
        if values.shape != (fld.space.size,):
            raise DataError(
                f"field_values length {values.size} does not match space size {fld.space.size}"
            )
        try:
            element = spectral.to_rkhs(values, dec)
        except NotInRkhsError as exc:
            raise DataError(
                f"integrand is not in the field's reproducing-kernel space: "
                f"relative residual {exc.residual:.3e}"
            ) from exc
        components = None
    else:
        texts = spec["components"]
        try:
            polys = [chaos.parse_polynomial(t) for t in texts]
        except ValueError as exc:
            raise UsageError(f"bad integrand polynomial: {exc}") from exc
        if len(polys) > dec.rank:
            raise DataError(
                f"integrand has {len(polys)} components but the decomposition "
                f"rank is {dec.rank}"
            )
        polys += [chaos.ChaosPolynomial.zero() for _ in range(dec.rank - len(polys))]
        components = integrals.RandomIntegrand(tuple(polys))
        if all(p.degree() <= 0 for p in components.components):
            element = spectral.RkhsElement(
                np.array([p.coefficient(()) for p in components.components])
            )
            components = None

    if components is None:
        variance = element.norm_squared()
        xi = field.noise_matrix(n_draws, element.coeffs.size, seed)
        draws = xi @ element.coeffs
        result = {
            "kind": "deterministic",
            "rkhs_norm_squared": variance,
            "histogram": {
                "n_draws": n_draws,
                "seed": seed,
                "mean": float(draws.mean()),
                "variance": float(draws.var()),
                "quantiles": {
                    str(q): float(np.quantile(draws, q))
                    for q in (0.05, 0.25, 0.5, 0.75, 0.95)
                },
            },
        }
        print(f"deterministic integrand: variance (squared RKHS norm) = {variance:.12g}")
        print(f"sampled {n_draws} draws: mean {draws.mean():.4g}, var {draws.var():.6g}")
    else:
        delta = integrals.skorokhod_integral(components)
        mean = chaos.expectation(delta)
        variance = chaos.expectation(delta * delta) - mean**2
        result = {
            "kind": "random",
            "polynomial": chaos.format_polynomial(delta),
            "mean": mean,
            "variance": variance,
        }
        print(f"divergence polynomial: {chaos.format_polynomial(delta)}")
        print(f"mean: {mean:.12g}")
        print(f"variance: {variance:.12g}")
    _write_json(out_dir / "integral.json", result)
    print(f"wrote {out_dir / 'integral.json'}")
    return EXIT_OK


def cmd_tangent(config: dict, out_dir: Path, base_dir: Path) -> int:
    options = config.get("tangent")
    if not options:
        raise UsageError("tangent command needs a 'tangent' section in the config")
    fld = build_field_from_config(config, base_dir)
    try:
        gram = field.tangent_gram(
            fld, options["t_index"], options["offsets"], options["r"]
        )
    except (IndexError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    payload = {
        "t_index": options["t_index"],
        "offsets": list(options["offsets"]),
        "r": options["r"],
        "gram": gram.tolist(),
    }
    _write_json(out_dir / "tangent.json", payload)
    print("rescaled-increment Gram matrix:")
    for row in gram:
        print("  " + " ".join(f"{v: .12g}" for v in row))
    print(f"wrote {out_dir / 'tangent.json'}")
    return EXIT_OK


# -- entry point ----------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wnfield",
        description="Covariance factorization, field sampling, and stochastic "
                    "integration over discrete measure spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("factorize", "decompose a kernel and write the white-noise factor"),
        ("sample", "draw field realizations"),
        ("verify", "run the invariant verification suite"),
        ("integrate", "integrate a deterministic or random integrand"),
        ("tangent", "rescaled-increment Gram matrix at a node"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", default=".", help="output directory (default: cwd)")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--truncate", type=int, default=None,
                       help="override series truncation")
        p.add_argument("--gauge", default=None,
                       help="override gauge (symmetric_sqrt | triangular | rotated[:SEED])")
        if name == "integrate":
            p.add_argument("--integrand", default=None,
                           help="JSON file with the integrand (overrides config)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        config = _apply_overrides(config, args)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        base_dir = Path(args.config).resolve().parent
        if args.command == "factorize":
            return cmd_factorize(config, out_dir, base_dir)
        if args.command == "sample":
            return cmd_sample(config, out_dir, base_dir)
        if args.command == "verify":
            return cmd_verify(config, out_dir, base_dir)
        if args.command == "integrate":
            return cmd_integrate(config, out_dir, base_dir, args)
        return cmd_tangent(config, out_dir, base_dir)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except (NotPositiveSemidefiniteError, NumericError, NotInRkhsError,
            DimensionMismatchError, InsufficientSamplesError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
