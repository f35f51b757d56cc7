"""Command-line front end.

Every computed number the CLI prints comes straight from the library; the
commands only parse flags, wire modules together, and choose exit codes:
0 success, 1 validation error, 2 capacity error, 3 audit failure.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click
import numpy as np

from .audit import audit_central, audit_empirical, audit_local
from .central import build_central_channel, central_release
from .core import DNA, CapacityError, LocusSet, Query, ValidationError
from .datasets import HmmGeneratorConfig, hmm_generate, load_dataset, save_dataset
from .dp import epsilon_for_target_error
from .harness import parse_plan, run_plan
from .local import (
    LocalMechanism,
    build_mechanism,
    error_probabilities,
    release_batch,
    true_answer_batch,
)
from .models import MarkovChainModel, fit_tabular
from .plots import render_figures


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ValidationError as exc:
            _fail(str(exc), 1)
        except CapacityError as exc:
            _fail(str(exc), 2)
        except FileNotFoundError as exc:
            _fail(str(exc), 1)

    return wrapper


def _resolve_seed(seed: int | None) -> int:
    if seed is None:
        seed = int(np.random.SeedSequence().entropy % (2**63))
        click.echo(f"no --seed given; using seed {seed}", err=True)
    return seed


def _parse_loci(text: str) -> LocusSet:
    if not text:
        return LocusSet(())
    return LocusSet(tuple(int(tok) for tok in text.split(",") if tok.strip()))


def _initial_from_flag(spec: str) -> np.ndarray:
    from .harness import _initial_pmf

    return _initial_pmf(spec, DNA)


def _build_query(loci: str, values: str) -> Query:
    locs = _parse_loci(loci)
    syms = tuple(tok.strip() for tok in values.split(",") if tok.strip())
    return Query.from_symbols(locs, syms)


def _model_from_flags(phi, initial, length, fit_from, query, sensitive):
    if fit_from:
        data = load_dataset(fit_from)
        support = query.loci.union(sensitive)
        return fit_tabular(data, support), data
    if phi is None:
        raise ValidationError("need either --phi (with --length) or --fit-from")
    if length is None:
        raise ValidationError("--phi models need --length")
    return (
        MarkovChainModel.from_stay_prob(length, phi, initial=_initial_from_flag(initial)),
        None,
    )


@click.group()
def main():
    """Count queries over sequence datasets with zero sensitive-locus leakage."""


# --- generate ---------------------------------------------------------------

@main.command()
@click.option("--model", "model_kind", type=click.Choice(["markov", "hmm"]), required=True)
@click.option("--phi", type=float, help="Markov stay probability.")
@click.option("--initial", default="uniform", show_default=True,
              help="Initial distribution: 'uniform' or 'SYMBOL:PROB'.")
@click.option("--reference", type=click.Path(exists=True), help="Reference dataset (hmm).")
@click.option("--pi", "pi_", type=float, help="Row-keep probability (hmm).")
@click.option("--theta", type=float, default=0.0, show_default=True,
              help="Substitution probability (hmm).")
@click.option("--users", "-k", type=int, required=True, help="Number of sequences.")
@click.option("--length", "-n", type=int, help="Sequence length (markov).")
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(), required=True)
@click.option("--force", is_flag=True, help="Allow overwriting an existing file.")
@_handle_errors
def generate(model_kind, phi, initial, reference, pi_, theta, users, length, seed, out, force):
    """Generate a dataset file."""
    if Path(out).exists() and not force:
        raise ValidationError(f"{out} exists; pass --force to overwrite")
    seed = _resolve_seed(seed)
    rng = np.random.default_rng(seed)
    if model_kind == "markov":
        if phi is None or length is None:
            raise ValidationError("markov generation needs --phi and --length")
        model = MarkovChainModel.from_stay_prob(length, phi, initial=_initial_from_flag(initial))
        data = model.sample(rng, users)
    else:
        if reference is None or pi_ is None:
            raise ValidationError("hmm generation needs --reference and --pi")
        config = HmmGeneratorConfig(
            reference=load_dataset(reference),
            switch_keep_prob=pi_,
            substitution_prob=theta,
            seed=seed,
        )
        data = hmm_generate(config, users, rng=rng)
    save_dataset(out, data)
    click.echo(f"wrote {users} sequences to {out}")


_QUERY_OPTIONS = [
    click.option("--loci", required=True, help="Queried loci, e.g. '5,6' (1-based)."),
    click.option("--values", required=True, help="Reference symbols, e.g. 'A,T'."),
    click.option("--sensitive", default="", help="Sensitive loci, e.g. '3,4' (may be empty)."),
]

_MODEL_OPTIONS = [
    click.option("--phi", type=float, help="Markov stay probability."),
    click.option("--initial", default="uniform", show_default=True),
    click.option("--length", "-n", type=int, help="Sequence length (markov)."),
    click.option("--fit-from", type=click.Path(exists=True),
                 help="Fit an empirical model from this dataset instead."),
]


def _add_options(options):
    def deco(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn

    return deco


# --- error / lower-bound ----------------------------------------------------

@main.command("error")
@_add_options(_QUERY_OPTIONS)
@_add_options(_MODEL_OPTIONS)
@_handle_errors
def error_cmd(loci, values, sensitive, phi, initial, length, fit_from):
    """Print the closed-form error report as one CSV row."""
    query = _build_query(loci, values)
    s = _parse_loci(sensitive)
    model, _ = _model_from_flags(phi, initial, length, fit_from, query, s)
    report = error_probabilities(model, query, s)
    params = f"phi={phi:g}" if phi is not None else f"fit:{fit_from}"
    click.echo(",".join(str(x) for x in report.CSV_HEADER))
    click.echo(",".join(str(x) for x in report.to_csv_row(params, len(query.loci.intersection(s)))))


@main.command("lower-bound")
@_add_options(_QUERY_OPTIONS)
@_add_options(_MODEL_OPTIONS)
@_handle_errors
def lower_bound_cmd(loci, values, sensitive, phi, initial, length, fit_from):
    """Print the entropy lower bound on the per-user error."""
    from .local import lower_bound

    query = _build_query(loci, values)
    s = _parse_loci(sensitive)
    model, _ = _model_from_flags(phi, initial, length, fit_from, query, s)
    click.echo(repr(lower_bound(model, query, s)))


# --- answering --------------------------------------------------------------

@main.command("answer-local")
@click.option("--mechanism", type=click.Choice(["m1", "m2"]), required=True)
@click.option("--dataset", type=click.Path(exists=True), required=True)
@_add_options(_QUERY_OPTIONS)
@_add_options(_MODEL_OPTIONS)
@click.option("--seed", type=int, default=None)
@click.option("--bits-out", type=click.Path(), help="Also write per-user released bits.")
@_handle_errors
def answer_local(mechanism, dataset, loci, values, sensitive, phi, initial, length,
                 fit_from, seed, bits_out):
    """Release per-user bits for a count query and print their sum."""
    query = _build_query(loci, values)
    s = _parse_loci(sensitive)
    data = load_dataset(dataset)
    if fit_from is None and phi is None:
        fit_from = dataset  # default prior: empirical frequencies of the data itself
    model, _ = _model_from_flags(phi, initial, length or data.shape[1], fit_from, query, s)
    mech = build_mechanism(mechanism, model, query, s)
    rng = np.random.default_rng(_resolve_seed(seed))
    bits = release_batch(mech, data, rng)
    if bits_out:
        Path(bits_out).write_text("".join(str(int(b)) for b in bits) + "\n")
    click.echo(str(int(bits.sum())))


@main.command("answer-central")
@click.option("--dataset", type=click.Path(exists=True), required=True)
@_add_options(_QUERY_OPTIONS)
@_add_options(_MODEL_OPTIONS)
@click.option("--seed", type=int, default=None)
@_handle_errors
def answer_central(dataset, loci, values, sensitive, phi, initial, length, fit_from, seed):
    """Release the aggregated count through the central channel."""
    query = _build_query(loci, values)
    s = _parse_loci(sensitive)
    data = load_dataset(dataset)
    if fit_from is None and phi is None:
        fit_from = dataset
    model, _ = _model_from_flags(phi, initial, length or data.shape[1], fit_from, query, s)
    channel = build_central_channel(model, query, s, data.shape[0], min_method="vertex")
    a = int(true_answer_batch(query, data).sum())
    scols = np.array([i - 1 for i in s.indices], dtype=np.int64)
    rng = np.random.default_rng(_resolve_seed(seed))
    y = central_release(channel, a, data[:, scols], rng)
    click.echo(str(y))


# --- audit ------------------------------------------------------------------

@main.command("audit")
@click.option("--mechanism", type=click.Choice(["m1", "m2", "central"]), default="m1",
              show_default=True)
@click.option("--table", "table_file", type=click.Path(exists=True),
              help="Audit a user-supplied local release table (JSON) instead.")
@_add_options(_QUERY_OPTIONS)
@_add_options(_MODEL_OPTIONS)
@click.option("--users", "-k", type=int, default=3, show_default=True,
              help="User count for the central audit.")
@click.option("--empirical", is_flag=True, help="Statistical audit instead of exact.")
@click.option("--trials", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=None)
@_handle_errors
def audit_cmd(mechanism, table_file, loci, values, sensitive, phi, initial, length,
              fit_from, users, empirical, trials, seed):
    """Certify zero leakage; exit code 3 when the audit fails."""
    query = _build_query(loci, values)
    s = _parse_loci(sensitive)
    model, _ = _model_from_flags(phi, initial, length, fit_from, query, s)
    if table_file:
        mech = _mechanism_from_json(table_file, model, query, s)
    elif mechanism in ("m1", "m2"):
        mech = build_mechanism(mechanism, model, query, s)
    else:
        channel = build_central_channel(model, query, s, users)
        report = audit_central(channel)
        click.echo(report.to_json())
        sys.exit(0 if report.passed else 3)
    if empirical:
        rng = np.random.default_rng(_resolve_seed(seed))
        fn = lambda data, r: release_batch(mech, data, r)
        report = audit_empirical(fn, model, s, trials, rng)
    else:
        report = audit_local(mech, model)
    click.echo(report.to_json())
    sys.exit(0 if report.passed else 3)


def _mechanism_from_json(path, model, query: Query, sensitive: LocusSet) -> LocalMechanism:
    spec = json.loads(Path(path).read_text())
    table = np.asarray(spec["table"], dtype=float)
    lbar = query.loci.difference(sensitive)
    c = model.alphabet.size
    want = (c ** len(lbar), c ** len(sensitive))
    if table.shape != want:
        raise ValidationError(f"table shape {table.shape} != expected {want}")
    if table.min() < 0.0 or table.max() > 1.0:
        raise ValidationError("table entries must be probabilities")
    return LocalMechanism(
        kind=str(spec.get("kind", "custom")),
        query=query,
        sensitive=sensitive,
        lbar=lbar,
        mismatch=float("nan"),
        table=table,
        ratio=np.zeros_like(table),
        support=np.ones(table.shape[1], dtype=bool),
        alphabet=model.alphabet,
    )


# --- plans and matching -----------------------------------------------------

@main.command("run-plan")
@click.argument("plan_path", type=click.Path(exists=True))
@click.option("--out-dir", type=click.Path(), required=True)
@click.option("--figures/--no-figures", default=True, show_default=True)
@_handle_errors
def run_plan_cmd(plan_path, out_dir, figures):
    """Execute a sweep plan: results.csv, audit.csv, and figures."""
    plan = parse_plan(plan_path)
    rows, audits = run_plan(plan, out_dir=out_dir)
    click.echo(f"wrote {len(rows)} result rows and {len(audits)} audit rows to {out_dir}")
    if figures:
        paths = render_figures(rows, Path(out_dir) / "figures")
        click.echo(f"rendered {len(paths)} figures")
    failed = [a for a in audits if a.passed == "false"]
    if failed:
        _fail(f"{len(failed)} audits failed", 3)


@main.command("dp-match")
@click.option("--target-eae", type=float, required=True, help="Error to match.")
@click.option("--mechanism", type=click.Choice(["laplace", "rr", "ldp_mse"]),
              default="laplace", show_default=True)
@click.option("--n-users", type=int, default=None)
@_handle_errors
def dp_match(target_eae, mechanism, n_users):
    """Print the privacy budget whose analytic error matches the target."""
    eps = epsilon_for_target_error(target_eae, mechanism=mechanism, n_users=n_users)
    click.echo(repr(eps))


if __name__ == "__main__":
    main()
