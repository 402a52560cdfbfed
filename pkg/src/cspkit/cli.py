"""Command-line surface: generate, preprocess, solve, closure, verify, phase.

Reports are JSON-lines records carrying the input file hash and the full
configuration; CSV and instance files go to ``--out``; logs go to stderr.
Exit codes: 0 success, 1 verification violations, 2 usage or file errors,
3 resource caps.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import random
import sys
from contextlib import contextmanager

from .benchmarks import overlapping_ternary_network
from .enforcers import enforce_sac1, enforce_scdc, enforce_scpc, enforce_sdc
from .generator import (ModelBParams, child_seed, crossing_tightness,
                        generate_model_b, phase_scan, scan_to_csv)
from .instance_io import InstanceError, dumps_network, load_network, save_network
from .lattice import (PANELS, binary_sampler, certify_witness, load_witness,
                      mixed_sampler, required_witnesses, verify_equivalence,
                      verify_lattice_edge)
from .network import (NetworkError, ResourceCapError, canonicalize, compare)
from .oracle import (Path, check_network, check_path_support, consistency_id,
                     oracle_closure)
from .propagation import enforce_gac
from .search import SearchConfig, mac_solve

log = logging.getLogger("cspkit")

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

ENFORCERS = {
    "sac1": enforce_sac1,
    "scpc": enforce_scpc,
    "scdc1": enforce_scdc,
    "sdc1": enforce_sdc,
}

PHASE_CHECK_ALIASES = {
    "ac": "ac", "gac": "ac", "sac": "sac", "sac1": "sac",
    "scdc": "scdc", "scdc1": "scdc", "sdc": "sdc", "sdc1": "sdc",
}


def _sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


@contextmanager
def _open_out(path):
    """A text stream for ``path``; '-' or None means stdout."""
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as handle:
            yield handle


def _emit(stream, record: dict):
    stream.write(json.dumps(record, sort_keys=True) + "\n")


def _report_fields(report) -> dict:
    return {
        "consistent": report.consistent,
        "passes": report.passes,
        "del_values": report.deleted_values,
        "del_tuples": report.deleted_tuples,
        "added_constraints": report.added_constraints,
        "ms": round(1000.0 * report.elapsed, 3),
    }


# ---------------------------------------------------------------------------
# Subcommands


def cmd_generate(args) -> int:
    params = ModelBParams(n=args.n, d=args.d, density=args.density,
                          tightness=args.tightness, seed=args.seed)
    net = generate_model_b(params)
    if args.out in (None, "-"):
        sys.stdout.write(dumps_network(net, metadata=params.metadata()) + "\n")
    else:
        save_network(args.out, net, metadata=params.metadata())
    log.info("generated n=%d d=%d constraints=%d", args.n, args.d,
             len(net.constraints))
    return EXIT_OK


def cmd_preprocess(args) -> int:
    net = load_network(args.infile, strict=not args.lenient)
    digest = _sha256_file(args.infile)
    report = ENFORCERS[args.phi](net)
    record = {
        "command": "preprocess",
        "phi": args.phi,
        "input": args.infile,
        "sha256": digest,
        **_report_fields(report),
    }
    with _open_out(args.report) as stream:
        _emit(stream, record)
    if args.out:
        if net.failed:
            log.warning("network wiped out; no enforced instance written")
        else:
            save_network(args.out, net, metadata={"preprocessed_with": args.phi,
                                                  "source_sha256": digest})
    return EXIT_OK


def cmd_solve(args) -> int:
    net = load_network(args.infile, strict=not args.lenient)
    digest = _sha256_file(args.infile)
    cfg = SearchConfig(
        heuristic={"ddeg": "dom_ddeg", "wdeg": "dom_wdeg"}[args.heuristic],
        preprocessing=args.phi,
        mode={"first": "first_solution", "count": "count_all"}[args.mode],
        node_limit=args.node_limit,
        time_limit=args.time_limit,
    )
    result = mac_solve(net, cfg)
    record = {
        "command": "solve",
        "input": args.infile,
        "sha256": digest,
        "heuristic": cfg.heuristic,
        "phi": args.phi,
        "mode": cfg.mode,
        "node_limit": cfg.node_limit,
        "time_limit": cfg.time_limit,
        "outcome": result.outcome,
        "nodes": result.nodes,
        "solution_count": result.solution_count,
        "solution": list(result.solution) if result.solution else None,
        "preprocessing": _report_fields(result.preprocessing_report),
    }
    with _open_out(args.report) as stream:
        _emit(stream, record)
    return EXIT_OK


def cmd_closure(args) -> int:
    phi = consistency_id(args.phi)
    net = load_network(args.infile, strict=not args.lenient)
    closed = oracle_closure(phi, net)
    metadata = {"closure": phi.value, "source_sha256": _sha256_file(args.infile)}
    if args.out in (None, "-"):
        sys.stdout.write(dumps_network(closed, metadata=metadata) + "\n")
    else:
        save_network(args.out, closed, metadata=metadata)
    log.info("%s closure: %s", phi.value,
             "wiped out" if closed.failed else "consistent")
    return EXIT_OK


def cmd_phase(args) -> int:
    checks = []
    for name in args.checks.split(","):
        name = name.strip().lower()
        if name not in PHASE_CHECK_ALIASES:
            raise NetworkError(f"unknown phase check {name!r}")
        canonical = PHASE_CHECK_ALIASES[name]
        if canonical not in checks:
            checks.append(canonical)
    grid = []
    t = args.t_from
    while t <= args.t_to + 1e-9:
        grid.append(round(t, 10))
        t += args.t_step
    base = ModelBParams(n=args.n, d=args.d, density=args.density,
                        tightness=0.0, seed=args.seed)
    records = phase_scan(base, grid, args.samples, checks=checks)
    with _open_out(args.out) as stream:
        scan_to_csv(records, stream)
    for check in checks:
        crossing = crossing_tightness(records, check)
        log.info("50%% crossing for %s: %s", check,
                 "not reached" if crossing is None else f"{crossing:.4f}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Verification suites


def _sampled(sampler, count: int, seed: int):
    rng = random.Random(seed)
    return [sampler(rng) for _ in range(count)]


def _emit_check(stream, record: dict) -> bool:
    _emit(stream, record)
    if not record["ok"]:
        log.warning("FAILED: %s", record["check"])
    return record["ok"]


def _witness_checks(stream, suite: str) -> bool:
    all_ok = True
    for hold, fail, panel_name in required_witnesses():
        net = load_witness(hold, fail)
        ok = net is not None and certify_witness(hold, fail, net)
        if ok and panel_name == "binary":
            ok = all(len(c.scope) == 2 for c in net.constraints)
        all_ok &= _emit_check(stream, {
            "suite": suite, "panel": panel_name,
            "check": f"witness {hold.value} holds, {fail.value} fails",
            "found": net is not None, "ok": ok,
        })
    return all_ok


def _suite_lattice(stream, samples: int, seed: int) -> bool:
    all_ok = True
    for panel in PANELS:
        sampler = binary_sampler if panel.name == "binary" else mixed_sampler
        for stronger, weaker in panel.edges:
            label = f"{panel.name}:{stronger.value}->{weaker.value}"
            nets = _sampled(sampler, samples, child_seed(seed, "edge:" + label))
            report = verify_lattice_edge(stronger, weaker, nets)
            all_ok &= _emit_check(stream, {
                "suite": "lattice", "panel": panel.name,
                "check": f"edge {stronger.value} -> {weaker.value}",
                "mode": report.mode, "checked": report.checked,
                "vacuous": report.vacuous,
                "violations": len(report.violations), "ok": report.ok,
            })
        for group in panel.equivalences:
            first = group[0]
            for other in group[1:]:
                label = f"{panel.name}:{first.value}=={other.value}"
                nets = _sampled(sampler, samples,
                                child_seed(seed, "equiv:" + label))
                report = verify_equivalence(first, other, nets)
                all_ok &= _emit_check(stream, {
                    "suite": "lattice", "panel": panel.name,
                    "check": f"equivalence {first.value} == {other.value}",
                    "checked": report.checked,
                    "violations": len(report.violations), "ok": report.ok,
                })
    all_ok &= _witness_checks(stream, "lattice")
    return all_ok


def _suite_figures(stream) -> bool:
    all_ok = True
    fixture = overlapping_ternary_network()
    facts = (
        ("overlapping-ternary is GAC-consistent",
         check_network("gac", fixture)),
        ("overlapping-ternary is strong-PC-consistent",
         check_network("spc", fixture)),
        ("overlapping-ternary satisfies pair checks vacuously (no binary "
         "constraints)", check_network("cdc", fixture)),
        ("overlapping-ternary is not singleton-arc-consistent",
         not check_network("sac", fixture)),
        ("scdc enforcer wipes overlapping-ternary",
         not enforce_scdc(overlapping_ternary_network()).consistent),
        ("sac1 enforcer wipes overlapping-ternary",
         not enforce_sac1(overlapping_ternary_network()).consistent),
    )
    for label, ok in facts:
        all_ok &= _emit_check(stream, {"suite": "figures", "check": label,
                                       "ok": ok})
    all_ok &= _witness_checks(stream, "figures")
    return all_ok


def two_length_graph_paths_consistent(net) -> bool:
    """Every locally consistent pair extends along every 2-length graph-path."""
    for z in range(net.n):
        ends = sorted({v for cid in net.constraints_of[z]
                       for v in net.constraints[cid].scope
                       if len(net.constraints[cid].scope) == 2 and v != z})
        for i, x in enumerate(ends):
            for y in ends[i + 1:]:
                for a in net.domains[x].values():
                    for b in net.domains[y].values():
                        if not net.is_locally_consistent([(x, a), (y, b)]):
                            continue
                        if check_path_support(net, Path((x, z, y)), a, b) is None:
                            return False
    return True


def _suite_props(stream, samples: int, seed: int) -> bool:
    all_ok = True
    binary_nets = _sampled(binary_sampler, samples, child_seed(seed, "props:b"))
    mixed_nets = _sampled(mixed_sampler, samples, child_seed(seed, "props:m"))

    def canonical_composition(base_phi, net):
        composed = oracle_closure("gac", oracle_closure(base_phi, net))
        canonicalize(composed, net)
        return composed

    def run(label, nets, predicate):
        nonlocal all_ok
        bad = sum(1 for net in nets if not predicate(net))
        all_ok &= _emit_check(stream, {
            "suite": "props", "check": label, "checked": len(nets),
            "violations": bad, "ok": bad == 0,
        })

    run("3C closure equals PC closure on binary networks", binary_nets,
        lambda net: compare(oracle_closure("3c", net),
                            oracle_closure("pc", net)) == "equal")
    run("AC after PC equals strong PC on binary networks", binary_nets,
        lambda net: compare(canonical_composition("pc", net),
                            oracle_closure("spc", net)) == "equal")
    run("GAC after DC equals strong DC", mixed_nets,
        lambda net: compare(canonical_composition("dc", net),
                            oracle_closure("sdc", net)) == "equal")
    run("GAC after CDC equals strong CDC", mixed_nets,
        lambda net: compare(canonical_composition("cdc", net),
                            oracle_closure("scdc", net)) == "equal")
    run("strong conservative 3C closure equals strong CPC closure on binary",
        binary_nets,
        lambda net: compare(oracle_closure("sc3c", net),
                            oracle_closure("scpc", net)) == "equal")
    run("SAC+CDC closure equals strong CDC closure on binary networks",
        binary_nets,
        lambda net: compare(oracle_closure("sac+cdc", net),
                            oracle_closure("scdc", net)) == "equal")

    def prop3_agrees(net):
        work = net.copy()
        if not enforce_gac(work).ok:
            return True  # vacuous: the proposition speaks of AC'd networks
        return (two_length_graph_paths_consistent(work)
                == check_network("pc", work))

    run("2-length graph-path consistency coincides with PC on AC'd binary",
        binary_nets, prop3_agrees)
    return all_ok


def cmd_verify(args) -> int:
    with _open_out(args.report) as stream:
        if args.suite == "lattice":
            ok = _suite_lattice(stream, args.samples, args.seed)
        elif args.suite == "figures":
            ok = _suite_figures(stream)
        else:
            ok = _suite_props(stream, args.samples, args.seed)
    log.info("suite %s: %s", args.suite, "ok" if ok else "violations found")
    return EXIT_OK if ok else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# Parser and entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cspkit",
        description="Constraint-network toolkit: generation, consistency "
                    "enforcement, search, closures, and verification.")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="debug logging on stderr")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("generate", help="random binary instance")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--d", type=int, required=True)
    gen.add_argument("--density", type=float, required=True)
    gen.add_argument("--tightness", type=float, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default="-", help="instance file ('-': stdout)")
    gen.set_defaults(func=cmd_generate)

    pre = commands.add_parser("preprocess", help="run one enforcer on a file")
    pre.add_argument("--phi", choices=sorted(ENFORCERS), required=True)
    pre.add_argument("--in", dest="infile", required=True)
    pre.add_argument("--out", help="enforced instance file (skipped on wipeout)")
    pre.add_argument("--report", help="JSON-lines report path (default stdout)")
    pre.add_argument("--lenient", action="store_true",
                     help="ignore unknown fields when parsing")
    pre.set_defaults(func=cmd_preprocess)

    solve = commands.add_parser("solve", help="MAC search on an instance file")
    solve.add_argument("--heuristic", choices=("ddeg", "wdeg"), default="wdeg")
    solve.add_argument("--phi", choices=("none",) + tuple(sorted(ENFORCERS)),
                       default="none")
    solve.add_argument("--mode", choices=("first", "count"), default="first")
    solve.add_argument("--in", dest="infile", required=True)
    solve.add_argument("--report", help="JSON-lines report path (default stdout)")
    solve.add_argument("--node-limit", type=int, default=None)
    solve.add_argument("--time-limit", type=float, default=None)
    solve.add_argument("--lenient", action="store_true")
    solve.set_defaults(func=cmd_solve)

    clo = commands.add_parser("closure", help="brute-force oracle closure")
    clo.add_argument("--phi", required=True, help="consistency id, e.g. spc")
    clo.add_argument("--in", dest="infile", required=True)
    clo.add_argument("--out", default="-")
    clo.add_argument("--lenient", action="store_true")
    clo.set_defaults(func=cmd_closure)

    ver = commands.add_parser("verify", help="run a verification suite")
    ver.add_argument("--suite", choices=("lattice", "figures", "props"),
                     required=True)
    ver.add_argument("--samples", type=int, default=25)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--report", help="JSON-lines report path (default stdout)")
    ver.set_defaults(func=cmd_verify)

    phase = commands.add_parser("phase", help="phase-transition CSV scan")
    phase.add_argument("--n", type=int, default=20)
    phase.add_argument("--d", type=int, default=6)
    phase.add_argument("--density", type=float, default=0.5)
    phase.add_argument("--t-from", type=float, default=0.18)
    phase.add_argument("--t-to", type=float, default=0.86)
    phase.add_argument("--t-step", type=float, default=0.02)
    phase.add_argument("--samples", type=int, default=50)
    phase.add_argument("--checks", default="ac,sac,scdc,sdc")
    phase.add_argument("--seed", type=int, default=0)
    phase.add_argument("--out", default="-", help="CSV path ('-': stdout)")
    phase.set_defaults(func=cmd_phase)
    return parser


def script_main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr,
                        level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ResourceCapError as error:
        log.error("resource cap: %s", error)
        return EXIT_RESOURCE
    except InstanceError as error:
        log.error("instance error: %s", error)
        return EXIT_USAGE
    except (NetworkError, ValueError) as error:
        log.error("%s", error)
        return EXIT_USAGE
    except OSError as error:
        log.error("%s", error)
        return EXIT_USAGE
