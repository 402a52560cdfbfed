#!/usr/bin/env python3
"""Build the witness corpus under src/cspkit/corpus/.

For every separation the strength panels require (see
lattice.required_witnesses), find a small network where the first
consistency holds and the second fails, and write it as an instance file
named `<hold>_not_<fail>.json`.  Existing files that still certify are
kept, so the build is incremental and deterministic.

Run from the repository root:  python3 tools/build_corpus.py
"""

import pathlib
import random
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from cspkit.benchmarks import (notequal_clique, overlapping_ternary_network,
                               triangle)
from cspkit.generator import child_seed
from cspkit.instance_io import load_network, save_network
from cspkit.lattice import (binary_sampler, certify_witness, find_witness,
                            mixed_sampler, required_witnesses, witness_name)

CORPUS = pathlib.Path(__file__).resolve().parent.parent / "src" / "cspkit" / "corpus"

FIXTURES = [
    ("overlapping-ternary", overlapping_ternary_network()),
    ("triangle", triangle()),
    ("notequal-clique-4-3", notequal_clique(4, 3)),
]


def is_binary_net(net) -> bool:
    return all(c.is_binary for c in net.constraints)


def any_sampler(rng: random.Random):
    return mixed_sampler(rng) if rng.random() < 0.6 else binary_sampler(rng)


def main() -> int:
    CORPUS.mkdir(exist_ok=True)
    missing = []
    for hold, fail, panel in required_witnesses():
        name = witness_name(hold, fail)
        path = CORPUS / name
        if path.exists():
            net = load_network(path)
            if certify_witness(hold, fail, net) and (
                    panel != "binary" or is_binary_net(net)):
                print(f"kept      {name}")
                continue
            print(f"stale     {name} (rebuilding)")
        found = None
        source = None
        for label, fixture in FIXTURES:
            if panel == "binary" and not is_binary_net(fixture):
                continue
            if certify_witness(hold, fail, fixture):
                found, source = fixture, f"fixture:{label}"
                break
        if found is None:
            sampler = binary_sampler if panel == "binary" else any_sampler
            t0 = time.time()
            for attempt, budget in enumerate((4000, 20000, 80000)):
                seed = child_seed(0, f"witness:{name}:{attempt}")
                found = find_witness(hold, fail, budget, seed=seed,
                                     sampler=sampler)
                if found is not None:
                    source = f"search:seed={seed}:budget={budget}"
                    break
            if found is not None:
                print(f"found     {name} in {time.time() - t0:.1f}s")
        if found is None:
            print(f"MISSING   {name} ({panel})")
            missing.append(name)
            continue
        save_network(path, found, metadata={
            "holds": hold.value, "fails": fail.value,
            "panel": panel, "source": source,
        })
        if source.startswith("fixture"):
            print(f"fixture   {name} ({source})")
    if missing:
        print(f"\n{len(missing)} witness(es) missing: {', '.join(missing)}")
        return 1
    print("\ncorpus complete")
    return 0


if __name__ == "__main__":
    sys.exit(main())
