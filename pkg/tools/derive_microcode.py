#!/usr/bin/env python3
"""Derive per-bit ALU micro-instruction templates by exhaustive search.

The bit-serial PE can only:
  * evaluate B = M OR f, where f is one literal: a possibly negated value
    from the condition multiplexer {op bit, register bit, s, c} (s is 0
    between macros, so +-s act as constants),
  * latch M := B (save) or M := f (load, the match flip-flop tapping the
    OR stage before the M term),
  * conditionally move the PRE-step M into s_bit, c_bit or an op bit,
    gated on B,
  * conditionally move a PRE-step op bit into a register bit, gated on B.

A word-level operation is a repeated per-bit body plus small prologue /
epilogue step lists. Because the instruction carries separate bit indices
for the op access and the register access, a body may work on TWO adjacent
bit columns at once (software pipelining); the search models that with
explicit column slots. The search state is the tuple of slot bits across
every input combination, vectorized with numpy and deduplicated per layer.
Minimal bodies are frozen into src/simdmem/_alu_templates.py together with
their search provenance.

Run:  python3 tools/derive_microcode.py --emit src/simdmem/_alu_templates.py
"""

from __future__ import annotations

import argparse
import itertools
import sys
import time
from dataclasses import dataclass, field

import numpy as np

CHUNK = 1 << 19


def maj(x, y, z):
    return (x & y) | (x & z) | (y & z)


BOTH = (0, 1)


# ---------------------------------------------------------------------------
# machine model: named slots + literal/writeback alphabets over them
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Model:
    """A caricature of the PE visible to one body: named bit slots.

    slots: mutable state bits, always containing 'm', 'c', 's'.
    inputs: read-only per-combo bits (source register column(s)).
    literals: (name, neg) pairs the V mux may select; name is a slot or
      an input.
    wb_targets: slots writable as `slot := m_pre if B`.
    op_slots: slots writable as... none; ops ARE slots here. The op->reg
      copy writeback is modeled as `treg := <op slot>_pre if B` when a
      scratch column is enabled.
    """

    slots: tuple
    inputs: tuple
    literals: tuple
    wb_targets: tuple
    treg_pairs: tuple = ()  # (treg_slot, op_slot_source) pairs

    def alphabet(self):
        steps = []
        wb_opts = []
        tre = list(self.treg_pairs)
        for mmode in (None, "save", "load"):
            for k in range(len(self.wb_targets) + 1):
                for gated in itertools.combinations(self.wb_targets, k):
                    for tk in range(len(tre) + 1):
                        for tg in itertools.combinations(tre, tk):
                            if mmode is None and not gated and not tg:
                                continue
                            wb_opts.append((mmode, gated, tg))
        for lit in self.literals:
            for wb in wb_opts:
                steps.append((lit, wb))
        return steps

    def apply(self, state: dict, inp: dict, lit, wb) -> dict:
        name, neg = lit
        v = (state[name] if name in state else inp[name]) ^ neg
        big_b = state["m"] | v
        mmode, gated, tg = wb
        new = dict(state)
        if mmode == "save":
            new["m"] = big_b
        elif mmode == "load":
            new["m"] = v
        for g in gated:
            if big_b:
                new[g] = state["m"]
        for treg, opsrc in tg:
            if big_b:
                new[treg] = state[opsrc]
        return new


def single_column(use_t: bool = False) -> Model:
    slots = ("op", "c", "m", "s") + (("t",) if use_t else ())
    lits = tuple((n, neg) for n in slots + ("b",) if n != "m" for neg in (0, 1))
    return Model(
        slots=slots,
        inputs=("b",),
        literals=lits,
        wb_targets=tuple(s for s in ("op", "c", "s") if True),
        treg_pairs=((("t", "op"),) if use_t else ()),
    )


def two_column() -> Model:
    """Adjacent bit columns: 'p' = previous (lower) bit, 'q' = current."""
    slots = ("opp", "opq", "c", "m", "s")
    lits = tuple((n, neg) for n in ("opp", "opq", "c", "s", "bq") for neg in (0, 1))
    return Model(
        slots=slots,
        inputs=("bq",),
        literals=lits,
        wb_targets=("opp", "opq", "c", "s"),
    )


# ---------------------------------------------------------------------------
# search targets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SearchTarget:
    name: str
    model: Model
    combos: tuple       # per combo: (inputs dict items, start state dict items)
    expect: tuple       # per combo: dict slot -> required exit value

    @staticmethod
    def build(name, model, input_axes, init_fn, expect_fn):
        names = list(input_axes)
        combos, expect = [], []
        for values in itertools.product(*(input_axes[n] for n in names)):
            env = dict(zip(names, values))
            start = init_fn(env)
            inp = {k: env.get(k, 0) for k in model.inputs}
            combos.append((tuple(inp.items()), tuple(sorted(start.items()))))
            expect.append(expect_fn(env))
        return SearchTarget(name, model, tuple(combos), tuple(expect))


def bfs(target: SearchTarget, max_depth: int = 4, node_budget: int = 30_000_000):
    """Layered numpy BFS; returns (steps, stats) or (None, stats)."""
    model = target.model
    alphabet = model.alphabet()
    slots = list(model.slots)
    nbits = len(slots)
    nstates = 1 << nbits

    def pack(d):
        x = 0
        for i, s in enumerate(slots):
            x |= d[s] << i
        return x

    def unpack(x):
        return {s: (x >> i) & 1 for i, s in enumerate(slots)}

    # per-step transition tables per distinct input assignment
    input_keys = sorted({inp for inp, _ in target.combos})
    inp_index = {k: i for i, k in enumerate(input_keys)}
    tables = np.zeros((len(alphabet), len(input_keys), nstates), dtype=np.uint8)
    for sid, (lit, wb) in enumerate(alphabet):
        for ik, key in enumerate(input_keys):
            inp = dict(key)
            for x in range(nstates):
                tables[sid, ik, x] = pack(model.apply(unpack(x), inp, lit, wb))

    n_pos = len(target.combos)
    pos_idx = np.arange(n_pos)
    pos_inputs = np.array([inp_index[inp] for inp, _ in target.combos])
    trans = tables[:, pos_inputs, :]  # (n_steps, n_pos, nstates)

    ok = np.zeros((n_pos, nstates), dtype=bool)
    for pos, req in enumerate(target.expect):
        for x in range(nstates):
            dec = unpack(x)
            ok[pos, x] = all(dec[k] == v for k, v in req.items())

    start = np.array([pack(dict(st)) for _, st in target.combos], dtype=np.uint8)
    if ok[pos_idx, start].all():
        return [], {"depth": 0, "layers": [], "alphabet": len(alphabet)}

    def pack_rows(mat):
        if n_pos * nbits <= 63:
            w = (np.int64(1) << (nbits * np.arange(n_pos, dtype=np.int64)))
            return mat.astype(np.int64) @ w
        return np.ascontiguousarray(mat).view(f"V{n_pos}").ravel()

    seen = np.sort(pack_rows(start[None, :]))
    layers = [{"states": start[None, :], "parent": np.array([-1]),
               "step": np.array([0], dtype=np.int16)}]
    layer_sizes = []
    total_nodes = 1

    for depth in range(1, max_depth + 1):
        cur = layers[-1]["states"]
        got_states, got_parent, got_step, got_keys = [], [], [], []
        hit = None
        for lo in range(0, len(cur), CHUNK):
            states = cur[lo: lo + CHUNK]
            base_parent = np.arange(lo, lo + len(states), dtype=np.int64)
            for sid in range(len(alphabet)):
                new = trans[sid][pos_idx[None, :], states]
                good = ok[pos_idx[None, :], new].all(axis=1)
                if good.any():
                    hi = int(np.argmax(good))
                    hit = (int(base_parent[hi]), sid)
                    break
                if depth == max_depth:
                    continue  # last layer: only goal checks matter
                keys = pack_rows(new)
                uniq, idx = np.unique(keys, return_index=True)
                fresh = ~np.isin(uniq, seen)
                if got_keys:
                    fresh &= ~np.isin(uniq, np.concatenate(got_keys))
                if fresh.any():
                    keep = idx[fresh]
                    got_states.append(new[keep])
                    got_parent.append(base_parent[keep])
                    got_step.append(np.full(len(keep), sid, dtype=np.int16))
                    got_keys.append(uniq[fresh])
            if hit:
                break
        if hit:
            parent_idx, sid = hit
            steps = [alphabet[sid]]
            li = len(layers) - 1
            while li > 0:
                steps.append(alphabet[layers[li]["step"][parent_idx]])
                parent_idx = layers[li]["parent"][parent_idx]
                li -= 1
            steps.reverse()
            return steps, {"depth": depth, "layers": layer_sizes,
                           "alphabet": len(alphabet)}
        if not got_keys:
            break
        allkeys = np.concatenate(got_keys)
        allstates = np.concatenate(got_states)
        allparent = np.concatenate(got_parent)
        allstep = np.concatenate(got_step)
        uniq, idx = np.unique(allkeys, return_index=True)
        layers.append({"states": allstates[idx], "parent": allparent[idx],
                       "step": allstep[idx]})
        seen = np.union1d(seen, uniq)
        layer_sizes.append(len(uniq))
        total_nodes += len(uniq)
        if total_nodes > node_budget:
            return None, {"depth": None, "layers": layer_sizes,
                          "alphabet": len(alphabet), "reason": "budget"}
    return None, {"depth": None, "layers": layer_sizes, "alphabet": len(alphabet)}


# ---------------------------------------------------------------------------
# target definitions
# ---------------------------------------------------------------------------


def arith_targets(kind: str):
    """Pipelined ripple targets for add/sub.

    Inter-bit invariant (entering the body for bit q, p = q-1):
      op@p still holds the stale operand bit, m holds sum(p), c holds the
      ripple carry INTO q, s = 0. The body must flush sum(p) into op@p,
      compute sum(q) into m and the next carry into c, leaving op@q stale.
    The first-bit body establishes the invariant from unknown (c0, m0);
    the last-bit body retires both columns and leaves the final ripple
    carry in c_bit.
    """
    flip = (lambda b: 1 - b) if kind == "sub" else (lambda b: b)
    seed = 1 if kind == "sub" else 0

    sc = single_column()
    tc = two_column()
    targets = {}

    def s0(e):
        return e["a"] ^ flip(e["b"]) ^ seed

    def c1(e):
        return maj(e["a"], flip(e["b"]), seed)

    targets[f"{kind}_first"] = SearchTarget.build(
        f"{kind}_first", sc,
        {"a": BOTH, "b": BOTH, "c0": BOTH, "m0": BOTH},
        lambda e: {"op": e["a"], "c": e["c0"], "m": e["m0"], "s": 0},
        lambda e: {"op": e["a"], "m": s0(e), "c": c1(e), "s": 0},
    )

    def sq(e):
        return e["aq"] ^ flip(e["bq"]) ^ e["r"]

    def cq(e):
        return maj(e["aq"], flip(e["bq"]), e["r"])

    targets[f"{kind}_mid"] = SearchTarget.build(
        f"{kind}_mid", tc,
        {"ap": BOTH, "sp": BOTH, "aq": BOTH, "bq": BOTH, "r": BOTH},
        lambda e: {"opp": e["ap"], "opq": e["aq"], "c": e["r"], "m": e["sp"],
                   "s": 0},
        lambda e: {"opp": e["sp"], "opq": e["aq"], "m": sq(e), "c": cq(e),
                   "s": 0},
    )
    targets[f"{kind}_last"] = SearchTarget.build(
        f"{kind}_last", tc,
        {"ap": BOTH, "sp": BOTH, "aq": BOTH, "bq": BOTH, "r": BOTH},
        lambda e: {"opp": e["ap"], "opq": e["aq"], "c": e["r"], "m": e["sp"],
                   "s": 0},
        lambda e: {"opp": e["sp"], "opq": sq(e), "c": cq(e), "s": 0},
    )
    return targets


def plain_targets():
    """Non-pipelined bodies: ripple transits m and c as a pair."""
    sc = single_column()
    t = {}

    def first_axes():
        return {"a": BOTH, "b": BOTH, "c0": BOTH, "m0": BOTH}

    def first_init(e):
        return {"op": e["a"], "c": e["c0"], "m": e["m0"], "s": 0}

    def dual_axes():
        return {"a": BOTH, "b": BOTH, "r": BOTH}

    def dual_init(e):
        return {"op": e["a"], "c": e["r"], "m": e["r"], "s": 0}

    t["copy_mid"] = SearchTarget.build(
        "copy_mid", sc, first_axes(), first_init,
        lambda e: {"op": e["b"], "c": e["c0"], "s": 0})
    t["lt_first"] = SearchTarget.build(
        "lt_first", sc, first_axes(), first_init,
        lambda e: {"op": e["a"], "m": (1 - e["a"]) & e["b"],
                   "c": (1 - e["a"]) & e["b"], "s": 0})
    t["lt_mid"] = SearchTarget.build(
        "lt_mid", sc, dual_axes(), dual_init,
        lambda e: {"op": e["a"], "m": maj(1 - e["a"], e["b"], e["r"]),
                   "c": maj(1 - e["a"], e["b"], e["r"]), "s": 0})
    t["eq_first"] = SearchTarget.build(
        "eq_first", sc, first_axes(), first_init,
        lambda e: {"op": e["a"], "m": e["a"] ^ e["b"], "c": e["a"] ^ e["b"],
                   "s": 0})
    t["eq_mid"] = SearchTarget.build(
        "eq_mid", sc, dual_axes(), dual_init,
        lambda e: {"op": e["a"], "m": e["r"] | (e["a"] ^ e["b"]),
                   "c": e["r"] | (e["a"] ^ e["b"]), "s": 0})
    t["select_mid"] = SearchTarget.build(
        "select_mid", sc,
        {"a": BOTH, "b": BOTH, "cond": BOTH, "m0": BOTH},
        lambda e: {"op": e["a"], "c": e["cond"], "m": e["m0"], "s": 0},
        lambda e: {"op": e["b"] if e["cond"] else e["a"], "c": e["cond"],
                   "s": 0})
    t["negif_mid"] = SearchTarget.build(
        "negif_mid", sc,
        {"a": BOTH, "cond": BOTH, "rip": BOTH},
        lambda e: {"op": e["a"], "c": e["cond"], "m": e["rip"], "s": 0},
        lambda e: {
            "op": e["a"] if e["cond"] else (1 - e["a"]) ^ e["rip"],
            "c": e["cond"],
            "m": e["rip"] if e["cond"] else (1 - e["a"]) & e["rip"],
            "s": 0})
    t["addif_mid"] = SearchTarget.build(
        "addif_mid", sc,
        {"a": BOTH, "b": BOTH, "cond": BOTH, "rip": BOTH},
        lambda e: {"op": e["a"], "c": e["cond"], "m": e["rip"], "s": 0},
        lambda e: {
            "op": (e["a"] ^ e["b"] ^ e["rip"]) if e["cond"] else e["a"],
            "c": e["cond"],
            "m": maj(e["a"], e["b"], e["rip"]) if e["cond"] else e["rip"],
            "s": 0})
    return t


def plain_arith_targets(kind: str):
    """Non-pipelined ripple bodies: carry resides in BOTH m and c between
    bits (dual residence), so a body may consume it from either and must
    re-establish both. First-bit bodies start from unknown (c0, m0)."""
    flip = (lambda b: 1 - b) if kind == "sub" else (lambda b: b)
    seed = 1 if kind == "sub" else 0
    sc = single_column()
    t = {}
    t[f"{kind}_first_plain"] = SearchTarget.build(
        f"{kind}_first_plain", sc,
        {"a": BOTH, "b": BOTH, "c0": BOTH, "m0": BOTH},
        lambda e: {"op": e["a"], "c": e["c0"], "m": e["m0"], "s": 0},
        lambda e: {"op": e["a"] ^ flip(e["b"]) ^ seed,
                   "m": maj(e["a"], flip(e["b"]), seed),
                   "c": maj(e["a"], flip(e["b"]), seed), "s": 0},
    )
    t[f"{kind}_mid_plain"] = SearchTarget.build(
        f"{kind}_mid_plain", sc,
        {"a": BOTH, "b": BOTH, "r": BOTH},
        lambda e: {"op": e["a"], "c": e["r"], "m": e["r"], "s": 0},
        lambda e: {"op": e["a"] ^ flip(e["b"]) ^ e["r"],
                   "m": maj(e["a"], flip(e["b"]), e["r"]),
                   "c": maj(e["a"], flip(e["b"]), e["r"]), "s": 0},
    )
    # carry threaded through c alone: entry m is arbitrary leftover state
    # (free axis), exit m unconstrained — the weakest self-consistent
    # ripple invariant for a non-pipelined body
    t[f"{kind}_mid_cfree"] = SearchTarget.build(
        f"{kind}_mid_cfree", sc,
        {"a": BOTH, "b": BOTH, "r": BOTH, "m0": BOTH},
        lambda e: {"op": e["a"], "c": e["r"], "m": e["m0"], "s": 0},
        lambda e: {"op": e["a"] ^ flip(e["b"]) ^ e["r"],
                   "c": maj(e["a"], flip(e["b"]), e["r"]), "s": 0},
    )
    t[f"{kind}_first_cfree"] = SearchTarget.build(
        f"{kind}_first_cfree", sc,
        {"a": BOTH, "b": BOTH, "c0": BOTH, "m0": BOTH},
        lambda e: {"op": e["a"], "c": e["c0"], "m": e["m0"], "s": 0},
        lambda e: {"op": e["a"] ^ flip(e["b"]) ^ seed,
                   "c": maj(e["a"], flip(e["b"]), seed), "s": 0},
    )
    return t


def all_targets():
    t = {}
    t.update(plain_targets())
    t.update(arith_targets("add"))
    t.update(arith_targets("sub"))
    t.update(plain_arith_targets("add"))
    t.update(plain_arith_targets("sub"))
    return t


# ---------------------------------------------------------------------------
# rendering / freezing
# ---------------------------------------------------------------------------


def render_step(lit, wb):
    name, neg = lit
    mmode, gated, tg = wb
    parts = []
    if mmode:
        parts.append(f"M:={'B' if mmode == 'save' else 'f'}")
    parts.extend(f"{g}:=Mpre if B" for g in gated)
    parts.extend(f"{a}:={b}pre if B" for a, b in tg)
    return f"f={'!' if neg else ''}{name:<4} | " + "; ".join(parts)


def freeze(results) -> str:
    lines = [
        '"""Per-bit ALU micro templates (machine-derived; do not hand-edit).',
        "",
        "Generated by tools/derive_microcode.py via exhaustive breadth-first",
        "search over per-bit micro programs; each body below is minimal for",
        "its target function (depth = first BFS layer containing a hit).",
        "Step fields: v = condition-mux source (two-column bodies read/write",
        "the previous column as *_p and the current as *_q), neg = mux",
        "negation leg, wb = writeback subset in canonical order.",
        '"""',
        "",
        "TEMPLATES = {",
    ]
    for name, (steps, stats) in results.items():
        lines.append(f"    # depth {stats['depth']}, layer sizes {stats['layers']}")
        lines.append(f"    {name!r}: [")
        for lit, wb in steps:
            src, neg = lit
            mmode, gated, tg = wb
            wb_list = ([f"m_{mmode}"] if mmode else []) + [f"{g}_if_b" for g in gated]
            wb_list += [f"{a}_from_{b}_if_b" for a, b in tg]
            lines.append(
                f"        {{'v': {src!r}, 'neg': {neg}, 'wb': {wb_list!r}}},"
            )
        lines.append("    ],")
    lines.append("}")
    lines.append("")
    return "\n".join(lines)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--emit", help="write frozen templates to this path")
    ap.add_argument("--max-depth", type=int, default=4)
    ap.add_argument("--only", help="comma-separated target names")
    args = ap.parse_args()

    results = {}
    failed = []
    for name, target in all_targets().items():
        if args.only and name not in args.only.split(","):
            continue
        t0 = time.time()
        steps, stats = bfs(target, args.max_depth)
        dt = time.time() - t0
        if steps is None:
            failed.append(name)
            print(f"{name:12s}  NOT FOUND within depth {args.max_depth} "
                  f"(layers {stats['layers']}, alphabet {stats['alphabet']}, "
                  f"{dt:.1f}s)", flush=True)
            continue
        results[name] = (steps, stats)
        print(f"{name:12s}  {stats['depth']} steps "
              f"(layers {stats['layers']}, {dt:.1f}s)", flush=True)
        for lit, wb in steps:
            print(f"    {render_step(lit, wb)}")

    if failed:
        print(f"\nFAILED: {failed}", file=sys.stderr)
        return 1
    if args.emit:
        with open(args.emit, "w") as fh:
            fh.write(freeze(results))
        print(f"\nwrote {args.emit}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
