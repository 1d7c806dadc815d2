"""Declarative workloads: parse a config, run it, check it, report it.

A workload names a memory type, an algorithm, array dimensions, a data
source, and algorithm parameters.  Configs are line-oriented
``key = value`` text (``#`` comments allowed) or, equivalently, a JSON
object.  All randomness flows from the single ``seed`` through one
deterministic generator, and the serial oracle consumes the very same
prepared inputs as the simulator, so a report is a pure function of its
config: rerunning one yields byte-identical JSON.

The report carries the three ledger meters, a SHA-256 digest of the
result, and the oracle verdict with the first divergence when one is
found.  ``sweep_workload`` reruns a config across one parameter and can
fit a log-log slope to the macro-cycle column.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace

from .algorithms import (BUILTIN_PLANS, AlgorithmReport, build_slope_set,
                         detect_all_lines, detect_line_segment, global_limit,
                         hybrid_sort, load_op_words, run_local_op,
                         signed_value, sum_1d, sum_2d, template_search_1d,
                         template_search_2d, threshold_flags)
from .algorithms.lines import _axis_cells, _diagonal_cells
from .comparable import ComparableMemory, FieldLayout
from .computable import ComputableMemory
from .errors import ArgumentError, ConfigError
from .movable import MovableMemory
from .rng import SplitMix64
from .searchable import SearchableMemory

__all__ = ["WorkloadConfig", "parse_config", "config_from_mapping",
           "prepare_inputs", "run_workload", "sweep_workload",
           "canonical_json", "ALGORITHMS", "MEMORY_TYPES"]

MEMORY_TYPES = ("movable", "searchable", "comparable",
                "computable_1d", "computable_2d")

_COMPARATORS = ("lt", "le", "gt", "ge", "eq", "ne")


# --------------------------------------------------------------- config

@dataclass(frozen=True)
class WorkloadConfig:
    """One validated workload; immutable so sweeps derive variants."""

    memory_type: str
    algorithm: str
    dims: tuple                 # (n,) or (nx, ny)
    width: int = 16
    data_source: str = "uniform"     # uniform | inline | file
    values: tuple = ()               # inline data
    data_max: int = 256              # uniform upper bound (exclusive)
    data_path: str = ""              # file data
    seed: int = 0
    oracle: bool = True
    params: tuple = ()               # sorted (key, value) pairs

    def param(self, key, default=None):
        return dict(self.params).get(key, default)

    @property
    def n_pe(self):
        n = 1
        for d in self.dims:
            n *= d
        return n


def _parse_scalar(text):
    text = text.strip()
    lowered = text.lower()
    if lowered in ("true", "on", "yes"):
        return True
    if lowered in ("false", "off", "no"):
        return False
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def _parse_value(text):
    """Scalars, comma lists, and semicolon-separated rows of lists."""
    text = text.strip()
    if ";" in text:
        return [_parse_value(row) for row in text.split(";")]
    if "," in text:
        return [_parse_scalar(v) for v in text.split(",") if v.strip()]
    return _parse_scalar(text)


def parse_config(text) -> "WorkloadConfig":
    """Parse ``key = value`` lines or a JSON object into a config."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            mapping = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if not isinstance(mapping, dict):
            raise ConfigError("JSON config must be an object")
        return config_from_mapping(mapping)
    mapping = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, "
                              f"got {raw.strip()!r}")
        key, value = line.split("=", 1)
        mapping[key.strip()] = _parse_value(value)
    return config_from_mapping(mapping)


def _take_int(mapping, key, default=None, minimum=None):
    value = mapping.pop(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{key} must be >= {minimum}, got {value}")
    return value


def config_from_mapping(mapping) -> "WorkloadConfig":
    mapping = dict(mapping)
    memory = mapping.pop("memory", None)
    if memory not in MEMORY_TYPES:
        raise ConfigError(
            f"memory must be one of {MEMORY_TYPES}, got {memory!r}")
    algorithm = mapping.pop("algorithm", None)
    if algorithm not in ALGORITHMS:
        raise ConfigError(f"algorithm must be one of "
                          f"{tuple(sorted(ALGORITHMS))}, got {algorithm!r}")
    if memory not in ALGORITHMS[algorithm].memories:
        raise ConfigError(
            f"algorithm {algorithm!r} does not run on memory {memory!r}")

    values = mapping.pop("values", None)
    if values is not None:
        if isinstance(values, int):
            values = [values]
        if (not isinstance(values, list)
                or any(isinstance(v, bool) or not isinstance(v, int)
                       for v in values)):
            raise ConfigError("values must be a list of integers")
        values = tuple(values)
    else:
        values = ()

    if memory == "computable_2d":
        nx = _take_int(mapping, "nx", minimum=1)
        ny = _take_int(mapping, "ny", minimum=1)
        if nx is None or ny is None:
            raise ConfigError("memory computable_2d needs nx and ny")
        dims = (nx, ny)
    else:
        n = _take_int(mapping, "n", minimum=1)
        if n is None:
            if values:
                n = len(values)
            else:
                raise ConfigError("n (array size) is required")
        dims = (n,)

    width = _take_int(mapping, "width", default=16, minimum=1)
    if width > 64:
        raise ConfigError(f"width must be at most 64, got {width}")
    seed = _take_int(mapping, "seed", default=0, minimum=0)

    source = mapping.pop("data", "inline" if values else "uniform")
    if source not in ("uniform", "inline", "file"):
        raise ConfigError(
            f"data must be uniform, inline, or file, got {source!r}")
    data_path = str(mapping.pop("path", ""))
    if source == "file" and not data_path:
        raise ConfigError("data = file needs a path")
    if source == "inline" and not values:
        raise ConfigError("data = inline needs values")

    data_max = _take_int(mapping, "data_max", default=256, minimum=1)
    oracle = mapping.pop("oracle", True)
    if isinstance(oracle, str):
        oracle = oracle.lower()
        if oracle not in ("on", "off"):
            raise ConfigError(f"oracle must be on or off, got {oracle!r}")
        oracle = oracle == "on"
    if not isinstance(oracle, bool):
        raise ConfigError(f"oracle must be on or off, got {oracle!r}")

    params = {k: tuple(v) if isinstance(v, list) else v
              for k, v in mapping.items()}
    config = WorkloadConfig(
        memory_type=memory, algorithm=algorithm, dims=dims, width=width,
        data_source=source, values=values, data_max=data_max,
        data_path=data_path, seed=seed, oracle=oracle,
        params=tuple(sorted(params.items())))
    ALGORITHMS[algorithm].validate(config)
    return config


# ----------------------------------------------------------------- data

def _data_cap(config) -> int:
    if config.memory_type == "searchable":
        return 256
    if config.memory_type == "comparable":
        return 1 << (8 * int(config.param("field_width", 1)))
    if config.memory_type.startswith("computable"):
        return 1 << config.width
    return 1 << 32                              # movable words


def _data_count(config) -> int:
    if config.memory_type == "movable":
        return max(1, config.n_pe // 2)          # half-full heap
    return config.n_pe


@dataclass(frozen=True)
class WorkloadInputs:
    """Everything derived from the seed, shared by run and oracle."""

    data: tuple
    script: tuple = ()          # movable edit script


def prepare_inputs(config) -> "WorkloadInputs":
    cap = _data_cap(config)
    count = _data_count(config)
    rng = SplitMix64(config.seed)
    if config.data_source == "uniform":
        bound = min(config.data_max, cap)
        data = tuple(int(rng.bounded(bound)) for _ in range(count))
    else:
        if config.data_source == "file":
            try:
                with open(config.data_path, "r", encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError(f"cannot read data file: {exc}") from None
            data = tuple(int(v) for v in text.replace(",", " ").split())
        else:
            data = config.values
        if len(data) != count:
            raise ConfigError(
                f"data supplies {len(data)} values but the workload "
                f"needs {count}")
        bad = [v for v in data if not 0 <= v < cap]
        if bad:
            raise ConfigError(
                f"data value {bad[0]} out of range [0, {cap})")
    script = (_edit_script(config, data, rng)
              if config.memory_type == "movable" else ())
    return WorkloadInputs(data=data, script=script)


def _edit_script(config, data, rng):
    """Deterministic object-store edit sequence, always legal."""
    n_objects = int(config.param("objects", 4))
    n_edits = int(config.param("edits", 16))
    capacity = config.n_pe
    chunk = max(1, len(data) // n_objects)
    script = []
    lengths = {}
    used = 0
    for k in range(n_objects):
        words = data[k * chunk:(k + 1) * chunk if k < n_objects - 1 else len(data)]
        if not words:
            words = (0,)
        script.append(("insert", f"obj{k}", 0, tuple(words)))
        lengths[f"obj{k}"] = len(words)
        used += len(words)
    for _ in range(n_edits):
        oid = f"obj{int(rng.bounded(n_objects))}"
        length = lengths[oid]
        can_grow = used < capacity
        if not can_grow and length == 0:
            continue
        if can_grow and (length == 0 or rng.bounded(2) == 0):
            k = 1 + int(rng.bounded(min(3, capacity - used)))
            offset = int(rng.bounded(length + 1))
            words = tuple(int(rng.bounded(min(config.data_max, 1 << 32)))
                          for _ in range(k))
            script.append(("insert", oid, offset, words))
            lengths[oid] += k
            used += k
        else:
            k = 1 + int(rng.bounded(length))
            offset = int(rng.bounded(length - k + 1))
            script.append(("delete", oid, offset, k))
            lengths[oid] -= k
            used -= k
    return tuple(script)


# ------------------------------------------------------------ builders

def _computable(config, data):
    dims = config.dims if len(config.dims) == 2 else None
    mem = ComputableMemory(config.n_pe, width=config.width, dims=dims)
    load_op_words(mem, list(data))
    return mem


def _layout(config) -> FieldLayout:
    return FieldLayout(record_size=int(config.param("record_size", 1)),
                       field_offset=int(config.param("field_offset", 0)),
                       field_width=int(config.param("field_width", 1)))


def _grid(config, data):
    nx, ny = config.dims
    return [[data[x + y * nx] for x in range(nx)] for y in range(ny)]


# ------------------------------------------------- algorithm registry

@dataclass(frozen=True)
class Algorithm:
    """CLI-facing algorithm: runner plus independent serial oracle."""

    memories: tuple
    run: callable               # (config, inputs) -> (result, delta)
    oracle: callable            # (config, inputs) -> expected result
    required: tuple = ()        # parameter names that must be present
    compare: callable = None    # optional custom (got, want) -> divergence

    def validate(self, config):
        for key in self.required:
            if config.param(key) is None:
                raise ConfigError(
                    f"algorithm {config.algorithm!r} needs parameter "
                    f"{key!r}")


def _run_substring(config, inputs):
    mem = SearchableMemory(config.n_pe)
    for i, b in enumerate(inputs.data):
        mem.exclusive_write(i, b)
    before = mem.ledger.snapshot()
    pattern = _pattern_bytes(config)
    report = mem.find_substring(pattern)
    return ({"matches": list(report.matched), "count": report.count},
            mem.ledger.snapshot().delta(before))


def _pattern_bytes(config):
    pattern = config.param("pattern")
    if isinstance(pattern, int):
        pattern = str(pattern)
    if isinstance(pattern, str):
        encoded = pattern.encode("latin-1")
    else:
        encoded = bytes(int(b) for b in pattern)
    if not encoded:
        raise ConfigError("pattern must not be empty")
    return encoded


def _oracle_substring(config, inputs):
    text = bytes(inputs.data)
    pattern = _pattern_bytes(config)
    ends = [i + len(pattern) - 1
            for i in range(len(text) - len(pattern) + 1)
            if text[i:i + len(pattern)] == pattern]
    return {"matches": ends, "count": len(ends)}


def _run_select(config, inputs):
    layout = _layout(config)
    mem = ComparableMemory(config.n_pe * layout.record_size)
    mem.load_records(list(inputs.data), layout)
    before = mem.ledger.snapshot()
    report = mem.field_predicate(layout, config.param("cmp"),
                                 int(config.param("value")))
    return ({"matches": list(report.matched), "count": report.count},
            mem.ledger.snapshot().delta(before))


_PY_CMP = {"lt": lambda a, b: a < b, "le": lambda a, b: a <= b,
           "gt": lambda a, b: a > b, "ge": lambda a, b: a >= b,
           "eq": lambda a, b: a == b, "ne": lambda a, b: a != b}


def _oracle_select(config, inputs):
    op = _PY_CMP[config.param("cmp")]
    value = int(config.param("value"))
    hits = [i for i, v in enumerate(inputs.data) if op(v, value)]
    return {"matches": hits, "count": len(hits)}


def _run_histogram(config, inputs):
    layout = _layout(config)
    mem = ComparableMemory(config.n_pe * layout.record_size)
    mem.load_records(list(inputs.data), layout)
    before = mem.ledger.snapshot()
    counts = mem.histogram(layout, [int(v) for v in config.param("limits")])
    return {"counts": counts}, mem.ledger.snapshot().delta(before)


def _oracle_histogram(config, inputs):
    limits = [int(v) for v in config.param("limits")]
    edges = [float("-inf")] + limits + [float("inf")]
    counts = [sum(1 for v in inputs.data if lo <= v < hi)
              for lo, hi in zip(edges, edges[1:])]
    return {"counts": counts}


def _run_object_edits(config, inputs):
    mem = MovableMemory(config.n_pe)
    before = mem.ledger.snapshot()
    for op in inputs.script:
        if op[0] == "insert":
            mem.insert(op[1], op[2], list(op[3]))
        else:
            mem.delete(op[1], op[2], op[3])
    objects = {oid: mem.object_contents(oid) for oid in mem.table}
    return ({"objects": {k: objects[k] for k in sorted(objects)},
             "used": mem.used_cells()},
            mem.ledger.snapshot().delta(before))


def _oracle_object_edits(config, inputs):
    objects = {}
    for op in inputs.script:
        if op[0] == "insert":
            store = objects.setdefault(op[1], [])
            store[op[2]:op[2]] = list(op[3])
        else:
            del objects[op[1]][op[2]:op[2] + op[3]]
    return {"objects": {k: objects[k] for k in sorted(objects)},
            "used": sum(len(v) for v in objects.values())}


def _from_report(report: AlgorithmReport):
    return report.result, report.ledger_delta


def _run_sum_1d(config, inputs):
    report = sum_1d(_computable(config, inputs.data),
                    int(config.param("M")))
    return {"sum": report.result}, report.ledger_delta


def _oracle_sum_1d(config, inputs):
    return {"sum": sum(inputs.data) & ((1 << config.width) - 1)}


def _run_sum_2d(config, inputs):
    report = sum_2d(_computable(config, inputs.data),
                    int(config.param("Mx")), int(config.param("My")))
    return {"sum": report.result}, report.ledger_delta


def _run_global_limit(config, inputs):
    report = global_limit(_computable(config, inputs.data),
                          int(config.param("M")),
                          config.param("which", "max"))
    return report.result, report.ledger_delta


def _oracle_global_limit(config, inputs):
    which = config.param("which", "max")
    pick = min(inputs.data) if which == "min" else max(inputs.data)
    return {"value": pick, "address": inputs.data.index(pick)}


def _run_threshold(config, inputs):
    report = threshold_flags(_computable(config, inputs.data),
                             int(config.param("value")),
                             config.param("cmp", "ge"))
    return report.result, report.ledger_delta


def _oracle_threshold(config, inputs):
    op = _PY_CMP[config.param("cmp", "ge")]
    value = int(config.param("value"))
    flags = [1 if op(v, value) else 0 for v in inputs.data]
    return {"count": sum(flags), "flags": flags}


def _run_sort(config, inputs):
    rounds = config.param("rounds")
    if rounds is None:
        rounds = max(1, math.isqrt(config.n_pe))
    report = hybrid_sort(_computable(config, inputs.data), int(rounds))
    return report.result, report.ledger_delta


def _oracle_sort(config, inputs):
    data = list(inputs.data)
    asc = sum(1 for a, b in zip(data, data[1:]) if b < a)
    desc = sum(1 for a, b in zip(data, data[1:]) if b > a)
    order = "ascending" if asc <= desc else "descending"
    return {"direction": order,
            "values": sorted(data, reverse=order == "descending")}


def _template_rows(config):
    template = config.param("template")
    if template is None:
        raise ConfigError("algorithm needs parameter 'template'")
    if isinstance(template, int):
        return [[template]]
    rows = list(template)
    if rows and not isinstance(rows[0], (list, tuple)):
        return [[int(v) for v in rows]]
    return [[int(v) for v in row] for row in rows]


def _run_template_1d(config, inputs):
    report = template_search_1d(_computable(config, inputs.data),
                                _template_rows(config)[0])
    return report.result, report.ledger_delta


def _oracle_template_1d(config, inputs):
    template = _template_rows(config)[0]
    data = inputs.data
    sad = [sum(abs(v - t) for v, t in zip(data[i:], template))
           for i in range(len(data) - len(template) + 1)]
    return {"sad": sad, "best": min(range(len(sad)), key=lambda i: (sad[i], i))}


def _run_template_2d(config, inputs):
    report = template_search_2d(_computable(config, inputs.data),
                                _template_rows(config))
    result = dict(report.result)
    result["best"] = list(result["best"])
    return result, report.ledger_delta


def _oracle_template_2d(config, inputs):
    rows = _template_rows(config)
    grid = _grid(config, inputs.data)
    nx, ny = config.dims
    mx, my = len(rows[0]), len(rows)
    sad = [[sum(abs(grid[y + jy][x + jx] - rows[jy][jx])
                for jy in range(my) for jx in range(mx))
            for x in range(nx - mx + 1)]
           for y in range(ny - my + 1)]
    best = min(((x, y) for y in range(ny - my + 1)
                for x in range(nx - mx + 1)),
               key=lambda p: (sad[p[1]][p[0]], p[1], p[0]))
    return {"sad": sad, "best": list(best)}


def _run_stencil(config, inputs):
    name = config.param("plan")
    if name not in BUILTIN_PLANS:
        raise ConfigError(f"plan must be one of "
                          f"{tuple(sorted(BUILTIN_PLANS))}, got {name!r}")
    kernel, plan = BUILTIN_PLANS[name]
    report = run_local_op(_computable(config, inputs.data), kernel, plan)
    return {"out": report.result}, report.ledger_delta


def _oracle_stencil(config, inputs):
    """Value-level replay of the plan with whole-array zero-fill
    semantics — the serial mirror of the broadcast machine.  A read
    toward direction d at position p sources position p + delta(d),
    falling off an edge reads zero, and arithmetic wraps at the word
    width."""
    name = config.param("plan")
    _, plan = BUILTIN_PLANS[name]
    n = config.n_pe
    nx, ny = config.dims if len(config.dims) == 2 else (n, 1)
    mask = (1 << config.width) - 1
    deltas = {"left": (-1, 0), "right": (1, 0),
              "down": (0, -1), "up": (0, 1)}

    def shifted(words, direction):
        dx, dy = deltas[direction]
        out = [0] * n
        for i in range(n):
            x, y = i % nx + dx, i // nx + dy
            if 0 <= x < nx and 0 <= y < ny:
                out[i] = words[x + y * nx]
        return out

    def key_of(sel):
        return "op" if sel == "op" else tuple(sel)

    regs = {"op": list(inputs.data), ("neighbor",): [0] * n}
    for j in range(4):
        regs[("data", j)] = [0] * n
    for mac in plan:
        if mac.opcode == "copy":
            regs[key_of(mac.dst)] = list(regs[key_of(mac.src)])
        elif mac.opcode == "exchange":
            reg = key_of(mac.reg)
            regs["op"], regs[reg] = regs[reg], regs["op"]
        elif mac.opcode in ("add", "sub"):
            if mac.reg and mac.reg[0] == "neighbor_of":
                operand = shifted(regs[("neighbor",)], mac.reg[1])
            else:
                operand = regs[key_of(mac.reg)]
            sign = 1 if mac.opcode == "add" else -1
            regs["op"] = [(a + sign * b) & mask
                          for a, b in zip(regs["op"], operand)]
        elif mac.opcode == "read_neighbor":
            got = shifted(regs[("neighbor",)], mac.direction)
            regs["op"] = got
            if mac.dst is not None and mac.dst != "op":
                regs[key_of(mac.dst)] = list(got)
        elif mac.opcode == "load_immediate":
            regs["op"] = [mac.value & mask] * n
        else:
            raise ConfigError(f"stencil oracle cannot replay {mac.opcode!r}")
    return {"out": regs["op"]}


def _run_line_segment(config, inputs):
    report = detect_line_segment(_computable(config, inputs.data),
                                 int(config.param("Mx")),
                                 int(config.param("My")))
    return report.result, report.ledger_delta


def _line_cells(mx, my):
    return (_diagonal_cells(mx, my) if mx > 0 and my > 0
            else _axis_cells(mx, my))


def _signed_sums(config, inputs, mx, my):
    """Per-pixel direct-indexed signed sums plus the validity mask."""
    grid = _grid(config, inputs.data)
    nx, ny = config.dims
    cells = _line_cells(mx, my)
    values, valid = [], []
    for i in range(nx * ny):
        x, y = i % nx, i // nx
        ok = all(0 <= x + cx < nx and 0 <= y + cy < ny
                 for cx, cy, _ in cells)
        valid.append(ok)
        values.append(sum(s * grid[y + cy][x + cx]
                          for cx, cy, s in cells) if ok else 0)
    return values, valid


def _oracle_line_segment(config, inputs):
    values, valid = _signed_sums(config, inputs,
                                 int(config.param("Mx")),
                                 int(config.param("My")))
    return {"values": values, "valid": valid}


def _compare_line_segment(got, want):
    """Messenger values are asserted only where the area fits."""
    if got.get("valid") != want["valid"]:
        return {"path": "valid", "got": got.get("valid"),
                "want": want["valid"]}
    for i, ok in enumerate(want["valid"]):
        if ok and got["values"][i] != want["values"][i]:
            return {"path": f"values[{i}]", "got": got["values"][i],
                    "want": want["values"][i]}
    return None


def _run_all_lines(config, inputs):
    report = detect_all_lines(_computable(config, inputs.data),
                              int(config.param("D")))
    return report.result, report.ledger_delta


def _oracle_all_lines(config, inputs):
    best_value = [0] * config.n_pe
    best_member = [None] * config.n_pe
    for member in build_slope_set(int(config.param("D"))):
        values, valid = _signed_sums(config, inputs, *member)
        for i in range(config.n_pe):
            if valid[i] and (best_member[i] is None
                             or abs(values[i]) > abs(best_value[i])):
                best_value[i] = values[i]
                best_member[i] = list(member)
    return {"best_value": best_value, "best_member": best_member}


ALGORITHMS = {
    "substring": Algorithm(("searchable",), _run_substring,
                           _oracle_substring, required=("pattern",)),
    "select": Algorithm(("comparable",), _run_select, _oracle_select,
                        required=("cmp", "value")),
    "histogram": Algorithm(("comparable",), _run_histogram,
                           _oracle_histogram, required=("limits",)),
    "object_edits": Algorithm(("movable",), _run_object_edits,
                              _oracle_object_edits),
    "sum_1d": Algorithm(("computable_1d",), _run_sum_1d, _oracle_sum_1d,
                        required=("M",)),
    "sum_2d": Algorithm(("computable_2d",), _run_sum_2d, _oracle_sum_1d,
                        required=("Mx", "My")),
    "global_limit": Algorithm(("computable_1d",), _run_global_limit,
                              _oracle_global_limit, required=("M",)),
    "threshold": Algorithm(("computable_1d",), _run_threshold,
                           _oracle_threshold, required=("value",)),
    "sort": Algorithm(("computable_1d",), _run_sort, _oracle_sort),
    "template_1d": Algorithm(("computable_1d",), _run_template_1d,
                             _oracle_template_1d, required=("template",)),
    "template_2d": Algorithm(("computable_2d",), _run_template_2d,
                             _oracle_template_2d, required=("template",)),
    "stencil": Algorithm(("computable_1d", "computable_2d"), _run_stencil,
                         _oracle_stencil, required=("plan",)),
    "line_segment": Algorithm(("computable_2d",), _run_line_segment,
                              _oracle_line_segment, required=("Mx", "My"),
                              compare=_compare_line_segment),
    "detect_all_lines": Algorithm(("computable_2d",), _run_all_lines,
                                  _oracle_all_lines, required=("D",)),
}


# -------------------------------------------------------------- reports

def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _digest(result) -> str:
    payload = canonical_json(result).encode("utf-8")
    return "sha256:" + hashlib.sha256(payload).hexdigest()


def _first_divergence(got, want, path="result"):
    """Depth-first structural diff; None when equal."""
    if isinstance(want, dict) and isinstance(got, dict):
        for key in sorted(set(want) | set(got)):
            if key not in got or key not in want:
                return {"path": f"{path}.{key}",
                        "got": got.get(key, "<missing>"),
                        "want": want.get(key, "<missing>")}
            found = _first_divergence(got[key], want[key], f"{path}.{key}")
            if found:
                return found
        return None
    if isinstance(want, (list, tuple)) and isinstance(got, (list, tuple)):
        if len(got) != len(want):
            return {"path": f"{path}.length", "got": len(got),
                    "want": len(want)}
        for i, (g, w) in enumerate(zip(got, want)):
            found = _first_divergence(g, w, f"{path}[{i}]")
            if found:
                return found
        return None
    if got != want:
        return {"path": path, "got": got, "want": want}
    return None


def _describe_source(config) -> str:
    if config.data_source == "uniform":
        return f"uniform(max={config.data_max}, seed={config.seed})"
    if config.data_source == "file":
        return f"file({config.data_path})"
    return f"inline({len(config.values)})"


def run_workload(config, *, timing=False) -> dict:
    """Execute one workload and return its JSON-ready report."""
    import time

    algorithm = ALGORITHMS[config.algorithm]
    inputs = prepare_inputs(config)
    start = time.perf_counter()
    result, delta = algorithm.run(config, inputs)
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    oracle_block = {"status": "off"}
    if config.oracle:
        want = algorithm.oracle(config, inputs)
        if algorithm.compare is not None:
            divergence = algorithm.compare(result, want)
        else:
            divergence = _first_divergence(result, want)
        oracle_block = {"status": "pass" if divergence is None else "fail"}
        if divergence is not None:
            oracle_block["first_divergence"] = divergence
    report = {
        "workload": {
            "memory": config.memory_type,
            "algorithm": config.algorithm,
            "dims": list(config.dims),
            "width": config.width,
            "seed": config.seed,
            "data": _describe_source(config),
        },
        "params": {k: (list(v) if isinstance(v, tuple) else v)
                   for k, v in config.params},
        "result_digest": _digest(result),
        "macro_cycles": delta.macro_cycles,
        "micro_cycles": delta.micro_cycles,
        "exclusive_ops": delta.exclusive_ops,
        "oracle": oracle_block,
    }
    if timing:
        report["wall_time_ms"] = elapsed_ms
    return report


_CONFIG_FIELDS = ("width", "seed", "data_max")


def _with_param(config, name, value) -> "WorkloadConfig":
    if name in _CONFIG_FIELDS:
        return replace(config, **{name: value})
    if name == "n":
        if len(config.dims) != 1:
            raise ConfigError("parameter n does not apply to a 2-D array")
        return replace(config, dims=(int(value),))
    if name in ("nx", "ny"):
        if len(config.dims) != 2:
            raise ConfigError(f"parameter {name} needs a 2-D array")
        nx, ny = config.dims
        dims = (int(value), ny) if name == "nx" else (nx, int(value))
        return replace(config, dims=dims)
    params = dict(config.params)
    params[name] = value
    return replace(config, params=tuple(sorted(params.items())))


def sweep_workload(config, param, values, *, fit=False) -> dict:
    """Rerun ``config`` across ``param`` values; optional log-log fit."""
    values = list(values)
    if not values:
        raise ArgumentError("sweep needs at least one value")
    rows = []
    for value in values:
        report = run_workload(_with_param(config, param, value))
        rows.append({
            "value": value,
            "macro_cycles": report["macro_cycles"],
            "micro_cycles": report["micro_cycles"],
            "exclusive_ops": report["exclusive_ops"],
            "oracle": report["oracle"]["status"],
            "result_digest": report["result_digest"],
        })
    table = {"param": param, "rows": rows}
    if fit:
        if len(rows) < 2:
            raise ArgumentError("a fit needs at least two sweep values")
        try:
            points = [float(r["value"]) for r in rows]
        except (TypeError, ValueError):
            raise ArgumentError("a fit needs numeric sweep values") from None
        import numpy as np

        xs = np.log(points)
        ys = np.log([max(1.0, float(r["macro_cycles"])) for r in rows])
        table["fit_exponent"] = float(np.polyfit(xs, ys, 1)[0])
    return table
