"""Pure-Python (numpy) implementations of the hot kernels.

These mirror `hyperq._ckernels` exactly: same enumeration order, same
dedup-first-wins semantics, same return conventions.  They are the fallback
used when the compiled extension is unavailable, and the reference the
extension is tested against.

Conventions shared by both backends:

* A term is compiled to a post-order int32 opcode array: an entry < 0 is a
  variable reference (-1-i for environment variable i), an entry >= 0 is a
  signature symbol index whose arity many operands are popped.
* Operation tables are flat uint8 arrays in row-major order (first argument
  most significant).
* Environments over k variables are indexed 0..n**k-1 lexicographically,
  variable 0 most significant.
"""

from __future__ import annotations

import numpy as np

BACKEND = "py"

# largest direct-address dedup table (bits) before switching strategies
_DENSE_SEEN_LIMIT = 1 << 26
_BATCH_ROWS = 1 << 21


def env_var_tables(n: int, k: int) -> np.ndarray:
    """uint8[k, n**k]: value of each variable at each environment index."""
    size = n**k
    idx = np.arange(size, dtype=np.int64)
    out = np.empty((max(k, 1), size), dtype=np.uint8)
    for i in range(k):
        out[i] = (idx // (n ** (k - 1 - i))) % n
    if k == 0:
        out = np.zeros((0, 1), dtype=np.uint8)
    return out


def eval_code(
    code: np.ndarray,
    var_tables: np.ndarray,
    tables: list[np.ndarray],
    arities: np.ndarray,
    n: int,
) -> np.ndarray:
    """Evaluate one compiled term over the whole environment space."""
    stack: list[np.ndarray] = []
    for op in code:
        if op < 0:
            stack.append(var_tables[-1 - op])
        else:
            m = int(arities[op])
            args = stack[-m:]
            del stack[-m:]
            idx = args[0].astype(np.int64)
            for a in args[1:]:
                idx = idx * n + a
            stack.append(tables[op][idx])
    return stack[-1]


# --------------------------------------------------------------------------
# Clone-slice accumulator
# --------------------------------------------------------------------------

class CloneAccumulator:
    """Grows a deduplicated set of arity-`arity` term-operation tables.

    Ops are appended in the order batches arrive; within a batch the
    cartesian product of the argument pools is scanned lexicographically
    and the first candidate producing an unseen table wins.
    """

    def __init__(self, n: int, arity: int, cap: int,
                 fund_tables: list[np.ndarray], fund_arities: list[int]):
        self.n = n
        self.arity = arity
        self.cap = cap
        self.cells = n**arity
        self.fund_tables = [np.ascontiguousarray(t, dtype=np.uint8) for t in fund_tables]
        self.fund_arities = list(fund_arities)
        self.max_fund_arity = max(fund_arities) if fund_arities else 1
        self.capped = False

        total = None
        bits = self.cells * np.log2(n) if n > 1 else 0
        if bits < 62:
            total = n**self.cells
        self.full_possible = total

        self._tab_arr = np.zeros((256, self.cells), dtype=np.uint8)
        self._count = 0
        self._defs: list[tuple[int, ...]] = []
        self._powers = (
            np.array([n**e for e in range(self.cells - 1, -1, -1)], dtype=np.int64)
            if total is not None
            else None
        )
        if total is not None and total <= _DENSE_SEEN_LIMIT:
            self._seen_dense: np.ndarray | None = np.zeros(total, dtype=bool)
            self._seen_set: set | None = None
        else:
            self._seen_dense = None
            self._seen_set = set()

    @property
    def count(self) -> int:
        return self._count

    def is_full(self) -> bool:
        return self.full_possible is not None and self.count >= self.full_possible

    def _key(self, table: np.ndarray):
        if self._powers is not None:
            return int(table.astype(np.int64) @ self._powers)
        return table.tobytes()

    def _append(self, table: np.ndarray, definition: tuple[int, ...]) -> None:
        if self._count == self._tab_arr.shape[0]:
            grown = np.zeros((self._tab_arr.shape[0] * 2, self.cells), dtype=np.uint8)
            grown[: self._count] = self._tab_arr
            self._tab_arr = grown
        self._tab_arr[self._count] = table
        self._count += 1
        self._defs.append(definition)

    def _probe_add(self, table: np.ndarray, definition: tuple[int, ...]) -> bool:
        key = self._key(table)
        if self._seen_dense is not None:
            if self._seen_dense[key]:
                return False
            self._seen_dense[key] = True
        else:
            if key in self._seen_set:
                return False
            self._seen_set.add(key)
        self._append(table, definition)
        return True

    def add_projection(self, j: int) -> bool:
        if self.count >= self.cap:
            self.capped = True
            return False
        n, k = self.n, self.arity
        idx = np.arange(self.cells, dtype=np.int64)
        table = ((idx // (n ** (k - 1 - j))) % n).astype(np.uint8)
        return self._probe_add(table, (-1, j))

    def compose_batch(self, sym: int, pools: list[np.ndarray]) -> int:
        """Try every combination of pool members as arguments of symbol sym."""
        if self.capped or any(len(p) == 0 for p in pools):
            return 0
        n = self.n
        fund = self.fund_tables[sym]
        added = 0

        # chunk over the first pool to bound the materialized product
        rows_per_left = 1
        for p in pools[1:]:
            rows_per_left *= len(p)
        chunk = max(1, _BATCH_ROWS // max(rows_per_left, 1))
        first = pools[0]
        all_tables = self._tab_arr[: self._count]

        for start in range(0, len(first), chunk):
            part = [first[start:start + chunk]] + list(pools[1:])
            grids = np.meshgrid(*part, indexing="ij")
            arg_ids = np.stack([g.reshape(-1) for g in grids], axis=1)
            idx = all_tables[arg_ids[:, 0]].astype(np.int64)
            for c in range(1, arg_ids.shape[1]):
                idx = idx * n + all_tables[arg_ids[:, c]]
            cand = fund[idx]  # [rows, cells]
            added += self._dedup_append(sym, arg_ids, cand)
            if self.capped or self.is_full():
                break
        return added

    def _dedup_append(self, sym: int, arg_ids: np.ndarray, cand: np.ndarray) -> int:
        added = 0
        if self._powers is not None:
            keys = cand.astype(np.int64) @ self._powers
            if self._seen_dense is not None:
                fresh = ~self._seen_dense[keys]
            else:
                fresh = np.fromiter(
                    (int(key) not in self._seen_set for key in keys),
                    dtype=bool, count=len(keys),
                )
            if not fresh.any():
                return 0
            pos = np.flatnonzero(fresh)
            # first occurrence per key, in scan order
            _, first_at = np.unique(keys[pos], return_index=True)
            for p in np.sort(first_at):
                row = int(pos[p])
                if self.count >= self.cap:
                    self.capped = True
                    break
                key = int(keys[row])
                if self._seen_dense is not None:
                    if self._seen_dense[key]:
                        continue
                    self._seen_dense[key] = True
                else:
                    if key in self._seen_set:
                        continue
                    self._seen_set.add(key)
                self._append(cand[row], (sym, *map(int, arg_ids[row])))
                added += 1
                if self.is_full():
                    break
        else:
            for row in range(cand.shape[0]):
                if self.count >= self.cap:
                    self.capped = True
                    break
                if self._probe_add(cand[row].copy(), (sym, *map(int, arg_ids[row]))):
                    added += 1
                    if self.is_full():
                        break
        return added

    def tables(self) -> np.ndarray:
        return self._tab_arr[: self._count].copy()

    def defs(self) -> np.ndarray:
        width = 1 + self.max_fund_arity
        out = np.full((self.count, width), -1, dtype=np.int32)
        for i, d in enumerate(self._defs):
            out[i, : len(d)] = d
        return out


# --------------------------------------------------------------------------
# Scan kernels for single-symbol signatures
# --------------------------------------------------------------------------

class _DagEvaluator:
    """Evaluates slice ops as terms (via their definitions) against the
    fundamental tables, with per-binding memoization."""

    def __init__(self, fund_tables, fund_arities, n, defs):
        self.fund_tables = fund_tables
        self.fund_arities = fund_arities
        self.n = n
        self.defs = defs
        self._memo: dict[int, np.ndarray] = {}

    def eval(self, op: int, argtabs: list[np.ndarray]) -> np.ndarray:
        hit = self._memo.get(op)
        if hit is not None:
            return hit
        d = self.defs[op]
        if d[0] < 0:
            out = argtabs[int(d[1])]
        else:
            sym = int(d[0])
            m = int(self.fund_arities[sym])
            parts = [self.eval(int(d[1 + t]), argtabs) for t in range(m)]
            idx = parts[0].astype(np.int64)
            for p in parts[1:]:
                idx = idx * self.n + p
            out = self.fund_tables[sym][idx]
        self._memo[op] = out
        return out

    def fresh(self):
        self._memo = {}


def _eval_code_hsub(code, var_tables, dag: _DagEvaluator, image_op: int,
                    arities, n) -> np.ndarray:
    stack: list[np.ndarray] = []
    for op in code:
        if op < 0:
            stack.append(var_tables[-1 - op])
        else:
            m = int(arities[op])
            args = stack[-m:]
            del stack[-m:]
            dag.fresh()
            stack.append(dag.eval(image_op, args))
    return stack[-1]


def lhs_scan_axiom(
    fund_tables: list[np.ndarray],
    fund_arities: np.ndarray,
    n: int,
    k: int,
    defs: np.ndarray,
    prem_l: list[np.ndarray],
    prem_r: list[np.ndarray],
    concl_l: np.ndarray,
    concl_r: np.ndarray,
) -> tuple[int, int]:
    """Scan hypersubstitution images (slice definitions) over one axiom.

    For each image op s in definition order, checks the axiom with every
    application routed through op s acting as the substituted image, read
    against the *fundamental* tables.  Returns the first (sigma, env) where
    the premises hold and the conclusion fails, or (-1, -1).
    """
    var_tables = env_var_tables(n, k)
    dag = _DagEvaluator(fund_tables, fund_arities, n, defs)
    n_ops = defs.shape[0]
    for s in range(n_ops):
        ok = None
        for pl, pr in zip(prem_l, prem_r):
            el = _eval_code_hsub(pl, var_tables, dag, s, fund_arities, n)
            er = _eval_code_hsub(pr, var_tables, dag, s, fund_arities, n)
            eq = el == er
            ok = eq if ok is None else (ok & eq)
            if not ok.any():
                break
        else:
            cl = _eval_code_hsub(concl_l, var_tables, dag, s, fund_arities, n)
            cr = _eval_code_hsub(concl_r, var_tables, dag, s, fund_arities, n)
            bad = cl != cr
            if ok is not None:
                bad &= ok
            env = int(np.argmax(bad)) if bad.any() else -1
            if env >= 0:
                return s, env
    return -1, -1


def rhs_scan_axiom(
    slice_tables: np.ndarray,
    m: int,
    n: int,
    k: int,
    prem_l: list[np.ndarray],
    prem_r: list[np.ndarray],
    concl_l: np.ndarray,
    concl_r: np.ndarray,
) -> tuple[int, int]:
    """Check one axiom plainly in every derived algebra at once.

    Derived algebra i interprets the single symbol by slice_tables[i].
    Returns the first (choice, env) violating the axiom, or (-1, -1).
    """
    n_ops = slice_tables.shape[0]
    size = n**k
    var_tables = env_var_tables(n, k)

    def eval_all(code) -> np.ndarray:
        stack: list[np.ndarray] = []
        for op in code:
            if op < 0:
                stack.append(
                    np.broadcast_to(var_tables[-1 - op], (n_ops, size))
                )
            else:
                args = stack[-m:]
                del stack[-m:]
                idx = args[0].astype(np.int64)
                for a in args[1:]:
                    idx = idx * n + a
                stack.append(np.take_along_axis(slice_tables, idx, axis=1))
        return stack[-1]

    ok = np.ones((n_ops, size), dtype=bool)
    for pl, pr in zip(prem_l, prem_r):
        ok &= eval_all(pl) == eval_all(pr)
    bad = (eval_all(concl_l) != eval_all(concl_r)) & ok
    if not bad.any():
        return -1, -1
    flat = int(np.argmax(bad))
    return flat // size, flat % size
