# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: clone-slice closure and satisfaction scans.

Mirrors hyperq.kernels.pure bit for bit; see that module for the shared
conventions (opcode arrays, row-major tables, environment indexing).
"""

from libc.stdlib cimport free, malloc
from libc.string cimport memcmp, memcpy, memset

import numpy as np

BACKEND = "c"

ctypedef unsigned char u8
ctypedef long long i64
ctypedef unsigned long long u64

DEF DENSE_SEEN_LIMIT = 67108864  # 1 << 26


cdef inline u64 fnv1a(const u8 *row, Py_ssize_t cells) noexcept nogil:
    cdef u64 h = <u64>0xcbf29ce484222325
    cdef Py_ssize_t i
    for i in range(cells):
        h ^= row[i]
        h *= <u64>0x100000001b3
    return h


cdef class CloneAccumulator:
    """Deduplicated, order-preserving set of term-operation tables."""

    cdef public int n, arity, cap, cells, max_fund_arity
    cdef public bint capped
    cdef public object full_possible
    cdef int count_
    cdef int capacity
    cdef u8[:, ::1] tab
    cdef int[:, ::1] def_arr
    cdef list fund_np
    cdef list fund_arities_list
    # dense dedup (full_possible small): bitset over packed table values
    cdef bint dense
    cdef u8[::1] seen_bits
    cdef i64 full_count
    # packed representation per op (dense mode only)
    cdef i64[::1] packed
    # half-table composition (dense, binary symbol): packed halves per op
    cdef int hi_cells, lo_cells, hi_n, lo_n
    cdef int[::1] op_hi
    cdef int[::1] op_lo
    cdef dict half_tables  # sym -> (thi int32[hi_n*hi_n], tlo int32[lo_n*lo_n])
    # hash dedup otherwise: open addressing, slot stores op index + 1
    cdef i64[::1] slots
    cdef i64 n_slots

    def __init__(self, int n, int arity, int cap, fund_tables, fund_arities):
        cdef int i
        self.n = n
        self.arity = arity
        self.cap = cap
        self.cells = int(n) ** int(arity)
        self.capped = False
        self.fund_np = [np.ascontiguousarray(t, dtype=np.uint8) for t in fund_tables]
        self.fund_arities_list = [int(a) for a in fund_arities]
        self.max_fund_arity = max(self.fund_arities_list) if self.fund_arities_list else 1

        bits = self.cells * np.log2(n) if n > 1 else 0.0
        self.full_possible = int(n) ** self.cells if bits < 62 else None

        self.count_ = 0
        self.capacity = 256
        self.tab = np.zeros((self.capacity, self.cells), dtype=np.uint8)
        self.def_arr = np.full((self.capacity, 1 + self.max_fund_arity), -1, dtype=np.int32)

        self.dense = self.full_possible is not None and self.full_possible <= DENSE_SEEN_LIMIT
        if self.dense:
            self.full_count = <i64>self.full_possible
            self.seen_bits = np.zeros((self.full_count + 7) // 8, dtype=np.uint8)
            self.packed = np.zeros(self.capacity, dtype=np.int64)
            self.hi_cells = self.cells // 2
            self.lo_cells = self.cells - self.hi_cells
            self.hi_n = int(n) ** int(self.hi_cells)
            self.lo_n = int(n) ** int(self.lo_cells)
            self.op_hi = np.zeros(self.capacity, dtype=np.int32)
            self.op_lo = np.zeros(self.capacity, dtype=np.int32)
            self.half_tables = {}
            self.n_slots = 0
        else:
            self.full_count = 0
            self.n_slots = 1
            while self.n_slots < 2 * (cap + 8):
                self.n_slots <<= 1
            self.slots = np.zeros(self.n_slots, dtype=np.int64)
            self.half_tables = {}

    @property
    def count(self):
        return self.count_

    def is_full(self):
        return self.full_possible is not None and self.count_ >= self.full_possible

    cdef void _grow(self):
        cdef int newcap = self.capacity * 2
        tab = np.zeros((newcap, self.cells), dtype=np.uint8)
        tab[: self.count_] = np.asarray(self.tab[: self.count_])
        self.tab = tab
        darr = np.full((newcap, 1 + self.max_fund_arity), -1, dtype=np.int32)
        darr[: self.count_] = np.asarray(self.def_arr[: self.count_])
        self.def_arr = darr
        if self.dense:
            pk = np.zeros(newcap, dtype=np.int64)
            pk[: self.count_] = np.asarray(self.packed[: self.count_])
            self.packed = pk
            oh = np.zeros(newcap, dtype=np.int32)
            oh[: self.count_] = np.asarray(self.op_hi[: self.count_])
            self.op_hi = oh
            ol = np.zeros(newcap, dtype=np.int32)
            ol[: self.count_] = np.asarray(self.op_lo[: self.count_])
            self.op_lo = ol
        self.capacity = newcap

    cdef inline bint _bit_test_set(self, i64 key) noexcept nogil:
        # returns True if the bit was already set
        cdef i64 byte = key >> 3
        cdef u8 mask = <u8>(1 << (key & 7))
        if self.seen_bits[byte] & mask:
            return True
        self.seen_bits[byte] = self.seen_bits[byte] | mask
        return False

    cdef inline int _hash_lookup_add(self, const u8 *row):
        # returns existing op index, or -1 after reserving a slot for count_
        cdef u64 h = fnv1a(row, self.cells)
        cdef i64 mask = self.n_slots - 1
        cdef i64 pos = <i64>(h & <u64>mask)
        cdef i64 entry
        cdef int idx
        while True:
            entry = self.slots[pos]
            if entry == 0:
                self.slots[pos] = self.count_ + 1
                return -1
            idx = <int>(entry - 1)
            if memcmp(&self.tab[idx, 0], row, self.cells) == 0:
                return idx
            pos = (pos + 1) & mask

    cdef int _append(self, const u8 *row, i64 key, int sym, const int *parents, int m):
        # key < 0 in hash mode
        cdef int t
        if self.count_ == self.capacity:
            self._grow()
        memcpy(&self.tab[self.count_, 0], row, self.cells)
        self.def_arr[self.count_, 0] = sym
        if sym < 0:
            self.def_arr[self.count_, 1] = parents[0]
        else:
            for t in range(m):
                self.def_arr[self.count_, 1 + t] = parents[t]
        if self.dense:
            self.packed[self.count_] = key
            self.op_hi[self.count_] = <int>(key // self.lo_n)
            self.op_lo[self.count_] = <int>(key % self.lo_n)
        self.count_ += 1
        return self.count_ - 1

    def add_projection(self, int j):
        if self.count_ >= self.cap:
            self.capped = True
            return False
        cdef u8 *row = <u8 *>malloc(self.cells)
        cdef int c
        cdef i64 key = 0
        cdef int div = int(self.n) ** int(self.arity - 1 - j)
        for c in range(self.cells):
            row[c] = <u8>((c / div) % self.n)
        cdef int parents[1]
        parents[0] = j
        cdef bint added = False
        if self.dense:
            for c in range(self.cells):
                key = key * self.n + row[c]
            if not self._bit_test_set(key):
                self._append(row, key, -1, parents, 0)
                added = True
        else:
            if self._hash_lookup_add(row) < 0:
                self._append(row, -1, -1, parents, 0)
                added = True
        free(row)
        return added

    cdef object _half_tables_for(self, int sym):
        """Digitwise composition tables over packed half-rows (binary sym)."""
        cached = self.half_tables.get(sym)
        if cached is not None:
            return cached
        fund = self.fund_np[sym]
        cdef const u8[::1] f = fund
        cdef int n = self.n
        thi = np.zeros(self.hi_n * self.hi_n, dtype=np.int32)
        tlo = np.zeros(self.lo_n * self.lo_n, dtype=np.int32)
        cdef int[::1] thi_v = thi
        cdef int[::1] tlo_v = tlo
        cdef int a, b, d, ra, rb, out, mul, width
        width = self.hi_cells
        for a in range(self.hi_n):
            for b in range(self.hi_n):
                ra = a
                rb = b
                out = 0
                mul = 1
                for d in range(width):
                    out += (<int>f[(ra % n) * n + (rb % n)]) * mul
                    mul *= n
                    ra //= n
                    rb //= n
                thi_v[a * self.hi_n + b] = out
        width = self.lo_cells
        for a in range(self.lo_n):
            for b in range(self.lo_n):
                ra = a
                rb = b
                out = 0
                mul = 1
                for d in range(width):
                    out += (<int>f[(ra % n) * n + (rb % n)]) * mul
                    mul *= n
                    ra //= n
                    rb //= n
                tlo_v[a * self.lo_n + b] = out
        self.half_tables[sym] = (thi, tlo)
        return self.half_tables[sym]

    def compose_batch(self, int sym, pools):
        """Cartesian product of the id pools through symbol sym; dedup-append."""
        if self.capped:
            return 0
        cdef int m = self.fund_arities_list[sym]
        if len(pools) != m:
            raise ValueError("pool count must equal symbol arity")
        cdef int added = 0
        views = [np.ascontiguousarray(p, dtype=np.int32) for p in pools]
        cdef Py_ssize_t t
        for t in range(m):
            if views[t].shape[0] == 0:
                return 0
        if self.dense and m == 2:
            added = self._compose_halves(sym, views[0], views[1])
        else:
            added = self._compose_generic(sym, views)
        return added

    cdef int _compose_halves(self, int sym, int[::1] left, int[::1] right):
        thi_np, tlo_np = self._half_tables_for(sym)
        cdef const int[::1] thi = thi_np
        cdef const int[::1] tlo = tlo_np
        cdef Py_ssize_t i, j, nl = left.shape[0], nr = right.shape[0]
        cdef int g, h, ghi, glo
        cdef i64 key
        cdef int added = 0
        cdef int parents[2]
        cdef u8 row[64]
        cdef i64 rem
        cdef int c
        cdef bint full = False
        for i in range(nl):
            g = left[i]
            ghi = self.op_hi[g] * self.hi_n
            glo = self.op_lo[g] * self.lo_n
            for j in range(nr):
                h = right[j]
                key = (<i64>thi[ghi + self.op_hi[h]]) * self.lo_n + tlo[glo + self.op_lo[h]]
                if self._bit_test_set(key):
                    continue
                if self.count_ >= self.cap:
                    self.capped = True
                    return added
                rem = key
                for c in range(self.cells - 1, -1, -1):
                    row[c] = <u8>(rem % self.n)
                    rem //= self.n
                parents[0] = g
                parents[1] = h
                self._append(row, key, sym, parents, 2)
                added += 1
                if self.count_ >= self.full_count:
                    full = True
                    break
            if full:
                break
        return added

    cdef int _compose_generic(self, int sym, list views):
        cdef int m = self.fund_arities_list[sym]
        cdef const u8[::1] fund = self.fund_np[sym]
        cdef int added = 0
        cdef int parents[8]
        cdef Py_ssize_t ctr[8]
        cdef const int *pool_ptr[8]
        cdef Py_ssize_t pool_len[8]
        cdef int[::1] mv
        cdef Py_ssize_t t, total = 1
        for t in range(m):
            mv = views[t]
            pool_ptr[t] = &mv[0]
            pool_len[t] = mv.shape[0]
            total *= pool_len[t]
            ctr[t] = 0
        cdef u8 *row = <u8 *>malloc(self.cells)
        cdef Py_ssize_t it, c
        cdef int idx, existing
        cdef i64 key
        cdef int n = self.n
        try:
            for it in range(total):
                for t in range(m):
                    parents[t] = pool_ptr[t][ctr[t]]
                key = 0
                for c in range(self.cells):
                    idx = self.tab[parents[0], c]
                    for t in range(1, m):
                        idx = idx * n + self.tab[parents[t], c]
                    row[c] = fund[idx]
                    if self.dense:
                        key = key * n + row[c]
                if self.dense:
                    if not self._bit_test_set(key):
                        if self.count_ >= self.cap:
                            self.capped = True
                            break
                        self._append(row, key, sym, parents, m)
                        added += 1
                        if self.count_ >= self.full_count:
                            break
                else:
                    existing = self._hash_lookup_add(row)
                    if existing < 0:
                        if self.count_ >= self.cap:
                            self.capped = True
                            break
                        self._append(row, -1, sym, parents, m)
                        added += 1
                # odometer
                t = m - 1
                while t >= 0:
                    ctr[t] += 1
                    if ctr[t] < pool_len[t]:
                        break
                    ctr[t] = 0
                    t -= 1
        finally:
            free(row)
        return added

    def tables(self):
        return np.asarray(self.tab[: self.count_]).copy()

    def defs(self):
        return np.asarray(self.def_arr[: self.count_]).copy()


# ---------------------------------------------------------------------------
# Scan kernels (single-symbol signatures)
# ---------------------------------------------------------------------------

cdef struct DagCtx:
    const int *defs
    int def_width
    const u8 *fund
    int fund_arity
    int n
    Py_ssize_t env
    u8 *memo        # n_ops x env
    i64 *stamp      # n_ops
    i64 tick
    const u8 **args  # current binding


cdef const u8 *dag_eval(DagCtx *ctx, int op) noexcept nogil:
    cdef u8 *slot = ctx.memo + (<Py_ssize_t>op) * ctx.env
    if ctx.stamp[op] == ctx.tick:
        return slot
    cdef const int *d = ctx.defs + op * ctx.def_width
    cdef Py_ssize_t e
    cdef const u8 *p0
    cdef const u8 *p1
    cdef int t, idx
    if d[0] < 0:
        p0 = ctx.args[d[1]]
        memcpy(slot, p0, ctx.env)
    elif ctx.fund_arity == 2:
        p0 = dag_eval(ctx, d[1])
        p1 = dag_eval(ctx, d[2])
        for e in range(ctx.env):
            slot[e] = ctx.fund[p0[e] * ctx.n + p1[e]]
    else:
        # general arity: evaluate parents first, then gather
        for t in range(ctx.fund_arity):
            dag_eval(ctx, d[1 + t])
        for e in range(ctx.env):
            idx = ctx.memo[(<Py_ssize_t>d[1]) * ctx.env + e]
            for t in range(1, ctx.fund_arity):
                idx = idx * ctx.n + ctx.memo[(<Py_ssize_t>d[1 + t]) * ctx.env + e]
            slot[e] = ctx.fund[idx]
    ctx.stamp[op] = ctx.tick
    return slot


cdef bint eval_code_hsub(DagCtx *ctx, const int *code, Py_ssize_t code_len,
                         const u8 *var_tables, int image_op, u8 *stack) noexcept nogil:
    """Evaluate sigma(term) into stack slot 0; sigma maps the sole symbol to
    slice op image_op, read against the fundamental tables."""
    cdef Py_ssize_t sp = 0, i
    cdef int op, m, t
    cdef const u8 *res
    cdef const u8 *argp[8]
    for i in range(code_len):
        op = code[i]
        if op < 0:
            memcpy(stack + sp * ctx.env, var_tables + (<Py_ssize_t>(-1 - op)) * ctx.env, ctx.env)
            sp += 1
        else:
            m = ctx.fund_arity
            for t in range(m):
                argp[t] = stack + (sp - m + t) * ctx.env
            ctx.args = argp
            ctx.tick += 1
            res = dag_eval(ctx, image_op)
            memcpy(stack + (sp - m) * ctx.env, res, ctx.env)
            sp -= m - 1
    return True


def lhs_scan_axiom(fund_tables, fund_arities, int n, int k,
                   defs, prem_l, prem_r, concl_l, concl_r):
    """First (sigma, env) where the sigma-image of the axiom fails in the
    base algebra, scanning sigma over the slice definitions; (-1,-1) if none."""
    cdef const int[:, ::1] defs_v = np.ascontiguousarray(defs, dtype=np.int32)
    cdef int n_ops = defs_v.shape[0]
    cdef int def_width = defs_v.shape[1]
    fund0 = np.ascontiguousarray(fund_tables[0], dtype=np.uint8)
    cdef const u8[::1] fund_v = fund0
    cdef int fund_arity = int(fund_arities[0])
    cdef Py_ssize_t env = int(n) ** int(k)

    var_np = _var_tables_np(n, k)
    cdef const u8[:, ::1] var_v = var_np

    codes = [np.ascontiguousarray(c, dtype=np.int32) for c in list(prem_l) + list(prem_r)]
    codes.append(np.ascontiguousarray(concl_l, dtype=np.int32))
    codes.append(np.ascontiguousarray(concl_r, dtype=np.int32))
    cdef int n_prem = len(prem_l)

    cdef Py_ssize_t max_len = 1
    for c in codes:
        if c.shape[0] > max_len:
            max_len = c.shape[0]

    memo_np = np.zeros(n_ops * env, dtype=np.uint8)
    stamp_np = np.zeros(n_ops, dtype=np.int64)
    stack_np = np.zeros((max_len + 1) * env, dtype=np.uint8)
    out_np = np.zeros((2 * n_prem + 2) * env, dtype=np.uint8)
    ok_np = np.zeros(env, dtype=np.uint8)
    cdef u8[::1] memo_v = memo_np
    cdef i64[::1] stamp_v = stamp_np
    cdef u8[::1] stack_v = stack_np
    cdef u8[::1] out_v = out_np
    cdef u8[::1] ok_v = ok_np

    cdef DagCtx ctx
    ctx.defs = &defs_v[0, 0]
    ctx.def_width = def_width
    ctx.fund = &fund_v[0]
    ctx.fund_arity = fund_arity
    ctx.n = n
    ctx.env = env
    ctx.memo = &memo_v[0]
    ctx.stamp = &stamp_v[0]
    ctx.tick = 0

    cdef const int *code_ptr[64]
    cdef Py_ssize_t code_len[64]
    cdef const int[::1] cv
    cdef Py_ssize_t ci
    code_views = []
    for ci in range(len(codes)):
        cv = codes[ci]
        code_views.append(cv)
        code_ptr[ci] = &cv[0]
        code_len[ci] = cv.shape[0]

    cdef int s, p
    cdef Py_ssize_t e
    cdef bint any_ok
    cdef u8 *ok = &ok_v[0]
    cdef u8 *outp = &out_v[0]
    cdef int n_codes = len(codes)

    for s in range(n_ops):
        # premises
        for e in range(env):
            ok[e] = 1
        any_ok = True
        for p in range(n_prem):
            eval_code_hsub(&ctx, code_ptr[p], code_len[p], &var_v[0, 0], s,
                           &stack_v[0])
            memcpy(outp + (2 * p) * env, &stack_v[0], env)
            eval_code_hsub(&ctx, code_ptr[n_prem + p], code_len[n_prem + p],
                           &var_v[0, 0], s, &stack_v[0])
            memcpy(outp + (2 * p + 1) * env, &stack_v[0], env)
            any_ok = False
            for e in range(env):
                if ok[e] and outp[2 * p * env + e] == outp[(2 * p + 1) * env + e]:
                    any_ok = True
                else:
                    ok[e] = 0
            if not any_ok:
                break
        if not any_ok:
            continue
        eval_code_hsub(&ctx, code_ptr[n_codes - 2], code_len[n_codes - 2],
                       &var_v[0, 0], s, &stack_v[0])
        memcpy(outp, &stack_v[0], env)
        eval_code_hsub(&ctx, code_ptr[n_codes - 1], code_len[n_codes - 1],
                       &var_v[0, 0], s, &stack_v[0])
        for e in range(env):
            if ok[e] and outp[e] != stack_v[e]:
                return s, <int>e
    return -1, -1


def rhs_scan_axiom(slice_tables, int m, int n, int k,
                   prem_l, prem_r, concl_l, concl_r):
    """First (choice, env) violating the axiom when the single symbol is
    interpreted by slice_tables[choice]; (-1,-1) if none."""
    cdef const u8[:, ::1] tabs = np.ascontiguousarray(slice_tables, dtype=np.uint8)
    cdef int n_ops = tabs.shape[0]
    cdef Py_ssize_t env = int(n) ** int(k)
    var_np = _var_tables_np(n, k)
    cdef const u8[:, ::1] var_v = var_np

    codes = [np.ascontiguousarray(c, dtype=np.int32) for c in list(prem_l) + list(prem_r)]
    codes.append(np.ascontiguousarray(concl_l, dtype=np.int32))
    codes.append(np.ascontiguousarray(concl_r, dtype=np.int32))
    cdef int n_prem = len(prem_l)
    cdef Py_ssize_t max_len = 1
    for c in codes:
        if c.shape[0] > max_len:
            max_len = c.shape[0]

    stack_np = np.zeros((max_len + 1) * env, dtype=np.uint8)
    out_np = np.zeros(env, dtype=np.uint8)
    ok_np = np.zeros(env, dtype=np.uint8)
    cdef u8[::1] stack_v = stack_np
    cdef u8[::1] out_v = out_np
    cdef u8[::1] ok_v = ok_np

    cdef const int *code_ptr[64]
    cdef Py_ssize_t code_len[64]
    cdef const int[::1] cv
    cdef Py_ssize_t ci
    code_views = []
    for ci in range(len(codes)):
        cv = codes[ci]
        code_views.append(cv)
        code_ptr[ci] = &cv[0]
        code_len[ci] = cv.shape[0]
    cdef int n_codes = len(codes)

    cdef int choice, p
    cdef Py_ssize_t e
    cdef bint any_ok

    for choice in range(n_ops):
        for e in range(env):
            ok_v[e] = 1
        any_ok = True
        for p in range(n_prem):
            _eval_plain(code_ptr[p], code_len[p], &var_v[0, 0], &tabs[choice, 0],
                        m, n, env, &stack_v[0])
            memcpy(&out_v[0], &stack_v[0], env)
            _eval_plain(code_ptr[n_prem + p], code_len[n_prem + p], &var_v[0, 0],
                        &tabs[choice, 0], m, n, env, &stack_v[0])
            any_ok = False
            for e in range(env):
                if ok_v[e] and out_v[e] == stack_v[e]:
                    any_ok = True
                else:
                    ok_v[e] = 0
            if not any_ok:
                break
        if not any_ok:
            continue
        _eval_plain(code_ptr[n_codes - 2], code_len[n_codes - 2], &var_v[0, 0],
                    &tabs[choice, 0], m, n, env, &stack_v[0])
        memcpy(&out_v[0], &stack_v[0], env)
        _eval_plain(code_ptr[n_codes - 1], code_len[n_codes - 1], &var_v[0, 0],
                    &tabs[choice, 0], m, n, env, &stack_v[0])
        for e in range(env):
            if ok_v[e] and out_v[e] != stack_v[e]:
                return choice, <int>e
    return -1, -1


cdef void _eval_plain(const int *code, Py_ssize_t code_len, const u8 *var_tables,
                      const u8 *table, int m, int n, Py_ssize_t env, u8 *stack) noexcept nogil:
    cdef Py_ssize_t sp = 0, i, e
    cdef int op, t, idx
    for i in range(code_len):
        op = code[i]
        if op < 0:
            memcpy(stack + sp * env, var_tables + (<Py_ssize_t>(-1 - op)) * env, env)
            sp += 1
        else:
            for e in range(env):
                idx = stack[(sp - m) * env + e]
                for t in range(1, m):
                    idx = idx * n + stack[(sp - m + t) * env + e]
                stack[(sp - m) * env + e] = table[idx]
            sp -= m - 1


def _var_tables_np(int n, int k):
    size = int(n) ** int(k) if k > 0 else 1
    idx = np.arange(size, dtype=np.int64)
    out = np.empty((max(k, 1), size), dtype=np.uint8)
    for i in range(k):
        out[i] = (idx // (int(n) ** int(k - 1 - i))) % n
    if k == 0:
        out = np.zeros((1, 1), dtype=np.uint8)
    return np.ascontiguousarray(out)
