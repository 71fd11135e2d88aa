# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: Ord subset DP and the exhaustive cover searches.

Mirrors ``_pycore``; any change there must be made here too.
"""

from libc.stdlib cimport malloc, calloc, free

cdef enum:
    FOUND = 1
    NONE = 0
    BUDGET = -1


def ord_dp(masks, int width):
    cdef Py_ssize_t size, s, b, bit, sb
    cdef unsigned char *up
    cdef signed char *val
    cdef int best
    if len(masks) == 0:
        return 0
    size = (<Py_ssize_t>1) << width
    up = <unsigned char *>calloc(size, 1)
    val = <signed char *>calloc(size, 1)
    if up == NULL or val == NULL:
        free(up)
        free(val)
        raise MemoryError()
    try:
        for m in masks:
            up[<Py_ssize_t>m] = 1
        for b in range(width):
            bit = (<Py_ssize_t>1) << b
            for s in range(size):
                if not (s & bit) and up[s | bit]:
                    up[s] = 1
        for s in range(size - 1, -1, -1):
            best = -1
            for b in range(width):
                bit = (<Py_ssize_t>1) << b
                if not (s & bit):
                    sb = s | bit
                    if up[sb] and val[sb] > best:
                        best = val[sb]
            val[s] = best + 1 if best >= 0 else 0
        return int(val[0])
    finally:
        free(up)
        free(val)


cdef class _Search:
    cdef int n, m, bound
    cdef long long budget, nodes
    cdef int *nbr_off     # m*(n+1)
    cdef int *nbr         # concatenated neighbour lists
    cdef int *fam
    cdef int *trail
    cdef int trail_len

    def __cinit__(self, *args, **kwargs):
        self.nbr_off = NULL
        self.nbr = NULL
        self.fam = NULL
        self.trail = NULL
        self.nodes = 0
        self.trail_len = 0

    def __dealloc__(self):
        free(self.nbr_off)
        free(self.nbr)
        free(self.fam)
        free(self.trail)

    cdef int close(self, int p, int q, int r):
        return 0

    cdef void setup(self, int n, radii, int bound, long long budget):
        cdef int m = len(radii), p, q, i, r, total, k
        self.n = n
        self.m = m
        self.bound = bound
        self.budget = budget
        self.nbr_off = <int *>malloc(m * (n + 1) * sizeof(int))
        self.fam = <int *>malloc(max(n, 1) * sizeof(int))
        self.trail = <int *>malloc(max(n, 1) * sizeof(int))
        for p in range(n):
            self.fam[p] = -1
        total = 0
        for i in range(m):
            r = radii[i]
            for p in range(n):
                self.nbr_off[i * (n + 1) + p] = total
                for q in range(n):
                    if q != p and self.close(p, q, r):
                        total += 1
            self.nbr_off[i * (n + 1) + n] = total
        self.nbr = <int *>malloc(max(total, 1) * sizeof(int))
        k = 0
        for i in range(m):
            r = radii[i]
            for p in range(n):
                for q in range(n):
                    if q != p and self.close(p, q, r):
                        self.nbr[k] = q
                        k += 1

    cdef bint feasible(self, int p, int i):
        return False

    cdef void assign(self, int p, int i):
        self.fam[p] = i
        self.trail[self.trail_len] = p
        self.trail_len += 1

    cdef void undo(self, int mark):
        while self.trail_len > mark:
            self.trail_len -= 1
            self.fam[self.trail[self.trail_len]] = -1

    cdef int propagate(self, int *pick):
        cdef int q, i, count, last, pick_count
        cdef bint changed
        while True:
            changed = False
            pick[0] = -1
            pick_count = self.m + 1
            for q in range(self.n):
                if self.fam[q] != -1:
                    continue
                count = 0
                last = -1
                for i in range(self.m):
                    if self.feasible(q, i):
                        count += 1
                        last = i
                if count == 0:
                    return 0
                if count == 1:
                    self.assign(q, last)
                    changed = True
                elif count < pick_count:
                    pick[0] = q
                    pick_count = count
            if not changed:
                return 1

    cdef int rec(self, int pick):
        cdef int i, status, mark, nxt
        self.nodes += 1
        if self.nodes > self.budget:
            return BUDGET
        if pick < 0:
            return FOUND
        for i in range(self.m):
            if not self.feasible(pick, i):
                continue
            mark = self.trail_len
            self.assign(pick, i)
            if self.propagate(&nxt):
                status = self.rec(nxt)
                if status != NONE:
                    return status
            self.undo(mark)
        return NONE

    def run(self):
        cdef int pick
        if not self.propagate(&pick):
            self.nodes = 1
            return NONE
        return self.rec(pick)

    def assignment(self):
        return [self.fam[p] for p in range(self.n)]

    @property
    def node_count(self):
        return self.nodes


cdef class _MatrixSearch(_Search):
    cdef int *dist        # n*n
    cdef int *comp
    cdef int *seen
    cdef int stamp

    def __init__(self, dist, radii, int bound, long long budget):
        cdef int n = len(dist), p, q
        self.stamp = 0
        self.dist = <int *>malloc(max(n * n, 1) * sizeof(int))
        self.comp = <int *>malloc(max(n, 1) * sizeof(int))
        self.seen = <int *>calloc(max(n, 1), sizeof(int))
        for p in range(n):
            row = dist[p]
            for q in range(n):
                self.dist[p * n + q] = row[q]
        self.setup(n, radii, bound, budget)

    def __dealloc__(self):
        free(self.dist)
        free(self.comp)
        free(self.seen)

    cdef int close(self, int p, int q, int r):
        return self.dist[p * self.n + q] < r

    cdef bint feasible(self, int p, int i):
        cdef int n = self.n, bound = self.bound
        cdef int size = 1, k = 0, x, q, j, a, b, ca
        cdef int *dp = self.dist + p * n
        cdef int *off = self.nbr_off + i * (n + 1)
        self.stamp += 1
        self.seen[p] = self.stamp
        self.comp[0] = p
        while k < size:
            x = self.comp[k]
            k += 1
            for j in range(off[x], off[x + 1]):
                q = self.nbr[j]
                if self.seen[q] != self.stamp and self.fam[q] == i:
                    if dp[q] > bound:
                        return False
                    self.seen[q] = self.stamp
                    self.comp[size] = q
                    size += 1
        for a in range(1, size):
            ca = self.comp[a] * n
            for b in range(a + 1, size):
                if self.dist[ca + self.comp[b]] > bound:
                    return False
        return True


cdef class _BoxSearch(_Search):
    cdef int dim
    cdef long long *coords   # n*dim
    cdef long long *lo       # n*dim, valid at roots
    cdef long long *hi
    cdef long long *tmp      # 2*dim scratch
    cdef int *parent
    cdef int *seen
    cdef int stamp
    # union stack: child, root, saved root box (2*dim)
    cdef int *u_child
    cdef int *u_root
    cdef long long *u_box
    cdef int u_len
    cdef int *marks
    cdef int marks_len

    def __init__(self, coords, radii, int bound, long long budget):
        cdef int n = len(coords), p, a
        self.dim = len(coords[0]) if n else 0
        self.stamp = 0
        self.u_len = 0
        self.marks_len = 0
        d = max(self.dim, 1)
        self.coords = <long long *>malloc(max(n, 1) * d * sizeof(long long))
        self.lo = <long long *>malloc(max(n, 1) * d * sizeof(long long))
        self.hi = <long long *>malloc(max(n, 1) * d * sizeof(long long))
        self.tmp = <long long *>malloc(2 * d * sizeof(long long))
        self.parent = <int *>malloc(max(n, 1) * sizeof(int))
        self.seen = <int *>calloc(max(n, 1), sizeof(int))
        self.u_child = <int *>malloc(max(n, 1) * sizeof(int))
        self.u_root = <int *>malloc(max(n, 1) * sizeof(int))
        self.u_box = <long long *>malloc(max(n, 1) * 2 * d * sizeof(long long))
        self.marks = <int *>malloc(max(n, 1) * sizeof(int))
        for p in range(n):
            c = coords[p]
            self.parent[p] = p
            for a in range(self.dim):
                self.coords[p * self.dim + a] = c[a]
                self.lo[p * self.dim + a] = c[a]
                self.hi[p * self.dim + a] = c[a]
        self.setup(n, radii, bound, budget)

    def __dealloc__(self):
        free(self.coords)
        free(self.lo)
        free(self.hi)
        free(self.tmp)
        free(self.parent)
        free(self.seen)
        free(self.u_child)
        free(self.u_root)
        free(self.u_box)
        free(self.marks)

    cdef int close(self, int p, int q, int r):
        cdef int a
        cdef long long diff
        for a in range(self.dim):
            diff = self.coords[p * self.dim + a] - self.coords[q * self.dim + a]
            if diff >= r or -diff >= r:
                return 0
        return 1

    cdef inline int find(self, int x):
        while self.parent[x] != x:
            x = self.parent[x]
        return x

    cdef bint feasible(self, int p, int i):
        cdef int dim = self.dim, n = self.n, j, q, r, a
        cdef long long *lo = self.tmp
        cdef long long *hi = self.tmp + dim
        cdef int *off = self.nbr_off + i * (n + 1)
        for a in range(dim):
            lo[a] = self.coords[p * dim + a]
            hi[a] = lo[a]
        self.stamp += 1
        for j in range(off[p], off[p + 1]):
            q = self.nbr[j]
            if self.fam[q] != i:
                continue
            r = self.find(q)
            if self.seen[r] == self.stamp:
                continue
            self.seen[r] = self.stamp
            for a in range(dim):
                if self.lo[r * dim + a] < lo[a]:
                    lo[a] = self.lo[r * dim + a]
                if self.hi[r * dim + a] > hi[a]:
                    hi[a] = self.hi[r * dim + a]
                if hi[a] - lo[a] > self.bound:
                    return False
        return True

    cdef void assign(self, int p, int i):
        cdef int dim = self.dim, n = self.n, j, q, a, b, k
        cdef int *off = self.nbr_off + i * (n + 1)
        self.marks[self.marks_len] = self.u_len
        self.marks_len += 1
        self.fam[p] = i
        self.trail[self.trail_len] = p
        self.trail_len += 1
        for j in range(off[p], off[p + 1]):
            q = self.nbr[j]
            if self.fam[q] != i:
                continue
            a = self.find(p)
            b = self.find(q)
            if a == b:
                continue
            self.u_child[self.u_len] = a
            self.u_root[self.u_len] = b
            for k in range(dim):
                self.u_box[self.u_len * 2 * dim + k] = self.lo[b * dim + k]
                self.u_box[self.u_len * 2 * dim + dim + k] = self.hi[b * dim + k]
            self.u_len += 1
            self.parent[a] = b
            for k in range(dim):
                if self.lo[a * dim + k] < self.lo[b * dim + k]:
                    self.lo[b * dim + k] = self.lo[a * dim + k]
                if self.hi[a * dim + k] > self.hi[b * dim + k]:
                    self.hi[b * dim + k] = self.hi[a * dim + k]

    cdef void undo(self, int mark):
        cdef int dim = self.dim, stop, a, b, k
        while self.trail_len > mark:
            self.trail_len -= 1
            self.fam[self.trail[self.trail_len]] = -1
            self.marks_len -= 1
            stop = self.marks[self.marks_len]
            while self.u_len > stop:
                self.u_len -= 1
                a = self.u_child[self.u_len]
                b = self.u_root[self.u_len]
                self.parent[a] = a
                for k in range(dim):
                    self.lo[b * dim + k] = self.u_box[self.u_len * 2 * dim + k]
                    self.hi[b * dim + k] = self.u_box[self.u_len * 2 * dim + dim + k]


def _run(_Search s):
    status = s.run()
    return status, (s.assignment() if status == FOUND else []), s.node_count


def cover_search(dist, radii, int bound, long long node_budget):
    if len(dist) == 0:
        return FOUND, [], 0
    return _run(_MatrixSearch(dist, list(radii), bound, node_budget))


def cover_search_box(coords, radii, int bound, long long node_budget):
    if len(coords) == 0:
        return FOUND, [], 0
    return _run(_BoxSearch(coords, list(radii), bound, node_budget))
