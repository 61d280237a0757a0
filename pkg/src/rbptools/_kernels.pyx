# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled BFS kernels over CSR adjacency (int32 indptr/indices).

Signatures mirror :mod:`rbptools._pykernels` exactly; the selection
happens in :mod:`rbptools.kernels`.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef void _bfs(const int* indptr, const int* indices, int n,
               const int* sources, int nsrc,
               const unsigned char* blocked, int limit,
               int* dist, int* parent, int* queue) noexcept nogil:
    cdef int i, head = 0, tail = 0, u, v, k, du
    for i in range(n):
        dist[i] = -1
        if parent != NULL:
            parent[i] = -1
    for i in range(nsrc):
        u = sources[i]
        if blocked != NULL and blocked[u]:
            continue
        if dist[u] == -1:
            dist[u] = 0
            queue[tail] = u
            tail += 1
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u]
        if limit >= 0 and du >= limit:
            continue
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            if dist[v] != -1:
                continue
            if blocked != NULL and blocked[v]:
                continue
            dist[v] = du + 1
            if parent != NULL:
                parent[v] = u
            queue[tail] = v
            tail += 1


def bfs(indptr, indices, sources, blocked=None, int limit=-1):
    """Multi-source BFS; returns (dist, parent), -1 where unreached."""
    cdef const int[::1] ip = np.ascontiguousarray(indptr, dtype=np.int32)
    cdef const int[::1] ix = np.ascontiguousarray(indices, dtype=np.int32)
    cdef const int[::1] src = np.ascontiguousarray(np.atleast_1d(sources), dtype=np.int32)
    cdef int n = ip.shape[0] - 1
    dist_a = np.empty(n, dtype=np.int32)
    parent_a = np.empty(n, dtype=np.int32)
    queue_a = np.empty(max(n, 1), dtype=np.int32)
    cdef int[::1] dist = dist_a
    cdef int[::1] parent = parent_a
    cdef int[::1] queue = queue_a
    cdef const unsigned char[::1] blk
    cdef const unsigned char* bp = NULL
    if blocked is not None:
        blk = np.ascontiguousarray(blocked, dtype=np.uint8)
        bp = &blk[0] if n > 0 else NULL
    if n == 0:
        return dist_a, parent_a
    cdef const int* srcp = &src[0] if src.shape[0] > 0 else NULL
    with nogil:
        _bfs(&ip[0], &ix[0] if ix.shape[0] > 0 else NULL, n, srcp, src.shape[0],
             bp, limit, &dist[0], &parent[0], &queue[0])
    return dist_a, parent_a


def distance_rows(indptr, indices, sources):
    """One BFS row per source, shape (len(sources), n), int32."""
    cdef const int[::1] ip = np.ascontiguousarray(indptr, dtype=np.int32)
    cdef const int[::1] ix = np.ascontiguousarray(indices, dtype=np.int32)
    cdef const int[::1] src = np.ascontiguousarray(np.atleast_1d(sources), dtype=np.int32)
    cdef int n = ip.shape[0] - 1
    cdef int m = src.shape[0]
    out_a = np.empty((m, n), dtype=np.int32)
    if n == 0 or m == 0:
        return out_a
    cdef int[:, ::1] out = out_a
    queue_a = np.empty(n, dtype=np.int32)
    cdef int[::1] queue = queue_a
    cdef int r, s
    cdef const int* ixp = &ix[0] if ix.shape[0] > 0 else NULL
    with nogil:
        for r in range(m):
            s = src[r]
            _bfs(&ip[0], ixp, n, &s, 1, NULL, -1, &out[r, 0], NULL, &queue[0])
    return out_a


def component_labels(indptr, indices, blocked=None):
    """Connected-component labels of the unblocked subgraph; -1 on blocked."""
    cdef const int[::1] ip = np.ascontiguousarray(indptr, dtype=np.int32)
    cdef const int[::1] ix = np.ascontiguousarray(indices, dtype=np.int32)
    cdef int n = ip.shape[0] - 1
    labels_a = np.full(n, -1, dtype=np.int32)
    if n == 0:
        return labels_a
    cdef int[::1] labels = labels_a
    queue_a = np.empty(n, dtype=np.int32)
    cdef int[::1] queue = queue_a
    cdef const unsigned char[::1] blk
    cdef const unsigned char* bp = NULL
    if blocked is not None:
        blk = np.ascontiguousarray(blocked, dtype=np.uint8)
        bp = &blk[0]
    cdef int s, u, v, k, head, tail, comp = 0
    with nogil:
        for s in range(n):
            if labels[s] != -1 or (bp != NULL and bp[s]):
                continue
            labels[s] = comp
            head = 0
            tail = 1
            queue[0] = s
            while head < tail:
                u = queue[head]
                head += 1
                for k in range(ip[u], ip[u + 1]):
                    v = ix[k]
                    if labels[v] == -1 and (bp == NULL or not bp[v]):
                        labels[v] = comp
                        queue[tail] = v
                        tail += 1
            comp += 1
    return labels_a
