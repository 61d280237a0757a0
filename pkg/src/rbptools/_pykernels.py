"""Pure-Python BFS kernels; reference behaviour for the compiled module."""

from collections import deque

import numpy as np


def bfs(indptr, indices, sources, blocked=None, limit=-1):
    """Multi-source BFS; returns (dist, parent), -1 where unreached."""
    n = len(indptr) - 1
    ip = np.asarray(indptr).tolist()
    ix = np.asarray(indices).tolist()
    blk = None if blocked is None else np.asarray(blocked).astype(bool).tolist()
    dist = [-1] * n
    parent = [-1] * n
    queue = deque()
    for s in np.atleast_1d(sources).tolist():
        if blk is not None and blk[s]:
            continue
        if dist[s] == -1:
            dist[s] = 0
            queue.append(s)
    while queue:
        u = queue.popleft()
        du = dist[u]
        if 0 <= limit <= du:
            continue
        for v in ix[ip[u]:ip[u + 1]]:
            if dist[v] != -1 or (blk is not None and blk[v]):
                continue
            dist[v] = du + 1
            parent[v] = u
            queue.append(v)
    return np.array(dist, dtype=np.int32), np.array(parent, dtype=np.int32)


def distance_rows(indptr, indices, sources):
    """One BFS row per source, shape (len(sources), n), int32."""
    sources = np.atleast_1d(sources).tolist()
    n = len(indptr) - 1
    out = np.empty((len(sources), n), dtype=np.int32)
    for r, s in enumerate(sources):
        out[r] = bfs(indptr, indices, [s])[0]
    return out


def component_labels(indptr, indices, blocked=None):
    """Connected-component labels of the unblocked subgraph; -1 on blocked."""
    n = len(indptr) - 1
    ip = np.asarray(indptr).tolist()
    ix = np.asarray(indices).tolist()
    blk = None if blocked is None else np.asarray(blocked).astype(bool).tolist()
    labels = [-1] * n
    comp = 0
    for s in range(n):
        if labels[s] != -1 or (blk is not None and blk[s]):
            continue
        labels[s] = comp
        stack = [s]
        while stack:
            u = stack.pop()
            for v in ix[ip[u]:ip[u + 1]]:
                if labels[v] == -1 and (blk is None or not blk[v]):
                    labels[v] = comp
                    stack.append(v)
        comp += 1
    return np.array(labels, dtype=np.int32)
