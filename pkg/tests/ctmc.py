"""Brute-force CTMC oracle for tiny SIR epidemics.

Independent of the simulator: enumerates the full state space of a small
weighted graph and propagates absorption probabilities through the embedded
jump chain (every transition strictly increases #I + 2*#R, so the state
graph is acyclic).
"""

from collections import defaultdict
from functools import lru_cache

S, I, R = 0, 1, 2


def final_size_distribution(edges, n, initial_infected, tau, gamma):
    """Exact distribution of the final number of ever-infected vertices.

    edges: list of (u, v, weight); initial_infected: iterable of vertex ids.
    Returns {final_recovered_count: probability}.
    """
    adj = defaultdict(list)
    for u, v, w in edges:
        adj[u].append((v, w))
        adj[v].append((u, w))

    start = [S] * n
    for v in initial_infected:
        start[v] = I

    @lru_cache(maxsize=None)
    def dist(state):
        moves = []
        for v in range(n):
            if state[v] != I:
                continue
            moves.append((v, R, gamma))
            for u, w in adj[v]:
                if state[u] == S:
                    moves.append((u, I, tau * w))
        if not moves:
            return ((state.count(R), 1.0),)
        total = sum(rate for _, _, rate in moves)
        acc = defaultdict(float)
        for v, new, rate in moves:
            nxt = list(state)
            nxt[v] = new
            for size, p in dist(tuple(nxt)):
                acc[size] += (rate / total) * p
        return tuple(sorted(acc.items()))

    return dict(dist(tuple(start)))


def total_variation(p, q):
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)
