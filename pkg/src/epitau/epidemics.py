"""Exact event-driven SIR simulation on a LayeredGraph.

The continuous-time Markov chain is sampled exactly: each SI edge of weight
omega fires infection at rate tau*omega (household edges omega=1, second
layer omega=w; a pair present in both layers fires at tau*(1+w)), and each
infected vertex recovers at rate gamma.  Per-infected susceptible-neighbor
counts are kept as integers per layer, so the total SI weight
W = E_hh + w*E_sec is exact at all times.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .netgen import LayeredGraph

__all__ = [
    "SimParams",
    "EventLog",
    "INFECTION",
    "RECOVERY",
    "init_state",
    "gillespie_run",
    "si_edge_weight",
    "ReplayState",
    "write_event_log",
    "read_event_log",
]

INFECTION = 0
RECOVERY = 1
_KIND_NAMES = {INFECTION: "infection", RECOVERY: "recovery"}
_KIND_CODES = {v: k for k, v in _KIND_NAMES.items()}

_S, _I, _R = 0, 1, 2


@dataclass
class SimParams:
    """Rates and horizon of one SIR run; gamma=1 fixes the time unit."""

    tau: float
    gamma: float = 1.0
    init_infected_fraction: float = 0.01
    t_max: float = 30.0

    def __post_init__(self) -> None:
        if self.tau < 0:
            raise ValueError("tau must be >= 0")
        if self.gamma <= 0:
            raise ValueError("gamma must be > 0")
        if not 0.0 < self.init_infected_fraction < 1.0:
            raise ValueError("init_infected_fraction must be in (0, 1)")
        if self.t_max <= 0:
            raise ValueError("t_max must be > 0")


@dataclass
class EventLog:
    """Time-ordered infection/recovery events of one epidemic."""

    initial_infected: np.ndarray      # vertex ids infected at t=0, sorted
    times: np.ndarray                 # strictly increasing event times
    kinds: np.ndarray                 # INFECTION or RECOVERY per event
    vertices: np.ndarray              # vertex per event
    final_time: float                 # min(extinction time, t_max)

    def __len__(self) -> int:
        return len(self.times)

    def events(self):
        """Iterate (t, kind, vertex) tuples."""
        return zip(self.times.tolist(), self.kinds.tolist(), self.vertices.tolist())


def init_state(g: LayeredGraph, fraction: float, rng: np.random.Generator) -> np.ndarray:
    """Choose ceil(fraction*n) distinct vertices to infect at t=0."""
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must be in (0, 1)")
    # Guard against float noise like 0.01*5000 -> 50.000000000000007.
    k = math.ceil(fraction * g.n - 1e-9)
    chosen = rng.choice(g.n, size=k, replace=False)
    return np.sort(chosen)


def gillespie_run(
    g: LayeredGraph,
    params: SimParams,
    rng: np.random.Generator,
    initial_infected: np.ndarray | None = None,
) -> EventLog:
    """Run one exact SIR realization; stops when I=0 or t >= t_max.

    If initial_infected is None, seeds are drawn by init_state with
    params.init_infected_fraction.
    """
    if initial_infected is None:
        initial_infected = init_state(g, params.init_infected_fraction, rng)
    else:
        initial_infected = np.sort(np.asarray(initial_infected, dtype=np.int64))
    n = g.n
    tau, gamma, w = params.tau, params.gamma, g.second_weight
    hh_ptr, hh_idx = g.household_adj
    sec_ptr, sec_idx = g.second_adj

    status = np.zeros(n, dtype=np.int8)
    cnt_hh = np.zeros(n, dtype=np.int64)   # susceptible household neighbors, infected only
    cnt_sec = np.zeros(n, dtype=np.int64)
    infected = np.empty(n, dtype=np.int64)  # buffer; first n_inf entries live
    pos = np.full(n, -1, dtype=np.int64)
    n_inf = 0
    W_hh = 0
    W_sec = 0

    def infect(u: int) -> None:
        nonlocal n_inf, W_hh, W_sec
        status[u] = _I
        hh_nbrs = hh_idx[hh_ptr[u]:hh_ptr[u + 1]]
        sec_nbrs = sec_idx[sec_ptr[u]:sec_ptr[u + 1]]
        st_hh = status[hh_nbrs]
        st_sec = status[sec_nbrs]
        s_hh = int((st_hh == _S).sum())
        s_sec = int((st_sec == _S).sum())
        cnt_hh[u] = s_hh
        cnt_sec[u] = s_sec
        W_hh += s_hh
        W_sec += s_sec
        inf_hh = hh_nbrs[st_hh == _I]
        inf_sec = sec_nbrs[st_sec == _I]
        if len(inf_hh):
            cnt_hh[inf_hh] -= 1
            W_hh -= len(inf_hh)
        if len(inf_sec):
            cnt_sec[inf_sec] -= 1
            W_sec -= len(inf_sec)
        infected[n_inf] = u
        pos[u] = n_inf
        n_inf += 1

    def recover(u: int) -> None:
        nonlocal n_inf, W_hh, W_sec
        status[u] = _R
        W_hh -= int(cnt_hh[u])
        W_sec -= int(cnt_sec[u])
        cnt_hh[u] = 0
        cnt_sec[u] = 0
        last = infected[n_inf - 1]
        infected[pos[u]] = last
        pos[last] = pos[u]
        pos[u] = -1
        n_inf -= 1

    for u in initial_infected.tolist():
        infect(int(u))

    times: list[float] = []
    kinds: list[int] = []
    verts: list[int] = []
    t = 0.0
    final_time = float(params.t_max)
    while n_inf > 0:
        inf_rate = tau * (W_hh + w * W_sec)
        total = inf_rate + gamma * n_inf
        t += rng.exponential(1.0 / total)
        if t >= params.t_max:
            break
        if rng.random() * total < inf_rate:
            live = infected[:n_inf]
            cum = np.cumsum(cnt_hh[live] + w * cnt_sec[live])
            v = int(live[np.searchsorted(cum, rng.random() * cum[-1], side="right")])
            # Pick the layer, then a uniform susceptible neighbor within it.
            a, b = int(cnt_hh[v]), int(cnt_sec[v])
            if rng.random() * (a + w * b) < a:
                nbrs = hh_idx[hh_ptr[v]:hh_ptr[v + 1]]
            else:
                nbrs = sec_idx[sec_ptr[v]:sec_ptr[v + 1]]
            cands = nbrs[status[nbrs] == _S]
            u = int(cands[rng.integers(len(cands))])
            infect(u)
            kinds.append(INFECTION)
        else:
            u = int(infected[rng.integers(n_inf)])
            recover(u)
            kinds.append(RECOVERY)
        times.append(t)
        verts.append(u)
    if n_inf == 0:
        final_time = times[-1] if times else 0.0
    return EventLog(
        initial_infected=initial_infected,
        times=np.array(times),
        kinds=np.array(kinds, dtype=np.int8),
        vertices=np.array(verts, dtype=np.int64),
        final_time=final_time,
    )


def si_edge_weight(g: LayeredGraph, infected, susceptible) -> float:
    """Total weight of edges with one infected and one susceptible endpoint."""
    inf = np.asarray(list(infected), dtype=np.int64)
    sus = np.asarray(list(susceptible), dtype=np.int64)
    if len(np.intersect1d(inf, sus)):
        raise ValueError("infected and susceptible sets must be disjoint")
    is_inf = np.zeros(g.n, dtype=bool)
    is_sus = np.zeros(g.n, dtype=bool)
    is_inf[inf] = True
    is_sus[sus] = True

    def count(edges: np.ndarray) -> int:
        if len(edges) == 0:
            return 0
        u, v = edges[:, 0], edges[:, 1]
        return int(((is_inf[u] & is_sus[v]) | (is_sus[u] & is_inf[v])).sum())

    return count(g.household_edges) + g.second_weight * count(g.second_edges)


class ReplayState:
    """Replays an event log, maintaining exact aggregate state.

    Exposes S/I/R counts, per-layer SI edge counts, and the class-wise
    degree sums needed for the observation series.  Raises on events that
    are inconsistent with the graph or the SIR state machine.
    """

    def __init__(self, g: LayeredGraph, initial_infected) -> None:
        self.g = g
        self.n = g.n
        self._hh_ptr, self._hh_idx = g.household_adj
        self._sec_ptr, self._sec_idx = g.second_adj
        self._wdeg = g.weighted_degree
        self._sec_deg = g.second_degree
        self.status = np.zeros(g.n, dtype=np.int8)
        self.S = g.n
        self.I = 0
        self.R = 0
        self.E_SI_hh = 0
        self.E_SI_o = 0
        self.sum_wdeg_S = float(self._wdeg.sum())
        self.sum_wdeg_I = 0.0
        self.sum_secdeg_I = 0
        for u in np.asarray(initial_infected).tolist():
            self.apply(INFECTION, int(u))

    @property
    def si_weight(self) -> float:
        """Exact W^SI = E_SI_hh + w * E_SI_o."""
        return self.E_SI_hh + self.g.second_weight * self.E_SI_o

    @property
    def d_S_w(self) -> float:
        return self.sum_wdeg_S / self.S if self.S else 0.0

    @property
    def d_I_w(self) -> float:
        return self.sum_wdeg_I / self.I if self.I else 0.0

    @property
    def d_I_out(self) -> float:
        return self.sum_secdeg_I / self.I if self.I else 0.0

    def apply(self, kind: int, vertex: int) -> None:
        if not 0 <= vertex < self.n:
            raise ValueError(f"event on unknown vertex {vertex}")
        st = self.status[vertex]
        if kind == INFECTION:
            if st != _S:
                raise ValueError(f"infection of non-susceptible vertex {vertex}")
            self.status[vertex] = _I
            self.S -= 1
            self.I += 1
            self.sum_wdeg_S -= self._wdeg[vertex]
            self.sum_wdeg_I += self._wdeg[vertex]
            self.sum_secdeg_I += int(self._sec_deg[vertex])
            hh = self._hh_idx[self._hh_ptr[vertex]:self._hh_ptr[vertex + 1]]
            sec = self._sec_idx[self._sec_ptr[vertex]:self._sec_ptr[vertex + 1]]
            st_hh = self.status[hh]
            st_sec = self.status[sec]
            self.E_SI_hh += int((st_hh == _S).sum()) - int((st_hh == _I).sum())
            self.E_SI_o += int((st_sec == _S).sum()) - int((st_sec == _I).sum())
        elif kind == RECOVERY:
            if st != _I:
                raise ValueError(f"recovery of non-infected vertex {vertex}")
            self.status[vertex] = _R
            self.I -= 1
            self.R += 1
            self.sum_wdeg_I -= self._wdeg[vertex]
            self.sum_secdeg_I -= int(self._sec_deg[vertex])
            hh = self._hh_idx[self._hh_ptr[vertex]:self._hh_ptr[vertex + 1]]
            sec = self._sec_idx[self._sec_ptr[vertex]:self._sec_ptr[vertex + 1]]
            self.E_SI_hh -= int((self.status[hh] == _S).sum())
            self.E_SI_o -= int((self.status[sec] == _S).sum())
        else:
            raise ValueError(f"unknown event kind {kind}")


def write_event_log(log: EventLog, path) -> None:
    """Debug text format: `initial v0 v1 ...`, `final_time t`, then `t kind vertex` lines."""
    buf = io.StringIO()
    buf.write("initial " + " ".join(str(v) for v in log.initial_infected.tolist()) + "\n")
    buf.write(f"final_time {log.final_time!r}\n")
    for t, kind, v in log.events():
        buf.write(f"{t!r} {_KIND_NAMES[kind]} {v}\n")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(buf.getvalue())


def read_event_log(path) -> EventLog:
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline().split()
        if not first or first[0] != "initial":
            raise ValueError("missing initial-infected header")
        initial = np.array([int(x) for x in first[1:]], dtype=np.int64)
        second = fh.readline().split()
        final_time = float(second[1])
        times, kinds, verts = [], [], []
        for line in fh:
            t, kind, v = line.split()
            times.append(float(t))
            kinds.append(_KIND_CODES[kind])
            verts.append(int(v))
    return EventLog(
        initial_infected=initial,
        times=np.array(times),
        kinds=np.array(kinds, dtype=np.int8),
        vertices=np.array(verts, dtype=np.int64),
        final_time=final_time,
    )
