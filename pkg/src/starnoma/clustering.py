"""Distance-based user clustering and the near-far pairing baseline.

Cell-center users are split into a near group (G1) and a far group (G2) by
their BS distance; cell-edge users form G3 and are ranked by their distance
to the serving surface.  Downlink cluster j combines the j-th nearest G1 and
G2 users with the j-th *farthest* G3 user (strongest with weakest); uplink
cluster j takes the j-th nearest user of every group.

The pairing baseline builds 2-user groups by matching the j-th nearest user
overall with the j-th farthest, mirroring classic near-far NOMA pairing; it
exists purely as a comparison harness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import UserLayout

__all__ = ["ClusterMember", "Cluster", "ClusterPlan", "cluster_users", "pair_users"]


@dataclass(frozen=True)
class ClusterMember:
    user_id: str
    role: str        # "G1" | "G2" | "G3"
    distance: float  # sort metric used to place the user (m)


@dataclass(frozen=True)
class Cluster:
    index: int
    members: tuple


@dataclass(frozen=True)
class ClusterPlan:
    mode: str            # "DL" | "UL"
    scheme: str          # "cluster" | "pair"
    clusters: tuple

    @property
    def M(self) -> int:
        return len(self.clusters)

    def user_ids(self):
        return [m.user_id for c in self.clusters for m in c.members]

    def validate_partition(self, expected_ids) -> None:
        ids = self.user_ids()
        if len(ids) != len(set(ids)):
            raise ValueError("a user appears in more than one cluster")
        missing = set(expected_ids) - set(ids)
        if missing:
            raise ValueError(f"users not assigned to any cluster: {sorted(missing)}")
        for c in self.clusters:
            if len(c.members) < 2:
                raise ValueError(f"cluster {c.index} has fewer than 2 members")


def _stable_order(distances: np.ndarray) -> np.ndarray:
    # ties broken by user index so plans are deterministic
    return np.argsort(distances, kind="stable")


def cluster_users(layout: UserLayout, cfg, mode: str) -> ClusterPlan:
    """Form 3-member clusters from one drop of users.

    Center users are ranked by BS distance and split at K_1 into G1/G2; edge
    users are ranked by surface distance.  Unequal group sizes are tolerated
    by folding leftover users into the last cluster, but the rate engine only
    models uniform 3-member clusters.
    """
    mode = mode.upper()
    if mode == "DL":
        center, edge, K1 = layout.dl_center, layout.dl_edge, cfg.K_d1
        cid, eid = "dl_c", "dl_e"
    elif mode == "UL":
        center, edge, K1 = layout.ul_center, layout.ul_edge, cfg.K_u1
        cid, eid = "ul_c", "ul_e"
    else:
        raise ValueError(f"mode must be 'DL' or 'UL', got {mode!r}")
    if len(center) == 0 or len(edge) == 0:
        raise ValueError("cannot cluster with an empty user group")

    d_center = np.linalg.norm(center, axis=-1)
    d_edge = np.linalg.norm(edge - layout.surface_center, axis=-1)
    order_c = _stable_order(d_center)
    order_e = _stable_order(d_edge)
    g1, g2 = order_c[:K1], order_c[K1:]
    if len(g1) == 0 or len(g2) == 0:
        raise ValueError("group split left G1 or G2 empty")

    M = min(len(g1), len(g2), len(order_e))
    clusters = []
    for j in range(M):
        i1, i2 = g1[j], g2[j]
        # DL pairs the strongest center users with the weakest edge user
        ie = order_e[len(order_e) - 1 - j] if mode == "DL" else order_e[j]
        members = [
            ClusterMember(f"{cid}{i1}", "G1", float(d_center[i1])),
            ClusterMember(f"{cid}{i2}", "G2", float(d_center[i2])),
            ClusterMember(f"{eid}{ie}", "G3", float(d_edge[ie])),
        ]
        if j == M - 1:
            # leftovers (non-uniform configs) join the last cluster
            for i in g1[M:]:
                members.append(ClusterMember(f"{cid}{i}", "G1", float(d_center[i])))
            for i in g2[M:]:
                members.append(ClusterMember(f"{cid}{i}", "G2", float(d_center[i])))
            rest = order_e[: len(order_e) - M] if mode == "DL" else order_e[M:]
            for i in rest:
                members.append(ClusterMember(f"{eid}{i}", "G3", float(d_edge[i])))
        clusters.append(Cluster(index=j + 1, members=tuple(members)))
    return ClusterPlan(mode=mode, scheme="cluster", clusters=tuple(clusters))


def pair_users(layout: UserLayout, cfg, mode: str) -> ClusterPlan:
    """Near-far pairing over all users of one direction, ranked by BS distance.

    The j-th nearest user is paired with the j-th farthest.  An odd user count
    leaves the median user unpaired; it is dropped from the plan (documented
    harness behaviour, flagged by the odd cluster count).
    """
    mode = mode.upper()
    if mode == "DL":
        center, edge = layout.dl_center, layout.dl_edge
        cid, eid = "dl_c", "dl_e"
    elif mode == "UL":
        center, edge = layout.ul_center, layout.ul_edge
        cid, eid = "ul_c", "ul_e"
    else:
        raise ValueError(f"mode must be 'DL' or 'UL', got {mode!r}")

    ids = [f"{cid}{i}" for i in range(len(center))] + [f"{eid}{i}" for i in range(len(edge))]
    pts = np.vstack([center, edge]) if len(edge) else np.asarray(center)
    if len(ids) < 2:
        raise ValueError("pairing needs at least 2 users")
    d = np.linalg.norm(pts, axis=-1)
    order = _stable_order(d)
    npairs = len(ids) // 2
    clusters = []
    for j in range(npairs):
        near, far = order[j], order[len(ids) - 1 - j]
        clusters.append(
            Cluster(
                index=j + 1,
                members=(
                    ClusterMember(ids[near], "G1", float(d[near])),
                    ClusterMember(ids[far], "G3", float(d[far])),
                ),
            )
        )
    return ClusterPlan(mode=mode, scheme="pair", clusters=tuple(clusters))
