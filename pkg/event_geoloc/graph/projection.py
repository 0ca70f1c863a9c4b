import numpy as np
import scipy.sparse as sp

from event_geoloc.graph.hetero import HeteroGraph

NEIGHBOR_TYPES = ("word", "user")


def project_homogeneous(g: HeteroGraph) -> sp.csr_matrix:
    """Message adjacency: A[i, j] = 1 iff messages i != j share a word or user neighbour.

    Equivalent to min(sum_k W_mk W_mk^T, 1) off the diagonal; self-loops are left to the encoder.
    """
    n = len(g.message_nodes)
    counts = sp.csr_matrix((n, n), dtype=np.int64)
    for kind in NEIGHBOR_TYPES:
        w = g.incidence(kind)
        counts = counts + w @ w.T
    counts = (counts - sp.diags(counts.diagonal())).tocsr()
    counts.eliminate_zeros()
    adjacency = counts.astype(np.int8)
    adjacency.data[:] = 1
    return adjacency


def dump_adjacency(adjacency: sp.spmatrix, path: str) -> None:
    upper = sp.triu(adjacency, k=1).tocoo()
    pairs = sorted(zip(upper.row.tolist(), upper.col.tolist()))
    with open(path, "w", encoding="utf-8") as f:
        for i, j in pairs:
            f.write(f"{i}\t{j}\n")
