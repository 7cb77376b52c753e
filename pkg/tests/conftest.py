import itertools

import numpy as np

import productdesign as pd


def market_of(*pairs) -> pd.Market:
    """Build a market from (price, [q1, ...]) pairs."""
    return pd.Market([pd.Customer(p, tuple(q)) for p, q in pairs])


def customers_of(*pairs) -> list[pd.Customer]:
    return [pd.Customer(p, tuple(q)) for p, q in pairs]


def vertex_oracle_depth(sims) -> int:
    """Independent deepest-point oracle for plane homothets.

    Candidate points are every corner plus every crossing of two boundary
    edges; the deepest covered region's lowest corner is always one of
    these, so scanning their depths finds the true maximum.
    """
    pts = [s.corner for s in sims]
    for a, b in itertools.permutations(sims, 2):
        ax, ay = a.corner
        bx, by = b.corner
        # horizontal edge of a (y = ay) x vertical edge of b (x = bx)
        if ax <= bx <= ax + a.size and by <= ay <= by + b.size:
            pts.append((bx, ay))
        cap = bx + by + b.size
        # horizontal edge of a x diagonal edge of b
        x = cap - ay
        if ax <= x <= ax + a.size and bx <= x <= bx + b.size:
            pts.append((x, ay))
        # vertical edge of a x diagonal edge of b
        y = cap - ax
        if ay <= y <= ay + a.size and by <= y <= by + b.size:
            pts.append((ax, y))
    corners = np.array([s.corner for s in sims])
    sizes = np.array([s.size for s in sims])
    arr = np.array(pts)
    inside = (arr[:, None, :] >= corners[None, :, :]).all(axis=2) & (
        (arr[:, None, :] - corners[None, :, :]).sum(axis=2) <= sizes[None, :]
    )
    return int(inside.sum(axis=1).max())
