"""Independent reference implementations used as test oracles.

They are written from the model definitions with plain loops and share no
code with the package beyond the trait/constant containers.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def beta_weights(p, T):
    a, b = 1 + 4 * p, 1 + 4 * (1 - p)
    raw = [((j - 0.5) / T) ** (a - 1) * (1 - (j - 0.5) / T) ** (b - 1) for j in range(1, T + 1)]
    s = sum(raw)
    return [v / s for v in raw]


def brute_force_growth(traits, constants):
    """Per-cycle Q, D and organ-type biomass from an organ-by-organ recurrence."""
    organs = []  # dicts: type, born, mult
    for m in range(1, constants.phytomer_count + 1):
        organs.append(dict(type="blade", born=m, mult=1.0))
        organs.append(dict(type="sheath", born=m, mult=1.0))
        short = m <= traits.short_internode_count
        organs.append(dict(type="internode", born=m,
                           mult=constants.short_internode_sink_factor if short else 1.0))
    organs.append(dict(type="cob", born=traits.ear_cycle, mult=1.0))
    organs.append(dict(type="tassel", born=constants.tassel_cycle, mult=1.0))

    def sink(kind):
        if kind == "tassel":
            return constants.tassel_sink, constants.tassel_sink_var
        return getattr(traits, kind + "_sink"), getattr(traits, kind + "_sink_var")

    def duration(kind):
        if kind == "cob" and constants.cob_expansion is None:
            return constants.cycle_count - traits.ear_cycle + 1
        return getattr(constants, kind + "_expansion")

    for o in organs:
        o["mass"] = 0.0
    q_prev = traits.seed_biomass
    out = {"Q": [], "D": [], "biomass": {k: [] for k in ("blade", "sheath", "internode", "cob", "tassel")}}
    for n in range(1, constants.cycle_count + 1):
        demands = []
        for o in organs:
            age = n - o["born"] + 1
            T = duration(o["type"])
            if 1 <= age <= T:
                P, p = sink(o["type"])
                demands.append(o["mult"] * P * beta_weights(p, T)[age - 1])
            else:
                demands.append(0.0)
        D = sum(demands)
        if D > 0 and q_prev > 0:
            for o, d in zip(organs, demands):
                o["mass"] += q_prev * d / D
        B = sum(o["mass"] for o in organs
                if o["type"] == "blade" and 1 <= n - o["born"] + 1 <= constants.tb)
        e, r = traits.blade_thickness, traits.blade_resistance
        Q = constants.E * constants.Sp / (r * constants.k) * (1 - math.exp(-constants.k * B / (e * constants.Sp)))
        out["Q"].append(Q)
        out["D"].append(D)
        for k in out["biomass"]:
            out["biomass"][k].append(sum(o["mass"] for o in organs if o["type"] == k))
        q_prev = Q
    return out


def explicit_likelihood_lod(y, x):
    """LOD from maximized Gaussian log-likelihoods (sigma profiled out) of the
    intercept-only and the intercept + dose models."""
    y = np.asarray(y, float)
    x = np.asarray(x, float)
    n = len(y)

    def max_loglik(X):
        beta, *_ = np.linalg.lstsq(X, y, rcond=None)
        resid = y - X @ beta
        s2 = resid @ resid / n
        return float(np.sum(-0.5 * np.log(2 * np.pi * s2) - resid ** 2 / (2 * s2)))

    ones = np.ones(n)
    l0 = max_loglik(ones[:, None])
    l1 = max_loglik(np.column_stack([ones, x]))
    return (l1 - l0) / math.log(10)


def exhaustive_max(fitness, levels):
    """Best score and the gene tuples attaining it over the full grid."""
    best, arg = -math.inf, []
    for genes in itertools.product(*(range(L) for L in levels)):
        v = fitness(genes)
        if v > best:
            best, arg = v, [genes]
        elif v == best:
            arg.append(genes)
    return best, arg
