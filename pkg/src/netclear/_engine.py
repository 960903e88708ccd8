"""Vectorized evaluation kernels for financial systems.

Every model operation reduces to a batch evaluation over an (n, V) matrix of
candidate recovery vectors. Banks are indexed in sorted-id order so that all
outputs are canonically ordered; contracts keep their construction order.
"""

from __future__ import annotations

import numpy as np


class CompiledSystem:
    """Array form of a financial system with a fixed bank ordering."""

    def __init__(self, system):
        ids = tuple(sorted(bank.id for bank in system.banks))
        index = {bank_id: i for i, bank_id in enumerate(ids)}
        self.system = system
        self.ids = ids
        self.index = index
        self.n_banks = len(ids)
        self.levels = system.priority_levels

        external = np.zeros(self.n_banks)
        for bank in system.banks:
            external[index[bank.id]] = bank.external_assets
        self.external = external

        contracts = system.contracts
        self.n_contracts = len(contracts)
        self.debtor = np.array([index[c.debtor] for c in contracts], dtype=np.intp)
        self.creditor = np.array([index[c.creditor] for c in contracts], dtype=np.intp)
        self.notional = np.array([c.notional for c in contracts], dtype=float)
        self.priority = np.array([c.priority for c in contracts], dtype=np.intp)
        self.reference = np.array(
            [index[c.reference] if c.reference is not None else -1 for c in contracts],
            dtype=np.intp,
        )
        self.is_cds = self.reference >= 0
        # safe gather index for (1 - r_ref); debt rows are masked out again later
        self.ref_gather = np.where(self.is_cds, self.reference, 0)

        V, P, C = self.n_banks, self.levels, self.n_contracts
        self.level_key = self.debtor * P + (self.priority - 1)
        scatter_level = np.zeros((C, V * P))
        scatter_cred = np.zeros((C, V))
        for j in range(C):
            scatter_level[j, self.level_key[j]] = 1.0
            scatter_cred[j, self.creditor[j]] = 1.0
        self.scatter_level = scatter_level
        self.scatter_cred = scatter_cred

        # a_v >= e_v always and l_v(r) <= sum of outgoing notionals, so a bank
        # whose external assets cover that sum can never default
        max_liability = np.zeros(V)
        np.add.at(max_liability, self.debtor, self.notional)
        self.max_liability = max_liability
        self.defaultable = external < max_liability

    def vector(self, mapping):
        """Mapping id -> rate as a (V,) array in canonical order."""
        return np.array([mapping[bank_id] for bank_id in self.ids], dtype=float)

    def mapping(self, row):
        """Canonical (V,) array back to an id -> rate dict."""
        return {bank_id: float(row[i]) for i, bank_id in enumerate(self.ids)}


def contract_liabilities(cs, R):
    """Per-contract liabilities for each row of R; shape (n, C).

    Debt rows are constant; a CDS row with reference w is notional*(1 - r_w).
    """
    factor = np.where(cs.is_cds, 1.0 - R[:, cs.ref_gather], 1.0)
    return cs.notional * factor


def evaluate(cs, R):
    """One full clearing evaluation per candidate row.

    Input:  R (n, V), entries in [0, 1].
    Output: dict of arrays
        liab     (n, C)    per-contract liabilities
        levels   (n, V, P) per-bank per-level liability totals
        totals   (n, V)    per-bank total liabilities
        pay      (n, C)    per-contract payments
        assets   (n, V)    e_v plus incoming payments
        F        (n, V)    update image min(assets/totals, 1), 1 when totals=0
        residual (n,)      max-norm of F - R per row
    """
    n, V = R.shape
    P = cs.levels
    liab = contract_liabilities(cs, R)
    levels = (liab @ cs.scatter_level).reshape(n, V, P)
    totals = levels.sum(axis=2)

    # waterfall on the budget r_v * l_v(r): senior levels first, the marginal
    # level pro rata, nothing below it
    budget = R * totals
    cum = np.cumsum(levels, axis=2)
    senior = cum - levels
    pool = np.clip(budget[:, :, None] - senior, 0.0, levels)
    safe_levels = np.where(levels > 0.0, levels, 1.0)
    share = np.where(levels > 0.0, pool / safe_levels, 0.0)
    pay = liab * share.reshape(n, V * P)[:, cs.level_key]

    assets = cs.external + pay @ cs.scatter_cred
    safe_totals = np.where(totals > 0.0, totals, 1.0)
    F = np.where(totals > 0.0, np.minimum(assets / safe_totals, 1.0), 1.0)
    residual = np.max(np.abs(F - R), axis=1)
    return {
        "liab": liab,
        "levels": levels,
        "totals": totals,
        "pay": pay,
        "assets": assets,
        "F": F,
        "residual": residual,
    }
