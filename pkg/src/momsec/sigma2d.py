"""Target-space conditions for the gauged two-dimensional model with boundary.

The worldsheet itself is never discretized: gauge invariance is verified
through the induced conditions on the target data (g, b, eta, mu, rho,
C, Gamma).  The boundary block couples mu and eta through

    (P1)  mu_a + eta_i rho^i_a = 0
    (P2)  rho^j_a b_ji + rho^j_a d_j eta_i + eta_j d_i rho^j_a
            + Gamma^b_{a i} mu_b = 0
    (P3)  rho^i_a d_i mu_b - C^c_ab mu_c - rho^i_b Gamma^c_{a i} mu_c = 0

Under mu = -iota_rho eta and B = b + d eta, (P2) is the momentum-section
residual with the opposite overall sign, and (P3) differs from the
bracket-compatibility residual exactly by the rho-contraction of (P2):

    H3_ab = P3_ab + rho^i_b P2_{a,i}

so the two blocks reproduce H2 and H3 whenever (P2) holds.
"""

from __future__ import annotations

from .algebroid import AlgebroidData
from .connections import ConnectionData
from .fields import (
    FormField,
    MetricField,
    exterior_derivative,
    field_sum_d,
    interior_product,
    lie_derivative,
    lie_derivative_metric,
)


def rigid_killing_fields(alg: AlgebroidData, g: MetricField):
    """(L_{rho_a} g)_ij per basis index."""
    out = []
    for a in range(alg.rank):
        lie = lie_derivative_metric(alg.anchor_vector(a), g)
        for i in range(alg.dim):
            for j in range(i, alg.dim):
                out.append((f"a{a + 1} i{i + 1} j{j + 1}", lie[i][j]))
    return out


def rigid_b_fields(alg: AlgebroidData, b: FormField, beta_rigid=None):
    """L_{rho_a} b - d beta_a, with beta_a defaulting to iota_{rho_a} b.

    With closed b the default candidate satisfies the condition
    identically (Cartan), so the residual then measures iota_{rho} db.
    Returns (labeled fields, used_default).
    """
    out = []
    for a in range(alg.rank):
        lie = lie_derivative(alg.anchor_vector(a), b)
        if beta_rigid is not None:
            candidate = beta_rigid[a]
        else:
            candidate = interior_product(alg.anchor_vector(a), b)
        res = lie - exterior_derivative(candidate)
        for idx, f in res.comps.items():
            out.append((f"a{a + 1} i{idx[0] + 1} j{idx[1] + 1}", f))
    return out, beta_rigid is None


def boundary_pairing_fields(alg: AlgebroidData, eta: FormField, mu):
    """(P1): mu_a + eta_i rho^i_a."""
    d = alg.dim
    out = []
    for a in range(alg.rank):
        terms = [mu[a]]
        for i in range(d):
            ei = eta.comp((i,))
            if ei.is_zero or alg.anchor[a][i].is_zero:
                continue
            terms.append(ei * alg.anchor[a][i])
        out.append((f"a{a + 1}", field_sum_d(terms, d)))
    return out


def boundary_eta_fields(alg: AlgebroidData, conn: ConnectionData, b: FormField, eta: FormField, mu):
    """(P2), evaluated verbatim in components."""
    d = alg.dim
    out = []
    for a in range(alg.rank):
        rho = alg.anchor[a]
        for i in range(d):
            terms = []
            for j in range(d):
                bji = b.comp((j, i))
                if not (rho[j].is_zero or bji.is_zero):
                    terms.append(rho[j] * bji)
                ei = eta.comp((i,))
                if not (rho[j].is_zero or ei.is_zero):
                    terms.append(rho[j] * ei.partial(j))
                ej = eta.comp((j,))
                if not (ej.is_zero or rho[j].is_zero):
                    terms.append(ej * rho[j].partial(i))
            for bb in range(alg.rank):
                gam = conn.gamma[bb][a][i]
                if gam.is_zero or mu[bb].is_zero:
                    continue
                terms.append(gam * mu[bb])
            out.append((f"a{a + 1} i{i + 1}", field_sum_d(terms, d)))
    return out


def boundary_mu_fields(alg: AlgebroidData, conn: ConnectionData, mu):
    """(P3), evaluated verbatim in components over ordered pairs."""
    d = alg.dim
    out = []
    for a in range(alg.rank):
        for b in range(alg.rank):
            terms = [alg.apply_anchor(a, mu[b])]
            for c in range(alg.rank):
                C = alg.structure(c, a, b)
                if not (C.is_zero or mu[c].is_zero):
                    terms.append(-(C * mu[c]))
                for i in range(d):
                    gam = conn.gamma[c][a][i]
                    if gam.is_zero or alg.anchor[b][i].is_zero or mu[c].is_zero:
                        continue
                    terms.append(-(alg.anchor[b][i] * gam * mu[c]))
            out.append((f"a{a + 1} b{b + 1}", field_sum_d(terms, d)))
    return out


def induced_momentum_inputs(alg: AlgebroidData, b: FormField, eta: FormField):
    """mu := -iota_rho eta and B := b + d eta."""
    d = alg.dim
    mu = []
    for a in range(alg.rank):
        terms = []
        for i in range(d):
            ei = eta.comp((i,))
            if ei.is_zero or alg.anchor[a][i].is_zero:
                continue
            terms.append(-(alg.anchor[a][i] * ei))
        mu.append(field_sum_d(terms, d))
    B = b + exterior_derivative(eta)
    return mu, B
