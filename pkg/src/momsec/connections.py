"""Linear connection on the bundle and the derived derivative operators.

Conventions, locked by the duality identity d<mu,e> = <D mu,e> + <mu,D e>:

    (D e)^a   = d f^a + Gamma^a_b f^b          on sections,
    (D mu)_a  = d mu_a - Gamma^b_a mu_b        on dual sections,

with Gamma^a_b = Gamma^a_{b i} dx^i, extended to dual-valued k-forms by
(D mu)_a = d mu_a - Gamma^b_a ^ mu_b.  The tangent action combines the
anchor flow with the connection:  nabla_e v = L_{rho(e)} v + rho(D_v e).
"""

from __future__ import annotations

from .algebroid import AlgebroidData, Section
from .fields import (
    FormField,
    MetricField,
    ScalarField,
    VectorField,
    const_field,
    exterior_derivative,
    field_sum_d,
    lie_bracket,
    lie_derivative_metric,
    wedge,
)


class ConnectionData:
    def __init__(self, alg: AlgebroidData, gamma):
        """gamma: nested list [a][b][i] of ScalarField for Gamma^a_{b i}."""
        self.alg = alg
        self.gamma = gamma

    @staticmethod
    def flat(alg: AlgebroidData) -> "ConnectionData":
        zero = const_field(0.0, alg.dim)
        r, d = alg.rank, alg.dim
        return ConnectionData(alg, [[[zero] * d for _ in range(r)] for _ in range(r)])

    @property
    def is_flat(self) -> bool:
        return all(
            self.gamma[a][b][i].is_zero
            for a in range(self.alg.rank)
            for b in range(self.alg.rank)
            for i in range(self.alg.dim)
        )

    def one_form(self, a: int, b: int) -> FormField:
        """Gamma^a_b as a 1-form."""
        chart = self.alg.chart
        out = FormField(chart, 1)
        for i in range(chart.dim):
            f = self.gamma[a][b][i]
            if not f.is_zero:
                out.comps[(i,)] = f
        return out


def covariant_derivative_section(conn: ConnectionData, e: Section):
    """(D e)^a_i = d_i f^a + Gamma^a_{b i} f^b, as an [a][i] field table."""
    alg = conn.alg
    r, d = alg.rank, alg.dim
    out = []
    for a in range(r):
        row = []
        for i in range(d):
            terms = [e.comps[a].partial(i)]
            for b in range(r):
                if conn.gamma[a][b][i].is_zero or e.comps[b].is_zero:
                    continue
                terms.append(conn.gamma[a][b][i] * e.comps[b])
            row.append(field_sum_d(terms, d))
        out.append(row)
    return out


def dual_covariant_derivative(conn: ConnectionData, mu):
    """Exterior covariant derivative on dual-bundle-valued forms.

    ``mu`` is a list over the bundle index: ScalarFields for degree 0 or
    FormFields for degree >= 1.  Returns a list of FormFields one degree
    higher.
    """
    alg = conn.alg
    chart = alg.chart
    r = alg.rank
    out = []
    if isinstance(mu[0], ScalarField):
        for a in range(r):
            form = FormField(chart, 1)
            for i in range(chart.dim):
                terms = [mu[a].partial(i)]
                for b in range(r):
                    if conn.gamma[b][a][i].is_zero or mu[b].is_zero:
                        continue
                    terms.append(-(conn.gamma[b][a][i] * mu[b]))
                total = field_sum_d(terms, chart.dim)
                if not total.is_zero:
                    form.comps[(i,)] = total
            out.append(form)
        return out
    for a in range(r):
        form = exterior_derivative(mu[a])
        for b in range(r):
            gba = conn.one_form(b, a)
            if gba.is_zero or mu[b].is_zero:
                continue
            form = form - wedge(gba, mu[b])
        out.append(form)
    return out


def e_connection_vector(conn: ConnectionData, e: Section, v: VectorField) -> VectorField:
    """nabla_e v = L_{rho(e)} v + rho(D_v e)."""
    alg = conn.alg
    d = alg.dim
    rho_e = alg.anchor_of(e)
    flow = lie_bracket(rho_e, v)
    out = []
    for i in range(d):
        terms = [flow.comps[i]]
        for a in range(alg.rank):
            if alg.anchor[a][i].is_zero:
                continue
            # (D_v e)^a = v^k (d_k f^a + Gamma^a_{b k} f^b)
            for k in range(d):
                if v.comps[k].is_zero:
                    continue
                inner = [e.comps[a].partial(k)]
                for b in range(alg.rank):
                    if conn.gamma[a][b][k].is_zero or e.comps[b].is_zero:
                        continue
                    inner.append(conn.gamma[a][b][k] * e.comps[b])
                da = field_sum_d(inner, d)
                if not da.is_zero:
                    terms.append(alg.anchor[a][i] * (v.comps[k] * da))
        out.append(field_sum_d(terms, d))
    return VectorField(alg.chart, out)


def e_nabla_metric_fields(conn: ConnectionData, g: MetricField):
    """Residuals of the tangent-action compatibility of the metric.

    (L_{rho_a} g)_ij - Gamma^b_{a i} rho^k_b g_kj - Gamma^b_{a j} rho^k_b g_ki,
    per basis index a and i <= j.
    """
    alg = conn.alg
    d = alg.dim
    out = []
    for a in range(alg.rank):
        lie = lie_derivative_metric(alg.anchor_vector(a), g)
        for i in range(d):
            for j in range(i, d):
                terms = [lie[i][j]]
                for b in range(alg.rank):
                    for k in range(d):
                        if not (conn.gamma[b][a][i].is_zero or alg.anchor[b][k].is_zero or g.g[k][j].is_zero):
                            terms.append(-(conn.gamma[b][a][i] * alg.anchor[b][k] * g.g[k][j]))
                        if not (conn.gamma[b][a][j].is_zero or alg.anchor[b][k].is_zero or g.g[k][i].is_zero):
                            terms.append(-(conn.gamma[b][a][j] * alg.anchor[b][k] * g.g[k][i]))
                out.append((f"a{a + 1} i{i + 1} j{j + 1}", field_sum_d(terms, d)))
    return out


def e_nabla_two_form_fields(conn: ConnectionData, B: FormField):
    """Residuals of the tangent-action derivative of a 2-form.

    rho^k_a d_k B_ij + d_i rho^k_a B_kj + d_j rho^k_a B_ik
      - Gamma^b_{a i} rho^k_b B_kj - Gamma^b_{a j} rho^k_b B_ik,
    per a and i < j.  Vanishes together with the anchoring condition on
    the induced dual-valued 1-form whenever B is closed.
    """
    alg = conn.alg
    d = alg.dim
    out = []
    for a in range(alg.rank):
        rho = alg.anchor[a]
        for i in range(d):
            for j in range(i + 1, d):
                terms = []
                Bij = B.comp((i, j))
                for k in range(d):
                    if not (rho[k].is_zero or Bij.is_zero):
                        terms.append(rho[k] * Bij.partial(k))
                    Bkj = B.comp((k, j))
                    if not (rho[k].is_zero or Bkj.is_zero):
                        terms.append(rho[k].partial(i) * Bkj)
                    Bik = B.comp((i, k))
                    if not (rho[k].is_zero or Bik.is_zero):
                        terms.append(rho[k].partial(j) * Bik)
                    for b in range(alg.rank):
                        if not (conn.gamma[b][a][i].is_zero or alg.anchor[b][k].is_zero or Bkj.is_zero):
                            terms.append(-(conn.gamma[b][a][i] * alg.anchor[b][k] * Bkj))
                        if not (conn.gamma[b][a][j].is_zero or alg.anchor[b][k].is_zero or Bik.is_zero):
                            terms.append(-(conn.gamma[b][a][j] * alg.anchor[b][k] * Bik))
                out.append((f"a{a + 1} i{i + 1} j{j + 1}", field_sum_d(terms, d)))
    return out
