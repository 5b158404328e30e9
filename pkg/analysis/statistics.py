"""
Testes estatísticos das análises de breaks.

- Wilcoxon signed-rank pareado (distribuição exata até 25 pares, aproximação
  normal com correções de continuidade e empates acima disso)
- Delta de Cliff e correlação rank-biserial como tamanhos de efeito
- Correção de Bonferroni-Holm entre organizações
- Odds ratio de uma tabela 2x2 com IC de Wald 95%, conferido contra uma
  regressão logística de um preditor binário
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Literal

import numpy as np
from scipy import stats
from sklearn.linear_model import LogisticRegression
from statsmodels.stats.multitest import multipletests

from config.settings import (
    ALPHA,
    CLIFF_MEDIUM,
    CLIFF_NEGLIGIBLE,
    CLIFF_SMALL,
    HALDANE_CORRECTION,
    LOGIT_AGREEMENT_TOL,
    WILCOXON_EXACT_MAX_N,
)
from core.exceptions import ConsistencyError, PreconditionError
from core.logging_config import get_logger

logger = get_logger("statistics")

Alternative = Literal["two-sided", "less", "greater"]


# ============================================================================
# Wilcoxon signed-rank
# ============================================================================


@dataclass(frozen=True)
class WilcoxonResult:
    n: int
    w_plus: float
    w_minus: float
    p_value: float
    method: str
    p_exact: Fraction | None = None

    @property
    def rank_biserial(self) -> float:
        total = self.n * (self.n + 1) / 2
        return (self.w_plus - self.w_minus) / total


def _exact_distribution(doubled_ranks: Sequence[int]) -> list[int]:
    # counts[s] = número de atribuições de sinais com soma (dobrada) de W+ igual a s
    counts = [1] + [0] * sum(doubled_ranks)
    reach = 0
    for r in doubled_ranks:
        reach += r
        for s in range(reach, r - 1, -1):
            counts[s] += counts[s - r]
    return counts


def _exact_p(doubled_ranks: Sequence[int], doubled_w: int, alternative: Alternative) -> Fraction:
    counts = _exact_distribution(doubled_ranks)
    total = 2 ** len(doubled_ranks)
    lower = Fraction(sum(counts[: doubled_w + 1]), total)
    upper = Fraction(sum(counts[doubled_w:]), total)
    if alternative == "less":
        return lower
    if alternative == "greater":
        return upper
    return min(Fraction(1), 2 * min(lower, upper))


def wilcoxon_signed_rank(
    x: Sequence[float],
    y: Sequence[float],
    alternative: Alternative = "two-sided",
    exact_max_n: int = WILCOXON_EXACT_MAX_N,
) -> WilcoxonResult | None:
    """
    Wilcoxon signed-rank sobre as diferenças x - y.

    Diferenças nulas são descartadas e empates recebem o posto médio. A
    estatística reportada é W+ (soma dos postos das diferenças positivas).

    Returns:
        Resultado do teste, ou None quando não há diferença não nula

    Raises:
        PreconditionError: Amostras de tamanhos diferentes
    """
    if len(x) != len(y):
        raise PreconditionError("wilcoxon_signed_rank", f"amostras de tamanhos {len(x)} e {len(y)}")
    diffs = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    diffs = diffs[diffs != 0]
    n = len(diffs)
    if n == 0:
        return None

    ranks = stats.rankdata(np.abs(diffs))
    w_plus = float(ranks[diffs > 0].sum())
    w_minus = float(ranks[diffs < 0].sum())

    if n <= exact_max_n:
        doubled = [int(round(2 * r)) for r in ranks]
        p_exact = _exact_p(doubled, int(round(2 * w_plus)), alternative)
        return WilcoxonResult(n, w_plus, w_minus, float(p_exact), "exact", p_exact)

    mean = n * (n + 1) / 4
    _, tie_counts = np.unique(ranks, return_counts=True)
    variance = n * (n + 1) * (2 * n + 1) / 24 - float(((tie_counts**3) - tie_counts).sum()) / 48
    sd = math.sqrt(variance)
    if alternative == "less":
        p = stats.norm.cdf((w_plus - mean + 0.5) / sd)
    elif alternative == "greater":
        p = stats.norm.sf((w_plus - mean - 0.5) / sd)
    else:
        z = max(abs(w_plus - mean) - 0.5, 0.0) / sd
        p = min(1.0, 2 * stats.norm.sf(z))
    return WilcoxonResult(n, w_plus, w_minus, float(p), "normal")


# ============================================================================
# Tamanhos de efeito
# ============================================================================


def cliffs_delta(x: Sequence[float], y: Sequence[float]) -> Fraction:
    """
    Delta de Cliff: (#(x > y) - #(x < y)) / (n * m) sobre todos os pares.

    Raises:
        PreconditionError: Amostra vazia
    """
    if not len(x) or not len(y):
        raise PreconditionError("cliffs_delta", "amostra vazia")
    xs = np.asarray(x, dtype=float)[:, None]
    ys = np.asarray(y, dtype=float)[None, :]
    dominance = int(np.sign(xs - ys).sum())
    return Fraction(dominance, len(x) * len(y))


def cliff_magnitude(delta: float | Fraction) -> str:
    magnitude = abs(delta)
    if magnitude < CLIFF_NEGLIGIBLE:
        return "negligible"
    if magnitude < CLIFF_SMALL:
        return "small"
    if magnitude < CLIFF_MEDIUM:
        return "medium"
    return "large"


# ============================================================================
# Correção para múltiplas comparações
# ============================================================================


def holm_adjust(p_values: Sequence[float]) -> list[float]:
    """Bonferroni-Holm step-down (p ajustados na ordem de entrada)."""
    if not len(p_values):
        return []
    _, adjusted, _, _ = multipletests(np.asarray(p_values, dtype=float), alpha=ALPHA, method="holm")
    return [float(p) for p in adjusted]


@dataclass(frozen=True)
class PairedTestResult:
    org: str
    n_pairs: int
    applicable: bool
    w_statistic: float = float("nan")
    p_raw: float = float("nan")
    p_adjusted: float = float("nan")
    cliffs_delta: float = float("nan")
    magnitude: str = "n/a"
    rank_biserial: float = float("nan")
    method: str = "n/a"
    p_exact: Fraction | None = None
    n_noncoding: int = 0
    n_inactive: int = 0

    @property
    def significant(self) -> bool:
        return self.applicable and self.p_adjusted < ALPHA

    def to_dict(self) -> dict:
        return {
            "org": self.org,
            "n_noncoding": self.n_noncoding,
            "n_inactive": self.n_inactive,
            "n_both": self.n_pairs,
            "applicable": self.applicable,
            "w_plus": self.w_statistic,
            "p_raw": self.p_raw,
            "p_holm": self.p_adjusted,
            "cliffs_delta": self.cliffs_delta,
            "magnitude": self.magnitude,
            "rank_biserial": self.rank_biserial,
            "method": self.method,
        }


def wilcoxon_holm_cliffs(
    per_org_pairs: Mapping[str, Sequence[tuple[float, float]]],
    alternative: Alternative = "two-sided",
) -> list[PairedTestResult]:
    """
    Testa, por organização, medianas de duração non-coding vs inactive.

    Cada par é (mediana non-coding, mediana inactive) de um desenvolvedor que
    passou pelos dois estados. Organizações sem pares ou só com diferenças
    nulas ficam como não aplicáveis e não entram na correção de Holm.
    """
    partial: list[PairedTestResult] = []
    for org in sorted(per_org_pairs):
        pairs = list(per_org_pairs[org])
        x = [p[0] for p in pairs]
        y = [p[1] for p in pairs]
        test = wilcoxon_signed_rank(x, y, alternative) if pairs else None
        if test is None:
            logger.info(f"{org}: {len(pairs)} pares, teste não aplicável")
            partial.append(PairedTestResult(org, len(pairs), applicable=False))
            continue
        delta = cliffs_delta(x, y)
        partial.append(
            PairedTestResult(
                org=org,
                n_pairs=len(pairs),
                applicable=True,
                w_statistic=test.w_plus,
                p_raw=test.p_value,
                cliffs_delta=float(delta),
                magnitude=cliff_magnitude(delta),
                rank_biserial=test.rank_biserial,
                method=test.method,
                p_exact=test.p_exact,
            )
        )

    applicable = [i for i, r in enumerate(partial) if r.applicable]
    adjusted = holm_adjust([partial[i].p_raw for i in applicable])
    results = list(partial)
    for i, p_adj in zip(applicable, adjusted, strict=True):
        r = partial[i]
        results[i] = replace(r, p_adjusted=max(p_adj, r.p_raw))
    return results


# ============================================================================
# Odds ratio
# ============================================================================


@dataclass(frozen=True)
class OddsRatioResult:
    """
    Odds ratio do grupo `high` contra o `low`.

    Células: a = high/gone, b = high/não gone, c = low/gone, d = low/não gone.
    """

    n: int
    or_value: float
    ci_low: float
    ci_high: float
    a: float
    b: float
    c: float
    d: float
    corrected: bool = False
    or_exact: Fraction | None = None
    intercept_odds: float = float("nan")
    aic: float = float("nan")
    logit_or: float = float("nan")

    @property
    def significant(self) -> bool:
        return not self.ci_low <= 1 <= self.ci_high

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "high_gone": self.a,
            "high_not_gone": self.b,
            "low_gone": self.c,
            "low_not_gone": self.d,
            "odds_ratio": self.or_value,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "significant": self.significant,
            "haldane_corrected": self.corrected,
            "intercept_odds": self.intercept_odds,
            "aic": self.aic,
        }


def odds_ratio_from_table(a: float, b: float, c: float, d: float, n: int | None = None) -> OddsRatioResult:
    """
    OR = ad / bc com IC de Wald 95% sobre log(OR).

    Qualquer célula zero aplica a correção de Haldane-Anscombe (+0.5 em todas).
    """
    cells = [Fraction(v) for v in (a, b, c, d)]
    if any(v < 0 for v in cells):
        raise PreconditionError("odds_ratio_from_table", f"célula negativa em {a, b, c, d}")
    corrected = any(v == 0 for v in cells)
    if corrected:
        logger.warning(f"Célula zero na tabela {a, b, c, d}; aplicando correção de Haldane-Anscombe")
        cells = [v + Fraction(HALDANE_CORRECTION) for v in cells]
    fa, fb, fc, fd = cells

    or_exact = (fa * fd) / (fb * fc)
    or_value = float(or_exact)
    se = math.sqrt(sum(1 / float(v) for v in cells))
    z = stats.norm.ppf(0.975)
    log_or = math.log(or_value)
    return OddsRatioResult(
        n=int(n if n is not None else a + b + c + d),
        or_value=or_value,
        ci_low=math.exp(log_or - z * se),
        ci_high=math.exp(log_or + z * se),
        a=float(fa),
        b=float(fb),
        c=float(fc),
        d=float(fd),
        corrected=corrected,
        or_exact=or_exact,
    )


def logistic_odds_ratio(a: float, b: float, c: float, d: float) -> tuple[float, float, float]:
    """
    Ajusta gone ~ high por regressão logística sem penalização.

    Returns:
        (odds ratio, odds do intercepto, AIC)
    """
    X = np.array([[1.0], [1.0], [0.0], [0.0]])
    y = np.array([1, 0, 1, 0])
    weights = np.array([a, b, c, d], dtype=float)
    model = LogisticRegression(penalty=None, solver="newton-cg", tol=1e-12, max_iter=1000)
    model.fit(X, y, sample_weight=weights)

    proba = model.predict_proba(X)[np.arange(4), y]
    log_likelihood = float((weights * np.log(proba)).sum())
    aic = 2 * 2 - 2 * log_likelihood
    return float(np.exp(model.coef_[0][0])), float(np.exp(model.intercept_[0])), aic


def check_logit_agreement(result: OddsRatioResult, tol: float = LOGIT_AGREEMENT_TOL) -> OddsRatioResult:
    """
    Confere o OR da tabela contra a regressão logística.

    Com correção de Haldane as células deixam de ser contagens e a conferência
    não é feita; o resultado volta apenas com AIC e intercepto.

    Raises:
        ConsistencyError: Divergência relativa acima de `tol`
    """
    logit_or, intercept_odds, aic = logistic_odds_ratio(result.a, result.b, result.c, result.d)
    if not result.corrected and abs(logit_or - result.or_value) > tol * result.or_value:
        raise ConsistencyError(
            "gone_odds_ratio",
            f"OR da tabela {result.or_value:.10g} difere da regressão logística {logit_or:.10g}",
        )
    return replace(result, intercept_odds=intercept_odds, aic=aic, logit_or=logit_or)
