# tests/test_rhythm.py
"""
Testes para o módulo analysis.rhythm

Os casos de referência foram executados à mão sobre o algoritmo da janela
deslizante (janela de 3 meses, passo de 7 dias, mínimo de 4 pausas, IQR > 1).
"""

import math
from datetime import date, timedelta
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from analysis.rhythm import (
    DetectorConfig,
    Pause,
    Window,
    closing_threshold,
    detect_breaks,
    extract_pauses,
    far_out_threshold,
    iter_windows,
    pauses_longer_than_window,
    tukey_hinges,
    window_thresholds,
)
from core.exceptions import ConfigError, PreconditionError
from tests.conftest import build_timeline, days_from_pauses


def _hinges_by_depth(values: list[int]) -> tuple[Fraction, Fraction]:
    """Hinges pela profundidade de Tukey: d = (floor((n + 1) / 2) + 1) / 2."""
    x = sorted(values)
    n = len(x)
    depth = Fraction((n + 1) // 2 + 1, 2)
    lo, hi = math.floor(depth), math.ceil(depth)
    lower = Fraction(x[lo - 1] + x[hi - 1], 2)
    upper = Fraction(x[n - lo] + x[n - hi], 2)
    return lower, upper


class TestPause:
    """Testes para o tipo Pause."""

    def test_leap_day_counts(self) -> None:
        """28/fev a 01/mar de ano bissexto são 2 dias."""
        assert Pause.between(date(2020, 2, 28), date(2020, 3, 1)).length_days == 2

    def test_inconsistent_length_rejected(self) -> None:
        """Tamanho diferente da diferença de datas é rejeitado."""
        with pytest.raises(PreconditionError):
            Pause(date(2021, 1, 1), date(2021, 1, 5), 3)

    def test_zero_length_rejected(self) -> None:
        """Pausa de zero dias não existe."""
        with pytest.raises(PreconditionError):
            Pause.between(date(2021, 1, 1), date(2021, 1, 1))


class TestExtractPauses:
    """Testes para a função extract_pauses."""

    def test_consecutive_days(self) -> None:
        """Uma pausa por par de dias consecutivos."""
        timeline = build_timeline(days_from_pauses(date(2021, 1, 1), [1, 3, 10]))
        assert [p.length_days for p in extract_pauses(timeline)] == [1, 3, 10]

    def test_single_day(self) -> None:
        """Um único dia de commit não gera pausas."""
        assert extract_pauses(build_timeline([date(2021, 1, 1)])) == []


class TestTukeyHinges:
    """Testes para tukey_hinges e far_out_threshold."""

    def test_odd_sample(self) -> None:
        """Para n ímpar a mediana entra nas duas metades."""
        assert tukey_hinges([3, 5, 7, 9, 120]) == (5, 9)
        assert far_out_threshold([3, 5, 7, 9, 120]).t_fov == 21

    def test_even_sample(self) -> None:
        """Para n par as metades são disjuntas."""
        assert tukey_hinges([1, 2, 3, 50]) == (Fraction(3, 2), Fraction(53, 2))
        assert far_out_threshold([1, 2, 3, 50]).t_fov == Fraction(203, 2)

    def test_unsorted_input(self) -> None:
        """A ordem de entrada não importa."""
        assert tukey_hinges([120, 9, 3, 7, 5]) == (5, 9)

    def test_constant_sample_is_invalid(self) -> None:
        """IQR zero torna a janela inválida."""
        result = far_out_threshold([2, 2, 2, 2, 2])
        assert result.valid is False
        assert result.iqr == 0

    def test_too_few_pauses_is_invalid(self) -> None:
        """Menos de 4 pausas torna a janela inválida mesmo com IQR alto."""
        assert far_out_threshold([1, 10, 100]).valid is False

    def test_iqr_equal_to_floor_is_invalid(self) -> None:
        """IQR precisa ser estritamente maior que 1."""
        result = far_out_threshold([1, 1, 2, 2])
        assert result.iqr == 1
        assert result.valid is False

    def test_empty_window(self) -> None:
        """Janela vazia é inválida, sem erro."""
        assert far_out_threshold([]).valid is False

    def test_empty_hinges_raise(self) -> None:
        """Hinges de lista vazia é erro de pré-condição."""
        with pytest.raises(PreconditionError):
            tukey_hinges([])

    @pytest.mark.property
    @settings(max_examples=1000, deadline=None)
    @given(st.lists(st.integers(min_value=1, max_value=2000), min_size=1, max_size=60))
    def test_matches_depth_oracle(self, values: list[int]) -> None:
        """Hinges coincidem com a definição por profundidade."""
        assert tukey_hinges(values) == _hinges_by_depth(values)


class TestDetectorConfig:
    """Testes para a validação de DetectorConfig."""

    def test_defaults(self) -> None:
        """Padrões: 3 meses, passo de 7 dias, 4 pausas, IQR > 1."""
        cfg = DetectorConfig()
        assert (cfg.window_months, cfg.shift_days, cfg.min_pauses_per_window, cfg.iqr_floor) == (3, 7, 4, 1)

    def test_unknown_window_size(self) -> None:
        """Tamanho de janela fora do conjunto suportado é rejeitado."""
        with pytest.raises(ConfigError):
            DetectorConfig(window_months=2)

    def test_zero_shift(self) -> None:
        """Passo zero é rejeitado."""
        with pytest.raises(ConfigError):
            DetectorConfig(shift_days=0)


class TestIterWindows:
    """Testes para iter_windows."""

    def test_calendar_months(self) -> None:
        """A janela usa meses de calendário."""
        first = next(iter_windows(date(2020, 1, 1), date(2020, 2, 1), DetectorConfig()))
        assert first == Window(0, date(2020, 1, 1), date(2020, 4, 1))
        assert first.length_days == 91

    def test_last_window_reaches_history_end(self) -> None:
        """A última janela é a primeira cujo fim alcança o último dia."""
        windows = list(iter_windows(date(2021, 1, 1), date(2021, 4, 10), DetectorConfig()))
        assert windows[-1].end >= date(2021, 4, 10)
        assert windows[-2].end < date(2021, 4, 10)
        assert [w.start for w in windows[:2]] == [date(2021, 1, 1), date(2021, 1, 8)]


class TestDetectBreaksGolden:
    """Casos de referência executados à mão."""

    def test_single_valid_window(self) -> None:
        """Pausas 2,4,6,8,60: hinges 4 e 8, limiar 20, um break de 60 dias."""
        timeline = build_timeline(days_from_pauses(date(2021, 1, 1), [2, 4, 6, 8, 60]))
        breaks = detect_breaks(timeline)
        assert len(breaks) == 1
        brk = breaks[0]
        assert (brk.start, brk.end, brk.length_days) == (date(2021, 1, 21), date(2021, 3, 22), 60)
        assert brk.threshold == 20
        assert brk.window.index == 0
        assert not brk.deferred

    def test_valid_window_without_anomaly(self) -> None:
        """Pausas 2,4,6,8,10: limiar 20, nenhuma pausa o excede."""
        timeline = build_timeline(days_from_pauses(date(2021, 1, 1), [2, 4, 6, 8, 10]))
        assert detect_breaks(timeline) == []

    def test_invalid_window_inherits_previous(self) -> None:
        """Janelas seguintes inválidas herdam o limiar 19 da primeira."""
        timeline = build_timeline(days_from_pauses(date(2021, 1, 1), [2, 4, 6, 8, 100]))
        breaks = detect_breaks(timeline)
        assert [(b.start, b.end) for b in breaks] == [(date(2021, 1, 21), date(2021, 5, 1))]
        assert breaks[0].threshold == 19
        assert breaks[0].window.index == 0
        assert not breaks[0].deferred
        assert not breaks[0].ambiguous

        ledger = window_thresholds(timeline)
        assert ledger[0].valid and not ledger[0].inherited
        assert (ledger[0].q1, ledger[0].q3) == (3, 7)
        assert all(e.inherited and e.t_fov == 19 for e in ledger[1:])

    def test_short_history_longer_than_window(self) -> None:
        """Histórico curto: pausa de 119 dias é adiada e julgada pelo tamanho da janela (91)."""
        days = [date(2020, 1, 1), date(2020, 1, 2), date(2020, 1, 3), date(2020, 5, 1)]
        breaks = detect_breaks(build_timeline(days))
        assert len(breaks) == 1
        assert (breaks[0].start, breaks[0].end) == (date(2020, 1, 3), date(2020, 5, 1))
        assert breaks[0].length_days == 119
        assert breaks[0].threshold == 91
        assert breaks[0].deferred

    def test_deferred_uses_mean_of_valid_thresholds(self) -> None:
        """Pausa adiada no início é julgada pela média dos limiares válidos posteriores."""
        days = [date(2021, 1, 1), *days_from_pauses(date(2021, 5, 1), [2, 4, 6, 8])]
        breaks = detect_breaks(build_timeline(days))
        assert len(breaks) == 1
        assert (breaks[0].start, breaks[0].end) == (date(2021, 1, 1), date(2021, 5, 1))
        assert breaks[0].threshold == 19
        assert breaks[0].deferred
        assert breaks[0].window.index == 0

    def test_two_commit_days_far_apart(self) -> None:
        """Dois dias separados por 151 dias: break adiado com limiar 90."""
        breaks = detect_breaks(build_timeline([date(2021, 1, 1), date(2021, 6, 1)]))
        assert [(b.length_days, b.threshold, b.deferred) for b in breaks] == [(151, 90, True)]

    def test_two_commit_days_close(self) -> None:
        """Pausa menor que a janela, sem limiar válido: nenhum break."""
        assert detect_breaks(build_timeline([date(2021, 1, 1), date(2021, 1, 10)])) == []

    def test_single_commit_day(self) -> None:
        """Um único dia de commit não tem breaks."""
        assert detect_breaks(build_timeline([date(2021, 1, 1)])) == []

    def test_uniform_weekly_rhythm(self, weekly_days) -> None:
        """Ritmo semanal uniforme por um ano: IQR zero, nenhum break."""
        assert detect_breaks(build_timeline(weekly_days(date(2021, 1, 4), 53))) == []

    def test_weekly_rhythm_with_long_gap(self, weekly_days) -> None:
        """Ritmo semanal com um buraco de 120 dias: exatamente um break."""
        before = weekly_days(date(2021, 1, 4), 27)
        after = weekly_days(before[-1] + timedelta(days=120), 26)
        breaks = detect_breaks(build_timeline(before + after))
        assert len(breaks) == 1
        brk = breaks[0]
        assert (brk.start, brk.end) == (date(2021, 7, 5), date(2021, 11, 2))
        assert brk.deferred
        # Primeira janela que adia a pausa: [05/04, 05/07]
        assert brk.window.index == 13
        assert brk.threshold == 91

    def test_year_window_absorbs_short_history(self) -> None:
        """Com janela de 12 meses a pausa de 119 dias cabe na janela e não é break."""
        days = [date(2020, 1, 1), date(2020, 1, 2), date(2020, 1, 3), date(2020, 5, 1)]
        assert detect_breaks(build_timeline(days), DetectorConfig(window_months=12)) == []

    @pytest.mark.parametrize(
        "pauses",
        [[2, 4, 6, 8, 60], [2, 4, 6, 8, 100], [3, 1, 4, 1, 5, 9, 2, 6, 40, 3, 5, 8, 9, 7, 90, 2]],
    )
    def test_translation_by_a_year(self, pauses: list[int]) -> None:
        """Deslocar tudo 365 dias entre anos não bissextos desloca os breaks igualmente."""
        base = detect_breaks(build_timeline(days_from_pauses(date(2021, 1, 1), pauses)))
        moved = detect_breaks(build_timeline(days_from_pauses(date(2022, 1, 1), pauses)))
        shift = timedelta(days=365)
        assert [(b.start + shift, b.end + shift, b.threshold) for b in base] == [
            (b.start, b.end, b.threshold) for b in moved
        ]


class TestDetectBreaksProperties:
    """Propriedades gerais do detector."""

    @pytest.mark.property
    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.integers(min_value=1, max_value=200), min_size=0, max_size=40))
    def test_breaks_are_unique_sorted_pauses(self, pauses: list[int]) -> None:
        """Breaks são pausas reais, únicas, ordenadas e acima do limiar aplicável."""
        timeline = build_timeline(days_from_pauses(date(2021, 1, 1), pauses))
        all_pauses = {p.key for p in extract_pauses(timeline)}
        breaks = detect_breaks(timeline)

        keys = [b.pause.key for b in breaks]
        assert len(keys) == len(set(keys))
        assert keys == sorted(keys)
        assert set(keys) <= all_pauses
        for brk in breaks:
            if brk.deferred:
                assert brk.length_days > brk.window.length_days
            else:
                assert brk.length_days > brk.threshold

    @pytest.mark.property
    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.integers(min_value=1, max_value=200), min_size=1, max_size=30))
    def test_deterministic(self, pauses: list[int]) -> None:
        """Duas execuções sobre a mesma timeline dão o mesmo resultado."""
        timeline = build_timeline(days_from_pauses(date(2021, 1, 1), pauses))
        assert detect_breaks(timeline) == detect_breaks(timeline)


class TestClosingThreshold:
    """Testes para closing_threshold e pauses_longer_than_window."""

    def test_last_valid_threshold(self) -> None:
        """Usa o último limiar válido da varredura."""
        timeline = build_timeline(days_from_pauses(date(2021, 1, 1), [2, 4, 6, 8, 100]))
        assert closing_threshold(timeline) == 19

    def test_no_valid_threshold_uses_window_length(self) -> None:
        """Sem limiar válido, usa o tamanho da última janela."""
        timeline = build_timeline([date(2021, 1, 1), date(2021, 1, 10)])
        assert closing_threshold(timeline) == 90

    def test_single_day_uses_first_window(self) -> None:
        """Um único dia: tamanho da janela a partir dele."""
        assert closing_threshold(build_timeline([date(2020, 1, 1)])) == 91

    def test_no_commits(self) -> None:
        """Timeline sem commits não tem limiar."""
        assert closing_threshold(build_timeline([])) is None

    def test_pauses_longer_than_window(self) -> None:
        """Conta pausas maiores que a primeira janela do desenvolvedor."""
        timeline = build_timeline(days_from_pauses(date(2021, 1, 1), [2, 100, 95, 30]))
        assert pauses_longer_than_window(timeline) == 2
        assert pauses_longer_than_window(timeline, DetectorConfig(window_months=4)) == 0
