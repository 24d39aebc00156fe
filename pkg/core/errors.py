"""
Иерархия исключений ttk.

Все ошибки наследуются от TrainTrackError. Ошибки сертификации
(CertificationError и наследники) CLI переводит в код выхода 2,
остальные в код выхода 1.
"""

from typing import Optional


class TrainTrackError(Exception):
    """Базовое исключение для всех ошибок трейн-треков"""
    pass


class MalformedTrackError(TrainTrackError):
    """Структурная ошибка: конец ветви отсутствует, задублирован или ссылается на несуществующую ветвь"""
    pass


class TrackSyntaxError(TrainTrackError):
    """Синтаксическая ошибка во входном файле"""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}:"
        if line is not None:
            location = f"{location}{line}:"
        super().__init__(f"{location} {message}" if location else message)


class SemanticValidationError(TrainTrackError):
    """Файл разобран, но нарушает инвариант (имя инварианта в сообщении)"""

    def __init__(self, invariant: str, message: str):
        self.invariant = invariant
        super().__init__(f"[{invariant}] {message}")


class WrongRoleError(TrainTrackError):
    """Ход применен к ветви неподходящего типа (split не на large, shift не на mixed)"""
    pass


class NotATrainpathError(TrainTrackError):
    """Цикл ветвей нарушает касательную структуру в стрелке"""
    pass


class NotEmbeddedError(TrainTrackError):
    """Цикл проходит одну ветвь дважды"""
    pass


class MeasureError(TrainTrackError):
    """Вектор весов нарушает условия конуса мер или относится к другому треку"""
    pass


class NotMaximalError(TrainTrackError):
    """Операция требует максимального трека"""
    pass


class CollapseError(TrainTrackError):
    """Коллапс невозможен: шаг не был получен расщеплением"""
    pass


class SplitTieError(TrainTrackError):
    """λ-расщепление с равными весами μ(a) = μ(b)"""
    pass


class NotTightError(TrainTrackError):
    """Последовательность не tight: матрица переноса содержит нули"""
    pass


class CurveNotCarriedError(TrainTrackError):
    """Кривая не лежит на треке, на котором ее пытаются использовать"""
    pass


class FixtureIncoherenceError(TrainTrackError):
    """Набор фикстур не согласован (твист не замыкается, подтреки не покрывают трек и т.п.)"""
    pass


class CertificationError(TrainTrackError):
    """Базовое исключение неудачной сертификации псевдо-Аносова"""
    pass


class NotPrimitiveError(CertificationError):
    """Матрица периода не имеет положительной степени в пределах границы Виландта"""
    pass


class ConvergenceError(CertificationError):
    """Степенной метод не сошелся за отведенное число итераций"""
    pass
