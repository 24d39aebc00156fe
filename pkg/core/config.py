import os
import sys
import logging
from fractions import Fraction
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, field_validator

load_dotenv()


def _env_flag(name: str, default: bool) -> bool:
    value = os.getenv(name)
    if value is None or value == "":
        return default
    return value.strip().lower() in ("1", "true", "yes", "on")


class Settings(BaseModel):
    """Настройки ttk из переменных окружения (.env подхватывается автоматически)"""

    color: bool = False
    tol: Fraction = Fraction(1, 10**12)
    grid_steps: int = 256
    log_level: str = "WARNING"
    max_iter: int = 10000
    interval_bits: int = 64
    seed: int = 0

    model_config = {"arbitrary_types_allowed": True}

    @field_validator("tol", mode="before")
    @classmethod
    def _parse_tol(cls, value):
        return parse_rational(value) if isinstance(value, str) else Fraction(value)

    @field_validator("grid_steps", "max_iter", "interval_bits")
    @classmethod
    def _positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("значение должно быть положительным")
        return value

    @classmethod
    def from_env(cls) -> "Settings":
        return cls(
            color=_env_flag("TTK_COLOR", sys.stdout.isatty()),
            tol=os.getenv("TTK_TOL", "1/10^12"),
            grid_steps=int(os.getenv("TTK_GRID_STEPS", "256")),
            log_level=os.getenv("TTK_LOG_LEVEL", "WARNING"),
            max_iter=int(os.getenv("TTK_MAX_ITER", "10000")),
            interval_bits=int(os.getenv("TTK_INTERVAL_BITS", "64")),
            seed=int(os.getenv("TTK_SEED", "0")),
        )


def parse_rational(text: str) -> Fraction:
    """
    Разбор рационального числа: целое, a/b, десятичная дробь или a/b^c

    Raises:
        ValueError: если строка не является рациональным числом
    """
    text = text.strip()
    if "^" in text:
        num, _, power = text.partition("/")
        base, _, exponent = power.partition("^")
        return Fraction(int(num), int(base) ** int(exponent))
    return Fraction(text)


def configure_logging(level: Optional[str] = None):
    """Настройка корневого логгера (формат как у сервисных логов)"""
    logging.basicConfig(
        level=getattr(logging, (level or settings.log_level).upper(), logging.WARNING),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )


settings = Settings.from_env()
