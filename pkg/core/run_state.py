from typing import Dict, List, Any, Optional
from datetime import datetime
from dataclasses import dataclass, field
from enum import Enum


class RunPhase(Enum):
    """Фазы выполнения команды ttk"""
    LOAD = "load"
    TRANSFORM = "transform"
    CERTIFY = "certify"
    PROFILE = "profile"
    REPORT = "report"


@dataclass
class RunStep:
    """Отдельный шаг выполнения"""
    phase: RunPhase
    timestamp: datetime
    name: str
    summary: Dict[str, Any]
    execution_time: float

    def to_dict(self) -> Dict[str, Any]:
        """Преобразование в словарь для логирования"""
        return {
            "phase": self.phase.value,
            "timestamp": self.timestamp.isoformat(),
            "name": self.name,
            "summary": self.summary,
            "execution_time": self.execution_time
        }


@dataclass
class RunState:
    """Состояние выполнения одной команды CLI"""

    command: str
    arguments: Dict[str, Any] = field(default_factory=dict)
    current_phase: RunPhase = RunPhase.LOAD

    steps: List[RunStep] = field(default_factory=list)

    start_time: datetime = field(default_factory=datetime.now)
    last_update: datetime = field(default_factory=datetime.now)

    certified: Optional[bool] = None
    has_errors: bool = False
    error_messages: List[str] = field(default_factory=list)

    def add_step(self, phase: RunPhase, name: str, summary: Dict[str, Any], execution_time: float):
        """Добавить шаг и перевести состояние в его фазу"""
        self.current_phase = phase
        self.steps.append(RunStep(
            phase=phase,
            timestamp=datetime.now(),
            name=name,
            summary=summary,
            execution_time=execution_time
        ))
        self.last_update = datetime.now()

    def add_error(self, error_message: str):
        """Добавить ошибку"""
        self.has_errors = True
        self.error_messages.append(error_message)
        self.last_update = datetime.now()

    def get_phase_steps(self, phase: RunPhase) -> List[RunStep]:
        return [step for step in self.steps if step.phase == phase]

    def get_execution_summary(self) -> Dict[str, Any]:
        """Получить сводку выполнения"""
        phase_stats = {}
        for phase in RunPhase:
            phase_steps = self.get_phase_steps(phase)
            if phase_steps:
                phase_stats[phase.value] = {
                    "steps_count": len(phase_steps),
                    "total_time": sum(s.execution_time for s in phase_steps)
                }

        return {
            "command": self.command,
            "total_execution_time": (self.last_update - self.start_time).total_seconds(),
            "total_steps": len(self.steps),
            "current_phase": self.current_phase.value,
            "certified": self.certified,
            "has_errors": self.has_errors,
            "error_count": len(self.error_messages),
            "phase_statistics": phase_stats
        }

    def to_dict(self) -> Dict[str, Any]:
        """Преобразование в словарь для сериализации"""
        return {
            "command": self.command,
            "arguments": self.arguments,
            "current_phase": self.current_phase.value,
            "steps": [step.to_dict() for step in self.steps],
            "start_time": self.start_time.isoformat(),
            "last_update": self.last_update.isoformat(),
            "certified": self.certified,
            "has_errors": self.has_errors,
            "error_messages": self.error_messages,
            "execution_summary": self.get_execution_summary()
        }
