import re
import sys
import json
from typing import Dict, Any, Optional
from datetime import datetime
from colorama import Fore, Style, init

from core.config import settings
from core.run_state import RunState, RunPhase

_ANSI = re.compile(r"\x1b\[[0-9;]*m")


class RunTracer:
    """Трассировка выполнения команд с цветным выводом в консоль"""

    def __init__(self, color: Optional[bool] = None, stream=None):
        self.color = settings.color if color is None else color
        if self.color:
            # Инициализация colorama для Windows
            init(autoreset=True)
        self.stream = stream

        self.phase_colors = {
            RunPhase.LOAD: Fore.CYAN,
            RunPhase.TRANSFORM: Fore.BLUE,
            RunPhase.CERTIFY: Fore.GREEN,
            RunPhase.PROFILE: Fore.YELLOW,
            RunPhase.REPORT: Fore.MAGENTA
        }

        self.symbols = {
            "start": "▶",
            "step": "•",
            "success": "✔",
            "error": "✖",
            "warning": "!",
            "info": "i"
        }

    def _emit(self, text: str):
        if not self.color:
            text = _ANSI.sub("", text)
        print(text, file=self.stream or sys.stdout)

    def _format_timestamp(self) -> str:
        return datetime.now().strftime("%H:%M:%S.%f")[:-3]

    def _print_separator(self, char: str = "─", length: int = 72, color: str = Fore.WHITE):
        self._emit(f"{color}{char * length}{Style.RESET_ALL}")

    def _print_box(self, title: str, content: str, color: str = Fore.WHITE):
        """Печать содержимого в рамке"""
        lines = content.split('\n')
        max_width = max(len(title), max(len(line) for line in lines)) + 4

        self._emit(f"{color}┌{'─' * (max_width - 2)}┐{Style.RESET_ALL}")
        title_padding = max_width - len(title) - 4
        self._emit(f"{color}│ {Style.BRIGHT}{title}{Style.NORMAL}{' ' * title_padding} │{Style.RESET_ALL}")
        self._emit(f"{color}├{'─' * (max_width - 2)}┤{Style.RESET_ALL}")
        for line in lines:
            line_padding = max_width - len(line) - 4
            self._emit(f"{color}│ {line}{' ' * line_padding} │{Style.RESET_ALL}")
        self._emit(f"{color}└{'─' * (max_width - 2)}┘{Style.RESET_ALL}")

    def box(self, title: str, content: str, color: str = Fore.WHITE):
        self._print_box(title, content, color)

    def line(self, text: str = ""):
        """Обычная строка отчета (без временной метки)"""
        self._emit(text)

    def trace_phase(self, phase: RunPhase, message: str):
        color = self.phase_colors.get(phase, Fore.WHITE)
        self._emit(f"{color}[{self._format_timestamp()}] {self.symbols['step']} "
                   f"{phase.value.upper()}: {message}{Style.RESET_ALL}")

    def trace_success(self, message: str):
        self._emit(f"{Fore.GREEN}{Style.BRIGHT}{self.symbols['success']} {message}{Style.RESET_ALL}")

    def trace_failure(self, message: str):
        self._emit(f"{Fore.RED}{Style.BRIGHT}{self.symbols['error']} {message}{Style.RESET_ALL}")

    def trace_warning(self, message: str):
        self._emit(f"{Fore.YELLOW}{self.symbols['warning']} WARNING: {message}{Style.RESET_ALL}")

    def trace_error(self, error_message: str, context: Dict[str, Any] = None):
        """Трассировка ошибки (в stderr)"""
        text = f"{Fore.RED}{self.symbols['error']} ERROR: {error_message}{Style.RESET_ALL}"
        if not self.color:
            text = _ANSI.sub("", text)
        print(text, file=sys.stderr)
        if context:
            self._print_box("Error Context", json.dumps(context, indent=2, ensure_ascii=False), Fore.RED)

    def trace_run_complete(self, state: RunState):
        """Сводка по шагам выполнения (флаг --trace)"""
        summary = state.get_execution_summary()
        self._print_separator("═", color=Fore.MAGENTA)

        status_symbol = self.symbols['error'] if state.has_errors else self.symbols['success']
        header = f"{status_symbol} {state.command.upper()} COMPLETED"
        lines = [f"Total Time: {summary['total_execution_time']:.2f}s",
                 f"Total Steps: {summary['total_steps']}",
                 f"Certified: {summary['certified']}",
                 f"Errors: {summary['error_count']}"]
        for step in state.steps:
            details = ", ".join(f"{k}={v}" for k, v in step.summary.items())
            lines.append(f"{step.phase.value:>9} | {step.name}: {details} ({step.execution_time:.3f}s)")

        color = Fore.RED if state.has_errors else Fore.GREEN
        self._print_box(header, "\n".join(lines), color)
        self._print_separator("═", color=Fore.MAGENTA)


# Глобальный экземпляр трассировщика
tracer = RunTracer()
