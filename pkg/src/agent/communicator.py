# src/agent/communicator.py

import sys
from typing import Optional, TextIO


class Communicator:
    """Вывод для пользователя: результаты в stdout, предупреждения и ошибки в stderr"""

    def __init__(self, stream: Optional[TextIO] = None, error_stream: Optional[TextIO] = None):
        self.stream = stream or sys.stdout
        self.error_stream = error_stream or sys.stderr

    def say(self, message: str):
        """Вывод сообщения"""
        print(message, file=self.stream)
        self.stream.flush()

    def show_warning(self, message: str):
        """Отображение предупреждения"""
        print(f"Предупреждение: {message}", file=self.error_stream)

    def show_error(self, message: str):
        """Отображение ошибки"""
        print(f"Ошибка: {message}", file=self.error_stream)
