# src/agent/memory.py

from collections import deque
from typing import Any, Deque, Dict, List, Optional

import numpy as np


class ControllerMemory:
    """Состояние контроллера между тиками

    context - последние значения (решение QP, силы, точки постановки),
    history - события решений MPC и переходов ног.
    """

    def __init__(self, history_limit: Optional[int] = 10000):
        self.context: Dict[str, Any] = {}     # Текущий контекст
        self.history: Deque[Dict[str, Any]] = deque(maxlen=history_limit)  # История решений
        self.history_limit = history_limit
        self.clear_session()

    def update_context(self, data: Dict[str, Any]):
        """Обновление текущего контекста"""
        self.context.update(data)

    def get_context(self) -> Dict[str, Any]:
        """Получение текущего контекста"""
        return self.context

    def record(self, time: float, action: str, data: Dict[str, Any]):
        """Добавление события в историю"""
        self.history.append({'time': time, 'action': action, 'data': data})

    def get_history(self, action: Optional[str] = None) -> List[Dict[str, Any]]:
        """Получение истории, при необходимости только одного вида событий"""
        if action is None:
            return list(self.history)
        return [entry for entry in self.history if entry['action'] == action]

    def clear_session(self):
        """Сброс к состоянию до первого тика"""
        self.context.clear()
        self.history.clear()
        self.context.update({
            'solution': None,                     # последнее QpSolution (теплый старт)
            'forces': np.zeros((4, 3)),           # удерживаемые силы первого шага
            'last_solve_time': None,
            'contact': None,                      # флаги контакта прошлого тика
            'swing_start': np.full((4, 3), np.nan),
            'footholds': np.full((4, 3), np.nan),
            'swing_count': np.zeros(4, dtype=int),
        })
