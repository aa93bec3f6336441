# src/tools/report_generator.py

import logging
import os
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd
import seaborn as sns
import yaml
from jinja2 import Template
import matplotlib
matplotlib.use('Agg')  # Использовать не-интерактивный бэкенд
import matplotlib.pyplot as plt

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.9g'


class ReportGenerator:
    """Запись результатов прогона: журнал CSV, метрики YAML, сводка Markdown, графики"""

    def __init__(self, template_path: Optional[str] = None):
        # Базовый шаблон сводки, если пользовательский файл не задан
        self.default_template = """# Прогон {{ name }}

- Режим: {{ mode }}
- Статус: **{{ status }}**
- Длительность: {{ "%.3f"|format(duration) }} с, тиков: {{ ticks }}

## Метрики

| Метрика | Значение |
|---|---|
{% for key, value in metrics.items() -%}
| {{ key }} | {{ value }} |
{% endfor %}
{% if charts %}
## Графики

{% for title, path in charts.items() -%}
![{{ title }}]({{ path }})
{% endfor %}
{% endif %}"""
        self.template_content = self.default_template
        if template_path and os.path.exists(template_path):
            with open(template_path, 'r', encoding='utf-8') as file:
                self.template_content = file.read()

    @staticmethod
    def write_log(path: str, log: pd.DataFrame) -> str:
        """CSV: одна строка на тик, время в первой колонке, 9 значащих цифр"""
        log.to_csv(path, index=False, float_format=FLOAT_FORMAT)
        return path

    @staticmethod
    def _plain(value: Any) -> Any:
        """Метрики в простые типы YAML"""
        if isinstance(value, (np.floating, float)):
            return float(value)
        if isinstance(value, (np.integer, int)) and not isinstance(value, bool):
            return int(value)
        if isinstance(value, (np.bool_, bool)):
            return bool(value)
        return value

    def write_metrics(self, path: str, metrics: Dict[str, Any]) -> str:
        """Плоский документ ключ-значение"""
        flat = {key: self._plain(value) for key, value in metrics.items()}
        with open(path, 'w', encoding='utf-8') as file:
            yaml.safe_dump(flat, file, sort_keys=False, allow_unicode=True)
        return path

    def render_summary(self, data: Dict[str, Any]) -> str:
        template = Template(self.template_content)
        return template.render(**data)

    def generate_charts(self, out_dir: str, log: pd.DataFrame, mode: str) -> Dict[str, str]:
        """
        Генерирует графики прогона

        Args:
            out_dir (str): каталог прогона
            log (pd.DataFrame): журнал по тикам
            mode (str): quad или hopper

        Returns:
            Dict[str, str]: заголовок графика -> имя файла
        """
        chart_paths: Dict[str, str] = {}
        sns.set_theme(style='whitegrid')

        if mode == 'hopper':
            panels = [('Высота корпуса', ['z'], 'м'), ('Горизонтальная скорость', ['vx'], 'м/с')]
        else:
            panels = [
                ('Скорость корпуса', ['vx', 'vy', 'cmd_vx'], 'м/с'),
                ('Крен и тангаж', ['roll', 'pitch'], 'рад'),
                ('Вертикальные силы', ['fz_FL', 'fz_FR', 'fz_RL', 'fz_RR'], 'Н'),
            ]

        for title, columns, unit in panels:
            present = [column for column in columns if column in log.columns]
            if not present:
                continue
            try:
                plt.figure(figsize=(10, 4))
                long = log.melt(id_vars='time', value_vars=present, var_name='сигнал', value_name=unit)
                sns.lineplot(data=long, x='time', y=unit, hue='сигнал')
                plt.title(title)
                plt.xlabel('Время, с')
                plt.tight_layout()

                filename = f"{present[0]}_{len(chart_paths)}.png"
                plt.savefig(os.path.join(out_dir, filename))
                chart_paths[title] = filename
            except Exception as e:
                logger.error(f"Ошибка при построении графика '{title}': {e}")
            finally:
                plt.close()

        return chart_paths

    def write_run(self, out_dir: str, log: pd.DataFrame, metrics: Dict[str, Any], name: str = "run",
                  mode: str = "quad", plots: bool = False, extra_tables: Optional[Dict[str, pd.DataFrame]] = None
                  ) -> Dict[str, Any]:
        """Полный комплект файлов прогона

        Returns:
            словарь со статусом и путями: log, metrics, summary, charts
        """
        os.makedirs(out_dir, exist_ok=True)
        paths: Dict[str, Any] = {
            'log': self.write_log(os.path.join(out_dir, 'log.csv'), log),
            'metrics': self.write_metrics(os.path.join(out_dir, 'metrics.yaml'), metrics),
        }
        for table_name, table in (extra_tables or {}).items():
            paths[table_name] = self.write_log(os.path.join(out_dir, f"{table_name}.csv"), table)

        charts = self.generate_charts(out_dir, log, mode) if plots and len(log) else {}
        duration = float(log['time'].iloc[-1]) if len(log) else 0.0
        summary = self.render_summary({
            'name': name,
            'mode': mode,
            'status': metrics.get('status', 'success'),
            'duration': duration,
            'ticks': len(log),
            'metrics': {key: self._plain(value) for key, value in metrics.items()},
            'charts': charts,
        })
        paths['summary'] = os.path.join(out_dir, 'summary.md')
        with open(paths['summary'], 'w', encoding='utf-8') as file:
            file.write(summary)

        paths['charts'] = charts
        logger.info(f"Результаты прогона {name} записаны в {out_dir}")
        return {'status': 'success', 'paths': paths}

