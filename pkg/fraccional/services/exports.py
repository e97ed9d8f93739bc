"""
Salida de resultados: CSV por paso y por estudio, tabla XLSX, tabla de texto
y script de gnuplot para las curvas de error.
"""
import logging
from pathlib import Path
from typing import List, Optional, Sequence

from openpyxl import Workbook

from fraccional.services.error_metrics import ErrorReport, pairwise_rates, write_summary_csv

logger = logging.getLogger(__name__)


def _rates_by_mu(reports: Sequence[ErrorReport], mu_list: Sequence[float]):
    return {mu: pairwise_rates([r.weighted[mu] for r in reports]) for mu in mu_list}


def table_rows(reports: Sequence[ErrorReport], mu_list: Sequence[float]) -> List[list]:
    """Filas [M, E_mu1, CR_mu1, E_mu2, CR_mu2, ...]; CR es None en la primera fila."""
    mu_list = [float(mu) for mu in mu_list]
    reports = sorted(reports, key=lambda r: r.M)
    rates = _rates_by_mu(reports, mu_list)
    rows = []
    for idx, report in enumerate(reports):
        row = [report.M]
        for mu in mu_list:
            row.append(report.weighted[mu])
            row.append(rates[mu][idx - 1] if idx else None)
        rows.append(row)
    return rows


def table_headers(mu_list: Sequence[float]) -> List[str]:
    headers = ['M']
    for mu in mu_list:
        headers += [f'E_{mu:g}', f'CR_{mu:g}']
    return headers


def format_table(reports: Sequence[ErrorReport], mu_list: Sequence[float], title: str = '') -> str:
    """Tabla de texto con 5 cifras significativas."""
    headers = table_headers(mu_list)
    lines = [title] if title else []
    lines.append(' | '.join(f'{h:>11}' for h in headers))
    lines.append('-' * len(lines[-1]))
    for row in table_rows(reports, mu_list):
        cells = [f'{row[0]:>11d}']
        for value in row[1:]:
            if value is None:
                cells.append(' ' * 11)
            elif abs(value) < 0.1:
                cells.append(f'{value:>11.4e}')
            else:
                cells.append(f'{value:>11.5g}')
        lines.append(' | '.join(cells))
    return '\n'.join(lines)


def write_step_csvs(reports: Sequence[ErrorReport], directory, prefix: str) -> List[Path]:
    """Un CSV "n,t,err" por M."""
    directory = Path(directory)
    paths = []
    for report in sorted(reports, key=lambda r: r.M):
        paths.append(report.write_csv(directory / f'{prefix}_M{report.M}.csv'))
    return paths


def write_table_csv(reports: Sequence[ErrorReport], path, mu_list: Sequence[float]) -> Path:
    return write_summary_csv(reports, path, mu_list)


def write_table_xlsx(reports: Sequence[ErrorReport], path, mu_list: Sequence[float],
                     title: str = 'Errores') -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    workbook = Workbook(write_only=True)
    sheet = workbook.create_sheet(title=title[:31])
    sheet.append(table_headers(mu_list))
    for row in table_rows(reports, mu_list):
        sheet.append(row)
    workbook.save(str(path))
    logger.info(f"Tabla XLSX escrita en {path}")
    return path


def write_gnuplot_script(csv_paths: Sequence[Path], path, labels: Optional[Sequence[str]] = None,
                         title: str = '') -> Path:
    """Script con ejes logaritmicos que grafica t contra err para cada CSV."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    labels = list(labels) if labels is not None else [Path(p).stem for p in csv_paths]
    lines = [
        "set datafile separator ','",
        'set logscale xy',
        "set xlabel 't_n'",
        "set ylabel 'error'",
        "set key bottom right",
    ]
    if title:
        lines.append(f"set title '{title}'")
    series = [
        f"'{Path(csv_path).name}' every ::1 using 2:3 with lines title '{label}'"
        for csv_path, label in zip(csv_paths, labels)
    ]
    lines.append('plot ' + ', \\\n     '.join(series))
    path.write_text('\n'.join(lines) + '\n')
    return path
