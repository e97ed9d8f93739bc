#!/usr/bin/env python
"""Punto de entrada de los comandos del solver: solve, table, figure y verify."""
import os
import sys


def main():
    """Ejecuta el comando de administracion solicitado."""
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'subdifusion.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "No se pudo importar Django. Verifique que este instalado "
            "(pip install -r requirements.txt) y que el entorno virtual "
            "este activo."
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()
