from fraccional.management.base import ExperimentCommand, exit_codes
from fraccional.services.error_metrics import write_summary_csv
from fraccional.services.experiments import run_study


class Command(ExperimentCommand):
    help = "Ejecuta una corrida (M, N) del esquema fraccional y escribe el error por paso en CSV."

    def handle(self, *args, **options):
        with exit_codes():
            config = self.build_config(options)
            reports = run_study(
                config,
                parallel=options.get('paralelo') or None,
                show_progress=self.show_progress(options),
            )
            directory = self.output_dir(config, 'solve')
            for report in reports:
                path = report.write_csv(directory / f'errores_{config.datum_label.replace(":", "_")}_M{report.M}.csv')
                values = ', '.join(f'E_{mu:g}={value:.4e}' for mu, value in report.weighted.items())
                self.stdout.write(f'M={report.M} N={report.N} alpha={report.alpha:g}: {values}')
                self.stdout.write(f'  error por paso: {path}')
            summary = write_summary_csv(reports, directory / 'resumen.csv', config.mu)

        self.stdout.write(self.style.SUCCESS(f'Resumen escrito en {summary}'))
