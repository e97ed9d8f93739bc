from fraccional.management.base import ExperimentCommand, exit_codes
from fraccional.presets import get_preset
from fraccional.services.experiments import ExperimentConfig, run_study
from fraccional.services.exports import format_table, write_table_csv, write_table_xlsx


class Command(ExperimentCommand):
    help = "Estudio de convergencia en M: tabla de errores E_mu y tasas (texto, CSV y XLSX)."
    require_doubling = True

    def add_arguments(self, parser):
        parser.add_argument('preset', nargs='?', default='custom',
                            help='table1, table2, table3 o custom (solo banderas)')
        super().add_arguments(parser)

    def base_config(self, options) -> ExperimentConfig:
        if options.get('config') or options['preset'] == 'custom':
            return super().base_config(options)
        return get_preset(options['preset'])

    def handle(self, *args, **options):
        with exit_codes():
            config = self.build_config(options)
            reports = run_study(
                config,
                parallel=options.get('paralelo') or None,
                show_progress=self.show_progress(options),
            )
            name = config.label or options['preset']
            directory = self.output_dir(config, name)
            csv_path = write_table_csv(reports, directory / f'{name}.csv', config.mu)
            xlsx_path = write_table_xlsx(reports, directory / f'{name}.xlsx', config.mu, title=name)

        title = f'{name}: {config.datum_label}, alpha={config.alpha:g}, N={config.N}, gamma={config.gamma:g}'
        self.stdout.write(format_table(reports, config.mu, title=title))
        self.stdout.write(self.style.SUCCESS(f'Tabla escrita en {csv_path} y {xlsx_path}'))
