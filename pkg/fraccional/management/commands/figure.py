from fraccional.management.base import ExperimentCommand, exit_codes
from fraccional.presets import get_preset
from fraccional.services.experiments import ExperimentConfig, run_study
from fraccional.services.exports import write_gnuplot_script, write_step_csvs


class Command(ExperimentCommand):
    help = "Curvas de error por paso (t_n, error) para cada M, con script de gnuplot."

    def add_arguments(self, parser):
        parser.add_argument('preset', nargs='?', default='custom',
                            help='figure1, figure2, figure3 o custom (solo banderas)')
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
            paths = write_step_csvs(reports, directory, name)
            script = write_gnuplot_script(
                paths, directory / f'{name}.gp',
                labels=[f'M={r.M}' for r in sorted(reports, key=lambda r: r.M)],
                title=f'{config.datum_label}, alpha={config.alpha:g}',
            )

        for path in paths:
            self.stdout.write(f'  {path}')
        self.stdout.write(self.style.SUCCESS(f'{len(paths)} curvas y script {script}'))
