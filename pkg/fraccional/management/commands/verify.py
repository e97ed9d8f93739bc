from django.core.management.base import BaseCommand, CommandError

from fraccional.services.verification import SLOW_SUITES, SUITES, run_suites


class Command(BaseCommand):
    help = "Ejecuta las suites de verificacion (funciones especiales, cuadratura, ensamblaje, limite alpha -> 1, tasas)."

    def add_arguments(self, parser):
        parser.add_argument('suites', nargs='*', help=f'Suites a ejecutar: {", ".join(list(SUITES) + list(SLOW_SUITES))}')
        parser.add_argument('--completo', action='store_true', help='Incluye las suites lentas')
        parser.add_argument('--mlf-x-lo', dest='mlf_x_lo', type=float, help='Umbral serie/integral forzado')
        parser.add_argument('--mlf-x-hi', dest='mlf_x_hi', type=float, help='Umbral integral/asintotica forzado')
        parser.add_argument('--seed', type=int, default=0, help='Semilla de las historias aleatorias de la suite cuadratura')

    def handle(self, *args, **options):
        names = options.get('suites') or None
        known = set(SUITES) | set(SLOW_SUITES)
        unknown = [name for name in names or [] if name not in known]
        if unknown:
            raise CommandError(f'Suites desconocidas: {", ".join(unknown)}', returncode=2)

        seed = options.get('seed') or 0
        if seed < 0:
            raise CommandError(f'La semilla debe ser >= 0, se recibio {seed}', returncode=2)

        overrides = {}
        if options.get('mlf_x_lo') is not None:
            overrides['x_lo'] = options['mlf_x_lo']
        if options.get('mlf_x_hi') is not None:
            overrides['x_hi'] = options['mlf_x_hi']

        include_slow = options.get('completo') or any(name in SLOW_SUITES for name in names or [])
        results = run_suites(names, include_slow=include_slow, mlf_overrides=overrides or None,
                             seed=seed)

        failed = 0
        for suite in results:
            if suite.passed:
                self.stdout.write(self.style.SUCCESS(f'[OK]    {suite.name} ({len(suite.checks)} comprobaciones)'))
                continue
            failed += 1
            self.stdout.write(self.style.ERROR(f'[FALLA] {suite.name}'))
            for description, _, detail in suite.failures():
                self.stdout.write(f'        - {description}: {detail}')

        if failed:
            raise CommandError(f'{failed} suite(s) con fallas', returncode=1)
        self.stdout.write(self.style.SUCCESS('Todas las suites pasaron'))
