from dataclasses import asdict

from django import forms

from fraccional.exceptions import ConfigValidationError
from fraccional.services.experiments import PROJECTION_L2, PROJECTION_RITZ, ExperimentConfig
from fraccional.services.reference_solution import CUSTOM, EXAMPLE_TAGS, NAMED_CUSTOM_DATA
from fraccional.services.sparse_linalg import METHODS


def _parse_list(raw, cast, label):
    if isinstance(raw, (list, tuple)):
        items = list(raw)
    else:
        items = [item for item in str(raw or '').replace(' ', '').split(',') if item]
    try:
        return [cast(item) for item in items]
    except (TypeError, ValueError):
        raise forms.ValidationError(f'{label} debe ser una lista separada por comas.')


#? --------- FORMULARIO DE CONFIGURACION DE EXPERIMENTO ------------
class ExperimentConfigForm(forms.Form):
    alpha = forms.FloatField(label='Orden fraccional')
    example = forms.ChoiceField(choices=[(tag, tag) for tag in EXAMPLE_TAGS + (CUSTOM,)])
    datum = forms.CharField(required=False)
    M = forms.CharField(label='Lista de M')
    N = forms.IntegerField(min_value=1)
    gamma = forms.FloatField(min_value=1.0)
    T = forms.FloatField()
    modes = forms.IntegerField(min_value=1)
    mu = forms.CharField(required=False)
    fine_M = forms.IntegerField(min_value=2)
    out = forms.CharField(required=False)
    tol = forms.FloatField(required=False)
    method = forms.ChoiceField(choices=[('', 'por defecto')] + [(m, m) for m in METHODS], required=False)
    projection = forms.ChoiceField(choices=[(PROJECTION_L2, 'L2'), (PROJECTION_RITZ, 'Ritz')])
    label = forms.CharField(required=False)

    def __init__(self, *args, require_doubling=False, **kwargs):
        super().__init__(*args, **kwargs)
        self.require_doubling = require_doubling

    def clean_alpha(self):
        alpha = self.cleaned_data.get('alpha')
        if alpha is None or not (0.0 < alpha < 1.0):
            raise forms.ValidationError('alpha debe estar en el intervalo abierto (0, 1).')
        return alpha

    def clean_T(self):
        T = self.cleaned_data.get('T')
        if T is None or T <= 0.0:
            raise forms.ValidationError('T debe ser positivo.')
        return T

    def clean_tol(self):
        tol = self.cleaned_data.get('tol')
        if tol is not None and not (0.0 < tol < 1.0):
            raise forms.ValidationError('La tolerancia debe estar en (0, 1).')
        return tol

    def clean_M(self):
        Ms = _parse_list(self.data.get('M'), int, 'M')
        if not Ms:
            raise forms.ValidationError('La lista de M no puede estar vacia.')
        if any(M < 2 for M in Ms):
            raise forms.ValidationError('Cada M debe ser al menos 2.')
        Ms = sorted(Ms)
        if self.require_doubling and any(b != 2 * a for a, b in zip(Ms, Ms[1:])):
            raise forms.ValidationError('Las M deben formar una sucesion que se duplica (4, 8, 16, ...).')
        return Ms

    def clean_mu(self):
        mu = _parse_list(self.data.get('mu'), float, 'mu') or [0.0]
        if any(value < 0.0 for value in mu):
            raise forms.ValidationError('Los pesos mu deben ser no negativos.')
        return mu

    def clean(self):
        cleaned_data = super().clean()
        example = cleaned_data.get('example')
        datum = cleaned_data.get('datum') or ''
        if example == CUSTOM and datum not in NAMED_CUSTOM_DATA:
            self.add_error('datum', f"Dato personalizado desconocido: {datum!r}.")

        fine_M = cleaned_data.get('fine_M')
        for M in cleaned_data.get('M') or []:
            if fine_M is None:
                break
            ratio, rest = divmod(fine_M, M)
            if rest or ratio & (ratio - 1):
                self.add_error('fine_M', f'fine_M={fine_M} debe ser M={M} por una potencia de dos.')
                break

        if cleaned_data.get('projection') == PROJECTION_RITZ and example == 'example3':
            self.add_error('projection', 'El ejemplo 3 no se anula en la frontera; use la proyeccion L2.')
        return cleaned_data


def validate_config(config: ExperimentConfig, require_doubling: bool = False) -> ExperimentConfig:
    """
    Valida la configuracion completa antes de cualquier calculo.

    Raises:
        ConfigValidationError: Con el nombre del primer campo invalido
    """
    data = asdict(config)
    if not isinstance(data['M'], str):
        data['M'] = ','.join(str(M) for M in data['M'])
    if not isinstance(data['mu'], str):
        data['mu'] = ','.join(repr(float(mu)) for mu in data['mu'])
    for key in ('tol', 'method'):
        if data[key] is None:
            data[key] = ''

    form = ExperimentConfigForm(data, require_doubling=require_doubling)
    if not form.is_valid():
        field_name, messages = next(iter(form.errors.items()))
        raise ConfigValidationError(field_name, ' '.join(messages))

    cleaned = form.cleaned_data
    return ExperimentConfig(
        alpha=cleaned['alpha'], example=cleaned['example'], datum=cleaned['datum'] or '',
        M=cleaned['M'], N=cleaned['N'], gamma=cleaned['gamma'], T=cleaned['T'],
        modes=cleaned['modes'], mu=cleaned['mu'], fine_M=cleaned['fine_M'],
        out=cleaned['out'] or '', tol=cleaned['tol'], method=cleaned['method'] or None,
        projection=cleaned['projection'], label=cleaned['label'] or '',
    )
