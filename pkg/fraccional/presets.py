"""
Configuraciones de los experimentos publicados (tablas y figuras).

Ejemplo 1 usa alpha = 0.75, gamma = 1.6, N = 1000, T = 0.5. Para los
ejemplos 2 y 3 no se repite alpha; se asume el mismo 0.75 con N = 1300.
"""
from fraccional.exceptions import InvalidArgumentError
from fraccional.services.experiments import ExperimentConfig

DOUBLING_M = [4, 8, 16, 32, 64]

PRESETS = {
    'table1': ExperimentConfig(
        alpha=0.75, example='example1', M=DOUBLING_M, N=1000, gamma=1.6, T=0.5,
        modes=60, mu=[0.0], fine_M=128, label='table1',
    ),
    'table2': ExperimentConfig(
        alpha=0.75, example='example2', M=DOUBLING_M, N=1300, gamma=1.6, T=0.5,
        modes=60, mu=[0.0, 0.25, 0.5, 0.75], fine_M=128, label='table2',
    ),
    'table3': ExperimentConfig(
        alpha=0.75, example='example3', M=DOUBLING_M, N=1300, gamma=1.6, T=0.5,
        modes=60, mu=[0.0, 0.5, 0.75, 1.0], fine_M=128, label='table3',
    ),
    'figure1': ExperimentConfig(
        alpha=0.75, example='example1', M=DOUBLING_M, N=1000, gamma=1.6, T=0.5,
        modes=60, mu=[0.0], fine_M=128, label='figure1',
    ),
    'figure2': ExperimentConfig(
        alpha=0.75, example='example2', M=DOUBLING_M, N=1300, gamma=1.6, T=0.5,
        modes=60, mu=[0.0], fine_M=128, label='figure2',
    ),
    'figure3': ExperimentConfig(
        alpha=0.75, example='example3', M=DOUBLING_M, N=1300, gamma=1.6, T=0.5,
        modes=60, mu=[0.0], fine_M=128, label='figure3',
    ),
}

# Valores publicados: M -> errores por mu y tasas impresas (la primera fila no tiene tasa).
PUBLISHED_TABLES = {
    'table1': {
        'mu': [0.0],
        'errors': {
            4: [1.2759e-02], 8: [3.3749e-03], 16: [8.7940e-04], 32: [2.2284e-04], 64: [5.6414e-05],
        },
        'rates': {
            8: [1.9186], 16: [1.9402], 32: [1.9805], 64: [1.9819],
        },
    },
    'table2': {
        'mu': [0.0, 0.25, 0.5, 0.75],
        'errors': {
            4: [3.008e-02, 9.521e-03, 3.610e-03, 1.597e-03],
            8: [1.054e-02, 1.412e-03, 5.342e-04, 2.401e-04],
            16: [5.441e-03, 4.112e-04, 1.279e-04, 5.678e-05],
            32: [1.876e-03, 1.391e-04, 3.344e-05, 1.513e-05],
            64: [8.667e-04, 6.425e-05, 8.598e-06, 4.055e-06],
        },
        # El original imprime 9.536 en (16, E_0); log2(1.054e-2 / 5.441e-3) = 0.954.
        'rates': {
            8: [1.513, 2.754, 2.757, 2.734],
            16: [0.954, 1.779, 2.062, 2.080],
            32: [1.536, 1.564, 1.936, 1.908],
            64: [1.114, 1.114, 1.959, 1.900],
        },
    },
    'table3': {
        'mu': [0.0, 0.5, 0.75, 1.0],
        'errors': {
            4: [1.0160e+00, 3.453e-02, 1.531e-02, 9.898e-03],
            8: [9.7501e-01, 8.545e-03, 2.245e-03, 1.525e-03],
            16: [7.0054e-01, 3.852e-03, 6.809e-04, 4.783e-04],
            32: [3.2311e-01, 1.776e-03, 2.000e-04, 1.442e-04],
            64: [1.5301e-01, 8.409e-04, 6.234e-05, 4.945e-05],
        },
        'rates': {
            8: [0.0594, 2.015, 2.769, 2.699],
            16: [0.4769, 1.150, 1.721, 1.672],
            32: [1.1164, 1.117, 1.767, 1.730],
            64: [1.0783, 1.078, 1.682, 1.544],
        },
    },
}


def get_preset(name: str) -> ExperimentConfig:
    try:
        return PRESETS[name].replace()
    except KeyError:
        raise InvalidArgumentError(f"Preset desconocido: {name!r} (opciones: {', '.join(PRESETS)})")
