# models.py

# Se importa el módulo 'sys' para detener la ejecución si Django no está instalado.
import sys
# 'now' asigna la fecha y hora actual respetando la zona horaria del proyecto.
from django.utils.timezone import now
try:
    from django.db import models
except Exception:
    print("Hubo un error al cargar los módulos de Django. ¿Tienes Django instalado?")
    sys.exit()

from .evaluation import CSV_COLUMNS
from .experiments import write_csv_rows


# === Modelo ExperimentRun ===
# Una fila por ejecución evaluada (comando evaluate o un punto del barrido).
# El run_id único es lo que permite reanudar un barrido interrumpido sin repetir trabajo.
class ExperimentRun(models.Model):
    ALBU = 'albu'
    GIBBS = 'gibbs'
    ALGORITHM_CHOICES = [
        (ALBU, 'ALBU'),
        (GIBBS, 'Collapsed Gibbs'),
    ]

    run_id = models.CharField(max_length=200, unique=True)
    # Nombre del barrido que produjo la fila; vacío para evaluaciones sueltas.
    sweep = models.CharField(max_length=100, blank=True, default='')
    algorithm = models.CharField(max_length=10, choices=ALGORITHM_CHOICES)
    dataset = models.CharField(max_length=200)
    M = models.IntegerField()
    K = models.IntegerField()
    seed = models.IntegerField()
    epochs = models.IntegerField()
    # Nulo cuando la métrica no aplica (KLD sin verdad de referencia, p. ej. corpus de texto).
    avg_kld = models.FloatField(null=True, blank=True)
    coherence = models.FloatField(null=True, blank=True)
    runtime_ms = models.FloatField(null=True, blank=True)
    created = models.DateTimeField(default=now)

    class Meta:
        ordering = ['run_id']

    def __str__(self):
        return f"{self.run_id}: avg_kld={self.avg_kld} coherence={self.coherence}"

    # Fila con exactamente las columnas del CSV de resultados.
    def as_row(self):
        row = {column: getattr(self, column) for column in CSV_COLUMNS}
        for column in ('avg_kld', 'coherence'):
            row[column] = '' if row[column] is None else repr(float(row[column]))
        row['runtime_ms'] = '' if self.runtime_ms is None else f"{self.runtime_ms:.0f}"
        return row

    @classmethod
    def record(cls, result, sweep=''):
        """Inserta o reemplaza la fila del ledger de un EvalResult."""
        run, _ = cls.objects.update_or_create(
            run_id=result.run_id,
            defaults={
                'sweep': sweep,
                'algorithm': result.algorithm,
                'dataset': result.dataset,
                'M': result.M,
                'K': result.K,
                'seed': result.seed,
                'epochs': result.epochs,
                'avg_kld': result.avg_kld,
                'coherence': result.coherence,
                'runtime_ms': result.runtime_ms,
            },
        )
        return run

    @classmethod
    def import_rows(cls, rows, sweep=''):
        """Copia al ledger las filas de un CSV de resultados que aún no tiene."""
        known = set(cls.objects.filter(
            run_id__in=[row['run_id'] for row in rows]).values_list('run_id', flat=True))
        for row in rows:
            if row['run_id'] in known:
                continue
            cls.objects.create(
                run_id=row['run_id'], sweep=sweep, algorithm=row['algorithm'], dataset=row['dataset'],
                M=int(row['M']), K=int(row['K']), seed=int(row['seed']), epochs=int(row['epochs']),
                avg_kld=_optional_float(row['avg_kld']), coherence=_optional_float(row['coherence']),
                runtime_ms=_optional_float(row['runtime_ms']),
            )

    @classmethod
    def export_csv(cls, path, run_ids):
        """Reescribe el CSV de resultados con las filas del ledger de ``run_ids``, en orden de run_id."""
        runs = cls.objects.filter(run_id__in=set(run_ids)).order_by('run_id')
        write_csv_rows(path, [run.as_row() for run in runs])


def _optional_float(value):
    return float(value) if value not in (None, '') else None
