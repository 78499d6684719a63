# sweep.py

# Barrido de experimentos desde un fichero JSON. Las ejecuciones ya registradas en el
# ledger (o presentes en el CSV de salida) se omiten, así que un barrido interrumpido
# se reanuda con el mismo comando.
import logging

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from topicmodels.cli import ensure_parent, load_json_config, require_file
from topicmodels.exceptions import TopicModelError
from topicmodels.experiments import (
    TRACE_COLUMNS, expand_sweep, iter_results, read_csv_rows, write_csv_rows,
)
from topicmodels.models import ExperimentRun

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = "Run a JSON-configured grid of fits and write one results row per run."

    def add_arguments(self, parser):
        parser.add_argument('config', help="sweep config (JSON)")
        parser.add_argument('--workers', type=int, help="parallel worker processes (env ALBU_WORKERS)")
        parser.add_argument('--output', help="results CSV")
        parser.add_argument('--trace-output', help="epoch-trace CSV (run_id, epoch, avg_kld)")
        parser.add_argument('--name', help="sweep label stored in the ledger")
        parser.add_argument('--no-resume', action='store_true', help="rerun runs that are already recorded")

    def handle(self, *args, **options):
        config = load_json_config(require_file(options['config'], "sweep config"))
        for key in ('workers', 'output', 'trace_output', 'name'):
            if options[key] is not None:
                config[key] = options[key]
        workers = int(config.get('workers', settings.ALBU_WORKERS))
        output = config.get('output') or settings.ALBU_RESULTS_CSV
        name = config.get('name', '')

        try:
            specs = expand_sweep(config, default_runs=settings.SWEEP_DEFAULT_RUNS)
        except TopicModelError as exc:
            raise CommandError(str(exc)) from exc
        ensure_parent(output)

        existing_rows = read_csv_rows(output)
        ExperimentRun.import_rows(existing_rows, sweep=name)

        run_ids = [spec.run_id for spec in specs]
        if options['no_resume']:
            ExperimentRun.objects.filter(run_id__in=run_ids).delete()
        completed = set(ExperimentRun.objects.filter(run_id__in=run_ids).values_list('run_id', flat=True))
        pending = [spec for spec in specs if spec.run_id not in completed]
        for run_id in sorted(completed):
            logger.info("skipping completed run %s", run_id)
        self.stdout.write(f"{len(specs)} runs, {len(completed)} already done, {len(pending)} to run "
                          f"on {workers} worker(s)")

        traces = []
        try:
            for spec, result, run_traces in iter_results(pending, workers):
                ExperimentRun.record(result, sweep=name)
                traces.extend(run_traces)
                logger.info("finished %s avg_kld=%s coherence=%s", spec.run_id, result.avg_kld, result.coherence)
        except TopicModelError as exc:
            raise CommandError(str(exc)) from exc
        finally:
            # Aunque falle una ejecución, el CSV refleja todo lo que ya está en el ledger.
            ExperimentRun.export_csv(output, run_ids + [row['run_id'] for row in existing_rows])
            if traces and config.get('trace_output'):
                self._write_traces(config['trace_output'], traces)

        self.stdout.write(self.style.SUCCESS(f"wrote {output}"))

    def _write_traces(self, path, traces):
        ensure_parent(path)
        rows = read_csv_rows(path) + traces
        unique = {(row['run_id'], int(row['epoch'])): row for row in rows}
        write_csv_rows(path, [unique[key] for key in sorted(unique)], columns=TRACE_COLUMNS)
