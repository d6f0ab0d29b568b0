"""Human-readable run summaries"""

from jinja2 import Environment, StrictUndefined

from xcrelay.metrics.export import ScenarioOutcome

SUMMARY_TEMPLATE = """\
== {{ outcome.scenario }}{% if seed is not none %} (seed {{ seed }}){% endif %} ==
{% for run in outcome.runs %}
{{ run.label }}: {{ run.report.acked }}/{{ run.report.requested }} acked, \
{{ run.report.timed_out }} timed out, throughput {{ "%.3f"|format(run.report.throughput) }}/s, \
{{ run.report.duplicate_reverts }} duplicate deliveries
{% if run.report.latency.count %}
  latency s: min {{ "%.2f"|format(run.report.latency.min) }}, \
median {{ "%.2f"|format(run.report.latency.median) }}, \
p95 {{ "%.2f"|format(run.report.latency.p95) }}, max {{ "%.2f"|format(run.report.latency.max) }}
{% endif %}
{% for label, ledger in run.report.per_relayer.items() %}
  {{ "%-6s"|format(label) }} {{ "%-26s"|format(run.report.strategies[label]) }} \
net {{ "%6d"|format(ledger.net) }}  rewards {{ ledger.rewards }}  gas {{ ledger.gas_spent }}  \
slashed {{ ledger.slashed }}  deliveries {{ ledger.deliveries }}  reverts {{ ledger.reverts }}
{% endfor %}
{% endfor %}
{% if outcome.checks %}
checks:
{% for check in outcome.checks %}
  [{{ "PASS" if check.passed else "FAIL" }}] {{ check.name }}: {{ check.detail }}
{% endfor %}
{% endif %}
"""

_environment = Environment(
    trim_blocks=True, lstrip_blocks=True, keep_trailing_newline=True, undefined=StrictUndefined
)
_template = _environment.from_string(SUMMARY_TEMPLATE)


def render_summary(outcome: ScenarioOutcome, seed=None) -> str:
    return _template.render(outcome=outcome, seed=seed)
