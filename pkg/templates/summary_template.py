def get_summary_template():
    """Return the Markdown template for a run summary (one or more seeds)"""
    return """# Run summary: {{ scenario }} / {{ controller }}

- Targets: {{ m_total }}
- Steps: {{ tau }}
- Scenario hash: `{{ scenario_hash }}`
- Version: `{{ version }}`

| seed | PercentObs |
|---|---|
{% for s in summaries %}| {{ s.seed }} | {{ "%.2f"|format(s.percent_obs) }} |
{% endfor %}{% if aggregate %}
Mean {{ "%.2f"|format(aggregate.mean) }}, stddev {{ "%.2f"|format(aggregate.stddev) }}, min {{ "%.2f"|format(aggregate.min) }}, max {{ "%.2f"|format(aggregate.max) }}
{% endif %}{% if conflicts %}
Belief conflicts recovered: {{ conflicts }}
{% endif %}"""
