def get_comparison_template():
    """Return the Markdown template for a controller comparison report"""
    return """# Controller comparison: {{ scenario }}

Scenario hash `{{ scenario_hash }}`, version `{{ version }}`, {{ seeds|length }} seed(s): {{ seeds|join(", ") }}
{% if generated_at %}
Generated {{ generated_at }}
{% endif %}
Mean PercentObs ± stddev per controller (rows) and target count (columns):

| controller |{% for m in m_values %} m={{ m }} |{% endfor %}
|---|{% for m in m_values %}---|{% endfor %}
{% for controller in controllers %}| {{ controller }} |{% for m in m_values %}{% set stats = table[controller][m] %}{% if stats %} {{ "%.2f"|format(stats.mean) }} ± {{ "%.2f"|format(stats.stddev) }} |{% else %} n/a |{% endif %}{% endfor %}
{% endfor %}
{% for m in m_values %}- m={{ m }}: {% if best[m] %}best {{ best[m] }}{% else %}PercentObs undefined{% endif %}
{% endfor %}"""
