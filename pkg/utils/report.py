"""Plain-text rendering of validation, cohomology, collection and fibration results"""

from utils.cache import format_coefficients, format_dims


def yes_no(flag):
    return 'yes' if flag else 'no'


def render_fan_check(fan, report, relations=None, verbose=False):
    """Summary line of a fan check, with the failed checks and relations when verbose"""
    count = len(relations) if relations is not None else '-'
    lines = [
        f"smooth: {yes_no(report.smooth)}, complete: {yes_no(report.complete)}, "
        f"primitive collections: {count}"
    ]
    for check in report.failures:
        for problem in check.problems:
            lines.append(f"  {check.name}: {problem}")
    if verbose:
        lines.append(f"rays: {fan.n_rays}, maximal cones: {len(fan.max_cones)}, "
                     f"picard number: {fan.picard_number}")
        for relation in relations or ():
            lines.append(f"  {relation}")
    return '\n'.join(lines)


def render_cohomology(table, verbose=False):
    lines = [f"h: {format_dims(table.dims)}"]
    if verbose:
        for entry in table.ledger:
            pattern = '{' + ', '.join(str(i) for i in entry.pattern) + '}'
            lines.append(
                f"  pattern {pattern}: {entry.points} character(s) x "
                f"homology {format_dims(entry.homology)} -> {format_dims(entry.contributions)}"
            )
    return '\n'.join(lines)


def render_collection_report(report, verbose=False):
    lines = [
        f"fan: {report.fan_name}",
        f"length: {report.length}",
        f"exceptional: {yes_no(report.is_exceptional)}",
        f"strongly exceptional: {yes_no(report.is_strongly_exceptional)}",
        f"length equals rank K0: {yes_no(report.length_equals_k0_rank)}",
        f"gram unitriangular: {yes_no(report.gram_unitriangular)}",
        f"fullness: {report.fullness}",
    ]
    if report.violations:
        lines.append(f"violations: {report.violations}")
    lines.append("collection:")
    for position, divisor in enumerate(report.collection):
        lines.append(f"  E{position} = {format_coefficients(divisor.coeffs)}")
    lines.append("gram:")
    for row in report.gram:
        lines.append('  ' + ' '.join(f"{x:>4}" for x in row))
    if verbose:
        lines.append("ext:")
        for (j, k), dims in sorted(report.evidence.items()):
            lines.append(f"  Ext(E{j}, E{k}) = {format_dims(dims)}")
    return '\n'.join(lines)


def render_bundle(bundle):
    lines = [
        f"total: {bundle.total}",
        f"rays: {bundle.total.n_rays}, maximal cones: {len(bundle.total.max_cones)}",
        f"fiber rays: {' '.join(str(i) for i in bundle.fiber_rays)}",
        f"base rays: {' '.join(str(i) for i in bundle.base_rays)}",
        "twist:",
    ]
    for row in bundle.twist:
        lines.append('  ' + ' '.join(str(x) for x in row))
    return '\n'.join(lines)


def render_construction(result, verbose=False):
    lines = [f"t: {result.t}"]
    for attempt in result.attempts:
        lines.append(f"  t={attempt.t}: {attempt.violations} violation(s)")
    lines.append(render_collection_report(result.report, verbose))
    return '\n'.join(lines)
