"""
Rendering and export of query results and enumeration traces.
Builds pandas DataFrames for pmfs and trace tables; exports summary CSV
and detailed JSON reports into data/results/.
"""

import json
from datetime import datetime
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd

from src.config import (
    EXPORT_DETAILED_JSON, EXPORT_SUMMARY_CSV, FLOAT_DIGITS, RESULTS_DIR, TRACE_LINE_WIDTH,
)
from src.compiler import QueryResult
from src.pex import Elementary, Node, node_label, reachable_nodes
from src.prob import Pmf, format_pmf, format_prob, format_value
from src.statues import BIND, RELEASE, SKIP, UNBIND, YIELD, TraceEvent

# Placeholder for empty trace cells
NO_ATOM = '−'


# =============================================
# RESULT RENDERING
# =============================================

def render_pmf(pmf: Pmf, fmt: str = 'fraction', digits: int = FLOAT_DIGITS,
               full: bool = False) -> str:
    """
    Render a query result.

    Boolean results print P(true) alone unless `full` is set.

    Args:
        pmf: Result pmf
        fmt: 'fraction' or 'float'
        digits: Digits after the point in float mode
        full: Print the whole boolean pmf

    Returns:
        Rendered text
    """
    mode = 'fraction' if fmt == 'fraction' else 'decimal'
    d = digits if mode == 'decimal' else None
    if pmf.is_boolean() and not full:
        return format_prob(pmf.p_true(), mode, d)
    return format_pmf(pmf, mode, d)


def pmf_records(pmf: Pmf) -> List[Dict[str, Any]]:
    """JSON-ready entries in pmf order."""
    return [
        {
            'value': format_value(v),
            'prob_fraction': f"{p.numerator}/{p.denominator}",
            'prob_float': float(p),
        }
        for v, p in pmf
    ]


def results_to_json(results: List[QueryResult]) -> Dict[str, Any]:
    """Stable JSON document: {"queries": [{"source", "pmf"[, "error"]}]}."""
    queries = []
    for r in results:
        entry: Dict[str, Any] = {'source': r.source}
        if r.pmf is not None:
            entry['pmf'] = pmf_records(r.pmf)
        else:
            entry['pmf'] = None
            entry['error'] = str(r.error)
        queries.append(entry)
    return {'queries': queries}


def results_frame(results: List[QueryResult]) -> pd.DataFrame:
    """One row per (query, value); failed queries get one row with the error."""
    rows = []
    for i, r in enumerate(results, 1):
        if r.pmf is None:
            rows.append({'query_no': i, 'query': r.source, 'value': None,
                         'prob_fraction': None, 'prob_float': None, 'error': str(r.error)})
            continue
        for rec in pmf_records(r.pmf):
            rows.append({'query_no': i, 'query': r.source, **rec, 'error': None})
    return pd.DataFrame(rows, columns=['query_no', 'query', 'value', 'prob_fraction',
                                       'prob_float', 'error'])


# =============================================
# TRACE TABLES
# =============================================

def trace_frame(root: Node, events: List[TraceEvent],
                labels: Optional[Dict[int, str]] = None) -> pd.DataFrame:
    """
    Step table of an enumeration trace.

    One row per root atom and per skipped (false) condition. Columns are the
    values bound to elementary nodes, then the atom each edge currently holds
    (`child→parent`), then the root atom. Edges from constants are omitted.
    """
    labels = labels or {}
    nodes = {n.id: n for n in reachable_nodes(root)}

    def label(node_id: int) -> str:
        return labels.get(node_id) or node_label(nodes[node_id])

    def constant(node_id: int) -> bool:
        node = nodes[node_id]
        return isinstance(node, Elementary) and node.is_singleton()

    columns: Dict[Tuple, str] = {}
    root_key = ('root', root.id)
    bound: Dict[int, Any] = {}
    in_use: Dict[Tuple, Tuple] = {}
    rows: List[Dict[Tuple, str]] = []
    steps: List[str] = []

    def register(key: Tuple, text: str):
        if key not in columns:
            if text in columns.values():
                text = f"{text}[{key[-1]}]"
            columns[key] = text

    def snapshot(step: int, root_cell: str):
        row = {('elem', i): format_value(v) for i, v in bound.items()}
        row.update({k: _atom(a) for k, a in in_use.items()})
        row[root_key] = root_cell
        rows.append(row)
        steps.append(f"#{step}")

    for ev in events:
        if ev.kind == BIND and isinstance(nodes[ev.node_id], Elementary) and not constant(ev.node_id):
            register(('elem', ev.node_id), label(ev.node_id))
            bound[ev.node_id] = ev.payload
        elif ev.kind == UNBIND:
            bound.pop(ev.node_id, None)
        elif ev.kind == YIELD:
            if ev.parent_id is None:
                snapshot(ev.step, _atom(ev.payload))
            elif not constant(ev.node_id):
                key = ('edge', ev.node_id, ev.parent_id, ev.slot)
                register(key, f"{label(ev.node_id)}→{label(ev.parent_id)}")
                in_use[key] = ev.payload
        elif ev.kind == RELEASE and ev.parent_id is not None:
            in_use.pop(('edge', ev.node_id, ev.parent_id, ev.slot), None)
        elif ev.kind == SKIP:
            snapshot(ev.step, NO_ATOM)

    register(root_key, f"{label(root.id)}→")
    ordered = [k for k in columns if k[0] == 'elem'] + \
              [k for k in columns if k[0] == 'edge'] + [root_key]
    frame = pd.DataFrame(
        [[row.get(k, NO_ATOM) for k in ordered] for row in rows],
        columns=[columns[k] for k in ordered],
        index=pd.Index(steps, name='step'),
    )
    return frame


def _atom(atom: Tuple) -> str:
    v, p = atom
    return f"({format_value(v)}, {format_prob(p)})"


def render_trace(frame: pd.DataFrame) -> str:
    """Text rendering of a trace table; wide tables wrap."""
    if frame.empty:
        return '(no steps)'
    return frame.to_string(line_width=TRACE_LINE_WIDTH)


# =============================================
# EXPORT FUNCTIONS
# =============================================

def export_summary_csv(results: List[QueryResult], model_name: str) -> Optional[str]:
    """
    Export one row per (query, value) to CSV.

    Args:
        results: Query results in order
        model_name: Model file stem used in the file name

    Returns:
        Written file name, or None when CSV export is disabled
    """
    if not EXPORT_SUMMARY_CSV:
        return None

    RESULTS_DIR.mkdir(parents=True, exist_ok=True)
    timestamp = datetime.now().strftime('%Y%m%d_%H%M%S')
    filename = RESULTS_DIR / f'{model_name}_results_{timestamp}.csv'

    results_frame(results).to_csv(filename, index=False)
    return filename.name


def export_detailed_json(results: List[QueryResult], model_name: str) -> Optional[str]:
    """
    Export the JSON result document with export metadata.

    Args:
        results: Query results in order
        model_name: Model file stem used in the file name

    Returns:
        Written file name, or None when JSON export is disabled
    """
    if not EXPORT_DETAILED_JSON:
        return None

    RESULTS_DIR.mkdir(parents=True, exist_ok=True)
    timestamp = datetime.now().strftime('%Y%m%d_%H%M%S')
    filename = RESULTS_DIR / f'{model_name}_results_detailed_{timestamp}.json'

    document = {
        'export_date': timestamp,
        'model': model_name,
        **results_to_json(results),
    }
    with open(filename, 'w', encoding='utf-8') as f:
        json.dump(document, f, indent=2, default=str)

    return filename.name
