"""Result rendering, JSON documents, trace tables and exports."""

import json
from fractions import Fraction as F

from src.compiler import load_model, run_queries
from src.pex import node_label
from src.prob import condense
from src.report import (
    NO_ATOM, export_detailed_json, export_summary_csv, render_pmf, render_trace,
    results_frame, results_to_json, trace_frame,
)
from src.statues import marg_traced

CONDITIONING = (
    "let b1 = {0: 1/3, 1: 2/3}\n"
    "let b2 = {0: 3/4, 1: 1/4}\n"
    "let s = b1 + b2\n"
    "query b1 given (s <= 1)\n"
)


def conditioning_trace():
    compiled = load_model(CONDITIONING)
    (query,) = compiled.queries
    _, events = marg_traced(query.root)
    return trace_frame(query.root, events, compiled.labels)


class TestRenderPmf:
    def test_boolean_results_print_p_true(self):
        pmf = condense({True: 891, False: 1600})
        assert render_pmf(pmf) == '891/2491'
        assert render_pmf(pmf, 'float', 4) == '0.3577'

    def test_full_boolean_pmf(self):
        pmf = condense({True: 1, False: 3})
        assert render_pmf(pmf, full=True) == '{true: 1/4, false: 3/4}'

    def test_numeric_pmf(self):
        assert render_pmf(condense({0: 1, 2: 2}), 'float', 3) == '{0: 0.333, 2: 0.667}'


class TestJson:
    def test_document_shape(self):
        compiled = load_model("let d = uniform(1, 2)\nquery d\nquery d / (d - d)")
        document = results_to_json(run_queries(compiled))
        ok, failed = document['queries']
        assert ok == {'source': 'd', 'pmf': [
            {'value': '1', 'prob_fraction': '1/2', 'prob_float': 0.5},
            {'value': '2', 'prob_fraction': '1/2', 'prob_float': 0.5},
        ]}
        assert failed['pmf'] is None
        assert 'div' in failed['error']
        json.dumps(document)

    def test_results_frame(self):
        compiled = load_model("let d = uniform(1, 2)\nquery d\nquery d / (d - d)")
        frame = results_frame(run_queries(compiled))
        assert list(frame['query_no']) == [1, 1, 2]
        assert frame['error'].isna().tolist() == [True, True, False]


class TestTraceTable:
    def test_one_row_per_root_atom_and_skip(self):
        frame = conditioning_trace()
        assert list(frame.index) == ['#1', '#2', '#3', '#4']
        assert frame.index.name == 'step'

    def test_column_order(self):
        frame = conditioning_trace()
        assert list(frame.columns[:2]) == ['b1', 'b2']
        assert frame.columns[-1].endswith('→')

    def test_cells(self):
        frame = conditioning_trace()
        root = frame.columns[-1]
        assert frame.loc['#1', 'b1'] == '0'
        assert frame.loc['#1', root] == '(0, 1/4)'
        assert frame.loc['#3', root] == '(1, 1/2)'
        assert frame.loc['#4', 'b1'] == '1'
        assert frame.loc['#4', 'b2'] == '1'
        assert frame.loc['#4', root] == NO_ATOM

    def test_pruned_target_edge_is_empty(self):
        frame = conditioning_trace()
        (target_edge,) = [c for c in frame.columns if c.startswith('b1→given')]
        assert frame.loc['#3', target_edge] == '(1, 1)'
        assert frame.loc['#4', target_edge] == NO_ATOM

    def test_self_sum_has_two_rows(self):
        compiled = load_model("let b1 = {0: 1/3, 1: 2/3}\nquery b1 + b1")
        (query,) = compiled.queries
        _, events = marg_traced(query.root)
        frame = trace_frame(query.root, events, compiled.labels)
        assert len(frame) == 2
        assert list(frame[frame.columns[-1]]) == ['(0, 1/3)', '(2, 2/3)']

    def test_sum_of_two_binaries(self):
        compiled = load_model("let b1 = {0: 1/3, 1: 2/3}\nlet b2 = {0: 3/4, 1: 1/4}\nquery b1 + b2")
        (query,) = compiled.queries
        _, events = marg_traced(query.root)
        frame = trace_frame(query.root, events, compiled.labels)
        assert list(frame.index) == ['#1', '#2', '#3', '#4']
        assert list(frame[frame.columns[-1]]) == ['(0, 1/4)', '(1, 1/12)', '(1, 1/2)', '(2, 1/6)']
        outer = query.root.arg
        inner = outer.tail
        column = f"{node_label(inner)}→{node_label(outer)}"
        assert list(frame[column]) == ['(<0>, 3/4)', '(<1>, 1/4)', '(<0>, 3/4)', '(<1>, 1/4)']

    def test_render(self):
        text = render_trace(conditioning_trace())
        assert '#4' in text
        assert NO_ATOM in text


class TestExport:
    def test_files_are_written(self, tmp_path, monkeypatch):
        monkeypatch.setattr('src.report.RESULTS_DIR', tmp_path)
        results = run_queries(load_model(CONDITIONING))
        csv_name = export_summary_csv(results, 'conditioning')
        json_name = export_detailed_json(results, 'conditioning')
        assert (tmp_path / csv_name).read_text(encoding='utf-8').startswith('query_no,query,value')
        document = json.loads((tmp_path / json_name).read_text(encoding='utf-8'))
        assert document['model'] == 'conditioning'
        assert document['queries'][0]['pmf'][0]['prob_fraction'] == '2/5'
        assert F(document['queries'][0]['pmf'][1]['prob_fraction']) == F(3, 5)

    def test_disabled_exports(self, monkeypatch):
        monkeypatch.setattr('src.report.EXPORT_SUMMARY_CSV', False)
        monkeypatch.setattr('src.report.EXPORT_DETAILED_JSON', False)
        results = run_queries(load_model(CONDITIONING))
        assert export_summary_csv(results, 'x') is None
        assert export_detailed_json(results, 'x') is None
