# -*- coding: utf-8 -*-
import json


class EquivarianceReport:

    COLUMNS = ['k', 'lambda_true', 'mu_nystrom', 'rel_err', 'alignment']

    def __init__(self, g, rule_label, rows, max_expansion_residual, tail_bound, alignment_method='vector'):
        """
        Nystrom spectrum and eigenvectors of a transported operator compared against the base spectrum
        :param g: The transporting group element
        :type g: GroupElement
        :param rule_label: The quadrature rule the operator was discretized on
        :type rule_label: str
        :param rows: One dict per checked index with the COLUMNS keys
        :type rows: list(dict)
        :param max_expansion_residual: max |K_g - sum_k lambda_k U_g P_k (x) U_g P_k (y)| on the test grid
        :type max_expansion_residual: float
        :param tail_bound: Analytic bound on the truncated eigenvalue tail
        :type tail_bound: float
        :param alignment_method: 'vector' or 'subspace' when near degenerate eigenvalues were found
        :type alignment_method: str
        """
        self.g = g
        self.rule_label = rule_label
        self._rows = rows
        self.max_expansion_residual = max_expansion_residual
        self.tail_bound = tail_bound
        self.alignment_method = alignment_method

    @property
    def max_rel_err(self):
        return max(r['rel_err'] for r in self._rows)

    @property
    def min_alignment(self):
        return min(r['alignment'] for r in self._rows)

    def rows(self):
        return [[r[c] for c in EquivarianceReport.COLUMNS] for r in self._rows]

    def as_dict(self):
        return {
            'g': self.g.as_dict(),
            'rule': self.rule_label,
            'alignment_method': self.alignment_method,
            'max_expansion_residual': self.max_expansion_residual,
            'tail_bound': self.tail_bound,
            'rows': self._rows
        }

    def __repr__(self):
        return str(self.as_dict())


class CheckResult:

    COLUMNS = ['check', 'subject', 'measured', 'tolerance', 'passed']

    def __init__(self, name, subject, measured, tolerance, comparison='<='):
        """
        A single measured quantity compared against its tolerance
        :param name: The check name, e.g. unitarity
        :param subject: What was checked, usually a group element tag
        :param comparison: '<=' for errors, '>=' for alignments and eigenvalue floors
        """
        self.name = name
        self.subject = subject
        self.measured = float(measured)
        self.tolerance = float(tolerance)
        self.comparison = comparison

    @property
    def passed(self):
        if self.comparison == '>=':
            return self.measured >= self.tolerance
        # nan never passes
        return self.measured <= self.tolerance

    def row(self):
        return [self.name, self.subject, self.measured, self.tolerance, self.passed]

    def as_dict(self):
        return dict(zip(CheckResult.COLUMNS, self.row()))

    def __repr__(self):
        return "CheckResult({} {}: {} {} {})".format(self.name, self.subject, self.measured, self.comparison, self.tolerance)


class ExperimentReport:

    def __init__(self, name, columns, rows, summary=None):
        """
        A tabular simulation result with a free form summary block
        :param name: Report name, used as the output file stem (bias_variance, rates, ...)
        :type name: str
        :type columns: list(str)
        :type rows: list(list)
        :param summary: Scalars such as fitted slopes, dropped rate points or max relative differences
        :type summary: dict
        """
        self.name = name
        self.columns = list(columns)
        self._rows = [list(r) for r in rows]
        self.summary = summary or dict()

    def rows(self):
        return self._rows

    def records(self):
        return [dict(zip(self.columns, r)) for r in self._rows]

    def column(self, name):
        i = self.columns.index(name)
        return [r[i] for r in self._rows]

    def as_dict(self):
        return {
            'name': self.name,
            'columns': self.columns,
            'rows': self._rows,
            'summary': self.summary
        }

    def save(self, buf):
        """
        :param buf: An output buffer
        :type buf: io.StringIO
        """
        buf.write(json.dumps(self.as_dict(), indent=2))

    def __repr__(self):
        return str(self.as_dict())
