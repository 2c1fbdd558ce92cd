# -*- coding: utf-8 -*-
import csv
import json
import math
import os

import numpy as np

import twinkernel
from twinkernel.logger import log


def format_value(v):
    """
    17 significant digits for floats so that values round trip exactly
    """
    if isinstance(v, (bool, np.bool_)):
        return 'true' if v else 'false'
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return 'nan'
        if math.isinf(v):
            return 'inf' if v > 0 else '-inf'
        return '{:.17g}'.format(v)
    if isinstance(v, np.integer):
        return str(int(v))
    if v is None:
        return ''
    return str(v)


def _jsonable(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError("Object of type {} is not JSON serializable".format(type(o).__name__))


class OutputWriter:

    def __init__(self, out_dir, config_hash, seed):
        """
        Writes CSV files and their JSON mirrors under one output directory, each carrying a provenance header
        :param out_dir: Destination directory, created when missing
        :type out_dir: str
        :param config_hash: RunConfig.config_hash()
        :type config_hash: str
        :type seed: int
        """
        self.out_dir = out_dir
        self.config_hash = config_hash
        self.seed = seed
        os.makedirs(out_dir, exist_ok=True)

    @property
    def header(self):
        return "# twinkernel {} config={} seed={}".format(twinkernel.__version__, self.config_hash, self.seed)

    @property
    def provenance(self):
        return {'version': twinkernel.__version__, 'config': self.config_hash, 'seed': self.seed}

    def write_csv(self, name, columns, rows):
        """
        :param name: File stem, written as <name>.csv
        :type columns: list(str)
        :type rows: list(list)
        :return: The path written
        """
        path = os.path.join(self.out_dir, '{}.csv'.format(name))
        with open(path, 'w', newline='') as f:
            f.write(self.header + '\n')
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(columns)
            for row in rows:
                writer.writerow([format_value(v) for v in row])
        log.info("Wrote {}".format(path))
        return path

    def write_json(self, name, payload):
        path = os.path.join(self.out_dir, '{}.json'.format(name))
        d = {'provenance': self.provenance}
        d.update(payload)
        with open(path, 'w') as f:
            f.write(json.dumps(d, indent=2, default=_jsonable))
            f.write('\n')
        log.info("Wrote {}".format(path))
        return path

    def write_table(self, name, columns, rows, payload=None):
        """
        A CSV and its JSON mirror
        """
        self.write_csv(name, columns, rows)
        d = {'columns': list(columns), 'rows': [list(r) for r in rows]}
        d.update(payload or dict())
        return self.write_json(name, d)

    def write_report(self, report, name=None):
        """
        :param report: Any report offering COLUMNS or columns, rows() and as_dict()
        """
        name = name or report.name
        columns = getattr(report, 'columns', None) or type(report).COLUMNS
        self.write_csv(name, columns, report.rows())
        return self.write_json(name, report.as_dict())
