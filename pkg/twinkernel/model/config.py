# -*- coding: utf-8 -*-
import copy
import hashlib
import json

import yaml

from twinkernel.exceptions import ConfigException, TwinKernelException
from twinkernel.experiments.targets import target_from_dict
from twinkernel.kernels import EigenvalueProfile
from twinkernel.orthopoly import basis_from_tag
from twinkernel.transport import GroupElement, check_supported

METHODS = ('series', 'series-transported', 'parzen', 'soft', 'multimodal')
PRESETS = ('bias-variance', 'rates', 'equivariance', 'multimodal', 'all')
K_RULES = ('scaling', 'fixed')


class ExperimentConfig:

    def __init__(self, target, groups=None, n_grid=None, k_rule='scaling', K=8, ks=None, replicates=200, seed=42,
                 out=None, threads=1, n=2000, dims=None):
        """
        :param target: The density the samples are drawn from, its basis is the estimator basis
        :type target: TargetDensity
        :param groups: Group elements the estimators are transported by
        :type groups: list(GroupElement)
        :param n_grid: Strictly increasing sample sizes for sweeps and rate studies
        :type n_grid: list(int)
        :param k_rule: 'scaling' for K = round(n^{1/(2t+1)}), 'fixed' for the constant K
        :param ks: Truncation levels of the bias-variance sweep
        :param n: Sample size of the single size studies (error identity, multimodal comparison)
        :param dims: Total dimensions of the multimodal comparison
        """
        self.target = target
        self.groups = list(groups) if groups is not None else [GroupElement.identity()]
        self.n_grid = list(n_grid) if n_grid is not None else [250, 500, 1000, 2000, 4000, 8000, 16000]
        self.k_rule = k_rule
        self.K = K
        self.ks = list(ks) if ks is not None else [4, 8, 16]
        self.replicates = replicates
        self.seed = seed
        self.out = out
        self.threads = threads
        self.n = n
        self.dims = list(dims) if dims is not None else [6, 10, 14]

        if not self.n_grid or any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])) or self.n_grid[0] < 1:
            raise ConfigException("n grid must be a nonempty strictly increasing list of positive sizes, found {}".format(self.n_grid))
        if self.replicates < 1:
            raise ConfigException("Replicate count must be at least 1, found {}".format(self.replicates))
        if self.k_rule not in K_RULES:
            raise ConfigException("Unknown K rule '{}', must be one of {}".format(self.k_rule, K_RULES))
        for g in self.groups:
            try:
                check_supported(g, self.target.measure)
            except TwinKernelException as e:
                raise ConfigException("Group element {} does not fit target {}: {}".format(g, self.target, e))

    def __repr__(self):
        return str(self.__dict__)


class RunConfig:

    DEFAULT_CFG = '.twinkernel.json'
    DEFAULTS = {
        'basis': 'hermite',
        'profile': {'kind': 'geometric', 'rho': 0.5},
        'groups': [
            {'variant': 'identity'},
            {'variant': 'translation', 'b': 2.0},
            {'variant': 'dilation', 'alpha': 0.8}
        ],
        'quadrature': {'base_m': 64, 'forward_m': 400},
        'k_check': 6,
        'seed': 42,
        'out': 'twinkernel-out',
        'threads': 1,
        'debug': {'corrupt_jacobian': False},
        'estimate': {
            'method': 'series',
            'K': 8,
            'h': 0.5,
            'c': None,
            'centers': [-2.0, 2.0],
            'epsilon': 1e-10,
            'g': {'variant': 'identity'},
            'grid': {'lo': -4.0, 'hi': 4.0, 'points': 201}
        },
        'simulate': {
            'preset': 'rates',
            'target': {'kind': 'sobolev', 'basis': 'legendre', 't': 1.0, 'scale': 0.3, 'k_max': 40, 'radius': 1.5},
            'groups': [{'variant': 'identity'}, {'variant': 'affine', 'a': 0.5, 'b': 0.25}],
            'n_grid': [250, 500, 1000, 2000, 4000, 8000, 16000],
            'k_rule': 'scaling',
            'K': 8,
            'ks': [4, 8, 16],
            'replicates': 200,
            'n': 2000,
            'dims': [6, 10, 14]
        },
        'transport': {'k_max': 5, 'grid': {'lo': -4.0, 'hi': 4.0, 'points': 81}},
        'kernel_table': {'grid': {'lo': -2.0, 'hi': 2.0, 'points': 21}}
    }

    # free form sections whose keys are validated by the objects they build
    OPEN_SECTIONS = ('profile', 'target', 'g')
    # run local fields left out of the provenance hash
    UNHASHED = ('out', 'threads')

    def __init__(self, **kwargs):
        """
        :type basis: str
        :type profile: dict
        :type groups: list(dict)
        :type quadrature: dict
        :type k_check: int
        :type seed: int
        :type out: str
        :type threads: int
        :type debug: dict
        :type estimate: dict
        :type simulate: dict
        :type transport: dict
        :type kernel_table: dict
        """
        merged = _merge(RunConfig.DEFAULTS, kwargs, path='')

        # cli only flags
        self.data = None
        self.command = None

        # file configs with flag overrides
        self.seed = merged['seed']
        self.out = merged['out']
        self.threads = merged['threads']

        # file only configs
        self.basis = merged['basis']
        self.profile = merged['profile']
        self.groups = merged['groups']
        self.quadrature = merged['quadrature']
        self.k_check = merged['k_check']
        self.debug = merged['debug']
        self.estimate = merged['estimate']
        self.simulate = merged['simulate']
        self.transport = merged['transport']
        self.kernel_table = merged['kernel_table']
        self.validate()

    def validate(self):
        """
        :raises: ConfigException naming the offending field
        """
        try:
            basis = self.basis_object()
            self.profile_object()
            for g in self.group_elements():
                check_supported(g, basis.measure)
            check_supported(self.estimate_group(), basis.measure)
        except ConfigException:
            raise
        except TwinKernelException as e:
            raise ConfigException("Invalid configuration: {}".format(e))
        except ValueError as e:
            raise ConfigException("Invalid configuration: {}".format(e))

        if self.estimate['method'] not in METHODS:
            raise ConfigException("Unknown estimate method '{}', must be one of {}".format(self.estimate['method'], METHODS))
        if self.simulate['preset'] not in PRESETS:
            raise ConfigException("Unknown simulate preset '{}', must be one of {}".format(self.simulate['preset'], PRESETS))
        if not isinstance(self.seed, int) or self.seed < 0 or self.seed >= 1 << 64:
            raise ConfigException("Seed must be an unsigned 64 bit integer, found {}".format(self.seed))
        if not isinstance(self.threads, int) or self.threads < 1:
            raise ConfigException("Thread count must be a positive integer, found {}".format(self.threads))
        for section in (self.estimate, self.transport, self.kernel_table):
            grid = section['grid']
            if not grid['lo'] < grid['hi'] or int(grid['points']) < 2:
                raise ConfigException("Invalid evaluation grid {}".format(grid))
        if self.k_check < 0 or self.k_check > self.profile_object().k_spec:
            raise ConfigException("k_check must lie in [0, k_spec], found {}".format(self.k_check))
        self.experiment()

    def basis_object(self):
        return basis_from_tag(self.basis)

    def profile_object(self):
        try:
            return EigenvalueProfile.from_dict(self.profile)
        except TypeError as e:
            raise ConfigException("Invalid profile {}: {}".format(self.profile, e))

    def group_elements(self):
        return [GroupElement.from_dict(d) for d in self.groups]

    def estimate_group(self):
        return GroupElement.from_dict(self.estimate['g'])

    def experiment(self):
        """
        :return: ExperimentConfig for the simulate command
        """
        s = self.simulate
        try:
            return ExperimentConfig(target_from_dict(s['target']),
                                    groups=[GroupElement.from_dict(d) for d in s['groups']],
                                    n_grid=s['n_grid'], k_rule=s['k_rule'], K=s['K'], ks=s['ks'],
                                    replicates=s['replicates'], seed=self.seed, out=self.out, threads=self.threads,
                                    n=s['n'], dims=s['dims'])
        except ConfigException:
            raise
        except TwinKernelException as e:
            raise ConfigException("Invalid simulate section: {}".format(e))

    def with_flag_overrides(self, flags):
        """
        Merge a config read from a file with the provided cli flags
        :type flags: argparse.Namespace
        """
        flags = vars(flags)
        for k, v in flags.items():
            if v is not None and hasattr(self, k):
                setattr(self, k, v)
        self.validate()
        return self

    def as_dict(self):
        return {k: copy.deepcopy(getattr(self, k)) for k in RunConfig.DEFAULTS}

    def config_hash(self):
        """
        First 16 hex digits of the SHA-256 of the canonical JSON of the config without run local fields
        """
        d = {k: v for k, v in self.as_dict().items() if k not in RunConfig.UNHASHED}
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode('utf-8')).hexdigest()[:16]

    def __repr__(self):
        return str(self.__dict__)

    @staticmethod
    def new_from_file(stream, name=None):
        """
        Construct a RunConfig from a JSON config file, or YAML when the file name ends in .yml/.yaml
        :param stream: A python file like object
        :param name: The file name, defaults to stream.name
        """
        name = name or getattr(stream, 'name', '') or ''
        try:
            if name.endswith(('.yml', '.yaml')):
                d = yaml.safe_load(stream) or dict()
            else:
                text = stream.read()
                d = json.loads(text) if text.strip() else dict()
        except (ValueError, yaml.YAMLError) as e:
            raise ConfigException("Unable to parse config file {}: {}".format(name, e))
        if not isinstance(d, dict):
            raise ConfigException("Config file {} must hold a mapping, found {}".format(name, type(d).__name__))
        return RunConfig(**d)


def _merge(defaults, given, path):
    """
    Overlay given on defaults, rejecting keys the defaults do not know
    """
    unknown = set(given) - set(defaults)
    if unknown:
        raise ConfigException("Unknown config fields {}{}, must be among {}".format(
            path, sorted(unknown), sorted(defaults)))
    merged = copy.deepcopy(defaults)
    for k, v in given.items():
        if isinstance(defaults[k], dict) and k not in RunConfig.OPEN_SECTIONS and defaults[k]:
            if not isinstance(v, dict):
                raise ConfigException("Config field {}{} must be a mapping, found {}".format(path, k, v))
            merged[k] = _merge(defaults[k], v, path='{}{}.'.format(path, k))
        else:
            merged[k] = copy.deepcopy(v)
    return merged
