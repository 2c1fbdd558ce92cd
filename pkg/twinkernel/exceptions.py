# -*- coding: utf-8 -*-
class TwinKernelException(Exception):
    pass

class QuadratureException(TwinKernelException):
    pass

class DomainException(TwinKernelException):
    pass

class TransportException(TwinKernelException):
    pass

class SpectralException(TwinKernelException):
    pass

class EstimationException(TwinKernelException):
    pass

class ExperimentException(TwinKernelException):
    pass

class ConfigException(TwinKernelException):
    pass

class DataException(TwinKernelException):
    pass

class VerificationException(TwinKernelException):
    def __init__(self, message, failed=None):
        super().__init__(message)
        self.failed = failed or list()
