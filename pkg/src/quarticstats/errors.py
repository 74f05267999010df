class QuarticError(Exception):
    pass


class DegenerateDiscriminant(QuarticError):
    pass


class NotRamified(QuarticError):
    pass


class UnsupportedPrime(QuarticError):
    pass


class NotGeneric(QuarticError):
    pass


class FactorizationFailure(QuarticError):
    pass


class InfeasibleSize(QuarticError):
    pass


class NonConvergence(QuarticError):
    pass


class InsufficientData(QuarticError):
    pass
