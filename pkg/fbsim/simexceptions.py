class FbsimException(Exception):
    """Base class for every error raised by fbsim."""

    def __init__(self, txt):
        super(FbsimException, self).__init__(txt)


class EdgeListParseException(FbsimException):
    """Raised when a line of an edge list (or community / relevance file) is malformed."""

    def __init__(self, line_number, txt):
        self.line_number = line_number
        super(EdgeListParseException, self).__init__(
            "line {}: {}".format(line_number, txt))


class EmptyGraphException(FbsimException):
    """Raised when an edge list contains no edge at all."""

    def __init__(self, txt="empty graph"):
        super(EmptyGraphException, self).__init__(txt)


class UndefinedStatisticException(FbsimException):
    """Raised when a statistic cannot be computed on the given graph or data."""

    def __init__(self, txt):
        super(UndefinedStatisticException, self).__init__(txt)


class NodeNotFoundException(FbsimException):
    """Raised when a node label is not part of a graph."""

    def __init__(self, label, suggestions=()):
        self.label = label
        self.suggestions = tuple(suggestions)
        txt = "unknown node {!r}".format(label)
        if self.suggestions:
            txt += " (did you mean: {})".format(", ".join(self.suggestions))
        super(NodeNotFoundException, self).__init__(txt)


class NonConvergenceException(FbsimException):
    """Raised when an iterative measure did not reach its tolerance."""

    def __init__(self, iterate, residual, iterations):
        self.iterate = iterate
        self.residual = residual
        self.iterations = iterations
        super(NonConvergenceException, self).__init__(
            "no convergence after {} iterations (residual {:.3e})".format(iterations, residual))


class InvalidConfigException(FbsimException):
    """Raised when a configuration value violates its invariants."""

    def __init__(self, txt):
        super(InvalidConfigException, self).__init__(txt)


class SamplingException(FbsimException):
    """Raised when a random sample cannot be drawn within the retry budget."""

    def __init__(self, txt):
        super(SamplingException, self).__init__(txt)


class EvaluationException(FbsimException):
    """Raised when an evaluation protocol cannot be carried out on its input."""

    def __init__(self, txt):
        super(EvaluationException, self).__init__(txt)


class InputFileException(FbsimException):
    """Raised when an input file cannot be read, naming the file."""

    def __init__(self, path, txt):
        self.path = path
        super(InputFileException, self).__init__("{}: {}".format(path, txt))
