"""Exception types shared across the toolkit."""


class ReadkitError(Exception):
    """Base class for all toolkit errors."""


# --- parsing ---

class MalformedRow(ReadkitError):
    def __init__(self, line_no, message=""):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}" if message else f"line {line_no}")


class UnsortedEvents(ReadkitError):
    pass


class CoverageGap(ReadkitError):
    def __init__(self, level, word_index=None):
        self.level = level
        self.word_index = word_index
        super().__init__(f"level {level!r} does not cover word {word_index}")


class OverlapError(ReadkitError):
    def __init__(self, where, index=None):
        self.where = where
        self.index = index
        super().__init__(f"overlap at {where!r} ({index})")


class BadHead(ReadkitError):
    def __init__(self, sentence_no, token_no):
        self.sentence_no = sentence_no
        self.token_no = token_no
        super().__init__(f"sentence {sentence_no}, token {token_no}: head out of range")


class DimensionMismatch(ReadkitError):
    def __init__(self, line_no):
        self.line_no = line_no
        super().__init__(f"line {line_no}: vector length differs from table dimension")


class OutOfRange(ReadkitError):
    def __init__(self, lemma):
        self.lemma = lemma
        super().__init__(f"rating for {lemma!r} outside the declared scale")


# --- gaze ---

class NoLayout(ReadkitError):
    def __init__(self, slide):
        self.slide = slide
        super().__init__(f"slide {slide} has no line geometry")


class LayoutMismatch(ReadkitError):
    pass


# --- stats / learn ---

class DegenerateVariance(ReadkitError):
    pass


class ConstantInput(ReadkitError):
    pass


class DegenerateMarginals(ReadkitError):
    pass


class TooFewSamples(ReadkitError):
    pass


class NonBinaryLabels(ReadkitError):
    pass


class EmptyInput(ReadkitError):
    pass


# --- simsem / lingfeat / fluency ---

class NoAlignment(ReadkitError):
    pass


class EmptyReference(ReadkitError):
    pass


class MissingResource(ReadkitError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"missing resource: {name}")


class NoSpeech(ReadkitError):
    pass
