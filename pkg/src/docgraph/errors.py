"""Exception types shared across the engine."""


class DocGraphError(Exception):
    """Base class for every error raised by this package."""


class InputError(DocGraphError):
    """Invalid user-supplied input (files, queries, flags). CLI exit code 1."""


class CorpusFormatError(InputError):
    """Malformed or semantically invalid corpus record."""


class VocabularyFormatError(InputError):
    """Malformed vocabulary file or entry."""


class OntologyFormatError(InputError):
    """Malformed ontology file, including cycles in the parent relation."""


class ConfigFormatError(InputError):
    """Malformed ranking configuration file."""


class TopicsFormatError(InputError):
    """Malformed topics file."""


class QrelsFormatError(InputError):
    """Malformed relevance-judgment file."""


class AbsentConceptError(DocGraphError):
    """A per-document statistic was requested for an unmentioned concept."""


class UntranslatableTermError(InputError):
    """A query term resolves to no concept in the vocabulary."""


class UntranslatableTopicError(InputError):
    """A benchmark topic cannot be compiled into a graph query."""


class UnsupportedArityError(InputError):
    """A keyword topic has more components than the engine supports."""


class MissingSpecificityError(DocGraphError):
    """An edge predicate has no entry in the predicate taxonomy."""


class InconsistencyError(DocGraphError):
    """Internal invariant violation (e.g. full/partial overlap). Exit code 2."""
