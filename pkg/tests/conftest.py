import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def en_doc():
    from m2mskit.textcore import Document

    def make(*sentences, doc_id="d0", lang="en"):
        return Document.from_sentences(doc_id, lang, list(sentences))

    return make
