import io
import re
from pathlib import Path

from autoconf.cli import main
from autoconf.resources import data_path, read_text

DOC = Path(__file__).resolve().parent.parent / "docs" / "formats.md"


def _blocks(lang):
    return re.findall(rf"```{lang}\n(.*?)```", DOC.read_text(encoding="utf-8"), re.S)


def test_grammars_listed_verbatim():
    blocks = _blocks("dtd")
    assert blocks == [read_text("customization.dtd"), read_text("manifest.dtd")]


def test_stock_manifest_listed_verbatim():
    assert _blocks("xml") == [read_text("stock_manifest.xml")]


def test_text_format_sample_matches_output():
    out = io.StringIO()
    assert main(["apply", "-m", str(data_path("stock_manifest.xml")), "-c", str(data_path("user.xml")),
                 "--format", "text"], stdout=out, stderr=io.StringIO()) == 0
    produced = out.getvalue().splitlines()
    sample = re.findall(r"```\n(application .*?)```", DOC.read_text(encoding="utf-8"), re.S)[0]
    for line in sample.splitlines():
        assert line in produced, line
