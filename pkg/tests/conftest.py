import pytest

from autoconf.custlang import lower_to_spec
from autoconf.manifest import parse_manifest
from autoconf.resources import data_path, read_text
from autoconf.xml_core import parse_document

# Expected active sets for the bundled files.  The event name written with a
# stray space in the original listing is joined here.
STOCK_GUI = {
    "fileToolStripMenuItem", "adminToolStripMenuItem", "firstnameLabel", "firstnameTextbox",
    "lastnameLabel", "lastnameTextbox", "countryLabel", "countryCBX", "priceLabel", "priceTextbox",
    "genderLabel", "maleRadio", "femaleRadio", "approveCheckbox", "createButton", "saveButton",
    "advertisementImage", "mainForm",
}
STOCK_EVENTS = {
    "createButton_Click", "saveButton_Click", "fileToolStripMenuItem_Click", "adminToolStripMenuItem_Click",
}
STOCK_PERMISSIONS = {"DiskAccess", "NetworkAccess", "ProcessAccess"}

USER_GUI = {
    "fileToolStripMenuItem", "firstnameLabel", "firstnameTextbox", "lastnameLabel", "lastnameTextbox",
    "countryLabel", "countryCBX", "priceLabel", "priceTextbox", "genderLabel", "maleRadio", "femaleRadio",
    "createButton", "advertisementImage", "mainForm",
}
USER_EVENTS = {"createButton_Click", "fileToolStripMenuItem_Click"}
USER_PERMISSIONS = set()

ADMIN_GUI = {
    "adminToolStripMenuItem", "firstnameLabel", "firstnameTextbox", "lastnameLabel", "lastnameTextbox",
    "countryLabel", "countryCBX", "priceLabel", "priceTextbox", "genderLabel", "maleRadio", "femaleRadio",
    "approveCheckbox", "saveButton", "mainForm",
}
ADMIN_EVENTS = {"saveButton_Click", "adminToolStripMenuItem_Click"}
ADMIN_PERMISSIONS = {"DiskAccess", "NetworkAccess"}

XML_FIXTURES = ["stock_manifest.xml", "user.xml", "admin.xml", "user_raw.xml", "empty.xml"]


def load_doc(name):
    return parse_document(read_text(name))


@pytest.fixture
def fixture_path():
    return data_path


@pytest.fixture(scope="session")
def stock():
    return parse_manifest(load_doc("stock_manifest.xml"))


@pytest.fixture(scope="session")
def user_spec():
    return lower_to_spec(load_doc("user.xml"))


@pytest.fixture(scope="session")
def admin_spec():
    return lower_to_spec(load_doc("admin.xml"))


@pytest.fixture(scope="session")
def empty_spec():
    return lower_to_spec(load_doc("empty.xml"))
