import gzip
from datetime import date

from moasscope.datasets import (
    AnycastList,
    As2OrgDb,
    AsRelDb,
    AsdbDb,
    DatedCollection,
    HypergiantDb,
    date_from_filename,
)


class TestAsRel:
    def test_load_with_comments(self, tmp_path):
        path = tmp_path / "20230101.as-rel.txt"
        path.write_text("# inferred clique: 174 3356\n3333|12859|-1\n2914|6939|0\nbad|line\n1|2|7\n")
        db = AsRelDb.load(path)
        assert len(db) == 2
        assert db.get(3333, 12859) == -1
        assert db.get(12859, 3333) == -1
        assert db.get(6939, 2914) == 0
        assert db.get(1, 2) is None
        assert db.skipped == 2

    def test_gzip_transparent(self, tmp_path):
        path = tmp_path / "20230101.as-rel.txt.gz"
        with gzip.open(path, "wt") as fh:
            fh.write("3333|12859|-1\n")
        assert AsRelDb.load(path).get(3333, 12859) == -1


class TestAs2Org:
    JSONL = (
        '{"type":"Organization","organizationId":"@ripe","name":"RIPE NCC"}\n'
        '{"type":"ASN","asn":3333,"organizationId":"@ripe"}\n'
        '{"type":"ASN","asn":12859,"organizationId":"@bit"}\n'
    )
    PIPE = (
        "# format:org_id|changed|org_name|country|source\n"
        "@ripe|20221001|RIPE NCC|NL|RIPE\n"
        "@bit|20221001|BIT BV|NL|RIPE\n"
        "# format:aut|changed|aut_name|org_id|opaque_id|source\n"
        "3333|20221001|RIPE-NCC-AS|@ripe|x|RIPE\n"
        "12859|20221001|BIT|@bit|x|RIPE\n"
    )

    def test_jsonl_convention(self, tmp_path):
        path = tmp_path / "20230101.as-org2info.jsonl"
        path.write_text(self.JSONL)
        db = As2OrgDb.load(path)
        assert db.org_id(3333) == "@ripe"
        assert db.org_name(3333) == "RIPE NCC"
        assert db.org_name(12859) == "@bit"  # org record missing: id passes through

    def test_pipe_convention(self, tmp_path):
        path = tmp_path / "20230101.as-org2info.txt"
        path.write_text(self.PIPE)
        db = As2OrgDb.load(path)
        assert db.org_id(12859) == "@bit"
        assert db.org_name(12859) == "BIT BV"
        assert not db.same_org(3333, 12859)

    def test_same_org_via_name(self, tmp_path):
        path = tmp_path / "x.jsonl"
        path.write_text(
            '{"type":"Organization","organizationId":"@a1","name":"ExampleCorp"}\n'
            '{"type":"Organization","organizationId":"@a2","name":"ExampleCorp"}\n'
            '{"type":"ASN","asn":1,"organizationId":"@a1"}\n'
            '{"type":"ASN","asn":2,"organizationId":"@a2"}\n'
        )
        db = As2OrgDb.load(path)
        assert db.same_org(1, 2)


class TestAsdb:
    def test_load(self, tmp_path):
        path = tmp_path / "2023-01_categorized_ases.csv"
        path.write_text(
            "ASN,Category 1 - Layer 1,Category 1 - Layer 2,Category 2 - Layer 1,Category 2 - Layer 2\n"
            "AS1,Computer and Information Technology,Hosting,,\n"
            "AS2,Computer and Information Technology,,Education and Research,Universities\n"
            "AS3,Media,Broadcasting,Media,Streaming\n"
        )
        db = AsdbDb.load(path)
        assert db.layer1(1) == ("Computer and Information Technology",)
        assert db.layer1(2) == ("Computer and Information Technology", "Education and Research")
        assert db.layer1(3) == ("Media",)  # duplicate layer-1 collapses
        assert db.layer1(9) is None


class TestHypergiantsFile:
    def test_load(self, tmp_path):
        path = tmp_path / "hypergiants.json"
        path.write_text('{"google": [15169, 396982], "verisign": [26415]}')
        db = HypergiantDb.load(path)
        assert db.orgs_for([396982]) == ("google",)


class TestAnycastFile:
    def test_load_skips_comments(self, tmp_path):
        path = tmp_path / "anycast_prefixes.txt"
        path.write_text("# list\n198.41.0.0/24\n2001:503:ba3e::/48\n")
        lst = AnycastList.load(path)
        assert len(lst) == 2


class TestDatedCollection:
    def test_filename_dates(self):
        assert date_from_filename("20230101.as-rel.txt") == date(2023, 1, 1)
        assert date_from_filename("roas-2022-06.csv") == date(2022, 6, 1)
        assert date_from_filename("2022-06-13.jsonl") == date(2022, 6, 13)
        assert date_from_filename("nodate.txt") is None

    def test_latest_at_quarterly_join(self, tmp_path):
        for stamp in ("20220101", "20220401", "20220701"):
            (tmp_path / f"{stamp}.as-rel.txt").write_text("3333|12859|-1\n")
        coll = DatedCollection(tmp_path, AsRelDb.load)
        assert coll.path_at(date(2022, 5, 15)).name == "20220401.as-rel.txt"
        assert coll.path_at(date(2022, 12, 1)).name == "20220701.as-rel.txt"
        assert coll.path_at(date(2021, 12, 31)) is None
        db = coll.latest_at(date(2022, 5, 15))
        assert db.get(3333, 12859) == -1
        # cached object identity on repeat lookups
        assert coll.latest_at(date(2022, 5, 20)) is db

    def test_empty_dir(self, tmp_path):
        assert len(DatedCollection(tmp_path, AsRelDb.load)) == 0
