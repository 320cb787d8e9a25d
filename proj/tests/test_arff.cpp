#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>
#include <string>

#include "flma/flma.hpp"
#include "test_support.hpp"

using namespace flma;
using test_support::TempDir;
using test_support::write_file;

namespace {

const std::string kXmlTwoLabels =
    "<?xml version=\"1.0\"?>\n<labels>\n  <label name=\"laba\"></label>\n"
    "  <label name=\"lab-b\"/>\n</labels>\n";

std::string basic_arff() {
  return "% a comment line\n"
         "@RELATION test\n"
         "\n"
         "@ATTRIBUTE 'f one' NUMERIC\n"
         "@attribute color {red,green,blue}\n"
         "@attribute \"lab-b\" {0,1}\n"
         "@attribute laba {1,0}\n"
         "@data\n"
         "1.5,green,0,1\n"
         "% another comment\n"
         "?,red,1,0\n";
}

}  // namespace

TEST_CASE("label spec xml lists names in order") {
  TempDir dir("flma_xml");
  write_file(dir.path() / "labels.xml", kXmlTwoLabels);
  CHECK(read_label_spec_xml(dir.str("labels.xml")) ==
        std::vector<std::string>{"laba", "lab-b"});

  write_file(dir.path() / "esc.xml", "<labels><label name=\"a&amp;b\"/></labels>");
  CHECK(read_label_spec_xml(dir.str("esc.xml")) == std::vector<std::string>{"a&b"});

  write_file(dir.path() / "empty.xml", "<labels></labels>");
  CHECK_THROWS_AS(read_label_spec_xml(dir.str("empty.xml")), ParseError);

  write_file(dir.path() / "dup.xml", "<labels><label name=\"x\"/><label name=\"x\"/></labels>");
  CHECK_THROWS_AS(read_label_spec_xml(dir.str("dup.xml")), ParseError);

  CHECK_THROWS_AS(read_label_spec_xml(dir.str("missing.xml")), IoError);
}

TEST_CASE("arff loader handles quoting, nominals, missing values") {
  TempDir dir("flma_arff");
  write_file(dir.path() / "d.arff", basic_arff());
  write_file(dir.path() / "d.xml", kXmlTwoLabels);

  const auto ds = load_mulan_arff(dir.str("d.arff"), dir.str("d.xml"));
  CHECK(ds.instance_count() == 2);
  CHECK(ds.feature_count() == 2);
  CHECK(ds.label_count() == 2);
  // Label columns follow the XML order, not the declaration order.
  CHECK(ds.label_names() == std::vector<std::string>{"laba", "lab-b"});
  CHECK(ds.labels()(0, 0) == 1);  // laba
  CHECK(ds.labels()(0, 1) == 0);  // lab-b
  CHECK(ds.labels()(1, 0) == 0);
  CHECK(ds.labels()(1, 1) == 1);
  // Nominal feature mapped to declaration-order codes.
  CHECK(ds.features()(0, 1) == 1.0);  // green
  CHECK(ds.features()(1, 1) == 0.0);  // red
  // '?' imputed with column mean of present values (only 1.5 here).
  CHECK(ds.features()(0, 0) == 1.5);
  CHECK(ds.features()(1, 0) == 1.5);
}

TEST_CASE("arff loader survives crlf line endings") {
  TempDir dir("flma_crlf");
  std::string content = basic_arff();
  std::string crlf;
  for (char c : content) {
    if (c == '\n') crlf += "\r\n";
    else crlf += c;
  }
  write_file(dir.path() / "d.arff", crlf);
  write_file(dir.path() / "d.xml", kXmlTwoLabels);
  const auto ds = load_mulan_arff(dir.str("d.arff"), dir.str("d.xml"));
  CHECK(ds.instance_count() == 2);
  CHECK(ds.features()(0, 0) == 1.5);
}

TEST_CASE("arff mean imputation averages present values") {
  TempDir dir("flma_impute");
  write_file(dir.path() / "d.arff",
             "@relation r\n@attribute f numeric\n@attribute y {0,1}\n@data\n"
             "1,0\n3,1\n?,1\n");
  write_file(dir.path() / "d.xml", "<labels><label name=\"y\"/></labels>");
  const auto ds = load_mulan_arff(dir.str("d.arff"), dir.str("d.xml"));
  CHECK(ds.features()(2, 0) == 2.0);
}

TEST_CASE("arff errors carry line numbers") {
  TempDir dir("flma_arfferr");
  write_file(dir.path() / "d.xml", "<labels><label name=\"y\"/></labels>");

  SECTION("missing value in a label column") {
    write_file(dir.path() / "d.arff",
               "@relation r\n@attribute f numeric\n@attribute y {0,1}\n@data\n1,0\n2,?\n");
    try {
      load_mulan_arff(dir.str("d.arff"), dir.str("d.xml"));
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 6);
      CHECK(std::string(e.what()).find("label column 'y'") != std::string::npos);
    }
  }

  SECTION("out-of-range label value") {
    write_file(dir.path() / "d.arff",
               "@relation r\n@attribute f numeric\n@attribute y {0,1}\n@data\n1,2\n");
    try {
      load_mulan_arff(dir.str("d.arff"), dir.str("d.xml"));
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 5);
    }
  }

  SECTION("sparse rows rejected") {
    write_file(dir.path() / "d.arff",
               "@relation r\n@attribute f numeric\n@attribute y {0,1}\n@data\n{0 1, 1 1}\n");
    CHECK_THROWS_AS(load_mulan_arff(dir.str("d.arff"), dir.str("d.xml")), ParseError);
  }

  SECTION("label missing from the attributes") {
    write_file(dir.path() / "d.arff",
               "@relation r\n@attribute f numeric\n@attribute z {0,1}\n@data\n1,0\n");
    try {
      load_mulan_arff(dir.str("d.arff"), dir.str("d.xml"));
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("'y'") != std::string::npos);
    }
  }

  SECTION("label attribute must be nominal over {0,1}") {
    write_file(dir.path() / "d.arff",
               "@relation r\n@attribute f numeric\n@attribute y numeric\n@data\n1,0\n");
    CHECK_THROWS_AS(load_mulan_arff(dir.str("d.arff"), dir.str("d.xml")), ParseError);
  }

  SECTION("wrong cell count") {
    write_file(dir.path() / "d.arff",
               "@relation r\n@attribute f numeric\n@attribute y {0,1}\n@data\n1,0,3\n");
    try {
      load_mulan_arff(dir.str("d.arff"), dir.str("d.xml"));
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 5);
    }
  }

  SECTION("unknown nominal value") {
    write_file(dir.path() / "d.arff",
               "@relation r\n@attribute f {x,y}\n@attribute y {0,1}\n@data\nz,0\n");
    CHECK_THROWS_AS(load_mulan_arff(dir.str("d.arff"), dir.str("d.xml")), ParseError);
  }

  SECTION("no data rows") {
    write_file(dir.path() / "d.arff",
               "@relation r\n@attribute f numeric\n@attribute y {0,1}\n@data\n");
    CHECK_THROWS_AS(load_mulan_arff(dir.str("d.arff"), dir.str("d.xml")), ParseError);
  }

  SECTION("missing file") {
    CHECK_THROWS_AS(load_mulan_arff(dir.str("nope.arff"), dir.str("d.xml")), IoError);
  }
}

TEST_CASE("arff round trip through the test writer") {
  std::mt19937 rng(21);
  const auto ds = test_support::synthetic_dataset(rng, 25, 4);
  TempDir dir("flma_roundtrip");
  test_support::write_arff_pair(dir.path() / "d.arff", dir.path() / "d.xml", ds);
  const auto loaded = load_mulan_arff(dir.str("d.arff"), dir.str("d.xml"));
  CHECK(loaded.features() == ds.features());
  CHECK(loaded.labels() == ds.labels());
  CHECK(loaded.label_names() == ds.label_names());
}

TEST_CASE("csv dataset loader splits features from trailing labels") {
  TempDir dir("flma_csv");
  write_file(dir.path() / "d.csv", "f0,f1,y0,y1\n0.5,1.5,1,0\n2.5,3.5,0,1\n");
  const auto ds = load_csv(dir.str("d.csv"), 2);
  CHECK(ds.feature_count() == 2);
  CHECK(ds.label_count() == 2);
  CHECK(ds.label_names() == std::vector<std::string>{"y0", "y1"});
  CHECK(ds.features()(1, 1) == 3.5);
  CHECK(ds.labels()(1, 1) == 1);

  CHECK_THROWS_AS(load_csv(dir.str("d.csv"), 4), ParseError);
  CHECK_THROWS_AS(load_csv(dir.str("d.csv"), 0), std::invalid_argument);

  write_file(dir.path() / "bad.csv", "f0,y0\n1,0.5\n");
  CHECK_THROWS_AS(load_csv(dir.str("bad.csv"), 1), ParseError);

  write_file(dir.path() / "ragged.csv", "f0,y0\n1,0\n1\n");
  CHECK_THROWS_AS(load_csv(dir.str("ragged.csv"), 1), ParseError);

  write_file(dir.path() / "empty.csv", "f0,y0\n");
  CHECK_THROWS_AS(load_csv(dir.str("empty.csv"), 1), ParseError);
}

TEST_CASE("score csv writes shortest round-trip doubles") {
  std::mt19937 rng(33);
  const auto scores = test_support::random_score_matrix(rng, 7, 3);
  const auto names = test_support::label_names(3);

  std::ostringstream os;
  write_score_csv(os, scores, names);

  TempDir dir("flma_scores");
  write_file(dir.path() / "s.csv", os.str());
  const auto back = read_score_csv(dir.str("s.csv"), true);
  CHECK(back.label_names == names);
  CHECK(back.scores == scores);  // exact, not approximate

  const auto ext = load_external_scores(dir.str("s.csv"), 3, true);
  CHECK(ext == scores);
  CHECK_THROWS_AS(load_external_scores(dir.str("s.csv"), 4, true), LabelMismatchError);
}

TEST_CASE("headerless score csv") {
  TempDir dir("flma_nohdr");
  write_file(dir.path() / "s.csv", "0.25,0.75\n1,0\n");
  const auto back = read_score_csv(dir.str("s.csv"), false);
  CHECK(back.label_names.empty());
  CHECK(back.scores.rows() == 2);
  CHECK(back.scores(0, 1) == 0.75);
}

TEST_CASE("external scores must stay inside the unit interval") {
  TempDir dir("flma_range");
  write_file(dir.path() / "s.csv", "a,b\n0.5,1.5\n");
  CHECK_THROWS_AS(load_external_scores(dir.str("s.csv"), 2, true), ParseError);
}

TEST_CASE("binary csv round trip and validation") {
  LabelMatrix labels(2, 2, std::vector<std::uint8_t>{1, 0, 0, 1});
  const auto names = test_support::label_names(2);
  std::ostringstream os;
  write_label_csv(os, labels, names);
  TempDir dir("flma_bin");
  write_file(dir.path() / "l.csv", os.str());
  const auto back = read_binary_csv(dir.str("l.csv"), true);
  CHECK(back.labels == labels);
  CHECK(back.label_names == names);

  write_file(dir.path() / "bad.csv", "a,b\n1,0.5\n");
  CHECK_THROWS_AS(read_binary_csv(dir.str("bad.csv"), true), ParseError);
}
