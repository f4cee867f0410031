#include <algorithm>
#include <regex>
#include <sstream>

#include <boost/property_tree/json_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "fibergen/fiber_params.hpp"
#include "fibergen/params.hpp"
#include "prm_structure.hpp"
#include "reference_listings.hpp"
#include "support.hpp"

using namespace fibergen;
using namespace fibergen::params;

namespace {

const std::string kMesh = "Fiber generation/Mesh and space discretization/";

// Value map of a json or xml file read with property_tree, independent of
// the library's own parser. Keys are demangled by hand.
void collect(const boost::property_tree::ptree& node, const std::string& prefix,
             std::map<std::string, std::string>& out) {
  for (const auto& [key, child] : node) {
    std::string name = std::regex_replace(key, std::regex("_20"), " ");
    if (child.count("value")) {
      out[prefix + name] = child.get<std::string>("value");
    } else {
      collect(child, prefix + name + "/", out);
    }
  }
}

std::map<std::string, std::string> ptree_values(const std::string& text, Format format) {
  boost::property_tree::ptree pt;
  std::istringstream in(text);
  if (format == Format::Json) {
    boost::property_tree::read_json(in, pt);
    std::map<std::string, std::string> out;
    collect(pt, "", out);
    return out;
  }
  boost::property_tree::read_xml(in, pt, boost::property_tree::xml_parser::no_comments);
  std::map<std::string, std::string> out;
  collect(pt.get_child("ParameterHandler"), "", out);
  return out;
}

std::size_t set_lines(const std::string& prm) {
  const auto s = test::prm_structure(prm);
  return std::count_if(s.begin(), s.end(), [](const std::string& t) { return t.find("V ") != std::string::npos; });
}

std::string error_message(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("pattern descriptions") {
  CHECK(Pattern::boolean().description() == "[Bool]");
  CHECK(Pattern::integer().description() == "[Integer]");
  CHECK(Pattern::integer(0).description() == "[Integer range 0...2147483647 (inclusive)]");
  CHECK(Pattern::integer(1, 3).description() == "[Integer range 1...3 (inclusive)]");
  CHECK(Pattern::real(0, std::numeric_limits<double>::infinity()).description() ==
        "[Double 0...MAX_DOUBLE (inclusive)]");
  CHECK(Pattern::real().description() == "[Double -MAX_DOUBLE...MAX_DOUBLE (inclusive)]");
  CHECK(Pattern::real(0, 1).description() == "[Double 0...1 (inclusive)]");
  CHECK(Pattern::selection({"Hex", "Tet"}).description() == "[Selection Hex|Tet ]");
  CHECK(Pattern::input_file().description() == "[FileName (Type: input)]");
  CHECK(Pattern::output_file().description() == "[FileName (Type: output)]");
  CHECK(Pattern::anything().description() == "[Anything]");
  CHECK(Pattern::list(Pattern::integer(0)).description() ==
        "[List of <[Integer range 0...2147483647 (inclusive)]> of length 0...4294967295 (inclusive)]");
  CHECK(Pattern::list(Pattern::real(), 3, 3, " ").description() ==
        "[List of <[Double -MAX_DOUBLE...MAX_DOUBLE (inclusive)]> of length 3...3 (inclusive) separated by < >]");
}

TEST_CASE("pattern matching") {
  const auto b = Pattern::boolean();
  CHECK(b.match("true"));
  CHECK(b.match(" false "));
  CHECK_FALSE(b.match("yes"));
  CHECK_FALSE(b.match("1"));

  const auto i = Pattern::integer(0);
  CHECK(i.match("0"));
  CHECK(i.match("2147483647"));
  CHECK_FALSE(i.match("2147483648"));
  CHECK_FALSE(i.match("-1"));
  CHECK_FALSE(i.match("1.5"));
  CHECK_FALSE(i.match(""));
  CHECK_FALSE(i.match("3x"));

  const auto d = Pattern::real(0, std::numeric_limits<double>::infinity());
  CHECK(d.match("1e-3"));
  CHECK(d.match("0"));
  CHECK(d.match("12"));
  CHECK_FALSE(d.match("-1e-3"));
  CHECK_FALSE(d.match("inf"));
  CHECK_FALSE(d.match("nan"));
  CHECK_FALSE(d.match("1,0"));

  const auto s = Pattern::selection({"Hex", "Tet"});
  CHECK(s.match("Hex"));
  CHECK(s.match(" Tet"));
  CHECK_FALSE(s.match("Prism"));
  CHECK_FALSE(s.match("hex"));

  const auto tags = Pattern::list(Pattern::integer(0));
  CHECK(tags.match("10"));
  CHECK(tags.match("10, 15"));
  CHECK(tags.match(""));
  CHECK_FALSE(tags.match("10, x"));
  CHECK(tags.split("20, 25") == std::vector<std::string>{"20", "25"});

  const auto point = Pattern::list(Pattern::real(), 3, 3, " ");
  CHECK(point.match("0 0 0.0601846"));
  CHECK(point.match("83.868  16.369 45.989"));
  CHECK_FALSE(point.match("0 0"));
  CHECK_FALSE(point.match("0 0 1 1"));
  CHECK(point.split(" 0  0 -0.025 ") == std::vector<std::string>{"0", "0", "-0.025"});

  CHECK(Pattern::input_file().match("/path/to/mesh/slab.msh"));
  CHECK(Pattern::output_file().match(""));
}

TEST_CASE("declaration") {
  ParamTree t;
  CHECK(t.empty());
  auto& a = t.declare("S/A", "1", Pattern::integer(), "first");
  CHECK(a.pattern_index == 0);
  t.declare("S/B", "x", Pattern::anything(), "second");
  CHECK(t.entry("S/B").pattern_index == 1);
  CHECK(t.entry("S/A").value == "1");
  CHECK(t.entry("S/A").default_value == "1");
  CHECK_FALSE(t.empty());

  CHECK_ERRC(t.declare("S/A", "2", Pattern::integer(), ""), Errc::DuplicateEntry);
  CHECK_ERRC(t.declare("S/A/C", "2", Pattern::integer(), ""), Errc::DuplicateEntry);
  CHECK_ERRC(t.declare("", "2", Pattern::integer(), ""), Errc::EmptyName);
  CHECK_ERRC(t.declare("S//C", "2", Pattern::integer(), ""), Errc::EmptyName);
  CHECK_ERRC(t.declare("S/ C", "2", Pattern::integer(), ""), Errc::EmptyName);
  CHECK_THROWS_AS(t.declare("S/C", "two", Pattern::integer(), ""), std::invalid_argument);

  const auto prm = t.generate(Format::Prm);
  CHECK(prm.find("set A") < prm.find("set B"));
  CHECK(t.find("S/Z") == nullptr);
  CHECK_ERRC(t.entry("S/Z"), Errc::UnknownEntry);
}

TEST_CASE("one declared entry renders like the reference block") {
  ParamTree t;
  t.declare("Output/Enable output", "true", Pattern::boolean(), "Enable/disable output.");
  CHECK(t.generate(Format::Prm) ==
        "# Listing of Parameters\n# ---------------------\nsubsection Output\n"
        "  # Enable/disable output.\n  set Enable output = true\nend\n");
}

TEST_CASE("generated standard files match the reference listings") {
  auto t = fiber_parameters();
  CHECK(test::prm_structure(t.generate(Format::Prm)) == test::prm_structure(test::kReferencePrm));

  t.set(kMesh + "File/Scaling factor", "1");
  CHECK(t.generate(Format::Json) == test::kReferenceJson);
  // The reference xml lists the default of Scaling factor as 1 while its json
  // and prm counterparts give 1e-3, the declared default.
  std::string xml = test::kReferenceXml;
  const std::string wrong = "<default_value>1</default_value>";
  REQUIRE(xml.find(wrong) != std::string::npos);
  xml.replace(xml.find(wrong), wrong.size(), "<default_value>1e-3</default_value>");
  CHECK(t.generate(Format::Xml) == xml);
}

TEST_CASE("verbosity filtering") {
  const auto t = fiber_parameters();
  for (auto f : {Format::Prm, Format::Json, Format::Xml}) {
    auto min = ptree_values(convert(t, t.generate(f, Verbosity::Minimal), f, Format::Json, Verbosity::Minimal), Format::Json);
    auto std_ = ptree_values(convert(t, t.generate(f, Verbosity::Standard), f, Format::Json, Verbosity::Standard), Format::Json);
    auto full = ptree_values(t.generate(Format::Json, Verbosity::Full), Format::Json);
    CHECK(min.size() == 3);
    CHECK(std_.size() == 6);
    CHECK(full.size() == t.values().size());
    for (const auto& [k, v] : min) CHECK(std_.count(k));
    for (const auto& [k, v] : std_) CHECK(full.count(k));
  }
  CHECK(set_lines(t.generate(Format::Prm, Verbosity::Minimal)) == 3);
  CHECK(set_lines(t.generate(Format::Prm, Verbosity::Full)) == t.values().size());

  ParamTree one;
  one.declare("A/x", "1", Pattern::integer(), "", Verbosity::Full);
  CHECK(one.generate(Format::Prm, Verbosity::Minimal).find("set x") == std::string::npos);
  CHECK(one.generate(Format::Prm, Verbosity::Full).find("set x") != std::string::npos);
}

TEST_CASE("empty trees") {
  ParamTree t;
  CHECK(t.generate(Format::Json) == "{}\n");
  CHECK(ptree_values(t.generate(Format::Xml), Format::Xml).empty());
  CHECK(test::prm_structure(t.generate(Format::Prm)).empty());
}

TEST_CASE("prm parsing") {
  auto t = fiber_parameters();
  t.parse("subsection Fiber generation\n  subsection Mesh and space discretization\n    subsection File\n"
          "      set Scaling factor = 1   # metres already\n    end\n  end\nend\n",
          Format::Prm);
  CHECK(t.get(kMesh + "File/Scaling factor") == "1");
  CHECK(t.entry(kMesh + "File/Scaling factor").default_value == "1e-3");

  auto d = fiber_parameters();
  d.parse("", Format::Prm);
  CHECK(d.values() == fiber_parameters().values());

  // Values may contain '=' but not '#'.
  auto e = fiber_parameters();
  e.parse("subsection Fiber generation\nsubsection Output\nset Filename = a=b\nend\nend\n", Format::Prm);
  CHECK(e.get("Fiber generation/Output/Filename") == "a=b");
  CHECK_ERRC(e.set("Fiber generation/Output/Filename", "a#b"), Errc::PatternMismatch);
}

TEST_CASE("pattern violations name the entry and its pattern") {
  auto t = fiber_parameters();
  const auto before = t.values();
  const std::string text =
      "subsection Fiber generation\n  subsection Mesh and space discretization\n"
      "    set Number of refinements = 2\n    set Element type = Prism\n  end\nend\n";
  CHECK_ERRC(t.parse(text, Format::Prm), Errc::PatternMismatch);
  const auto msg = error_message([&] { t.parse(text, Format::Prm); });
  CHECK(msg.find("Element type") != std::string::npos);
  CHECK(msg.find("[Selection Hex|Tet ]") != std::string::npos);
  CHECK(msg.find("Prism") != std::string::npos);
  // A failed parse leaves the tree untouched.
  CHECK(t.values() == before);

  CHECK_ERRC(t.set(kMesh + "File/Scaling factor", "-1"), Errc::PatternMismatch);
  CHECK(error_message([&] { t.set(kMesh + "File/Scaling factor", "-1"); }).find("[Double 0...MAX_DOUBLE (inclusive)]") !=
        std::string::npos);
}

TEST_CASE("prm syntax and name errors") {
  auto t = fiber_parameters();
  CHECK_ERRC(t.parse("subsection Fiber generation\n  set Nope = 1\nend\n", Format::Prm), Errc::UnknownEntry);
  CHECK_ERRC(t.parse("subsection Fiber generation\n  subsection Nope\n  end\nend\n", Format::Prm),
             Errc::UnknownSubsection);
  CHECK_ERRC(t.parse("subsection Fiber generation\n", Format::Prm), Errc::SyntaxError);
  CHECK_ERRC(t.parse("end\n", Format::Prm), Errc::SyntaxError);
  CHECK_ERRC(t.parse("subsection Fiber generation\n  set Output\nend\n", Format::Prm), Errc::SyntaxError);
  CHECK_ERRC(t.parse("subsection Fiber generation\n  hello\nend\n", Format::Prm), Errc::SyntaxError);
  const auto msg = error_message([&] { t.parse("subsection Fiber generation\n\n  set Nope = 1\nend\n", Format::Prm); });
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("Nope") != std::string::npos);
}

TEST_CASE("json and xml errors") {
  auto t = fiber_parameters();
  CHECK_ERRC(t.parse("{", Format::Json), Errc::SyntaxError);
  CHECK_ERRC(t.parse("<ParameterHandler>", Format::Xml), Errc::SyntaxError);
  CHECK_ERRC(t.parse("<Other/>", Format::Xml), Errc::SyntaxError);
  CHECK_ERRC(t.parse(R"({"Fiber_20generation": {"Nope": {"value": "1"}}})", Format::Json), Errc::UnknownEntry);
  CHECK_ERRC(t.parse(R"({"Fiber_20generation": {"Nope": {"x": {"value": "1"}}}})", Format::Json),
             Errc::UnknownSubsection);
  CHECK_ERRC(t.parse(R"({"Fiber_20generation": {"Output": {"Enable_20output": {"value": "maybe"}}}})", Format::Json),
             Errc::PatternMismatch);
  CHECK_ERRC(t.parse(R"({"Fiber_20generation": {"Output": {"Filename": {"documentation": "x"}}}})", Format::Json),
             Errc::SyntaxError);
  CHECK(t.get("Fiber generation/Output/Filename") == "fibers");
}

TEST_CASE("reference files are semantically equivalent") {
  auto from_json = fiber_parameters();
  from_json.parse(test::kReferenceJson, Format::Json);
  auto from_xml = fiber_parameters();
  from_xml.parse(test::kReferenceXml, Format::Xml);
  auto from_prm = fiber_parameters();
  from_prm.parse(test::kReferencePrm, Format::Prm);
  CHECK(from_json.values() == from_xml.values());
  CHECK(from_json.get(kMesh + "File/Scaling factor") == "1");
  CHECK(from_prm.get(kMesh + "File/Scaling factor") == "1e-3");

  // The converted text agrees with an independent reader.
  const auto t = fiber_parameters();
  const auto json = convert(t, test::kReferenceXml, Format::Xml, Format::Json);
  for (const auto& [k, v] : ptree_values(test::kReferenceJson, Format::Json)) CHECK(ptree_values(json, Format::Json).at(k) == v);

  const auto prm = convert(t, test::kReferenceJson, Format::Json, Format::Prm);
  CHECK(std::regex_search(prm, std::regex(R"(\n\s*set Scaling factor\s*= 1 +# default: 1e-3\n)")));
}

TEST_CASE("prm to json to xml to prm is a fixed point") {
  auto t = fiber_parameters();
  t.set(kMesh + "Geometry type", "Left atrium");
  t.set(kMesh + "File/Filename", "/data/atrium <1> & \"2\".msh");
  t.set("Fiber generation/Left atrium/Tags MV", "40, 41");
  t.set("Fiber generation/Left atrium/Apex", "1 2 3");
  t.set("Fiber generation/Output/Filename", "out/fibers");
  const auto values = t.values();
  const auto base = fiber_parameters();

  const std::string prm = t.generate(Format::Prm, Verbosity::Full);
  const std::string json = convert(base, prm, Format::Prm, Format::Json);
  const std::string xml = convert(base, json, Format::Json, Format::Xml);
  const std::string back = convert(base, xml, Format::Xml, Format::Prm);
  for (const auto& [text, format] : {std::pair{prm, Format::Prm}, {json, Format::Json}, {xml, Format::Xml}, {back, Format::Prm}}) {
    auto u = fiber_parameters();
    u.parse(text, format);
    CHECK(u.values() == values);
  }
  CHECK(back == prm);
  CHECK(ptree_values(json, Format::Json) == values);
  CHECK(ptree_values(xml, Format::Xml) == values);
  CHECK(convert(base, prm, Format::Prm, Format::Prm) == prm);
}

TEST_CASE("key mangling") {
  CHECK(mangle("Scaling factor") == "Scaling_20factor");
  CHECK(mangle("alpha epi OT") == "alpha_20epi_20OT");
  CHECK(demangle("Mesh_20and_20space_20discretization") == "Mesh and space discretization");
  CHECK(demangle(mangle("a b  c")) == "a b  c");
  CHECK(format_from_extension("x.json") == Format::Json);
  CHECK(format_from_extension("x.xml") == Format::Xml);
  CHECK(format_from_extension("x.prm") == Format::Prm);
  CHECK(format_from_extension("x.txt") == Format::Prm);
  CHECK(format_from_extension("x") == Format::Prm);
}

TEST_CASE("geometry excerpts configure the drivers") {
  const auto wrap = [](const std::string& body) { return "subsection Fiber generation\n" + body + "end\n"; };
  auto t = fiber_parameters();
  t.parse(wrap("subsection Mesh and space discretization\n  set Element type    = Tet\n  set FE space degree = 1\n"
               "  set Geometry type   = Slab\n\n  subsection File\n    set Filename       = /path/to/mesh/slab.msh\n"
               "    set Scaling factor = 1e-3\n  end\nend\n"
               "subsection Slab\n  set Sphere slab = false\n\n  set Tags base up   =  50\n  set Tags base down =  60\n"
               "  set Tags epi       =  10\n  set Tags endo      =  20\n  set alpha epi      = -60\n"
               "  set alpha endo     =  60\n  set beta epi       =  45\n  set beta endo      = -45\nend\n"),
          Format::Prm);
  auto s = read_settings(t);
  CHECK(s.element == ElementKind::Tet4);
  CHECK(s.mesh_file == "/path/to/mesh/slab.msh");
  CHECK(s.scaling == 1e-3);
  CHECK(s.geometry.kind == GeometryKind::Slab);
  CHECK(s.geometry.base_up == std::vector<Label>{50});
  CHECK(s.geometry.base_down == std::vector<Label>{60});
  CHECK(s.geometry.angles.wall.alpha_epi == -60);
  CHECK(s.geometry.angles.wall.beta_endo == -45);

  t = fiber_parameters();
  t.parse(wrap("subsection Slab\n  set Sphere slab               = true\n  set Sphere with radial fibers = true\n"
               "  set North pole = 0 0 0.025\n  set South pole = 0 0 -0.025\nend\n"),
          Format::Prm);
  s = read_settings(t);
  CHECK(s.geometry.kind == GeometryKind::SphericalSlab);
  CHECK(s.geometry.radial_fibers);
  CHECK(*s.geometry.south_pole == Vec3{0, 0, -0.025});

  t = fiber_parameters();
  t.parse(wrap("subsection Mesh and space discretization\n  set Geometry type = Left ventricle\nend\n"
               "subsection Left ventricle\n  set Tags epi  = 10, 15\n  set Tags endo = 20, 25\n"
               "  set Algorithm type = RL\nend\n"),
          Format::Prm);
  s = read_settings(t);
  CHECK(s.geometry.kind == GeometryKind::LeftVentricleBased);
  CHECK(s.geometry.algorithm == NormalAlgorithm::RL);
  CHECK(s.geometry.epi == std::vector<Label>{10, 15});
  CHECK(s.geometry.endo == std::vector<Label>{20, 25});
  CHECK(s.geometry.normal_to_base == Vec3{0, 0, 1});
  CHECK(*s.geometry.apex == Vec3{0, 0, 0.0601846});

  t = fiber_parameters();
  t.set(kMesh + "Geometry type", "Left ventricle complete");
  s = read_settings(t);
  CHECK(s.geometry.kind == GeometryKind::LeftVentricleComplete);
  CHECK(*s.geometry.apex == Vec3{0.0692, 0.0710, 0.3522});
  REQUIRE(s.geometry.angles.outflow);
  CHECK(s.geometry.angles.outflow->alpha_endo == 90);
  CHECK(s.geometry.angles.outflow->alpha_epi == 0);
  CHECK(s.geometry.angles.wall.beta_epi == 20);

  t = fiber_parameters();
  t.set(kMesh + "Geometry type", "Left atrium");
  s = read_settings(t);
  CHECK(s.geometry.kind == GeometryKind::LeftAtrium);
  CHECK_FALSE(s.geometry.appendage);
  CHECK(s.geometry.tau_mv == 0.65);
  CHECK(s.geometry.tau_lpv == 0.85);
  CHECK(s.geometry.tau_rpv == 0.15);
  CHECK(s.geometry.mv == std::vector<Label>{40});
  CHECK(s.geometry.rpv == std::vector<Label>{20});
  CHECK(*s.geometry.apex == Vec3{83.868, 16.369, 45.989});
}

TEST_CASE("settings validation") {
  auto t = fiber_parameters();
  t.set(kMesh + "FE space degree", "2");
  CHECK_ERRC(read_settings(t), Errc::UnsupportedDegree);
  t = fiber_parameters();
  t.set(kMesh + "File/Scaling factor", "0");
  CHECK_ERRC(read_settings(t), Errc::NonPositiveFactor);
  t = fiber_parameters();
  CHECK_ERRC(t.set("Fiber generation/Left atrium/Tau bundle MV", "1.2"), Errc::PatternMismatch);
  CHECK_ERRC(t.set(kMesh + "FE space degree", "0"), Errc::PatternMismatch);

  t = fiber_parameters();
  t.set("Fiber generation/Linear solver/Max iterations", "25");
  t.set("Fiber generation/Linear solver/Preconditioner", "None");
  const auto s = read_settings(t);
  CHECK(s.geometry.solver.max_iterations == 25u);
  CHECK(s.geometry.solver.preconditioner == Preconditioner::None);
  CHECK_FALSE(read_settings(fiber_parameters()).geometry.solver.max_iterations);
}
