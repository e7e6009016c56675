#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>
#include <string>

#include "mmbt/dsl/parse.hpp"
#include "mmbt/dsl/serialize.hpp"
#include "mmbt/dsl/validate.hpp"
#include "support.hpp"

using namespace mmbt;
using dsl::DiagCode;
using dsl::Severity;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool has_error(const dsl::ParseResult& r, DiagCode code) {
  for (const auto& d : r.diagnostics)
    if (d.severity == Severity::Error && d.code == code) return true;
  return false;
}

const dsl::ParseDiagnostic* first_error(const dsl::ParseResult& r) {
  for (const auto& d : r.diagnostics)
    if (d.severity == Severity::Error) return &d;
  return nullptr;
}

}  // namespace

TEST_CASE("shipped capping tree parses and validates clean") {
  auto result = dsl::parse(slurp("trees/capping.bt"));
  REQUIRE(result.ok());
  CHECK(result.diagnostics.empty());

  const TreeDef& tree = *result.tree;
  CHECK(tree.name == "capping");
  REQUIRE(tree.root.kind == NodeKind::Sequence);
  REQUIRE(tree.root.children.size() == 3);
  CHECK(tree.root.children[0].name == "grasp_cap");
  CHECK(tree.root.children[1].name == "mount_cap");
  CHECK(tree.root.children[2].name == "fasten_cap");
  CHECK(tree.skills.count("fasten_cap") == 1);

  // Zero errors and zero guard warnings: the iteration guard is inside
  // the retry loop.
  auto warnings = dsl::validate(tree);
  CHECK(warnings.empty());
}

TEST_CASE("shipped insertion tree parses and resolves its skills") {
  auto result = dsl::parse(slurp("trees/insertion.bt"));
  REQUIRE(result.ok());
  const TreeDef& tree = *result.tree;
  REQUIRE(tree.root.kind == NodeKind::Sequence);
  REQUIRE(tree.root.children.size() == 3);
  CHECK(tree.root.children[0].name == "grasp_rack");
  CHECK(tree.root.children[1].name == "align_rack");
  CHECK(tree.root.children[2].name == "insert_rack");
  for (const auto& child : tree.root.children) CHECK(tree.skills.count(child.name) == 1);
  CHECK(dsl::validate(tree).empty());
}

TEST_CASE("parse rejects malformed inputs with located diagnostics") {
  SECTION("empty file") {
    auto r = dsl::parse("");
    CHECK_FALSE(r.ok());
    CHECK(has_error(r, DiagCode::ExpectedTree));
  }
  SECTION("tabs in indentation") {
    auto r = dsl::parse("tree t\n\tsequence\n");
    CHECK(has_error(r, DiagCode::Indent));
    CHECK(first_error(r)->span.line == 2);
  }
  SECTION("odd indentation") {
    auto r = dsl::parse("tree t\n   action x\n");
    CHECK(has_error(r, DiagCode::Indent));
  }
  SECTION("indentation jump") {
    auto r = dsl::parse("tree t\n  sequence\n      action x\n");
    CHECK(has_error(r, DiagCode::Indent));
    CHECK(first_error(r)->span.line == 3);
  }
  SECTION("unknown keyword") {
    auto r = dsl::parse("tree t\n  selector\n    action x\n");
    CHECK(has_error(r, DiagCode::UnknownKeyword));
    CHECK(first_error(r)->span.line == 2);
  }
  SECTION("composite without children") {
    auto r = dsl::parse("tree t\n  sequence\n");
    CHECK(has_error(r, DiagCode::Arity));
  }
  SECTION("decorator with two children") {
    auto r = dsl::parse("tree t\n  inverter\n    action a\n    action b\n");
    CHECK(has_error(r, DiagCode::Arity));
  }
  SECTION("weights that do not sum to one") {
    auto r = dsl::parse(
        "tree t\n  condition aligned modalities=[vision,depth] weights=[0.6,0.5]\n");
    CHECK(has_error(r, DiagCode::Weights));
    CHECK(first_error(r)->span.line == 2);
  }
  SECTION("modalities and weights of different lengths") {
    auto r = dsl::parse("tree t\n  condition c modalities=[a,b] weights=[1]\n");
    CHECK(has_error(r, DiagCode::Weights));
  }
  SECTION("duplicate modality") {
    auto r = dsl::parse("tree t\n  condition c modalities=[a,a] weights=[0.5,0.5]\n");
    CHECK(has_error(r, DiagCode::Weights));
  }
  SECTION("lambda out of range") {
    auto r = dsl::parse("tree t\n  condition c modalities=[a] weights=[1] lambda=1.5\n");
    CHECK(has_error(r, DiagCode::Weights));
  }
  SECTION("unresolved skill") {
    auto r = dsl::parse("tree t\n  use_skill ghost\n");
    CHECK(has_error(r, DiagCode::UnresolvedSkill));
  }
  SECTION("skill cycle") {
    auto r = dsl::parse(
        "tree t\n  use_skill a\nskill a\n  sequence\n    use_skill b\nskill b\n  sequence\n"
        "    use_skill a\n");
    CHECK(has_error(r, DiagCode::SkillCycle));
  }
  SECTION("two trees in one file") {
    auto r = dsl::parse("tree a\n  action x\ntree b\n  action y\n");
    CHECK(has_error(r, DiagCode::MultipleTrees));
    CHECK(first_error(r)->span.line == 3);
  }
  SECTION("duplicate skill") {
    auto r = dsl::parse("tree t\n  use_skill s\nskill s\n  action x\nskill s\n  action y\n");
    CHECK(has_error(r, DiagCode::DuplicateName));
  }
  SECTION("skills only, no tree") {
    auto r = dsl::parse("skill s\n  action x\n");
    CHECK(has_error(r, DiagCode::ExpectedTree));
  }
  SECTION("leaf with children") {
    auto r = dsl::parse("tree t\n  action x\n    action y\n");
    CHECK(has_error(r, DiagCode::Arity));
  }
  SECTION("nested tree keyword") {
    auto r = dsl::parse("tree t\n  tree u\n");
    CHECK(has_error(r, DiagCode::Syntax));
  }
}

TEST_CASE("error spans point at the offending line") {
  const std::string text =
      "tree t\n"
      "  sequence\n"
      "    action good\n"
      "    condition bad modalities=[a,b] weights=[0.9,0.2]\n";
  auto r = dsl::parse(text);
  REQUIRE_FALSE(r.ok());
  const auto* err = first_error(r);
  REQUIRE(err != nullptr);
  CHECK(err->span.line == 4);
  // The referenced line actually contains the offending construct.
  std::istringstream lines(text);
  std::string line;
  for (int i = 0; i < err->span.line; ++i) std::getline(lines, line);
  CHECK(line.find("weights") != std::string::npos);
}

TEST_CASE("serialization is canonical and reparses equal") {
  auto parsed = dsl::parse(slurp("trees/capping.bt"));
  REQUIRE(parsed.ok());

  const std::string canon = dsl::serialize(*parsed.tree);
  CHECK(canon == dsl::serialize(*parsed.tree));  // byte-stable
  CHECK(canon.back() == '\n');

  auto reparsed = dsl::parse(canon);
  REQUIRE(reparsed.ok());
  CHECK(*reparsed.tree == *parsed.tree);
  CHECK(dsl::serialize(*reparsed.tree) == canon);
}

TEST_CASE("CRLF input is accepted, output is LF") {
  auto r = dsl::parse("tree t\r\n  action x\r\n");
  REQUIRE(r.ok());
  const std::string out = dsl::serialize(*r.tree);
  CHECK(out.find('\r') == std::string::npos);
}

TEST_CASE("thirds survive a round trip within the weight tolerance") {
  namespace b = mmbt::build;
  fusion::FusionPolicy p;
  p.modalities = {"a", "b", "c"};
  p.weights = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  auto tree = b::tree("t", b::condition("c", p));

  auto reparsed = dsl::parse(dsl::serialize(tree));
  REQUIRE(reparsed.ok());
  const auto& w = reparsed.tree->root.policy.weights;
  const double sum = w[0] + w[1] + w[2];
  CHECK(std::abs(sum - 1.0) <= 1e-9);
}

TEST_CASE("random trees round-trip structurally") {
  testsupport::TreeGenerator gen(20260810);
  for (int i = 0; i < 1000; ++i) {
    TreeDef tree = gen.generate();
    const std::string text = dsl::serialize(tree);
    auto reparsed = dsl::parse(text);
    INFO("tree #" << i << "\n" << text);
    REQUIRE(reparsed.ok());
    REQUIRE(*reparsed.tree == tree);
    REQUIRE(dsl::serialize(*reparsed.tree) == text);
  }
}

TEST_CASE("fuzzed inputs never crash the parser") {
  Rng rng(424242);
  const char alphabet[] = "abcxyz_ 0123456789[],=.\t\n\r#-";
  int parsed_ok = 0;
  for (int i = 0; i < 20000; ++i) {
    std::string input;
    const int len = static_cast<int>(rng.uniform_int(0, 120));
    const bool arbitrary_bytes = rng.bernoulli(0.3);
    for (int k = 0; k < len; ++k) {
      if (arbitrary_bytes) {
        input.push_back(static_cast<char>(rng.uniform_int(0, 255)));
      } else {
        input.push_back(alphabet[rng.uniform_int(0, sizeof(alphabet) - 2)]);
      }
    }
    auto r = dsl::parse(input);
    if (r.ok()) {
      ++parsed_ok;
    } else {
      REQUIRE(dsl::has_errors(r.diagnostics));
      // Every error carries a usable span.
      for (const auto& d : r.diagnostics) {
        CHECK(d.span.line >= 1);
        CHECK(d.span.column >= 1);
      }
    }
  }
  // Random noise essentially never forms a valid tree.
  CHECK(parsed_ok <= 2);
}

TEST_CASE("mutation fuzzing of a valid tree never crashes") {
  auto base = slurp("trees/capping.bt");
  Rng rng(99);
  for (int i = 0; i < 5000; ++i) {
    std::string text = base;
    const int edits = static_cast<int>(rng.uniform_int(1, 6));
    for (int e = 0; e < edits; ++e) {
      const std::size_t pos = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(text.size() - 1)));
      text[pos] = static_cast<char>(rng.uniform_int(0, 255));
    }
    auto r = dsl::parse(text);
    if (!r.ok()) REQUIRE(dsl::has_errors(r.diagnostics));
  }
}

TEST_CASE("validator lints") {
  SECTION("unbounded repeat without guard warns") {
    auto r = dsl::parse("tree t\n  repeat_until_success\n    action x\n");
    REQUIRE(r.ok());
    auto warnings = dsl::validate(*r.tree);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].code == DiagCode::GuardlessRepeat);
    CHECK(warnings[0].severity == Severity::Warning);
  }
  SECTION("a max bound silences the guard lint") {
    auto r = dsl::parse("tree t\n  repeat_until_success max=5\n    action x\n");
    REQUIRE(r.ok());
    CHECK(dsl::validate(*r.tree).empty());
  }
  SECTION("a terminating guard condition silences the lint") {
    auto r = dsl::parse(
        "tree t\n  repeat_until_success\n    fallback\n"
        "      condition max_iter_reached modalities=[state] weights=[1]\n"
        "      action x\n");
    REQUIRE(r.ok());
    CHECK(dsl::validate(*r.tree).empty());
  }
  SECTION("unreachable fallback children after force_success") {
    auto r = dsl::parse(
        "tree t\n  fallback\n    force_success\n      action a\n    action x\n");
    REQUIRE(r.ok());
    auto warnings = dsl::validate(*r.tree);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].code == DiagCode::UnreachableChild);
    CHECK(warnings[0].span.line == 5);  // points at `action x`
  }
  SECTION("modalities outside the run configuration warn") {
    auto r = dsl::parse("tree t\n  condition c modalities=[vision,sonar] weights=[0.5,0.5]\n");
    REQUIRE(r.ok());
    dsl::ValidateOptions options;
    options.known_modalities = std::set<std::string>{"vision", "state"};
    auto warnings = dsl::validate(*r.tree, options);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].code == DiagCode::UnknownModality);
    CHECK(warnings[0].message.find("sonar") != std::string::npos);
  }
}
