#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "fretfrag/parser.hpp"
#include "fretfrag/refactor.hpp"
#include "support/gen.hpp"

using namespace fretfrag;
namespace tg = fretfrag::testgen;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream f(std::string(FRETFRAG_CORPUS_DIR) + "/" + name, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const char* kSensorFaults =
    "(sensorValue(S) > nominalValue + R) | (sensorValue(S) < nominalValue - R) | "
    "(sensorValue(S) = null)";

const char* kTracking =
    "fragment trackingPilotCommands {\n"
    "  when (diff(r(i),y(i)) > E)\n"
    "  until (diff(r(i),y(i)) < e)\n"
    "}\n";

ExtractionSpec sensor_faults_spec() {
  return {"sensorFaults",
          parse_fragment(std::string("fragment sensorFaults { if (") + kSensorFaults + ") }"),
          {"UC5_R_1.1", "UC5_R_1.2", "UC5_R_1.3"}};
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST(Combine, InlineReferenceSubstitutedInPlace) {
  const auto set = parse(std::string("fragment sensorFaults { if (") + kSensorFaults +
                         ") }\nrequirement R { if (@sensorFaults & trackingPilotCommands) "
                         "Controller shall satisfy (controlObjectives) }");
  const Requirement r = combine_templates(set.requirement("R"), set);
  ASSERT_EQ(r.conditions.size(), 1u);
  const BoolExpr expected = BoolExpr::conjunction(
      {parse_expr(kSensorFaults), BoolExpr::atom(Atom::identifier("trackingPilotCommands"))});
  EXPECT_EQ(r.conditions[0].expr, expected);
  EXPECT_TRUE(r.uses.empty());
}

TEST(Combine, CrossFieldFragment) {
  const auto set = parse(std::string(kTracking) +
                         "requirement R { @trackingPilotCommands Controller shall satisfy (r) }");
  const Requirement r = combine_templates(set.requirement("R"), set);
  ASSERT_EQ(r.conditions.size(), 1u);
  EXPECT_EQ(r.conditions[0].keyword, ConditionClause::Keyword::When);
  EXPECT_EQ(to_text(r.conditions[0].expr), "diff(r(i),y(i)) > E");
  EXPECT_EQ(r.timing, Timing::until(parse_expr("diff(r(i),y(i)) < e")));
}

TEST(Combine, TimingConflictNamesBothSources) {
  const auto set = parse(slurp("timing_conflict.fret"), "timing_conflict.fret");
  try {
    combine_templates(set.requirement("UC5_R_1_q"), set);
    FAIL();
  } catch (const MergeConflictError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MergeConflict);
    EXPECT_EQ(e.conflict().kind, MergeConflict::Kind::Timing);
    EXPECT_EQ(e.conflict().sources,
              (std::vector<std::string>{"UC5_R_1_q", "trackingPilotCommands"}));
    EXPECT_EQ(e.conflict().context, "UC5_R_1_q");
  }
}

TEST(Combine, ScopeConflict) {
  const auto set = parse("fragment F { in m }\nrequirement R { in k @F Controller shall satisfy (p) }");
  try {
    combine_templates(set.requirement("R"), set);
    FAIL();
  } catch (const MergeConflictError& e) {
    EXPECT_EQ(e.conflict().kind, MergeConflict::Kind::Scope);
  }
}

TEST(Combine, InlineReferenceNeedsConditionOnlyFragment) {
  const auto set = parse(std::string(kTracking) +
                         "requirement R { if (@trackingPilotCommands & p) Controller shall satisfy (r) }");
  try {
    combine_templates(set.requirement("R"), set);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::FragmentNotConditionOnly);
  }
}

TEST(Combine, ResponsesConjoinedAndOrderInvariant) {
  const auto a = parse("fragment F { if (x) satisfy (s) }\nfragment G { if (y) }\n"
                       "requirement R { @F @G Controller shall satisfy (p) }");
  const auto b = parse("fragment F { if (x) satisfy (s) }\nfragment G { if (y) }\n"
                       "requirement R { @G @F Controller shall satisfy (p) }");
  const Requirement ra = combine_templates(a.requirement("R"), a);
  EXPECT_EQ(normalize(ra.response), normalize(parse_expr("p & s")));
  EXPECT_EQ(normalize(ra), normalize(combine_templates(b.requirement("R"), b)));
}

TEST(Extract, SensorFaultsFromTable2) {
  const auto set = parse(slurp("table2.fret"), "table2.fret");
  const auto out = extract_fragment(set, sensor_faults_spec());
  ASSERT_EQ(out.fragments().size(), 1u);
  EXPECT_EQ(out.fragments()[0].name, "sensorFaults");
  const std::string text = print(out);
  EXPECT_EQ(count(text, "@sensorFaults"), 3u);
  EXPECT_EQ(count(text, "sensorValue(S) = null"), 1u);
  for (const auto& r : out.requirements()) {
    EXPECT_EQ(to_text(r.conditions[1].expr).rfind("@sensorFaults & ", 0), 0u) << r.id;
  }
}

TEST(Extract, WhenClauseWithUntilTiming) {
  const auto set = parse(
      "requirement R { when (diff(r(i),y(i)) > E) if (p) Controller shall until "
      "(diff(r(i),y(i)) < e) satisfy (ok) }");
  const auto out =
      extract_fragment(set, {"trackingPilotCommands", parse_fragment(kTracking), {"R"}});
  const Requirement& r = out.requirement("R");
  ASSERT_EQ(r.conditions.size(), 1u);
  EXPECT_EQ(to_text(r.conditions[0].expr), "p");
  EXPECT_EQ(r.uses, (std::vector<FragmentUse>{{"trackingPilotCommands", {}}}));
  EXPECT_TRUE(r.timing.is_default());
  EXPECT_EQ(normalize(combine_templates(r, out)),
            normalize(combine_templates(set.requirement("R"), set)));
}

TEST(Extract, NoMatchNamesTarget) {
  const auto set = parse("requirement A { if (x & y) Controller shall satisfy (p) }\n"
                         "requirement B { if (z) Controller shall satisfy (p) }");
  try {
    extract_fragment(set, {"XY", parse_fragment("fragment XY { if (x & y) }"), {"A", "B"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoMatch);
    ASSERT_FALSE(e.details().empty());
    EXPECT_EQ(e.details()[0], "B");
  }
}

TEST(Extract, NameCollision) {
  const auto set = parse("requirement A { if (x & y) Controller shall satisfy (p) }");
  for (const char* name : {"x", "p"}) {
    try {
      extract_fragment(set, {name, parse_fragment("fragment F { if (x) }"), {"A"}});
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::NameCollision);
    }
  }
}

TEST(Extract, OperandSubsetOfConjunction) {
  const auto set = parse("requirement A { if (y & x & z) Controller shall satisfy (p) }");
  const auto out = extract_fragment(set, {"XY", parse_fragment("fragment XY { if (x & y) }"), {"A"}});
  EXPECT_EQ(to_text(out.requirement("A").conditions[0].expr), "@XY & z");
}

TEST(InlineAll, NoFragmentsIsIdentity) {
  const auto set = parse(slurp("table2.fret"));
  EXPECT_EQ(print(inline_all(set)), print(set));
}

TEST(InlineAll, RefactoredTable2MatchesOriginal) {
  const auto set = parse(slurp("table2.fret"));
  const auto back = inline_all(extract_fragment(set, sensor_faults_spec()));
  ASSERT_EQ(back.requirements().size(), set.requirements().size());
  for (const auto& r : set.requirements()) {
    EXPECT_EQ(normalize(back.requirement(r.id)), normalize(r)) << r.id;
  }
}

TEST(InlineAll, ConflictReportsRequirement) {
  const auto set = parse(slurp("timing_conflict.fret"));
  try {
    inline_all(set);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("UC5_R_1_q"), std::string::npos);
  }
}

TEST(ExtractProperty, InlineIdentityAndNonInterference) {
  tg::Gen g(41);
  int applied = 0;
  for (int i = 0; i < 200; ++i) {
    const RequirementSet set = tg::random_set(g);
    ExtractionSpec spec;
    if (!tg::random_extraction(g, set, "X" + std::to_string(i), spec)) continue;
    const RequirementSet out = extract_fragment(set, spec);
    ++applied;
    const RequirementSet lhs = inline_all(set);
    const RequirementSet rhs = inline_all(out);
    for (const auto& r : lhs.requirements()) {
      ASSERT_EQ(normalize(rhs.requirement(r.id)), normalize(r)) << print(set) << print(out);
    }
    for (const auto& r : set.requirements()) {
      if (std::find(spec.targets.begin(), spec.targets.end(), r.id) == spec.targets.end()) {
        ASSERT_EQ(print(out.requirement(r.id)), print(r));
      }
    }
  }
  EXPECT_GT(applied, 100);
}
