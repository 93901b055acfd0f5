#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fretfrag/analysis.hpp"
#include "fretfrag/equivalence.hpp"
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

using Ids = std::vector<std::string>;

// Expected dependency edges of the fig1 corpus, fragment -> requirements.
const std::map<std::string, Ids> kFig1 = {
    {"F1", {"R1", "R3", "R5", "R7", "R9", "R11", "R13"}},
    {"F2", {"R1", "R2", "R3", "R4"}},
    {"F3", {"R1", "R2", "R5", "R6", "R9", "R10"}},
    {"F4", {"R3", "R4", "R7", "R8", "R11", "R12"}},
    {"F5", {"R5", "R6", "R7", "R8"}},
    {"F6", {"R9", "R10", "R11", "R12"}},
    {"F7", {"R2", "R4", "R6", "R8", "R10", "R12", "R14"}},
};

std::set<std::pair<std::string, std::string>> edge_set(const DependencyGraph& g) {
  return {g.edges.begin(), g.edges.end()};
}

// Graph with fragment names replaced by the sorted list of requirements
// that reach them; comparable across renamings.
std::multiset<Ids> shape(const RequirementSet& set) {
  std::multiset<Ids> out;
  for (const auto& f : set.fragments()) out.insert(impact(set, f.name));
  return out;
}

}  // namespace

TEST(FindDuplicates, Fig1SevenCandidates) {
  const auto set = parse(slurp("fig1.fret"));
  const auto cands = find_duplicates(set, {4});
  ASSERT_EQ(cands.size(), 7u);
  std::vector<std::size_t> supports;
  std::map<std::string, Ids> by_text;
  for (const auto& c : cands) {
    supports.push_back(c.support.size());
    by_text[c.text()] = c.support;
  }
  EXPECT_EQ(supports, (std::vector<std::size_t>{7, 7, 6, 6, 4, 4, 4}));
  EXPECT_EQ(by_text["trackingPilotCommands"], kFig1.at("F1"));
  EXPECT_EQ(by_text["sensorFaults"], kFig1.at("F2"));
  EXPECT_EQ(by_text["regulationOfNominalOperation"], kFig1.at("F7"));
}

TEST(FindDuplicates, Table2GroupsWhenAndUntil) {
  const auto set = parse(slurp("table2.fret"));
  const auto cands = find_duplicates(set);
  ASSERT_EQ(cands.size(), 1u);
  const auto& c = cands[0];
  EXPECT_EQ(c.support, (Ids{"UC5_R_1.1", "UC5_R_1.2", "UC5_R_1.3"}));
  const BoolExpr sensor = normalize(parse_expr(
      "(sensorValue(S) > nominalValue + R) | (sensorValue(S) < nominalValue - R) | (sensorValue(S) = null)"));
  bool when = false, until = false, or_group = false;
  for (const auto& p : c.parts) {
    if (p.kind == DupPart::Kind::Clause && p.keyword == ConditionClause::Keyword::When) when = true;
    if (p.kind == DupPart::Kind::Timing && p.timing.kind == Timing::Kind::Until) until = true;
  }
  for (const auto& p : c.subsumed) {
    if (p.kind == DupPart::Kind::Subexpression && p.expr == sensor) or_group = true;
  }
  EXPECT_TRUE(when);
  EXPECT_TRUE(until);
  EXPECT_TRUE(or_group);
}

TEST(FindDuplicates, NothingShared) {
  const auto set = parse("requirement A { if (x & y) Controller shall satisfy (p) }\n"
                         "requirement B { if (z) Controller shall eventually satisfy (q) }");
  EXPECT_TRUE(find_duplicates(set).empty());
}

TEST(FindDuplicates, ResponsesOnlyWhenAsked) {
  const auto set = parse("requirement A { if (x) Controller shall satisfy (p & q) }\n"
                         "requirement B { if (y) Controller shall satisfy (p & r) }\n"
                         "requirement C { if (z) Controller shall satisfy (p & s) }\n"
                         "requirement D { if (w) Controller shall satisfy (p & t) }");
  EXPECT_TRUE(find_duplicates(set).empty());
  DupOptions opts;
  opts.include_responses = true;
  const auto cands = find_duplicates(set, opts);
  ASSERT_EQ(cands.size(), 1u);
  EXPECT_EQ(cands[0].parts[0].kind, DupPart::Kind::Response);
  EXPECT_EQ(cands[0].support.size(), 4u);
}

TEST(FindDuplicates, LoneAtomThreshold) {
  const auto three = parse("requirement A { if (c & x) Controller shall satisfy (p) }\n"
                           "requirement B { if (c & y) Controller shall satisfy (q) }\n"
                           "requirement C { if (c & z) Controller shall satisfy (r) }");
  EXPECT_TRUE(find_duplicates(three).empty());
  const auto four = parse(print(three) + "requirement D { if (c & w) Controller shall satisfy (s) }\n");
  EXPECT_EQ(find_duplicates(four).size(), 1u);
}

TEST(FindDuplicatesProperty, SupportMatchesRescan) {
  tg::Gen g(61);
  int reported = 0;
  for (int i = 0; i < 150; ++i) {
    tg::SetOptions so;
    so.fragments = false;
    so.pool_size = 5;
    const auto set = tg::random_set(g, so);
    DupOptions opts;
    opts.include_responses = g.chance(0.5);
    for (const auto& c : find_duplicates(set, opts)) {
      ++reported;
      for (const auto& part : c.parts) {
        Ids hits;
        for (const auto& r : set.requirements()) {
          if (requirement_contains(r, part)) hits.push_back(r.id);
        }
        ASSERT_EQ(hits, c.support) << part.text() << "\n" << print(set);
      }
    }
  }
  EXPECT_GT(reported, 50);
}

TEST(DependencyGraph, Fig1Golden) {
  const auto set = parse(slurp("fig1_refactored.fret"));
  const auto g = dependency_graph(set);
  std::set<std::pair<std::string, std::string>> expected;
  for (const auto& [f, rs] : kFig1) {
    for (const auto& r : rs) expected.insert({r, f});
  }
  EXPECT_EQ(expected.size(), 38u);
  EXPECT_EQ(edge_set(g), expected);
  EXPECT_EQ(g.to_dot(), slurp("fig1.dot"));
}

TEST(DependencyGraph, NoFragments) {
  const auto g = dependency_graph(parse(slurp("fig1.fret")));
  EXPECT_EQ(g.requirements.size(), 14u);
  EXPECT_TRUE(g.edges.empty());
}

TEST(DependencyGraph, TwoHopChain) {
  const auto set = parse("fragment A { if (x) }\nfragment B { if (@A & y) }\n"
                         "requirement R { @B Controller shall satisfy (p) }");
  const auto g = dependency_graph(set);
  EXPECT_EQ(edge_set(g), (std::set<std::pair<std::string, std::string>>{{"R", "B"}, {"B", "A"}}));
  EXPECT_EQ(impact(set, "A"), (Ids{"R"}));
}

TEST(Impact, Fig1) {
  const auto set = parse(slurp("fig1_refactored.fret"));
  EXPECT_EQ(impact(set, "F7"), kFig1.at("F7"));
  EXPECT_EQ(impact(set, "F2"), kFig1.at("F2"));
}

TEST(Impact, UnreachableAndUnknown) {
  const auto set = parse("fragment A { if (x) }\nfragment B { if (@A & y) }\n"
                         "requirement R { if (z) Controller shall satisfy (p) }");
  EXPECT_TRUE(impact(set, "A").empty());
  try {
    impact(set, "Nope");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownFragment);
  }
}

TEST(ApplyDuplicates, Fig1RoundTrip) {
  const auto refactored = parse(slurp("fig1_refactored.fret"));
  const auto flat = inline_all(refactored);
  const auto result = apply_duplicates(flat, find_duplicates(flat, {4}), "F");
  EXPECT_EQ(result.created.size(), 7u);
  EXPECT_EQ(shape(result.set), shape(refactored));
  EXPECT_EQ(dependency_graph(result.set).edges.size(), 38u);
  EquivConfig cfg;
  cfg.max_len = 3;
  EXPECT_TRUE(check_refactoring(flat, result.set, cfg).all_passed());
}

TEST(ApplyDuplicates, EmptyListUnchanged) {
  const auto set = parse(slurp("fig1.fret"));
  const auto result = apply_duplicates(set, {}, "F");
  EXPECT_EQ(print(result.set), print(set));
  EXPECT_TRUE(result.log.empty());
}

TEST(ApplyDuplicates, OverlapSkipped) {
  const auto set = parse("requirement A { if (x & y & z) Controller shall satisfy (p) }\n"
                         "requirement B { if (x & y & z) Controller shall satisfy (q) }");
  auto cands = find_duplicates(set);
  ASSERT_FALSE(cands.empty());
  cands.push_back(cands[0]);
  const auto result = apply_duplicates(set, cands, "D");
  EXPECT_EQ(result.created.size(), 1u);
  ASSERT_EQ(result.log.size(), 2u);
  EXPECT_EQ(result.log[1].rfind("skipped", 0), 0u);
}

TEST(GraphProperty, ExtractionAddsTargetEdges) {
  using Edges = std::set<std::pair<std::string, std::string>>;
  tg::Gen g(62);
  int applied = 0;
  for (int i = 0; i < 200; ++i) {
    const auto set = tg::random_set(g);
    ExtractionSpec spec;
    if (!tg::random_extraction(g, set, "N" + std::to_string(i), spec)) continue;
    ++applied;
    const std::string& name = spec.fragment_name;
    const Edges before = edge_set(dependency_graph(set));
    const Edges after = edge_set(dependency_graph(extract_fragment(set, spec)));
    Edges into_new, from_new;
    for (const auto& e : after) {
      if (e.second == name) into_new.insert(e);
      if (e.first == name) from_new.insert(e);
    }
    Edges expected;
    for (const auto& t : spec.targets) expected.insert({t, name});
    ASSERT_EQ(into_new, expected);
    // every other change is a target edge rerouted through the new fragment
    for (const auto& e : before) {
      if (after.count(e)) continue;
      ASSERT_TRUE(expected.count({e.first, name})) << e.first << " -> " << e.second;
      ASSERT_TRUE(from_new.count({name, e.second})) << e.first << " -> " << e.second;
    }
    for (const auto& e : after) {
      if (!before.count(e)) {
        ASSERT_TRUE(e.second == name || e.first == name);
      }
    }
  }
  EXPECT_GT(applied, 100);
}

TEST(ImpactProperty, Monotone) {
  tg::Gen g(63);
  int grown_sets = 0;
  for (int i = 0; i < 200; ++i) {
    const auto set = tg::random_set(g);
    if (set.fragments().empty()) continue;
    const auto& reqs = set.requirements();
    Requirement changed = reqs[static_cast<std::size_t>(g.range(0, static_cast<int>(reqs.size()) - 1))];
    changed.uses.push_back({g.pick(set.fragments()).name, {}});
    RequirementSet grown = set;
    grown.replace(changed);
    ++grown_sets;
    for (const auto& frag : set.fragments()) {
      const Ids a = impact(set, frag.name), b = impact(grown, frag.name);
      const std::set<std::string> bs(b.begin(), b.end());
      for (const auto& id : a) ASSERT_TRUE(bs.count(id)) << frag.name << " lost " << id;
    }
  }
  EXPECT_GT(grown_sets, 50);
}
