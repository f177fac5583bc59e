#include "bilap/harness.hpp"

#include <gtest/gtest.h>

using namespace bilap;

namespace {

const BoundReport& report() {
  static const BoundReport r = [] {
    HarnessConfig c;
    c.jobs = 4;
    return run_all(c);
  }();
  return r;
}

const Check& find(const std::string& id, const std::string& fragment) {
  for (const auto& c : report().checks)
    if (c.id == id && c.statement.find(fragment) != std::string::npos) return c;
  throw std::runtime_error("no check " + id + " / " + fragment);
}

}  // namespace

TEST(Judge, PassRules) {
  Check c;
  c.expect = Expect::Equality;
  c.tol = 1e-5;
  c.lhs = 100.0005;
  c.rhs = 100;
  judge(c);
  EXPECT_TRUE(c.pass);  // relative tolerance
  c.lhs = 100.01;
  judge(c);
  EXPECT_FALSE(c.pass);

  c.expect = Expect::Strict;
  c.tol = 1e-3;
  c.lhs = 1.0005;
  c.rhs = 1;
  judge(c);
  EXPECT_FALSE(c.pass);
  c.lhs = 1.01;
  judge(c);
  EXPECT_TRUE(c.pass);

  c.expect = Expect::Ge;
  c.tol = 1e-5;
  c.lhs = 1 - 1e-7;
  judge(c);
  EXPECT_TRUE(c.pass);

  c.error = "boom";
  judge(c);
  EXPECT_FALSE(c.pass);
}

TEST(Harness, AllChecksPass) {
  for (const auto& c : report().checks) EXPECT_TRUE(c.pass) << c.id << " " << c.statement << " " << c.error;
  for (const char* id : {"T1.1", "T1.2", "T1.3", "T1.4", "T1.6", "REL", "CONJ", "REILLY", "SCHWARZ"})
    EXPECT_TRUE(std::any_of(report().checks.begin(), report().checks.end(), [&](const Check& c) { return c.id == id; }))
        << id;
}

TEST(Harness, Examples) {
  const auto& t13 = find("T1.3", "n=2");
  EXPECT_NEAR(t13.lhs, 1, 1e-8);
  EXPECT_NEAR(t13.rhs, 1, 1e-8);
  EXPECT_EQ(t13.expect, Expect::Equality);

  const auto& t16 = find("T1.6", "n=3 beta=0");
  EXPECT_DOUBLE_EQ(t16.lhs, 5);
  EXPECT_NEAR(t16.rhs, 3, 1e-12);
  EXPECT_NEAR(t16.margin, 2, 1e-12);
  EXPECT_EQ(t16.expect, Expect::Strict);

  const auto& conj = find("CONJ", "R=1 n=3");
  EXPECT_NEAR(conj.lhs, 5, 1e-6);
  EXPECT_DOUBLE_EQ(conj.rhs, 5);
}

TEST(Harness, EveryCheckHasProvenance) {
  for (const auto& c : report().checks) {
    EXPECT_FALSE(c.lhs_source.empty()) << c.id;
    EXPECT_FALSE(c.rhs_source.empty()) << c.id;
  }
}

TEST(Harness, DeterministicAcrossJobCounts) {
  HarnessConfig c;
  c.jobs = 1;
  c.degree = 8;
  c.reilly_count = 20;
  const auto a = to_json(run_all(c)).dump();
  c.jobs = 3;
  const auto b = to_json(run_all(c)).dump();
  EXPECT_EQ(a, b);
}

TEST(Harness, SeedChangesReillyBatchOnly) {
  HarnessConfig c;
  c.degree = 8;
  c.reilly_count = 10;
  c.seed = 17;
  const auto r = run_all(c);
  const auto it = std::find_if(r.checks.begin(), r.checks.end(), [](const Check& k) { return k.id == "REILLY"; });
  ASSERT_NE(it, r.checks.end());
  EXPECT_TRUE(it->pass);
  EXPECT_EQ(it->inputs["seed"].get<std::uint64_t>(), 17u);
  EXPECT_EQ(it->inputs["exact_zero"].get<int>(), 10);
}

TEST(Harness, SolverFailureBecomesFailingCheck) {
  HarnessConfig c;
  c.degree = 3;  // below the minimum trial degree for clamped and buckling
  c.reilly_count = 1;
  const auto r = run_all(c);
  bool saw_failure = false;
  for (const auto& k : r.checks)
    if (!k.error.empty()) {
      saw_failure = true;
      EXPECT_FALSE(k.pass);
    }
  EXPECT_TRUE(saw_failure);
  EXPECT_FALSE(r.all_pass());
}

TEST(Harness, CsvHasOneRowPerCheck) {
  const std::string csv = to_csv(report());
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), report().checks.size() + 1);
  EXPECT_EQ(csv.rfind("id,statement,lhs,rhs,margin,expect,tol,pass", 0), 0u);
}
