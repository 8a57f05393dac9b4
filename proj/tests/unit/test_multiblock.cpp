#include <doctest.h>

#include "mdiqds/keyrate.hpp"
#include "mdiqds/multiblock.hpp"

using namespace mdiqds;
using namespace mdiqds::qds;

TEST_SUITE("multiblock") {

TEST_CASE("plans respect the pool") {
  keyrate::SweepConfig link;
  link.pulse_budget = 1e11;
  const auto table = keyrate::synthesize_table(link, 25.0, 3);
  const auto multi = plan_multi_block(table, link.intensities, PlanBudgets{});
  REQUIRE(multi.secure);
  CHECK(multi.l_sig <= multi.c_sig);
  CHECK(multi.e_sig_upper < multi.p_e);
  CHECK(multi.c_test + multi.signatures * multi.c_sig <= multi.z_pool);
  CHECK(multi.signatures > 1);

  const auto single = plan_single_block(table, link.intensities, PlanBudgets{});
  CHECK(single.signatures <= 1);
  CHECK(multi.signatures > single.signatures);
}

TEST_CASE("an empty pool plans nothing") {
  CountTable t(Link::kAC);
  t.add(t.signal_key(), {1000, 0, 0});
  const auto plan = plan_multi_block(t, IntensitySet{}, PlanBudgets{});
  CHECK_FALSE(plan.secure);
  CHECK(plan.signatures == 0);
}

TEST_CASE("shared estimation beats one signature per acquisition") {
  ComparisonConfig config;
  config.link.pulse_budget = 1e11;
  const auto c = compare_multi_block(config);
  REQUIRE(c.multi.secure);
  CHECK(c.baseline_signatures >= 1);
  CHECK(c.ratio >= 2.0);
  CHECK(c.ratio == doctest::Approx(static_cast<double>(c.multi.signatures) / c.baseline_signatures));
}

}
