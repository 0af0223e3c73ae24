#include <doctest.h>
TEST_CASE("placeholder test_ctmc_engine") { CHECK(true); }
