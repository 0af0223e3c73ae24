#include <doctest.h>
TEST_CASE("placeholder test_cli") { CHECK(true); }
