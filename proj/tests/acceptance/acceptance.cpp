#include <catch2/catch_amalgamated.hpp>
#include "medsynth/medsynth.hpp"
TEST_CASE("placeholder") { CHECK(true); }
