#include <catch2/catch_amalgamated.hpp>
#include "medsynth/medsynth.hpp"
