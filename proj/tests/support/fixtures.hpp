// fixtures.hpp : shared fixture access for tests: the shipped FML files with
// their reference inputs, a random valid-document generator, and the session
// log shaped like the six-team winter-camp statistics.

#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "aifml/fml.hpp"
#include "aifml/raa.hpp"

#ifndef AIFML_FIXTURE_DIR
#error "AIFML_FIXTURE_DIR must point at the fixtures directory"
#endif

namespace testsupport {

inline std::string fixture_path(const std::string& name) {
  return std::string(AIFML_FIXTURE_DIR) + "/" + name;
}

std::string read_file(const std::string& path);

struct FixtureCase {
  std::string file;
  std::map<std::string, double> inputs;
};

// Every shipped FML fixture with a reference input point.
const std::vector<FixtureCase>& fixture_manifest();

aifml::FmlDocument load_fixture(const std::string& name);

// Random valid documents for round-trip and property tests.
aifml::FmlDocument random_valid_document(std::mt19937_64& rng);

// Session log whose per-team aggregates match the six-team statistics:
// averages 0.512 0.556 0.595 0.641 0.297 0.513, correct counts 4 4 5 6 1 5,
// partial counts 4 3 4 3 6 5.
std::vector<aifml::SessionLogRow> winter_camp_log();

}  // namespace testsupport
