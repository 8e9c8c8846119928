// SPDX-License-Identifier: Apache-2.0
#include "support/testing.hpp"
#include "strgcl/selfcheck.hpp"

using namespace strgcl;

namespace {

std::string test_name(std::size_t i, const std::string& s) {
    std::string out = "P" + std::to_string(i) + "_";
    for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    return out;
}

class Property : public ::testing::TestWithParam<std::size_t> {};

} // namespace

TEST_P(Property, Holds) {
    static const std::vector<selfcheck::Check> checks = selfcheck::property_checks();
    const selfcheck::Check& c = checks.at(GetParam());
    const selfcheck::CheckResult r = c.run();
    EXPECT_TRUE(r.passed) << r.name << ": measured " << r.measured << " tolerance " << r.tolerance << " " << r.detail;
}

INSTANTIATE_TEST_SUITE_P(All, Property, ::testing::Range<std::size_t>(0, selfcheck::property_checks().size()),
                         [](const ::testing::TestParamInfo<std::size_t>& info) {
                             return test_name(info.param, selfcheck::property_checks()[info.param].name);
                         });

TEST(Properties, DifferentSeedStillPasses) {
    for (const auto& r : selfcheck::run_checks(selfcheck::property_checks(7))) EXPECT_TRUE(r.passed) << r.name << " " << r.detail;
}
