// SPDX-License-Identifier: Apache-2.0
#include "support/hand_examples.hpp"
#include "support/testing.hpp"

using namespace strgcl;

namespace {

const std::vector<hand::Example>& all() {
    static const std::vector<hand::Example> ex = hand::examples();
    return ex;
}

class Worked : public ::testing::TestWithParam<std::size_t> {};

} // namespace

TEST_P(Worked, WithinTolerance) {
    const hand::Example& e = all().at(GetParam());
    EXPECT_LE(e.deviation(), hand::kTolerance) << e.module << ": " << e.name;
}

INSTANTIATE_TEST_SUITE_P(All, Worked, ::testing::Range<std::size_t>(0, all().size()),
                         [](const ::testing::TestParamInfo<std::size_t>& info) {
                             const hand::Example& e = all()[info.param];
                             std::string out = e.module + "_" + std::to_string(info.param) + "_";
                             for (char c : e.name) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
                             return out;
                         });
