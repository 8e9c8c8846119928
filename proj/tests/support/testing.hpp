// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <gtest/gtest.h>

#include "strgcl/error.hpp"

// Asserts that `stmt` throws strgcl::Error of the given kind.
#define EXPECT_ERROR_KIND(stmt, expected_kind)                                                   \
    do {                                                                                        \
        bool strgcl_thrown_ = false;                                                            \
        try {                                                                                   \
            stmt;                                                                               \
        } catch (const ::strgcl::Error& strgcl_e_) {                                            \
            strgcl_thrown_ = true;                                                              \
            EXPECT_EQ(strgcl_e_.kind(), expected_kind) << strgcl_e_.what();                     \
        }                                                                                       \
        EXPECT_TRUE(strgcl_thrown_) << #stmt " did not throw";                                  \
    } while (0)

namespace strgcl::testing {

// Offset carried by the FormatError that `f` throws, or -1 if it throws nothing.
template <class F>
long long format_offset(F&& f) {
    try {
        f();
    } catch (const FormatError& e) {
        return static_cast<long long>(e.offset());
    }
    return -1;
}

} // namespace strgcl::testing
