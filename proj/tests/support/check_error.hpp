#pragma once

#include <doctest.h>

#include "trollscope/error.hpp"

// Checks that expr throws trollscope::Error with the given code.
#define CHECK_ERROR(expr, expected_code)                                      \
    do {                                                                      \
        bool thrown_ = false;                                                 \
        try {                                                                 \
            (void)(expr);                                                     \
        } catch (const trollscope::Error& e_) {                               \
            thrown_ = true;                                                   \
            CHECK_MESSAGE(e_.code() == (expected_code), e_.what());           \
        }                                                                     \
        CHECK_MESSAGE(thrown_, "expected an Error from " #expr);              \
    } while (0)
