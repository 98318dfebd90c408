#pragma once

#include <doctest.h>

#include "measurelab/error.hpp"

// Passes when expr throws mlab::Error with the given code.
#define CHECK_ERRC(expr, errc)                                         \
  do {                                                                 \
    bool thrown_ = false;                                              \
    try {                                                              \
      (void)(expr);                                                    \
    } catch (const mlab::Error& e_) {                                  \
      thrown_ = true;                                                  \
      CHECK_MESSAGE(e_.code() == (errc), e_.what());                   \
    }                                                                  \
    CHECK_MESSAGE(thrown_, "expected " << mlab::to_string(errc));      \
  } while (0)
