#pragma once

#include <doctest.h>

#include "fibergen/error.hpp"
#include "temp_dir.hpp"

// Checks that expr throws fibergen::Error with the given code.
#define CHECK_ERRC(expr, errc)                                          \
  do {                                                                  \
    bool thrown_ = false;                                               \
    try {                                                               \
      (void)(expr);                                                     \
    } catch (const fibergen::Error& e_) {                               \
      thrown_ = true;                                                   \
      CHECK_MESSAGE(e_.code() == (errc), "got " << fibergen::errc_name(e_.code()) << ": " << e_.what()); \
    }                                                                   \
    CHECK_MESSAGE(thrown_, "expected " << fibergen::errc_name(errc));   \
  } while (0)
