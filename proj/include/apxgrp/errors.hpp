#pragma once

#include <stdexcept>
#include <string>

namespace apxgrp {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid backend parameters, config keys, malformed literals.
struct ConfigError : Error {
    using Error::Error;
};

// Element bytes do not decode for the given context, or the contexts of two
// operands differ structurally.
struct EncodingError : Error {
    using Error::Error;
};

struct CtxMismatchError : Error {
    using Error::Error;
};

// A lattice/Heisenberg coordinate left the checked 64-bit window, or a word
// backend exceeded its configured maximum word length.  Experiments must be
// exact, so this is a hard stop rather than a wraparound.
struct OverflowError : Error {
    using Error::Error;
};

// A size cap or search budget was exhausted (distinct exit path from a crash).
struct BudgetError : Error {
    using Error::Error;
};

// A structural invariant failed while assembling a result (e.g. a covering
// that does not cover).  Indicates a bug or corrupted input, not user error.
struct InvariantError : Error {
    using Error::Error;
};

}  // namespace apxgrp
