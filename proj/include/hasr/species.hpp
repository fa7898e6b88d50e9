#pragma once

// Encoding a simulated species as a pair of real-number generators (u, v)
// whose quotients n with n*v = u are exactly the stabilized value of beta.

#include <cstddef>
#include <string_view>

#include "hasr/kripke.hpp"
#include "hasr/realgen.hpp"

namespace hasr {

struct EncodedSpecies {
  RealGen u;
  RealGen v;
  SimRun source_run;
};

/// u(n) = v(n) = 0 before the stabilization moment m; from m on
/// u(n) = floor(2^n / m) and v(n) = floor(2^n / (m k)). A run that never
/// stabilizes gives u = v = 0. Throws std::logic_error if the run claims to
/// stabilize at value 0.
EncodedSpecies encode(const SimRun& run);

enum class Quotient { Confirmed, Excluded, Undetermined };
std::string_view to_string(Quotient q);

/// Confirmed when n*v = u is witnessed by eq_at, Excluded when lt_at
/// separates n*v from u in either direction. Throws std::invalid_argument
/// for n = 0.
Quotient quotient_status(const EncodedSpecies& enc, natural n, Precision prec);

/// A precision at agreement 2^-k whose search windows reach past the
/// stabilization moment; shorter windows only see the leading zeros.
Precision encoding_precision(const EncodedSpecies& enc, std::size_t k);

}  // namespace hasr
