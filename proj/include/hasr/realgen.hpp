#pragma once

// Real-number generators: sequences xi of naturals whose dyadic fractions
// xi(x) / 2^x converge with an explicit modulus. Only nonnegative reals are
// represented.
//
// Equality and order on generators are not decidable. The *_at functions
// search a bounded window and either produce a witness or give up; they never
// claim that a relation fails.

#include <gmpxx.h>

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace hasr {

using Integer = mpz_class;
using Rational = mpq_class;

/// Target agreement 2^-k, and the largest index offset any search looks at.
struct Precision {
  std::size_t k = 16;
  std::size_t horizon = 64;

  friend bool operator==(const Precision&, const Precision&) = default;
};

class InsufficientHorizon : public std::runtime_error {
 public:
  InsufficientHorizon(const std::string& label, std::size_t needed, std::size_t horizon)
      : std::runtime_error("insufficient horizon for " + label + ": modulus needs " + std::to_string(needed) +
                           ", horizon is " + std::to_string(horizon)),
        needed_(needed) {}
  std::size_t needed() const noexcept { return needed_; }

 private:
  std::size_t needed_;
};

class RealGen {
 public:
  using Approximant = std::function<Integer(std::size_t)>;
  /// k -> an index x from which the k-th Cauchy bound holds. Every generator
  /// built here keeps the bound for all indices >= modulus(k), not only at it.
  using Modulus = std::function<std::size_t(std::size_t)>;

  static RealGen custom(std::string label, Approximant approx, Modulus modulus,
                        std::optional<Rational> closed_form = std::nullopt);

  /// xi(x); memoised, safe to call from several threads.
  Integer at(std::size_t x) const;
  std::size_t modulus_hint(std::size_t k) const;
  const std::string& label() const;
  /// Exact value when the generator was built from exact parts.
  const std::optional<Rational>& closed_form() const;
  /// Stable identity of the underlying generator (for caches).
  const void* id() const { return impl_.get(); }

 private:
  struct Impl;
  explicit RealGen(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// f_n(l) = n * 2^l.
RealGen from_nat(unsigned long n);
/// xi(x) = floor(2^x / q). Throws std::invalid_argument for q = 0.
RealGen from_unit_fraction(unsigned long q);
RealGen add(const RealGen& a, const RealGen& b);
/// (a*b)(x) = floor(a(x) * b(x) / 2^x).
RealGen mul(const RealGen& a, const RealGen& b);
/// n-fold sum g + ... + g; f_0 for n = 0.
RealGen nat_scalar(unsigned long n, const RealGen& g);

/// Outcome of a bounded semi-decision: either a witness was found or the
/// question stays open.
struct Verdict {
  bool proven = false;
  std::size_t k = 0;  ///< precision witness (lt_at) or the precision checked
  std::size_t x = 0;  ///< index witness

  explicit operator bool() const { return proven; }
};

/// exists x <= horizon, forall p <= horizon: 2^k |a(x+p) - b(x+p)| < 2^(x+p), at k = prec.k.
Verdict eq_at(const RealGen& a, const RealGen& b, Precision prec);

/// exists k <= prec.k, x <= horizon, forall p <= horizon:
/// 2^k (b(x+p) -. a(x+p)) >= 2^(x+p). Reports the smallest x, and the smallest
/// k that works at that x.
Verdict lt_at(const RealGen& a, const RealGen& b, Precision prec);

/// Whether (k, x) satisfies the inner condition of lt_at for all p <= horizon.
bool lt_witness_holds(const RealGen& a, const RealGen& b, std::size_t k, std::size_t x, std::size_t horizon);

/// For every k <= prec.k: x = modulus_hint(k) satisfies
/// forall p <= horizon: 2^k |2^p xi(x) - xi(x+p)| < 2^(x+p).
/// Throws InsufficientHorizon when some modulus_hint(k) exceeds prec.horizon.
Verdict check_R(const RealGen& g, Precision prec);

/// max(0, a - b).
Integer monus(const Integer& a, const Integer& b);

}  // namespace hasr
