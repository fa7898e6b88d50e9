#include "hasr/realgen.hpp"

#include <algorithm>
#include <limits>
#include <mutex>
#include <vector>

namespace hasr {

struct RealGen::Impl {
  std::string label;
  Approximant approx;
  Modulus modulus;
  std::optional<Rational> closed;

  mutable std::mutex mu;
  mutable std::vector<std::optional<Integer>> memo;
};

RealGen RealGen::custom(std::string label, Approximant approx, Modulus modulus, std::optional<Rational> closed_form) {
  auto impl = std::make_shared<Impl>();
  impl->label = std::move(label);
  impl->approx = std::move(approx);
  impl->modulus = std::move(modulus);
  impl->closed = std::move(closed_form);
  return RealGen(std::move(impl));
}

Integer RealGen::at(std::size_t x) const {
  {
    std::lock_guard lock(impl_->mu);
    if (x < impl_->memo.size() && impl_->memo[x]) return *impl_->memo[x];
  }
  // Computed outside the lock: children have their own memo tables, and a
  // duplicate fill by a racing reader stores the same value.
  Integer v = impl_->approx(x);
  std::lock_guard lock(impl_->mu);
  if (impl_->memo.size() <= x) impl_->memo.resize(x + 1);
  if (!impl_->memo[x]) impl_->memo[x] = v;
  return v;
}

std::size_t RealGen::modulus_hint(std::size_t k) const { return impl_->modulus(k); }
const std::string& RealGen::label() const { return impl_->label; }
const std::optional<Rational>& RealGen::closed_form() const { return impl_->closed; }

namespace {

std::size_t bit_length(const Integer& v) {
  if (v == 0) return 0;
  return mpz_sizeinbase(v.get_mpz_t(), 2);
}

Integer shl(const Integer& v, std::size_t n) {
  Integer r;
  mpz_mul_2exp(r.get_mpz_t(), v.get_mpz_t(), n);
  return r;
}

Integer shr_floor(const Integer& v, std::size_t n) {
  Integer r;
  mpz_fdiv_q_2exp(r.get_mpz_t(), v.get_mpz_t(), n);
  return r;
}

// 2^k * |d| < 2^j
bool scaled_below(const Integer& d, std::size_t k, std::size_t j) {
  if (d == 0) return true;
  return j >= k && bit_length(abs(Integer(d))) <= j - k;
}

std::optional<Rational> combine(const RealGen& a, const RealGen& b, bool product) {
  if (!a.closed_form() || !b.closed_form()) return std::nullopt;
  Rational r = product ? Rational(*a.closed_form() * *b.closed_form()) : Rational(*a.closed_form() + *b.closed_form());
  r.canonicalize();
  return r;
}

// s with |value| < 2^s, read off the k = 0 modulus.
std::size_t magnitude_bits(const RealGen& g) {
  std::size_t h0 = g.modulus_hint(0);
  Integer bound = shr_floor(g.at(h0), h0) + 2;
  return bit_length(bound);
}

}  // namespace

Integer monus(const Integer& a, const Integer& b) { return a > b ? Integer(a - b) : Integer(0); }

RealGen from_nat(unsigned long n) {
  Integer base(n);
  return RealGen::custom(
      "f_" + std::to_string(n), [base](std::size_t x) { return shl(base, x); }, [](std::size_t) { return 0; },
      Rational(base));
}

RealGen from_unit_fraction(unsigned long q) {
  if (q == 0) throw std::invalid_argument("from_unit_fraction: q must be at least 1");
  Integer den(q);
  return RealGen::custom(
      "1/" + std::to_string(q),
      [den](std::size_t x) {
        Integer r;
        mpz_fdiv_q(r.get_mpz_t(), shl(Integer(1), x).get_mpz_t(), den.get_mpz_t());
        return r;
      },
      [](std::size_t k) { return k + 2; }, Rational(Integer(1), den));
}

RealGen add(const RealGen& a, const RealGen& b) {
  return RealGen::custom(
      "(" + a.label() + "+" + b.label() + ")", [a, b](std::size_t x) { return Integer(a.at(x) + b.at(x)); },
      [a, b](std::size_t k) { return std::max(a.modulus_hint(k + 1), b.modulus_hint(k + 1)); },
      combine(a, b, false));
}

RealGen mul(const RealGen& a, const RealGen& b) {
  // |a_x b_x - a_y b_y| <= |a| |b_x - b_y| + |b| |a_x - a_y|, plus one ulp of
  // floor error; each of the three pieces is pushed below 2^-(k+2).
  const std::size_t sa = magnitude_bits(a);
  const std::size_t sb = magnitude_bits(b);
  const std::size_t base = std::max(a.modulus_hint(0), b.modulus_hint(0));
  return RealGen::custom(
      "(" + a.label() + "*" + b.label() + ")",
      [a, b](std::size_t x) { return shr_floor(Integer(a.at(x) * b.at(x)), x); },
      [a, b, sa, sb, base](std::size_t k) {
        return std::max({k + 2, base, a.modulus_hint(k + 2 + sb), b.modulus_hint(k + 2 + sa)});
      },
      combine(a, b, true));
}

RealGen nat_scalar(unsigned long n, const RealGen& g) {
  if (n == 0) return from_nat(0);
  RealGen acc = g;
  for (unsigned long i = 1; i < n; ++i) acc = add(acc, g);
  return acc;
}

Verdict eq_at(const RealGen& a, const RealGen& b, Precision prec) {
  const std::size_t H = prec.horizon;
  std::size_t run = 0;
  for (std::size_t j = 0; j <= 2 * H; ++j) {
    if (scaled_below(Integer(a.at(j) - b.at(j)), prec.k, j)) {
      if (++run == H + 1) return Verdict{true, prec.k, j - H};
    } else {
      run = 0;
      // No window starting at or before j can succeed; stop once the next one
      // would need to start past the horizon.
      if (j + 1 > H) break;
    }
  }
  return Verdict{false, prec.k, 0};
}

Verdict lt_at(const RealGen& a, const RealGen& b, Precision prec) {
  constexpr std::size_t never = std::numeric_limits<std::size_t>::max();
  const std::size_t H = prec.horizon;
  std::vector<std::size_t> need;
  auto need_at = [&](std::size_t j) {
    while (need.size() <= j) {
      std::size_t i = need.size();
      Integer d = monus(b.at(i), a.at(i));
      std::size_t bits = bit_length(d);
      need.push_back(d == 0 ? never : (i + 1 > bits ? i + 1 - bits : 0));
    }
    return need[j];
  };
  for (std::size_t x = 0; x <= H; ++x) {
    std::size_t worst = 0;
    for (std::size_t p = 0; p <= H && worst <= prec.k; ++p) worst = std::max(worst, need_at(x + p));
    if (worst <= prec.k) return Verdict{true, worst, x};
  }
  return Verdict{false, prec.k, 0};
}

bool lt_witness_holds(const RealGen& a, const RealGen& b, std::size_t k, std::size_t x, std::size_t horizon) {
  for (std::size_t p = 0; p <= horizon; ++p) {
    std::size_t j = x + p;
    if (shl(monus(b.at(j), a.at(j)), k) < shl(Integer(1), j)) return false;
  }
  return true;
}

Verdict check_R(const RealGen& g, Precision prec) {
  for (std::size_t k = 0; k <= prec.k; ++k) {
    std::size_t x = g.modulus_hint(k);
    if (x > prec.horizon) throw InsufficientHorizon(g.label(), x, prec.horizon);
    Integer head = g.at(x);
    for (std::size_t p = 0; p <= prec.horizon; ++p) {
      if (!scaled_below(Integer(shl(head, p) - g.at(x + p)), k, x + p)) return Verdict{false, k, x};
    }
  }
  return Verdict{true, prec.k, 0};
}

}  // namespace hasr
