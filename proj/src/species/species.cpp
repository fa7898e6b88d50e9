#include "hasr/species.hpp"

#include <algorithm>
#include <stdexcept>

namespace hasr {

namespace {

RealGen delayed_unit_fraction(const std::string& label, natural start, natural q) {
  Integer den(static_cast<unsigned long>(q));
  return RealGen::custom(
      label,
      [start, den](std::size_t x) {
        if (x < start) return Integer(0);
        Integer r, one(1);
        mpz_mul_2exp(one.get_mpz_t(), one.get_mpz_t(), x);
        mpz_fdiv_q(r.get_mpz_t(), one.get_mpz_t(), den.get_mpz_t());
        return r;
      },
      [start](std::size_t k) { return std::max<std::size_t>(start, k + 2); }, Rational(Integer(1), den));
}

}  // namespace

EncodedSpecies encode(const SimRun& run) {
  if (!run.stabilized) return EncodedSpecies{from_nat(0), from_nat(0), run};
  const natural m = run.stabilized->moment;
  const natural k = run.stabilized->value;
  if (k == 0) throw std::logic_error("encode: run stabilized at value 0");
  if (m == 0) throw std::logic_error("encode: run stabilized at moment 0");
  natural mk = m * k;
  if (mk / k != m) throw std::overflow_error("encode: m*k overflows");
  return EncodedSpecies{delayed_unit_fraction("u[1/" + std::to_string(m) + "]", m, m),
                        delayed_unit_fraction("v[1/" + std::to_string(mk) + "]", m, mk), run};
}

std::string_view to_string(Quotient q) {
  switch (q) {
    case Quotient::Confirmed: return "confirmed";
    case Quotient::Excluded: return "excluded";
    case Quotient::Undetermined: return "undetermined";
  }
  return "?";
}

Quotient quotient_status(const EncodedSpecies& enc, natural n, Precision prec) {
  if (n == 0) throw std::invalid_argument("quotient_status: n must be positive");
  RealGen nv = mul(from_nat(n), enc.v);
  if (eq_at(nv, enc.u, prec)) return Quotient::Confirmed;
  if (lt_at(nv, enc.u, prec) || lt_at(enc.u, nv, prec)) return Quotient::Excluded;
  return Quotient::Undetermined;
}

Precision encoding_precision(const EncodedSpecies& enc, std::size_t k) {
  std::size_t m = enc.source_run.stabilized ? enc.source_run.stabilized->moment : 0;
  return Precision{k, std::max<std::size_t>(64, m + k + 8)};
}

}  // namespace hasr
