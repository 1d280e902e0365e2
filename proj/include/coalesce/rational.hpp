#pragma once

#include <gmpxx.h>

#include <string>

namespace coalesce {

// Exact rational scalar used for all discrete weights and probabilities.
using Rat = mpq_class;
using Int = mpz_class;

inline Rat rat(long num, long den = 1) {
  Rat q(num, den);
  q.canonicalize();
  return q;
}

// Parses "p/q" or "p" (optional sign, arbitrary precision). Throws
// std::invalid_argument on malformed input or a zero denominator.
Rat rat_parse(const std::string& text);

// Canonical "p/q" rendering; the denominator is always printed ("3" -> "3/1")
// so serialized numbers have a single shape.
std::string rat_str(const Rat& q);

inline double rat_double(const Rat& q) { return q.get_d(); }

}  // namespace coalesce
