#pragma once

#include <bit>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

#if defined(__PCLMUL__)
#include <wmmintrin.h>
#endif

namespace idcre {

using uint128 = unsigned __int128;

/// Decimal rendering for 128-bit counts (field orders up to 2^64).
inline std::string to_decimal_string(uint128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v != 0) {
        s.insert(s.begin(), static_cast<char>('0' + static_cast<unsigned>(v % 10)));
        v /= 10;
    }
    return s;
}

/// Uniform draw from [0, bound) by masked rejection. Unlike
/// std::uniform_int_distribution the output stream is fixed across
/// implementations, which keeps seeded runs byte-reproducible.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_below: empty range");
    if ((bound & (bound - 1)) == 0) return rng() & (bound - 1);
    const std::uint64_t mask = ~std::uint64_t{0} >> std::countl_zero(bound - 1);
    for (;;) {
        const std::uint64_t v = rng() & mask;
        if (v < bound) return v;
    }
}

/// Bernoulli(p) draw from 53 random bits; same cross-platform rationale.
inline bool bernoulli(std::mt19937_64& rng, double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return static_cast<double>(rng() >> 11) * 0x1.0p-53 < p;
}

inline bool is_prime(std::uint64_t p) {
    if (p < 2) return false;
    if (p % 2 == 0) return p == 2;
    for (std::uint64_t d = 3; d * d <= p; d += 2)
        if (p % d == 0) return false;
    return true;
}

/// GF(p) for prime p < 2^32. Elements are canonical residues in [0, p)
/// carried as plain uint64 values; all arithmetic is non-overflowing in
/// 64 bits. Intended for the small desk-scale fields where exhaustive
/// enumeration is feasible.
class PrimeField {
public:
    using Element = std::uint64_t;

    explicit PrimeField(std::uint64_t p) : p_(p) {
        if (p >= (std::uint64_t{1} << 32))
            throw std::invalid_argument("PrimeField: modulus must be < 2^32");
        if (!is_prime(p))
            throw std::invalid_argument("PrimeField: modulus " + std::to_string(p) + " is not prime");
    }

    std::uint64_t modulus() const { return p_; }
    uint128 order() const { return p_; }
    long double log2_order() const { return log2l(static_cast<long double>(p_)); }

    Element zero() const { return 0; }
    Element one() const { return 1; }

    /// Checked construction from a canonical representative.
    Element element(std::uint64_t v) const {
        if (v >= p_) throw std::out_of_range("PrimeField: representative not in [0, p)");
        return v;
    }

    Element add(Element a, Element b) const {
        const std::uint64_t s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    Element sub(Element a, Element b) const { return a >= b ? a - b : a + p_ - b; }
    Element neg(Element a) const { return a == 0 ? 0 : p_ - a; }
    Element mul(Element a, Element b) const { return (a * b) % p_; }

    Element inv(Element a) const {
        if (a == 0) throw std::domain_error("PrimeField: inverse of zero");
        // extended Euclid on (a, p)
        std::int64_t t = 0, new_t = 1;
        std::int64_t r = static_cast<std::int64_t>(p_), new_r = static_cast<std::int64_t>(a);
        while (new_r != 0) {
            const std::int64_t q = r / new_r;
            t = std::exchange(new_t, t - q * new_t);
            r = std::exchange(new_r, r - q * new_r);
        }
        return t < 0 ? static_cast<Element>(t + static_cast<std::int64_t>(p_)) : static_cast<Element>(t);
    }

    Element pow(Element a, std::uint64_t e) const {
        Element acc = 1;
        while (e != 0) {
            if (e & 1) acc = mul(acc, a);
            a = mul(a, a);
            e >>= 1;
        }
        return acc;
    }

    Element sample(std::mt19937_64& rng) const { return uniform_below(rng, p_); }

private:
    std::uint64_t p_;
};

/// GF(2^64) as GF(2)[x] mod x^64 + x^4 + x^3 + x + 1 (the low word of the
/// reduction polynomial is 0x1b). Elements are the raw 64-bit coefficient
/// vectors. Multiplication is a carry-less 64x64 product followed by a
/// two-step fold; PCLMUL is used when the build enables it.
class Gf64 {
public:
    using Element = std::uint64_t;

    static constexpr std::uint64_t kReductionLow = 0x1b;

    std::uint64_t modulus_low() const { return kReductionLow; }
    uint128 order() const { return uint128{1} << 64; }
    long double log2_order() const { return 64.0L; }

    Element zero() const { return 0; }
    Element one() const { return 1; }
    Element element(std::uint64_t v) const { return v; }

    Element add(Element a, Element b) const { return a ^ b; }
    Element sub(Element a, Element b) const { return a ^ b; }
    Element neg(Element a) const { return a; }

    Element mul(Element a, Element b) const { return reduce(clmul(a, b)); }

    Element inv(Element a) const {
        if (a == 0) throw std::domain_error("Gf64: inverse of zero");
        return pow(a, ~std::uint64_t{0} - 1);  // a^(2^64 - 2)
    }

    Element pow(Element a, std::uint64_t e) const {
        Element acc = 1;
        while (e != 0) {
            if (e & 1) acc = mul(acc, a);
            a = mul(a, a);
            e >>= 1;
        }
        return acc;
    }

    Element sample(std::mt19937_64& rng) const { return rng(); }

    static uint128 clmul(std::uint64_t a, std::uint64_t b) {
#if defined(__PCLMUL__)
        const __m128i r = _mm_clmulepi64_si128(_mm_set_epi64x(0, static_cast<long long>(a)),
                                               _mm_set_epi64x(0, static_cast<long long>(b)), 0x00);
        const std::uint64_t lo = static_cast<std::uint64_t>(_mm_cvtsi128_si64(r));
        const std::uint64_t hi = static_cast<std::uint64_t>(_mm_cvtsi128_si64(_mm_srli_si128(r, 8)));
        return (uint128{hi} << 64) | lo;
#else
        // 4-bit windowed carry-less product.
        uint128 tab[16];
        tab[0] = 0;
        tab[1] = uint128{a};
        for (int i = 2; i < 16; i += 2) {
            tab[i] = tab[i / 2] << 1;
            tab[i + 1] = tab[i] ^ tab[1];
        }
        uint128 acc = 0;
        for (int s = 60; s >= 0; s -= 4) acc = (acc << 4) ^ tab[(b >> s) & 0xf];
        return acc;
#endif
    }

    static std::uint64_t reduce(uint128 v) {
        const std::uint64_t lo = static_cast<std::uint64_t>(v);
        const std::uint64_t hi = static_cast<std::uint64_t>(v >> 64);
        // fold the overflow word through x^4 + x^3 + x + 1
        const uint128 h = uint128{hi} ^ (uint128{hi} << 1) ^ (uint128{hi} << 3) ^ (uint128{hi} << 4);
        const std::uint64_t h_hi = static_cast<std::uint64_t>(h >> 64);  // at most 4 bits
        const std::uint64_t h2 = h_hi ^ (h_hi << 1) ^ (h_hi << 3) ^ (h_hi << 4);
        return lo ^ static_cast<std::uint64_t>(h) ^ h2;
    }
};

template <class F>
concept FiniteField = requires(const F f, std::uint64_t a, std::uint64_t b, std::mt19937_64& rng) {
    typename F::Element;
    { f.add(a, b) } -> std::same_as<std::uint64_t>;
    { f.sub(a, b) } -> std::same_as<std::uint64_t>;
    { f.mul(a, b) } -> std::same_as<std::uint64_t>;
    { f.neg(a) } -> std::same_as<std::uint64_t>;
    { f.inv(a) } -> std::same_as<std::uint64_t>;
    { f.pow(a, b) } -> std::same_as<std::uint64_t>;
    { f.zero() } -> std::same_as<std::uint64_t>;
    { f.one() } -> std::same_as<std::uint64_t>;
    { f.element(a) } -> std::same_as<std::uint64_t>;
    { f.order() } -> std::same_as<uint128>;
    { f.log2_order() } -> std::same_as<long double>;
    { f.sample(rng) } -> std::same_as<std::uint64_t>;
};

static_assert(FiniteField<PrimeField>);
static_assert(FiniteField<Gf64>);

}  // namespace idcre
