#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "idcre/field.hpp"

namespace idcre {

/// Agreement tolerance (bits) for dual-route identities.
inline constexpr long double kBitsTolerance = 1e-9L;

/// Slack (bits) applied when locating the last positive integer M of a
/// linearly decreasing bound. The family entropy sits O(1e-13) bits below
/// its power-of-two idealization at production scale, so crossings that are
/// exact integers of the idealized arithmetic land on that integer.
inline constexpr long double kThresholdSlackBits = 1e-9L;

/// Compensated (Kahan) summation; keeps the falling-factorial log-sum
/// accurate to ~1e-13 bits even over thousands of terms.
struct KahanAccumulator {
    long double sum = 0.0L;
    long double comp = 0.0L;

    void add(long double x) {
        const long double y = x - comp;
        const long double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    long double value() const { return sum; }
};

/// log2 of the code-family size q(q-1)...(q-n+1) as a falling-factorial
/// log-sum; no factorial is ever materialized.
inline long double log2_family_size(uint128 q, std::uint64_t n) {
    if (uint128{n} > q) throw std::invalid_argument("log2_family_size: requires n <= q");
    KahanAccumulator acc;
    for (std::uint64_t j = 0; j < n; ++j)
        acc.add(log2l(static_cast<long double>(q - j)));
    return acc.value();
}

/// Exact code entropy after any number of independent captures: a single
/// eavesdropped encoding of a fresh uniform message reveals nothing about
/// the evaluation domain, so the posterior stays at the prior.
inline long double independent_capture_entropy(uint128 q, std::uint64_t n) {
    return log2_family_size(q, n);
}

/// Stirling approximation of log2_family_size:
///   q*log2(q/(q-n)) + n*log2(q-n) - n*log2(e) + (1/2)*log2(q/(q-n)).
inline long double stirling_family_size(uint128 q, std::uint64_t n) {
    if (n == 0 || uint128{n} >= q)
        throw std::invalid_argument("stirling_family_size: requires 0 < n < q");
    const long double lq = static_cast<long double>(q);
    const long double ln = static_cast<long double>(n);
    const long double ratio = log2l(lq / (lq - ln));
    return lq * ratio + ln * log2l(lq - ln) - ln * std::numbers::log2e_v<long double> + 0.5L * ratio;
}

/// Entropies (bits) of one received message x and one encoded identity i,
/// conditioned as named; the mutual-information terms are an alternative
/// route to the same per-message leak and are cross-checked when present.
struct EntropyTerms {
    long double h_x = 0.0L;
    long double h_i = 0.0L;
    long double h_i_given_cx = 0.0L;
    long double h_x_given_ci = 0.0L;
    std::optional<long double> mi_ix;
    std::optional<long double> mi_xc_given_i;
    std::optional<long double> mi_ix_given_c;

    void validate() const {
        if (h_x < 0.0L || h_i < 0.0L || h_i_given_cx < 0.0L || h_x_given_ci < 0.0L)
            throw std::invalid_argument("EntropyTerms: entropies must be nonnegative");
        if (h_i_given_cx > h_i + kBitsTolerance)
            throw std::invalid_argument("EntropyTerms: conditioning cannot increase entropy");
    }

    bool has_mutual_info_form() const {
        return mi_ix.has_value() && mi_xc_given_i.has_value() && mi_ix_given_c.has_value();
    }
};

/// Lower bound on the code entropy after m independently captured messages:
///   family_bits - m*(H(x) - H(i) + H(i|C,x) - H(x|C,i)).
/// When the mutual-information terms are supplied, the equivalent form
///   family_bits - m*(I(i;x) + I((x;C)|i) - I((i;x)|C))
/// is evaluated too and must agree to kBitsTolerance. Negative results are
/// meaningful ("bound exhausted") and returned as-is.
inline long double entropy_terms_bound(long double family_bits, std::uint64_t m,
                                       const EntropyTerms& t) {
    t.validate();
    const long double drop = t.h_x - t.h_i + t.h_i_given_cx - t.h_x_given_ci;
    if (t.has_mutual_info_form()) {
        const long double drop_mi = *t.mi_ix + *t.mi_xc_given_i - *t.mi_ix_given_c;
        if (fabsl(drop_mi - drop) > kBitsTolerance)
            throw std::invalid_argument("EntropyTerms: entropy and mutual-information forms disagree");
    }
    return family_bits - static_cast<long double>(m) * drop;
}

/// Noiseless-channel bound when every identity's encoding set covers a
/// fraction tau of the message space: each capture leaks at most
/// log2(1/tau) bits, so the bound is family_bits - m*log2(1/tau).
inline long double support_fraction_bound(long double family_bits, std::uint64_t m, long double tau) {
    if (!(tau > 0.0L) || tau > 1.0L)
        throw std::invalid_argument("support_fraction_bound: tau must be in (0, 1]");
    return family_bits - static_cast<long double>(m) * log2l(1.0L / tau);
}

/// The tau = 1/q instance of support_fraction_bound for this construction:
/// family_bits - m*log2(q).
inline long double value_symbol_bound(uint128 q, std::uint64_t n, std::uint64_t m) {
    return log2_family_size(q, n) - static_cast<long double>(m) * log2l(static_cast<long double>(q));
}

/// Dependence-free fallback: a capture cannot leak more than the whole
/// message, so family_bits - m*(log2 n + log2 q) holds for arbitrarily
/// correlated message choices.
inline long double message_cap_bound(uint128 q, std::uint64_t n, std::uint64_t m) {
    const long double eta = log2l(static_cast<long double>(n)) + log2l(static_cast<long double>(q));
    return log2_family_size(q, n) - static_cast<long double>(m) * eta;
}

namespace detail {

inline void validate_repetition(std::uint64_t n, std::uint64_t m, std::uint32_t l) {
    if (l < 1 || l > n)
        throw std::invalid_argument("repetition order must satisfy 1 <= l <= n");
    if (m % l != 0)
        throw std::invalid_argument("repetition order must divide the message count");
}

}  // namespace detail

/// Grouped-variable entropies for a capture of m messages arranged in m/l
/// blocks, each encoding one identity l times with distinct indices.
/// Feeding these through entropy_terms_bound with m = 1 reproduces
/// repetition_block_bound exactly.
inline EntropyTerms repetition_block_terms(uint128 q, std::uint64_t n, std::uint32_t k,
                                           std::uint64_t m, std::uint32_t l) {
    detail::validate_repetition(n, m, l);
    const long double blocks = static_cast<long double>(m) / static_cast<long double>(l);
    const long double log2q = log2l(static_cast<long double>(q));
    KahanAccumulator idx;
    for (std::uint32_t j = 0; j < l; ++j)
        idx.add(log2l(static_cast<long double>(n - j)));
    EntropyTerms t;
    t.h_x = blocks * (idx.value() + static_cast<long double>(l) * log2q);
    t.h_i = blocks * static_cast<long double>(k) * log2q;
    t.h_i_given_cx = l <= k ? blocks * static_cast<long double>(k - l) * log2q : 0.0L;
    t.h_x_given_ci = blocks * idx.value();
    return t;
}

/// Code-entropy lower bound under linkable capture with repetition order l:
/// exact equality with the family entropy for l <= k, and
///   family_bits - (m/l)*(l-k)*log2(q)
/// for l > k.
inline long double repetition_block_bound(uint128 q, std::uint64_t n, std::uint32_t k,
                                          std::uint64_t m, std::uint32_t l) {
    detail::validate_repetition(n, m, l);
    const long double family = log2_family_size(q, n);
    if (l <= k) return family;
    const long double blocks = static_cast<long double>(m) / static_cast<long double>(l);
    return family - blocks * static_cast<long double>(l - k) * log2l(static_cast<long double>(q));
}

/// Message count needed before the per-message leak can exhaust the family
/// entropy: family_bits / leak, as a real value plus its ceiling. A zero
/// leak yields infinity.
struct FanoEstimate {
    long double messages = 0.0L;
    long double ceiling = 0.0L;
};

inline FanoEstimate fano_message_count(long double family_bits, long double leak_bits_per_message) {
    if (leak_bits_per_message < 0.0L)
        throw std::invalid_argument("fano_message_count: leak must be nonnegative");
    if (leak_bits_per_message == 0.0L)
        return {std::numeric_limits<long double>::infinity(),
                std::numeric_limits<long double>::infinity()};
    const long double v = family_bits / leak_bits_per_message;
    return {v, ceill(v)};
}

/// Where a linearly decreasing bound family_bits - M*leak crosses zero.
/// threshold_m is the largest integer M with bound(M) > -kThresholdSlackBits
/// (see the constant's note on exactly-integer idealized crossings).
struct CrossingReport {
    long double crossing = 0.0L;
    std::int64_t threshold_m = 0;
};

inline CrossingReport linear_crossing(long double family_bits, long double leak_bits_per_message) {
    if (!(leak_bits_per_message > 0.0L))
        throw std::invalid_argument("linear_crossing: bound is not strictly decreasing in M");
    CrossingReport r;
    r.crossing = family_bits / leak_bits_per_message;
    const long double limit = (family_bits + kThresholdSlackBits) / leak_bits_per_message;
    long double f = floorl(limit);
    if (f * leak_bits_per_message >= family_bits + kThresholdSlackBits) f -= 1.0L;
    r.threshold_m = static_cast<std::int64_t>(f);
    return r;
}

enum class BoundKind { value_symbol, message_cap, repetition };

/// Crossing of the named bound at the given parameters; repetition requires
/// l > k (for l <= k the bound is constant in M).
inline CrossingReport bound_crossing(uint128 q, std::uint64_t n, std::uint32_t k, BoundKind kind,
                                     std::uint32_t l = 0) {
    const long double family = log2_family_size(q, n);
    const long double log2q = log2l(static_cast<long double>(q));
    long double leak = 0.0L;
    switch (kind) {
        case BoundKind::value_symbol:
            leak = log2q;
            break;
        case BoundKind::message_cap:
            leak = log2l(static_cast<long double>(n)) + log2q;
            break;
        case BoundKind::repetition:
            if (l < 1 || l > n)
                throw std::invalid_argument("repetition order must satisfy 1 <= l <= n");
            if (l <= k)
                throw std::invalid_argument("linear_crossing: bound is not strictly decreasing in M");
            leak = (static_cast<long double>(l - k) / static_cast<long double>(l)) * log2q;
            break;
    }
    return linear_crossing(family, leak);
}

/// One evaluated bound row; bound_bits may be negative ("exhausted").
struct BoundReport {
    long double family_bits = 0.0L;
    long double bound_bits = 0.0L;
    std::uint64_t m = 0;
    std::optional<std::uint32_t> l;
    std::optional<std::int64_t> threshold_m;

    void validate() const {
        if (bound_bits > family_bits + kBitsTolerance)
            throw std::logic_error("BoundReport: bound exceeds the family entropy");
    }
};

}  // namespace idcre
