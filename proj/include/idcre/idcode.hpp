#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "idcre/field.hpp"
#include "idcre/polynomial.hpp"

namespace idcre {

/// The (q, n, k) tuple of one code family plus its derived identification
/// parameters. q is the field size, n the evaluation-domain size, k the
/// message dimension. The message count N = q^k is never materialized; only
/// log2(N) = k*log2(q) is exposed.
struct CodeParams {
    uint128 q = 0;
    std::uint32_t n = 0;
    std::uint32_t k = 0;

    void validate() const {
        if (q < 2) throw std::invalid_argument("CodeParams: q must be a field size >= 2");
        if (k < 1) throw std::invalid_argument("CodeParams: k must be >= 1");
        if (k > n)
            throw std::invalid_argument("CodeParams: requires k <= n (got k=" + std::to_string(k) +
                                        ", n=" + std::to_string(n) + ")");
        if (uint128{n} > q - 1)
            throw std::invalid_argument("CodeParams: requires n <= q-1 (got n=" + std::to_string(n) +
                                        ", q=" + to_decimal_string(q) + ")");
    }

    long double log2_q() const { return log2l(static_cast<long double>(q)); }
    /// Message length in bits: eta = log2 n + log2 q.
    long double eta_bits() const { return log2l(static_cast<long double>(n)) + log2_q(); }
    /// log2 of the identity count N = q^k.
    long double log2_message_count() const { return static_cast<long double>(k) * log2_q(); }
    /// First-kind error rate on the noiseless channel.
    double lambda1() const { return 0.0; }
    /// Second-kind error rate (k-1)/n: distinct messages collide on at most
    /// k-1 of the n evaluation points.
    double lambda2() const { return static_cast<double>(k - 1) / static_cast<double>(n); }
    /// Encoding-set fraction tau = n/(n*q) = 1/q.
    long double tau() const { return 1.0L / static_cast<long double>(q); }

    /// The production parameters: q = 2^64, n = 2^11, k = 2^8.
    static CodeParams production() { return CodeParams{uint128{1} << 64, 1u << 11, 1u << 8}; }
};

/// One transmitted symbol: a 1-based domain index j and the value P(alpha_j).
struct EncodedMessage {
    std::uint32_t index = 0;
    std::uint64_t value = 0;

    friend bool operator==(const EncodedMessage&, const EncodedMessage&) = default;
};

/// A concrete identification code: an ordered n-tuple of pairwise distinct
/// evaluation points. Order matters; the family has size q(q-1)...(q-n+1).
struct IdCode {
    std::vector<std::uint64_t> points;

    std::uint32_t length() const { return static_cast<std::uint32_t>(points.size()); }

    friend bool operator==(const IdCode&, const IdCode&) = default;
};

namespace detail {

template <FiniteField F>
void check_field(const F& field, const CodeParams& params) {
    if (field.order() != params.q)
        throw std::invalid_argument("field order does not match CodeParams.q");
}

}  // namespace detail

/// Uniform sample from the family of ordered distinct n-tuples.
template <FiniteField F>
IdCode sample_code(const F& field, const CodeParams& params, std::mt19937_64& rng) {
    params.validate();
    detail::check_field(field, params);
    IdCode code;
    code.points.reserve(params.n);
    if (params.q <= (uint128{1} << 20)) {
        // partial Fisher-Yates over the whole field
        std::vector<std::uint64_t> pool(static_cast<std::size_t>(params.q));
        std::iota(pool.begin(), pool.end(), std::uint64_t{0});
        for (std::uint32_t i = 0; i < params.n; ++i) {
            const std::uint64_t j = i + uniform_below(rng, pool.size() - i);
            std::swap(pool[i], pool[j]);
            code.points.push_back(field.element(pool[i]));
        }
    } else {
        // rejection; collisions are vanishingly rare at this field size
        std::unordered_set<std::uint64_t> seen;
        while (code.points.size() < params.n) {
            const std::uint64_t v = field.sample(rng);
            if (seen.insert(v).second) code.points.push_back(v);
        }
    }
    return code;
}

/// The full encoding set A_{F,P} = {(j, P(alpha_j)) : j = 1..n}.
template <FiniteField F>
std::vector<EncodedMessage> encoding_set(const F& field, const IdCode& code, const Polynomial& p) {
    std::vector<EncodedMessage> set;
    set.reserve(code.points.size());
    for (std::uint32_t j = 0; j < code.points.size(); ++j)
        set.push_back({j + 1, poly_eval(field, p, code.points[j])});
    return set;
}

/// One encoding of P: a uniform member of A_{F,P}.
template <FiniteField F>
EncodedMessage encode(const F& field, const IdCode& code, const Polynomial& p, std::mt19937_64& rng) {
    const std::uint32_t j =
        static_cast<std::uint32_t>(uniform_below(rng, code.points.size())) + 1;
    return {j, poly_eval(field, p, code.points[j - 1])};
}

/// Membership in the decoding set D_P (= A_{F,P}).
template <FiniteField F>
bool in_decoding_set(const F& field, const IdCode& code, const Polynomial& p, const EncodedMessage& x) {
    if (x.index < 1 || x.index > code.points.size())
        throw std::out_of_range("in_decoding_set: index outside {1..n}");
    return x.value == poly_eval(field, p, code.points[x.index - 1]);
}

enum class Lambda2Mode {
    /// P and P' drawn independently (rejecting P == P'); acceptance is rare.
    random_pairs,
    /// P' = P + prod(X - alpha_t) over the first k-1 domain points, so the
    /// difference has exactly k-1 roots in the domain and the acceptance
    /// rate attains the (k-1)/n ceiling.
    adversarial,
};

/// Monte Carlo second-kind error rate: encode P' and test membership in D_P.
/// One code (and in adversarial mode one P) is drawn per call; the
/// per-trial acceptance probability does not depend on that draw.
template <FiniteField F>
double estimate_lambda2(const F& field, const CodeParams& params, std::uint64_t trials,
                        std::mt19937_64& rng, Lambda2Mode mode) {
    params.validate();
    detail::check_field(field, params);
    if (trials < 1) throw std::invalid_argument("estimate_lambda2: trials must be >= 1");
    const IdCode code = sample_code(field, params, rng);

    std::uint64_t accepted = 0;
    if (mode == Lambda2Mode::adversarial) {
        const Polynomial p = random_poly(field, params.k, rng);
        const std::span<const std::uint64_t> roots(code.points.data(), params.k - 1);
        const Polynomial p_prime = poly_add(field, p, roots_product(field, roots, params.k));
        const std::vector<EncodedMessage> decoding = encoding_set(field, code, p);
        for (std::uint64_t t = 0; t < trials; ++t) {
            const EncodedMessage x = encode(field, code, p_prime, rng);
            if (x.value == decoding[x.index - 1].value) ++accepted;
        }
    } else {
        for (std::uint64_t t = 0; t < trials; ++t) {
            const Polynomial p = random_poly(field, params.k, rng);
            Polynomial p_prime = random_poly(field, params.k, rng);
            while (p_prime == p) p_prime = random_poly(field, params.k, rng);
            const EncodedMessage x = encode(field, code, p_prime, rng);
            if (in_decoding_set(field, code, p, x)) ++accepted;
        }
    }
    return static_cast<double>(accepted) / static_cast<double>(trials);
}

/// Monte Carlo first-kind error rate: encode P and test membership in its
/// own decoding set. Identically zero on the noiseless channel.
template <FiniteField F>
double estimate_lambda1(const F& field, const CodeParams& params, std::uint64_t trials,
                        std::mt19937_64& rng) {
    params.validate();
    detail::check_field(field, params);
    if (trials < 1) throw std::invalid_argument("estimate_lambda1: trials must be >= 1");
    const IdCode code = sample_code(field, params, rng);
    std::uint64_t rejected = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const Polynomial p = random_poly(field, params.k, rng);
        if (!in_decoding_set(field, code, p, encode(field, code, p, rng))) ++rejected;
    }
    return static_cast<double>(rejected) / static_cast<double>(trials);
}

}  // namespace idcre
