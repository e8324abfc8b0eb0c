#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "idcre/field.hpp"

namespace idcre {

/// A polynomial over GF(q) stored as exactly k coefficients x_0..x_{k-1}
/// (constant term first, high zeros allowed), so the formal degree is < k.
struct Polynomial {
    std::vector<std::uint64_t> coeffs;

    std::uint32_t dimension() const { return static_cast<std::uint32_t>(coeffs.size()); }

    friend bool operator==(const Polynomial&, const Polynomial&) = default;
};

/// Horner evaluation of P at x.
template <FiniteField F>
std::uint64_t poly_eval(const F& field, const Polynomial& p, std::uint64_t x) {
    std::uint64_t acc = field.zero();
    for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it)
        acc = field.add(field.mul(acc, x), *it);
    return acc;
}

/// Uniform polynomial of dimension k (all q^k coefficient vectors equally likely).
template <FiniteField F>
Polynomial random_poly(const F& field, std::uint32_t k, std::mt19937_64& rng) {
    Polynomial p;
    p.coeffs.reserve(k);
    for (std::uint32_t i = 0; i < k; ++i) p.coeffs.push_back(field.sample(rng));
    return p;
}

template <FiniteField F>
Polynomial poly_add(const F& field, const Polynomial& a, const Polynomial& b) {
    if (a.coeffs.size() != b.coeffs.size())
        throw std::invalid_argument("poly_add: dimension mismatch");
    Polynomial r = a;
    for (std::size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] = field.add(r.coeffs[i], b.coeffs[i]);
    return r;
}

/// prod_{r in roots} (X - r), padded with high zeros to dimension k.
/// Requires k > roots.size() so the product fits.
template <FiniteField F>
Polynomial roots_product(const F& field, std::span<const std::uint64_t> roots, std::uint32_t k) {
    if (k <= roots.size()) throw std::invalid_argument("roots_product: dimension too small");
    std::vector<std::uint64_t> c{field.one()};
    for (std::uint64_t r : roots) {
        c.push_back(field.zero());
        const std::uint64_t nr = field.neg(r);
        for (std::size_t i = c.size(); i-- > 1;) c[i] = field.add(field.mul(c[i], nr), c[i - 1]);
        c[0] = field.mul(c[0], nr);
    }
    c.resize(k, field.zero());
    Polynomial p;
    p.coeffs = std::move(c);
    return p;
}

/// Unique polynomial of dimension m = xs.size() through the points
/// (xs[i], vs[i]), xs pairwise distinct, by Newton's divided differences.
template <FiniteField F>
Polynomial interpolate(const F& field, std::span<const std::uint64_t> xs,
                       std::span<const std::uint64_t> vs) {
    const std::size_t m = xs.size();
    if (m == 0 || vs.size() != m) throw std::invalid_argument("interpolate: bad point set");
    std::vector<std::uint64_t> dd(vs.begin(), vs.end());
    for (std::size_t level = 1; level < m; ++level) {
        for (std::size_t i = m - 1; i >= level; --i) {
            const std::uint64_t dx = field.sub(xs[i], xs[i - level]);
            if (dx == field.zero()) throw std::invalid_argument("interpolate: repeated point");
            dd[i] = field.mul(field.sub(dd[i], dd[i - 1]), field.inv(dx));
        }
    }
    // expand the Newton form to monomial coefficients
    std::vector<std::uint64_t> c(m, field.zero());
    for (std::size_t i = m; i-- > 0;) {
        // c <- c*(X - xs[i]) + dd[i]
        for (std::size_t j = m - 1; j >= 1; --j)
            c[j] = field.add(field.mul(c[j], field.neg(xs[i])), c[j - 1]);
        c[0] = field.mul(c[0], field.neg(xs[i]));
        c[0] = field.add(c[0], dd[i]);
    }
    Polynomial p;
    p.coeffs = std::move(c);
    return p;
}

}  // namespace idcre
