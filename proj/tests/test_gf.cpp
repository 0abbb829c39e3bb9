#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>

#include "mdlab/gf.hpp"

using namespace mdlab;
using namespace mdlab::gf;

namespace {

FieldVector fv(std::vector<std::uint8_t> v, std::uint32_t q) { return FieldVector(std::move(v), q); }

// entrywise naive multiply, independent of the library path
FieldVector naive_mul(const FieldMatrix& m, const FieldVector& u) {
    FieldVector out(m.cols(), m.modulus());
    for (std::size_t c = 0; c < m.cols(); ++c) {
        std::uint64_t acc = 0;
        for (std::size_t r = 0; r < m.rows(); ++r) acc += std::uint64_t(u[r]) * m.at(r, c);
        out.set(c, std::uint32_t(acc % m.modulus()));
    }
    return out;
}

// is the row subset linearly independent? checks every nonzero combination
bool subset_independent_f2(const FieldMatrix& m, unsigned mask) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < m.rows(); ++r)
        if (mask & (1u << r)) rows.push_back(r);
    for (unsigned combo = 1; combo < (1u << rows.size()); ++combo) {
        std::vector<std::uint8_t> acc(m.cols(), 0);
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (combo & (1u << i))
                for (std::size_t c = 0; c < m.cols(); ++c) acc[c] ^= m.at(rows[i], c);
        bool zero = true;
        for (auto v : acc) zero = zero && v == 0;
        if (zero) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("vec_add basics") {
    CHECK(vec_add(fv({1, 0, 1}, 2), fv({1, 1, 1}, 2)) == fv({0, 1, 0}, 2));
    auto v = fv({1, 2, 0, 2}, 3);
    CHECK(vec_add(v, FieldVector(4, 3)) == v);
    CHECK(vec_add(fv({1, 2}, 3), fv({2, 2}, 3)) == fv({0, 1}, 3));
    CHECK_THROWS_AS(vec_add(fv({1}, 2), fv({1, 0}, 2)), std::invalid_argument);
    CHECK_THROWS_AS(vec_add(fv({1, 1}, 2), fv({1, 1}, 3)), std::invalid_argument);
}

TEST_CASE("mat_vec_mul basics and oracle") {
    auto id = FieldMatrix::identity(4, 5);
    auto u = fv({1, 4, 0, 3}, 5);
    CHECK(mat_vec_mul(id, u) == u);
    auto g = random_matrix(3, 5, 2, 7);
    CHECK(mat_vec_mul(g, FieldVector(3, 2)) == FieldVector(5, 2));
    CHECK(mat_vec_mul(g, fv({1, 1, 0}, 2)) == naive_mul(g, fv({1, 1, 0}, 2)));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto m = random_matrix(4, 6, 3, seed);
        auto x = random_vector(4, 3, seed ^ 0xabc);
        CHECK(mat_vec_mul(m, x) == naive_mul(m, x));
    }
    CHECK_THROWS_AS(mat_vec_mul(g, fv({1, 1}, 2)), std::invalid_argument);
}

TEST_CASE("rank basics and exhaustive-subset oracle") {
    CHECK(rank(FieldMatrix::identity(5, 2)) == 5);
    CHECK(rank(FieldMatrix(3, 4, 7)) == 0);
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        auto m = random_matrix(4, 6, 2, seed);
        std::size_t best = 0;
        for (unsigned mask = 0; mask < 16; ++mask) {
            if (subset_independent_f2(m, mask)) best = std::max<std::size_t>(best, std::size_t(__builtin_popcount(mask)));
        }
        CHECK(rank(m) == best);
    }
}

TEST_CASE("rank properties") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto g = random_matrix(5, 7, 3, seed);
        const auto rk = rank(g);
        CHECK(rk <= 5);
        CHECK(rank(g.stacked(g)) == rk);
    }
}

TEST_CASE("random generation determinism and degenerate shapes") {
    CHECK(random_matrix(3, 4, 5, 99) == random_matrix(3, 4, 5, 99));
    CHECK(random_vector(9, 2, 1) == random_vector(9, 2, 1));
    CHECK(random_matrix(3, 4, 5, 99).at(0, 0) == random_matrix(3, 4, 5, 99).at(0, 0));
    auto empty = random_matrix(0, 6, 2, 5);
    CHECK(empty.rows() == 0);
    CHECK(rank(empty) == 0);
    CHECK_THROWS_AS(random_matrix(2, 2, 4, 0), std::invalid_argument);  // non-prime modulus
    CHECK_THROWS_AS(FieldVector(3, 9), std::invalid_argument);
}

TEST_CASE("uniformity: entry frequencies within 3 sigma") {
    const std::uint32_t q = 5;
    const std::size_t draws = 100000;
    auto v = random_vector(draws, q, 2024);
    std::vector<std::size_t> counts(q, 0);
    for (std::size_t i = 0; i < draws; ++i) counts[v[i]]++;
    const double np = double(draws) / q;
    const double sigma = std::sqrt(np * (1.0 - 1.0 / q));
    for (auto c : counts) CHECK(std::abs(double(c) - np) <= 3 * sigma);
}

TEST_CASE("algebraic laws, randomized") {
    Rng rng(123);
    for (int it = 0; it < 1000; ++it) {
        const std::uint32_t q = (it % 3 == 0) ? 2 : (it % 3 == 1) ? 3 : 7;
        const std::size_t n = 1 + rng.below(8);
        auto a = random_vector(n, q, rng.next());
        auto b = random_vector(n, q, rng.next());
        auto c = random_vector(n, q, rng.next());
        CHECK(vec_add(vec_add(a, b), c) == vec_add(a, vec_add(b, c)));
        CHECK(vec_add(a, FieldVector(n, q)) == a);
        const std::uint32_t alpha = rng.field_elem(q);
        CHECK(scalar_mul(alpha, vec_add(a, b)) == vec_add(scalar_mul(alpha, a), scalar_mul(alpha, b)));
    }
}

TEST_CASE("mat_vec_mul linearity") {
    Rng rng(5);
    for (int it = 0; it < 200; ++it) {
        const std::uint32_t q = it % 2 ? 2 : 5;
        auto g = random_matrix(4, 9, q, rng.next());
        auto u1 = random_vector(4, q, rng.next());
        auto u2 = random_vector(4, q, rng.next());
        CHECK(mat_vec_mul(g, vec_add(u1, u2)) == vec_add(mat_vec_mul(g, u1), mat_vec_mul(g, u2)));
    }
}

TEST_CASE("bit-packed F2 path agrees with generic") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto m = random_matrix(6, 11, 2, seed);
        Gf2Matrix packed(m);
        // generic elimination on a non-F2-shortcut path: recompute via the q=3-style code
        // by checking against the subset oracle instead
        std::size_t best = 0;
        for (unsigned mask = 0; mask < 64; ++mask)
            if (subset_independent_f2(m, mask)) best = std::max<std::size_t>(best, std::size_t(__builtin_popcount(mask)));
        CHECK(packed.rank() == best);
        CHECK(rank(m) == best);
        for (std::size_t r = 0; r < m.rows(); ++r)
            for (std::size_t c = 0; c < m.cols(); ++c) CHECK(packed.get(r, c) == (m.at(r, c) == 1));
    }
}
